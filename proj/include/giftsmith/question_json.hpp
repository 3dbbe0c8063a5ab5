#ifndef GIFTSMITH_QUESTION_JSON_HPP
#define GIFTSMITH_QUESTION_JSON_HPP

#include "giftsmith/diagnostic.hpp"
#include "giftsmith/model.hpp"

#include <json.hpp>

namespace giftsmith {

// JSON form of a Question, shared by the bank file and the HTTP API:
//
//   {"title": "Q2", "format": "html", "stem": "...", "stem_suffix": "...",
//    "type": "choices", "choices": [{"text": "yellow", "correct": true,
//    "weight": 50, "feedback": "..."}], "general_feedback": "..."}
//
// "type" is one of true_false (with "answer", "feedback_wrong",
// "feedback_right"), choices ("choices"), short_answer ("answers"),
// matching ("pairs": [{"left", "right"}]) and numeric ("numeric":
// [{"value", "tolerance"} or {"min", "max"}, plus "weight", "feedback"]).
// Optional members are omitted when absent.

nlohmann::json question_to_json(const Question& q);

/// Throws Error(InvalidArgument) naming the offending member.
Question question_from_json(const nlohmann::json& j);

nlohmann::json diagnostic_to_json(const Diagnostic& d);
nlohmann::json diagnostics_to_json(const std::vector<Diagnostic>& diags);

} // namespace giftsmith

#endif
