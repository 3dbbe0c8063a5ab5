#ifndef GIFTSMITH_PARSER_HPP
#define GIFTSMITH_PARSER_HPP

#include "giftsmith/diagnostic.hpp"
#include "giftsmith/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace giftsmith {

struct ParsedQuestion {
    Question question;
    std::optional<std::string> category;
    int line = 0; // 1-based line where the question's block starts
};

struct ParseResult {
    std::vector<ParsedQuestion> questions;
    std::vector<Diagnostic> diagnostics;
};

/// Parses a whole GIFT document. Never throws on content: each block that
/// fails to parse or validate is reported and skipped, so `questions` only
/// holds questions free of error diagnostics.
ParseResult parse_document(std::string_view text, Dialect dialect = Dialect::Paper);

/// Parses one comment-free question block. Throws Error(Parse) carrying the
/// diagnostics when the block is malformed.
Question parse_question(std::string_view block, Dialect dialect = Dialect::Paper);

/// Non-throwing form; appends warnings and errors to `diags`.
std::optional<Question> parse_question(std::string_view block, Dialect dialect,
                                       std::vector<Diagnostic>& diags);

struct AnswerBlock {
    Body body;
    std::optional<std::string> general_feedback;
};

/// Parses the text between `{` and `}`. Throws Error(Parse) on malformed
/// content.
AnswerBlock parse_answer_block(std::string_view content, Dialect dialect = Dialect::Paper);

std::optional<AnswerBlock> parse_answer_block(std::string_view content, Dialect dialect,
                                              std::vector<Diagnostic>& diags);

/// Resolves GIFT escapes. Unknown escapes are kept verbatim and, when
/// `warnings` is given, reported there.
std::string unescape_text(std::string_view raw, std::vector<Diagnostic>* warnings = nullptr);

} // namespace giftsmith

#endif
