#ifndef GIFTSMITH_MODEL_HPP
#define GIFTSMITH_MODEL_HPP

#include "giftsmith/diagnostic.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace giftsmith {

/// The six supported question kinds. The integer values are the stable
/// type codes stored in a bank and printed in exports.
enum class QuestionType : int {
    TrueFalse = 1,
    MultipleChoiceSingle = 2,
    MultipleResponse = 3,
    ShortAnswer = 4,
    Matching = 5,
    Numeric = 6,
};

int type_code(QuestionType t);
std::optional<QuestionType> type_from_code(int code);
std::string_view type_name(QuestionType t);

enum class Marker { Correct, Wrong };

/// `=` for Correct, `~` for Wrong.
char marker_symbol(Marker m);
std::optional<Marker> marker_from_symbol(char c);

enum class TextFormat { Html, Markdown, Plain, Moodle };

std::string_view format_name(TextFormat f);
std::optional<TextFormat> format_from_name(std::string_view name);

/// Output/input conventions. `Paper` writes multiple `=` for multiple
/// response and a trailing `# text` line for general feedback; `Moodle`
/// writes weighted `~` entries and `####text`.
enum class Dialect { Paper, Moodle };

std::string_view dialect_name(Dialect d);
std::optional<Dialect> dialect_from_name(std::string_view name);

struct Choice {
    std::string text;
    bool correct = false;
    std::optional<double> weight;
    std::optional<std::string> feedback;

    bool operator==(const Choice&) const = default;
};

struct MatchPair {
    std::string left;
    std::string right;
    // Never valid; kept so validation can report it on hand-built questions.
    std::optional<std::string> feedback;

    bool operator==(const MatchPair&) const = default;
};

struct NumericPoint {
    double value = 0;
    double tolerance = 0;
    bool operator==(const NumericPoint&) const = default;
};

struct NumericRange {
    double min = 0;
    double max = 0;
    bool operator==(const NumericRange&) const = default;
};

using NumericSpec = std::variant<NumericPoint, NumericRange>;

struct NumericAnswer {
    NumericSpec spec;
    std::optional<double> weight;
    std::optional<std::string> feedback;

    bool operator==(const NumericAnswer&) const = default;
};

struct TrueFalseBody {
    bool answer = true;
    std::optional<std::string> feedback_wrong;
    std::optional<std::string> feedback_right;
    bool operator==(const TrueFalseBody&) const = default;
};

struct ChoicesBody {
    std::vector<Choice> choices;
    bool operator==(const ChoicesBody&) const = default;
};

struct ShortAnswerBody {
    std::vector<Choice> answers;
    bool operator==(const ShortAnswerBody&) const = default;
};

struct MatchingBody {
    std::vector<MatchPair> pairs;
    bool operator==(const MatchingBody&) const = default;
};

struct NumericBody {
    std::vector<NumericAnswer> answers;
    bool operator==(const NumericBody&) const = default;
};

using Body = std::variant<TrueFalseBody, ChoicesBody, ShortAnswerBody,
                          MatchingBody, NumericBody>;

struct Question {
    std::optional<std::string> title;
    std::optional<TextFormat> format;
    std::string stem_prefix;
    // Text after the answer block; only missing-word questions have one.
    std::string stem_suffix;
    Body body;
    std::optional<std::string> general_feedback;

    bool operator==(const Question&) const = default;
};

/// Structural equality with weights and numeric values compared at `tol`.
bool approx_equal(const Question& a, const Question& b, double tol = 1e-9);

// Correctness flags -> GIFT markers.

std::vector<Marker> markers_from_flags(std::span<const bool> flags);
std::vector<Marker> markers_from_flags(std::initializer_list<bool> flags);

/// "FTFT"-style summary; position i is 'T' iff flags[i].
std::string pattern_from_flags(std::span<const bool> flags);
std::string pattern_from_flags(std::initializer_list<bool> flags);

struct LookupRow {
    int index = 0;
    std::array<bool, 4> flags{};
    std::array<Marker, 4> markers{};
    std::string pattern;
};

/// All sixteen four-option flag combinations, ordered by index with the
/// first option as the most significant bit.
std::vector<LookupRow> generate_lookup_table();

// Classification and validation.

/// Throws Error(Validation) for a choice set with no correct answer.
QuestionType classify(const Question& q);

std::vector<Diagnostic> validate(const Question& q, Dialect dialect);

std::pair<double, double> numeric_interval(const NumericSpec& spec);

/// True when some choice is marked correct or carries a positive weight.
bool has_correct_choice(const ChoicesBody& body);

} // namespace giftsmith

#endif
