#ifndef GIFTSMITH_WRITER_HPP
#define GIFTSMITH_WRITER_HPP

#include "giftsmith/model.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace giftsmith {

enum class EscapeContext { Stem, Answer, Feedback };

std::string escape_text(std::string_view s, EscapeContext context);

struct WriteOptions {
    // Wrap the question text at this column; off by default.
    std::optional<int> wrap_width;
};

/// Canonical GIFT text for one question, without a trailing newline.
/// Throws Error(Validation) when validate() reports errors.
std::string serialize_question(const Question& q, Dialect dialect = Dialect::Paper,
                               const WriteOptions& opts = {});

struct DocumentEntry {
    Question question;
    std::optional<std::string> category;
};

/// Questions separated by one blank line, `$CATEGORY` lines on category
/// changes, a single trailing newline. Empty input gives "".
std::string serialize_document(std::span<const DocumentEntry> questions,
                               Dialect dialect = Dialect::Paper,
                               const WriteOptions& opts = {});

/// The question exactly as its canonical text reads back: whitespace runs
/// collapsed, empty optional texts dropped and, under the moodle dialect,
/// multiple `=` answers rewritten to weighted `~` answers.
Question canonical_form(const Question& q, Dialect dialect);

/// Nearest entry of the fixed percentage list accepted by strict consumers.
double nearest_moodle_fraction(double percent);

} // namespace giftsmith

#endif
