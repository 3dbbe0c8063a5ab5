#include "giftsmith/writer.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace giftsmith {

namespace {

constexpr std::array<double, 20> kMoodleFractions = {
    100, 90, 83.333, 80, 75, 70, 66.666, 60, 50, 40,
    33.333, 30, 25, 20, 16.666, 14.2857, 12.5, 11.111, 10, 5,
};

bool is_layout_space(char c)
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

/// Collapses runs of non-newline whitespace and trims them at the ends.
/// Newline characters are content; the writer escapes them as `\n`.
std::string canonical_text(std::string_view s)
{
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (is_layout_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending)
            out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

std::optional<std::string> canonical_optional(const std::optional<std::string>& s)
{
    if (!s)
        return std::nullopt;
    auto t = canonical_text(std::string_view(*s));
    if (t.empty())
        return std::nullopt;
    return t;
}

void canonicalize(Choice& c)
{
    c.text = canonical_text(c.text);
    c.feedback = canonical_optional(c.feedback);
}

std::string weight_prefix(const std::optional<double>& w)
{
    return w ? "%" + detail::format_number(*w) + "%" : std::string();
}

std::string numeric_text(const NumericSpec& spec)
{
    if (auto* p = std::get_if<NumericPoint>(&spec)) {
        if (p->tolerance == 0)
            return detail::format_number(p->value);
        return detail::format_number(p->value) + ":" + detail::format_number(p->tolerance);
    }
    auto& r = std::get<NumericRange>(spec);
    return detail::format_number(r.min) + ".." + detail::format_number(r.max);
}

std::string feedback_suffix(const std::optional<std::string>& fb)
{
    return fb ? " # " + escape_text(*fb, EscapeContext::Feedback) : std::string();
}

class QuestionWriter {
public:
    QuestionWriter(const Question& q, Dialect dialect, const WriteOptions& opts)
        : q_(q), dialect_(dialect), opts_(opts)
    {
    }

    std::string write()
    {
        std::string out = head();
        out += " {";
        std::visit([&](const auto& b) { body(b, out); }, q_.body);
        out += "}";
        if (!q_.stem_suffix.empty())
            out += " " + escape_text(q_.stem_suffix, EscapeContext::Stem);
        return out;
    }

private:
    std::string head() const
    {
        std::string prefix;
        if (q_.title)
            prefix += "::" + escape_text(*q_.title, EscapeContext::Stem) + ":: ";
        if (q_.format)
            prefix += "[" + std::string(format_name(*q_.format)) + "]";
        auto stem = escape_text(q_.stem_prefix, EscapeContext::Stem);
        if (!opts_.wrap_width || *opts_.wrap_width <= 0)
            return prefix + stem;

        // Break at spaces; never start a line with "//", which reads as a comment.
        auto width = static_cast<std::size_t>(*opts_.wrap_width);
        std::string out = prefix;
        std::size_t line_len = prefix.size();
        std::size_t pos = 0;
        bool first = true;
        while (pos <= stem.size()) {
            auto sp = stem.find(' ', pos);
            auto word = stem.substr(pos, sp == std::string::npos ? std::string::npos : sp - pos);
            if (!first) {
                if (line_len + 1 + word.size() > width && !word.starts_with("//")) {
                    out += '\n';
                    line_len = 0;
                } else {
                    out += ' ';
                    ++line_len;
                }
            }
            out += word;
            line_len += word.size();
            first = false;
            if (sp == std::string::npos)
                break;
            pos = sp + 1;
        }
        return out;
    }

    /// General feedback as the last line of a multi-line block.
    std::string general_line() const
    {
        if (!q_.general_feedback)
            return {};
        auto text = escape_text(*q_.general_feedback, EscapeContext::Feedback);
        return dialect_ == Dialect::Paper ? "# " + text + "\n" : "####" + text + "\n";
    }

    /// General feedback for blocks written on the opening line.
    std::string general_inline() const
    {
        if (!q_.general_feedback)
            return {};
        if (dialect_ == Dialect::Paper)
            return "\n" + general_line();
        return " ####" + escape_text(*q_.general_feedback, EscapeContext::Feedback);
    }

    void body(const TrueFalseBody& b, std::string& out) const
    {
        out += b.answer ? "T" : "F";
        if (b.feedback_wrong || b.feedback_right) {
            out += " #";
            if (b.feedback_wrong)
                out += " " + escape_text(*b.feedback_wrong, EscapeContext::Feedback);
        }
        if (b.feedback_right)
            out += " # " + escape_text(*b.feedback_right, EscapeContext::Feedback);
        out += general_inline();
    }

    void choice_lines(const std::vector<Choice>& cs, std::string& out) const
    {
        out += "\n";
        for (const auto& c : cs) {
            out += c.correct ? '=' : '~';
            out += weight_prefix(c.weight);
            out += " " + escape_text(c.text, EscapeContext::Answer);
            out += feedback_suffix(c.feedback) + "\n";
        }
        out += general_line();
    }

    void body(const ChoicesBody& b, std::string& out) const { choice_lines(b.choices, out); }

    void body(const ShortAnswerBody& b, std::string& out) const { choice_lines(b.answers, out); }

    void body(const MatchingBody& b, std::string& out) const
    {
        out += "\n";
        for (const auto& p : b.pairs)
            out += "= " + escape_text(p.left, EscapeContext::Answer) + " -> " +
                   escape_text(p.right, EscapeContext::Answer) + "\n";
        out += general_line();
    }

    void body(const NumericBody& b, std::string& out) const
    {
        out += "#";
        if (b.answers.size() == 1 && !b.answers[0].weight && !b.answers[0].feedback) {
            out += numeric_text(b.answers[0].spec);
            out += general_inline();
            return;
        }
        out += "\n";
        for (const auto& a : b.answers)
            out += "=" + weight_prefix(a.weight) + " " + numeric_text(a.spec) +
                   feedback_suffix(a.feedback) + "\n";
        out += general_line();
    }

    const Question& q_;
    Dialect dialect_;
    const WriteOptions& opts_;
};

} // namespace

std::string escape_text(std::string_view s, EscapeContext context)
{
    std::string out;
    out.reserve(s.size() + 8);
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        bool special = false;
        switch (c) {
        case '{': case '}': case ':': case '\\':
            special = true;
            break;
        case '~': case '=': case '#':
            special = context != EscapeContext::Stem;
            break;
        case '[':
            special = context == EscapeContext::Stem && i == 0;
            break;
        case '\n':
            out += "\\n";
            continue;
        default:
            break;
        }
        if (special)
            out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

double nearest_moodle_fraction(double percent)
{
    return *std::min_element(kMoodleFractions.begin(), kMoodleFractions.end(),
                             [percent](double a, double b) {
                                 return std::fabs(a - percent) < std::fabs(b - percent);
                             });
}

Question canonical_form(const Question& q, Dialect dialect)
{
    Question c = q;
    c.title = canonical_optional(q.title);
    c.stem_prefix = canonical_text(q.stem_prefix);
    c.stem_suffix = canonical_text(q.stem_suffix);
    c.general_feedback = canonical_optional(q.general_feedback);

    struct Visitor {
        Dialect dialect;
        void operator()(TrueFalseBody& b) const
        {
            b.feedback_wrong = canonical_optional(b.feedback_wrong);
            b.feedback_right = canonical_optional(b.feedback_right);
        }
        void operator()(ChoicesBody& b) const
        {
            for (auto& ch : b.choices)
                canonicalize(ch);
            auto correct = std::count_if(b.choices.begin(), b.choices.end(),
                                         [](const Choice& ch) { return ch.correct; });
            if (dialect != Dialect::Moodle || correct < 2)
                return;
            double w = nearest_moodle_fraction(100.0 / static_cast<double>(correct));
            for (auto& ch : b.choices) {
                ch.weight = ch.correct ? w : -w;
                ch.correct = false;
            }
        }
        void operator()(ShortAnswerBody& b) const
        {
            for (auto& ch : b.answers)
                canonicalize(ch);
        }
        void operator()(MatchingBody& b) const
        {
            for (auto& p : b.pairs) {
                p.left = canonical_text(p.left);
                p.right = canonical_text(p.right);
                p.feedback = canonical_optional(p.feedback);
            }
        }
        void operator()(NumericBody& b) const
        {
            for (auto& a : b.answers)
                a.feedback = canonical_optional(a.feedback);
        }
    };
    std::visit(Visitor{dialect}, c.body);
    return c;
}

std::string serialize_question(const Question& q, Dialect dialect, const WriteOptions& opts)
{
    auto diags = validate(q, dialect);
    if (has_errors(diags))
        throw Error(ErrorCode::Validation, "question fails validation", std::move(diags));
    auto c = canonical_form(q, dialect);
    return QuestionWriter(c, dialect, opts).write();
}

std::string serialize_document(std::span<const DocumentEntry> questions, Dialect dialect,
                               const WriteOptions& opts)
{
    std::vector<std::string> chunks;
    std::optional<std::string> category;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const auto& e = questions[i];
        if (e.category && e.category != category) {
            category = e.category;
            chunks.push_back("$CATEGORY: " + detail::collapse_space(*e.category));
        }
        try {
            chunks.push_back(serialize_question(e.question, dialect, opts));
        } catch (const Error& err) {
            throw Error(err.code(), "question " + std::to_string(i + 1) + ": " + err.what(),
                        err.diagnostics());
        }
    }
    std::string out;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (i > 0)
            out += "\n\n";
        out += chunks[i];
    }
    if (!out.empty())
        out += "\n";
    return out;
}

} // namespace giftsmith
