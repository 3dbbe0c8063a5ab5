#include "giftsmith/model.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace giftsmith {

Diagnostic make_error(std::string code, std::string message,
                      std::optional<int> line, std::optional<int> column)
{
    return {Severity::Error, std::move(code), std::move(message), line, column};
}

Diagnostic make_warning(std::string code, std::string message,
                        std::optional<int> line, std::optional<int> column)
{
    return {Severity::Warning, std::move(code), std::move(message), line, column};
}

bool has_errors(const std::vector<Diagnostic>& diags)
{
    return count_errors(diags) > 0;
}

std::size_t count_errors(const std::vector<Diagnostic>& diags)
{
    return static_cast<std::size_t>(std::count_if(
        diags.begin(), diags.end(),
        [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

std::size_t count_warnings(const std::vector<Diagnostic>& diags)
{
    return diags.size() - count_errors(diags);
}

std::string format_diagnostic(const Diagnostic& d)
{
    std::string out;
    if (d.line) {
        out += "line " + std::to_string(*d.line);
        if (d.column)
            out += ", column " + std::to_string(*d.column);
        out += ": ";
    }
    out += d.severity == Severity::Error ? "error" : "warning";
    out += " [" + d.code + "]: " + d.message;
    return out;
}

int type_code(QuestionType t)
{
    return static_cast<int>(t);
}

std::optional<QuestionType> type_from_code(int code)
{
    if (code < 1 || code > 6)
        return std::nullopt;
    return static_cast<QuestionType>(code);
}

std::string_view type_name(QuestionType t)
{
    switch (t) {
    case QuestionType::TrueFalse: return "true/false";
    case QuestionType::MultipleChoiceSingle: return "multiple choice";
    case QuestionType::MultipleResponse: return "multiple response";
    case QuestionType::ShortAnswer: return "fill in the blank";
    case QuestionType::Matching: return "matching";
    case QuestionType::Numeric: return "numeric";
    }
    return "unknown";
}

char marker_symbol(Marker m)
{
    return m == Marker::Correct ? '=' : '~';
}

std::optional<Marker> marker_from_symbol(char c)
{
    if (c == '=')
        return Marker::Correct;
    if (c == '~')
        return Marker::Wrong;
    return std::nullopt;
}

std::string_view format_name(TextFormat f)
{
    switch (f) {
    case TextFormat::Html: return "html";
    case TextFormat::Markdown: return "markdown";
    case TextFormat::Plain: return "plain";
    case TextFormat::Moodle: return "moodle";
    }
    return "plain";
}

std::optional<TextFormat> format_from_name(std::string_view name)
{
    for (auto f : {TextFormat::Html, TextFormat::Markdown, TextFormat::Plain,
                   TextFormat::Moodle})
        if (format_name(f) == name)
            return f;
    return std::nullopt;
}

std::string_view dialect_name(Dialect d)
{
    return d == Dialect::Paper ? "paper" : "moodle";
}

std::optional<Dialect> dialect_from_name(std::string_view name)
{
    if (name == "paper")
        return Dialect::Paper;
    if (name == "moodle")
        return Dialect::Moodle;
    return std::nullopt;
}

namespace {

bool near(double a, double b, double tol)
{
    return a == b || std::fabs(a - b) <= tol;
}

bool near(const std::optional<double>& a, const std::optional<double>& b, double tol)
{
    if (a.has_value() != b.has_value())
        return false;
    return !a || near(*a, *b, tol);
}

bool near(const Choice& a, const Choice& b, double tol)
{
    return a.text == b.text && a.correct == b.correct && a.feedback == b.feedback &&
           near(a.weight, b.weight, tol);
}

bool near(const NumericAnswer& a, const NumericAnswer& b, double tol)
{
    if (a.feedback != b.feedback || !near(a.weight, b.weight, tol) ||
        a.spec.index() != b.spec.index())
        return false;
    if (auto* p = std::get_if<NumericPoint>(&a.spec)) {
        auto& q = std::get<NumericPoint>(b.spec);
        return near(p->value, q.value, tol) && near(p->tolerance, q.tolerance, tol);
    }
    auto& r = std::get<NumericRange>(a.spec);
    auto& s = std::get<NumericRange>(b.spec);
    return near(r.min, s.min, tol) && near(r.max, s.max, tol);
}

template <class T>
bool near_seq(const std::vector<T>& a, const std::vector<T>& b, double tol)
{
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(),
                      [tol](const T& x, const T& y) { return near(x, y, tol); });
}

} // namespace

bool approx_equal(const Question& a, const Question& b, double tol)
{
    if (a.title != b.title || a.format != b.format || a.stem_prefix != b.stem_prefix ||
        a.stem_suffix != b.stem_suffix || a.general_feedback != b.general_feedback ||
        a.body.index() != b.body.index())
        return false;
    return std::visit(
        [&](const auto& lhs) -> bool {
            using T = std::decay_t<decltype(lhs)>;
            const auto& rhs = std::get<T>(b.body);
            if constexpr (std::is_same_v<T, ChoicesBody>)
                return near_seq(lhs.choices, rhs.choices, tol);
            else if constexpr (std::is_same_v<T, ShortAnswerBody>)
                return near_seq(lhs.answers, rhs.answers, tol);
            else if constexpr (std::is_same_v<T, NumericBody>)
                return near_seq(lhs.answers, rhs.answers, tol);
            else
                return lhs == rhs;
        },
        a.body);
}

std::vector<Marker> markers_from_flags(std::span<const bool> flags)
{
    if (flags.empty())
        throw Error(ErrorCode::InvalidArgument, "no correctness flags given",
                    {make_error("empty-flags", "no correctness flags given")});
    std::vector<Marker> out;
    out.reserve(flags.size());
    for (bool f : flags)
        out.push_back(f ? Marker::Correct : Marker::Wrong);
    return out;
}

std::vector<Marker> markers_from_flags(std::initializer_list<bool> flags)
{
    return markers_from_flags(std::span<const bool>(flags.begin(), flags.size()));
}

std::string pattern_from_flags(std::span<const bool> flags)
{
    if (flags.empty())
        throw Error(ErrorCode::InvalidArgument, "no correctness flags given",
                    {make_error("empty-flags", "no correctness flags given")});
    std::string out;
    out.reserve(flags.size());
    for (bool f : flags)
        out.push_back(f ? 'T' : 'F');
    return out;
}

std::string pattern_from_flags(std::initializer_list<bool> flags)
{
    return pattern_from_flags(std::span<const bool>(flags.begin(), flags.size()));
}

std::vector<LookupRow> generate_lookup_table()
{
    std::vector<LookupRow> rows;
    rows.reserve(16);
    for (int index = 0; index < 16; ++index) {
        LookupRow row;
        row.index = index;
        for (int i = 0; i < 4; ++i)
            row.flags[i] = (index >> (3 - i)) & 1;
        auto markers = markers_from_flags(std::span<const bool>(row.flags));
        std::copy(markers.begin(), markers.end(), row.markers.begin());
        row.pattern = pattern_from_flags(std::span<const bool>(row.flags));
        rows.push_back(std::move(row));
    }
    return rows;
}

bool has_correct_choice(const ChoicesBody& body)
{
    return std::any_of(body.choices.begin(), body.choices.end(), [](const Choice& c) {
        return c.correct || (c.weight && *c.weight > 0);
    });
}

QuestionType classify(const Question& q)
{
    struct Visitor {
        QuestionType operator()(const TrueFalseBody&) const { return QuestionType::TrueFalse; }
        QuestionType operator()(const ShortAnswerBody&) const { return QuestionType::ShortAnswer; }
        QuestionType operator()(const MatchingBody&) const { return QuestionType::Matching; }
        QuestionType operator()(const NumericBody&) const { return QuestionType::Numeric; }
        QuestionType operator()(const ChoicesBody& b) const
        {
            bool weighted = std::any_of(b.choices.begin(), b.choices.end(),
                                        [](const Choice& c) { return c.weight.has_value(); });
            auto correct = std::count_if(b.choices.begin(), b.choices.end(),
                                         [](const Choice& c) { return c.correct; });
            if (weighted || correct >= 2)
                return QuestionType::MultipleResponse;
            if (correct == 1)
                return QuestionType::MultipleChoiceSingle;
            throw Error(ErrorCode::Validation, "choice question has no correct answer",
                        {make_error("no-correct-answer", "no correct answer")});
        }
    };
    return std::visit(Visitor{}, q.body);
}

std::pair<double, double> numeric_interval(const NumericSpec& spec)
{
    if (auto* p = std::get_if<NumericPoint>(&spec))
        return {p->value - p->tolerance, p->value + p->tolerance};
    auto& r = std::get<NumericRange>(spec);
    return {r.min, r.max};
}

namespace {

class Validator {
public:
    Validator(const Question& q, Dialect dialect) : q_(q), dialect_(dialect) {}

    std::vector<Diagnostic> run()
    {
        if (detail::is_blank(q_.stem_prefix))
            error("empty-stem", "question text is empty");
        if (!q_.title && !q_.format && detail::trim(q_.stem_prefix).starts_with("//"))
            error("stem-comment",
                  "untitled question text starting with '//' would be read as a comment");
        if (!detail::is_blank(q_.stem_suffix) &&
            !std::holds_alternative<ChoicesBody>(q_.body) &&
            !std::holds_alternative<ShortAnswerBody>(q_.body))
            error("suffix-not-allowed",
                  "text after the answer block is only allowed for missing-word questions");
        std::visit([this](const auto& b) { check(b); }, q_.body);
        return std::move(out_);
    }

private:
    void error(std::string code, std::string msg)
    {
        out_.push_back(make_error(std::move(code), std::move(msg)));
    }
    void warning(std::string code, std::string msg)
    {
        out_.push_back(make_warning(std::move(code), std::move(msg)));
    }

    void check_weight(const std::optional<double>& w)
    {
        if (w && (!std::isfinite(*w) || *w < -100 || *w > 100))
            error("weight-out-of-range", "answer weight must be within [-100, 100]");
    }

    void check_answer_text(const std::string& text, std::string_view what)
    {
        if (detail::is_blank(text)) {
            error("empty-answer", std::string(what) + " text is empty");
            return;
        }
        if (text.find("->") != std::string::npos)
            error("arrow-in-answer",
                  std::string(what) + " text contains '->', which marks a matching pair");
        if (detail::trim(text).front() == '%')
            error("leading-percent",
                  std::string(what) + " text starting with '%' would be read as a weight");
    }

    void check_duplicates(const std::vector<Choice>& cs)
    {
        std::set<std::string> seen;
        for (const auto& c : cs)
            if (!seen.insert(detail::trim(c.text)).second) {
                warning("duplicate-choice", "duplicate answer text \"" + c.text + "\"");
            }
    }

    void check(const TrueFalseBody&) {}

    void check(const ChoicesBody& b)
    {
        for (const auto& c : b.choices) {
            check_answer_text(c.text, "choice");
            check_weight(c.weight);
        }
        if (!has_correct_choice(b))
            error("no-correct-answer", "no correct answer");
        else if (std::all_of(b.choices.begin(), b.choices.end(),
                             [](const Choice& c) { return c.correct; }))
            error("no-distractor",
                  "every choice is marked correct; the block would read as a short answer");
        auto correct = std::count_if(b.choices.begin(), b.choices.end(),
                                     [](const Choice& c) { return c.correct; });
        if (dialect_ == Dialect::Moodle && correct >= 2)
            warning("weights-rewritten",
                    "multiple correct choices will be exported as weighted '~' entries");
        check_duplicates(b.choices);
    }

    void check(const ShortAnswerBody& b)
    {
        if (b.answers.empty())
            error("no-answers", "short answer question has no accepted answers");
        for (const auto& c : b.answers) {
            check_answer_text(c.text, "answer");
            check_weight(c.weight);
            if (!c.correct)
                error("short-answer-wrong", "short answer entries must all be marked correct");
        }
        check_duplicates(b.answers);
    }

    void check(const MatchingBody& b)
    {
        if (b.pairs.size() < 2)
            error("matching-too-few", "matching needs at least 2 pairs");
        else if (b.pairs.size() < 3 && dialect_ == Dialect::Moodle)
            warning("matching-few-pairs", "matching with fewer than 3 pairs");
        for (const auto& p : b.pairs) {
            if (detail::is_blank(p.left) || detail::is_blank(p.right))
                error("empty-pair-side", "matching pair has an empty side");
            else {
                if (p.left.find("->") != std::string::npos)
                    error("arrow-in-answer", "matching left side contains '->'");
                if (detail::trim(p.left).front() == '%')
                    error("leading-percent",
                          "matching left side starting with '%' would be read as a weight");
            }
            if (p.feedback)
                error("matching-feedback", "matching pairs cannot carry feedback");
        }
    }

    void check(const NumericBody& b)
    {
        if (b.answers.empty())
            error("numeric-empty", "numeric question has no answers");
        for (const auto& a : b.answers) {
            check_weight(a.weight);
            if (auto* p = std::get_if<NumericPoint>(&a.spec)) {
                if (!std::isfinite(p->value) || !std::isfinite(p->tolerance) ||
                    p->tolerance < 0)
                    error("numeric-invalid", "numeric tolerance must be finite and >= 0");
            } else {
                auto& r = std::get<NumericRange>(a.spec);
                if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max)
                    error("numeric-invalid", "numeric range needs finite min <= max");
            }
        }
    }

    const Question& q_;
    Dialect dialect_;
    std::vector<Diagnostic> out_;
};

} // namespace

std::vector<Diagnostic> validate(const Question& q, Dialect dialect)
{
    return Validator(q, dialect).run();
}

} // namespace giftsmith
