#include "giftsmith/parser.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cctype>

namespace giftsmith {

namespace {

constexpr std::string_view kBom = "\xEF\xBB\xBF";

/// Maps byte offsets of a (possibly comment-stripped) block back to the
/// 1-based source line and column they came from.
class SourceMap {
public:
    SourceMap() = default;

    void add_line(std::size_t offset, int source_line)
    {
        starts_.push_back(offset);
        lines_.push_back(source_line);
    }

    std::pair<int, int> locate(std::size_t offset) const
    {
        if (starts_.empty())
            return {1, static_cast<int>(offset) + 1};
        auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
        auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - starts_.begin() - 1));
        return {lines_[idx], static_cast<int>(offset - starts_[idx]) + 1};
    }

    static SourceMap for_text(std::string_view text, int first_line = 1)
    {
        SourceMap map;
        map.add_line(0, first_line);
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n')
                map.add_line(i + 1, first_line + static_cast<int>(map.starts_.size()));
        return map;
    }

private:
    std::vector<std::size_t> starts_;
    std::vector<int> lines_;
};

std::string normalize_input(std::string_view text)
{
    if (text.starts_with(kBom))
        text.remove_prefix(kBom.size());
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
            continue;
        out.push_back(text[i]);
    }
    return out;
}

std::size_t find_unescaped(std::string_view s, char c, std::size_t from, std::size_t to)
{
    for (std::size_t i = from; i < to; ++i) {
        if (s[i] == '\\') {
            ++i;
            continue;
        }
        if (s[i] == c)
            return i;
    }
    return std::string_view::npos;
}

std::string upper(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

struct Segment {
    enum Kind { Eq, Tilde, Hash, Quad } kind;
    std::size_t marker; // offset of the marker character
    std::size_t begin;  // text after the marker
    std::size_t end;
    bool own_line;
};

struct Entry {
    Segment head;
    std::vector<Segment> hashes;
};

class BlockParser {
public:
    BlockParser(std::string_view text, const SourceMap& map, Dialect dialect,
                std::vector<Diagnostic>& diags)
        : s_(text), map_(map), dialect_(dialect), diags_(diags)
    {
    }

    std::optional<Question> parse_question()
    {
        Question q;
        std::size_t pos = skip_space(0, s_.size());
        if (pos >= s_.size()) {
            error("empty-block", "empty question block", 0);
            return std::nullopt;
        }

        if (s_[pos] == ':') {
            bool doubled = pos + 1 < s_.size() && s_[pos + 1] == ':';
            std::size_t open = pos;
            std::size_t title_begin = pos + (doubled ? 2 : 1);
            std::size_t close = title_begin;
            while (true) {
                close = find_unescaped(s_, ':', close, s_.size());
                if (close == std::string_view::npos)
                    break;
                if (!doubled || (close + 1 < s_.size() && s_[close + 1] == ':'))
                    break;
                ++close;
            }
            if (close == std::string_view::npos) {
                error("unterminated-title", "title is not closed with '::'", open);
                return std::nullopt;
            }
            if (!doubled)
                warning("single-colon-title", "title written as ':title:'; normalized to '::title::'",
                        open);
            auto title = text(title_begin, close);
            if (!title.empty())
                q.title = std::move(title);
            pos = skip_space(close + (doubled ? 2 : 1), s_.size());
        }

        if (pos < s_.size() && s_[pos] == '[') {
            auto rb = s_.find(']', pos);
            if (rb != std::string_view::npos) {
                if (auto f = format_from_name(s_.substr(pos + 1, rb - pos - 1))) {
                    q.format = f;
                    pos = rb + 1;
                }
            }
        }

        auto brace = find_unescaped(s_, '{', pos, s_.size());
        if (brace == std::string_view::npos) {
            error("no-answer-block", "no answer block '{...}' found", pos);
            return std::nullopt;
        }
        auto close = find_unescaped(s_, '}', brace + 1, s_.size());
        auto nested = find_unescaped(s_, '{', brace + 1, close == std::string_view::npos ? s_.size() : close);
        if (nested != std::string_view::npos) {
            error("nested-brace", "unescaped '{' inside an answer block", nested);
            return std::nullopt;
        }
        if (close == std::string_view::npos) {
            error("unterminated-answer-block", "answer block opened here is never closed", brace);
            return std::nullopt;
        }
        auto again = find_unescaped(s_, '{', close + 1, s_.size());
        if (again != std::string_view::npos) {
            error("multiple-answer-blocks", "only one answer block per question is supported", again);
            return std::nullopt;
        }

        q.stem_prefix = text(pos, brace);
        q.stem_suffix = text(close + 1, s_.size());

        auto answer = parse_answer(brace + 1, close);
        if (!answer)
            return std::nullopt;
        q.body = std::move(answer->body);
        q.general_feedback = std::move(answer->general_feedback);
        return q;
    }

    std::optional<AnswerBlock> parse_answer(std::size_t begin, std::size_t end)
    {
        content_begin_ = begin;
        content_end_ = end;
        if (detail::is_blank(s_.substr(begin, end - begin))) {
            error("essay-unsupported", "empty answer block (essay form) is not supported", begin);
            return std::nullopt;
        }

        std::size_t leading_end = begin;
        auto segments = tokenize(begin, end, leading_end);
        auto leading = detail::trim_view(s_.substr(begin, leading_end - begin));

        if (leading.empty()) {
            if (segments.front().kind == Segment::Hash)
                return parse_numeric(segments);
            if (segments.front().kind == Segment::Quad) {
                error("no-answers", "answer block holds only general feedback", segments.front().marker);
                return std::nullopt;
            }
            return parse_entries(segments);
        }

        auto word = upper(leading);
        bool any_entry = std::any_of(segments.begin(), segments.end(), [](const Segment& g) {
            return g.kind == Segment::Eq || g.kind == Segment::Tilde;
        });
        if (!any_entry && (word == "T" || word == "F" || word == "TRUE" || word == "FALSE"))
            return parse_true_false(word.front() == 'T', segments);

        error("text-before-marker", "answer text must start with '=', '~' or '#'",
              static_cast<std::size_t>(leading.data() - s_.data()));
        return std::nullopt;
    }

private:
    std::size_t skip_space(std::size_t pos, std::size_t end) const
    {
        while (pos < end && detail::is_space(s_[pos]))
            ++pos;
        return pos;
    }

    Diagnostic located(Diagnostic d, std::size_t offset) const
    {
        auto [line, col] = map_.locate(offset);
        d.line = line;
        d.column = col;
        return d;
    }

    void error(std::string code, std::string msg, std::size_t offset)
    {
        diags_.push_back(located(make_error(std::move(code), std::move(msg)), offset));
    }

    void warning(std::string code, std::string msg, std::size_t offset)
    {
        diags_.push_back(located(make_warning(std::move(code), std::move(msg)), offset));
    }

    /// Whitespace-collapsed and unescaped text of [begin, end).
    std::string text(std::size_t begin, std::size_t end)
    {
        std::vector<Diagnostic> w;
        auto out = unescape_text(detail::collapse_space(s_.substr(begin, end - begin)), &w);
        for (auto& d : w)
            diags_.push_back(located(std::move(d), begin));
        return out;
    }

    std::optional<std::string> optional_text(std::size_t begin, std::size_t end)
    {
        auto t = text(begin, end);
        if (t.empty())
            return std::nullopt;
        return t;
    }

    bool on_own_line(std::size_t marker) const
    {
        auto j = marker;
        while (j > content_begin_ && (s_[j - 1] == ' ' || s_[j - 1] == '\t'))
            --j;
        return j > content_begin_ && s_[j - 1] == '\n';
    }

    std::vector<Segment> tokenize(std::size_t begin, std::size_t end, std::size_t& leading_end)
    {
        std::vector<Segment> out;
        leading_end = end;
        auto close_last = [&](std::size_t at) {
            if (out.empty())
                leading_end = at;
            else
                out.back().end = at;
        };
        for (std::size_t i = begin; i < end; ++i) {
            char c = s_[i];
            if (c == '\\') {
                ++i;
                continue;
            }
            if (c != '=' && c != '~' && c != '#')
                continue;
            close_last(i);
            Segment g{Segment::Eq, i, i + 1, end, on_own_line(i)};
            if (c == '~') {
                g.kind = Segment::Tilde;
            } else if (c == '#') {
                g.kind = Segment::Hash;
                if (s_.substr(i, 4) == "####") {
                    g.kind = Segment::Quad;
                    g.begin = i + 4;
                    i += 3;
                }
            }
            out.push_back(g);
        }
        return out;
    }

    /// Paper dialect reads a trailing `#` on its own line after the last
    /// entry as general feedback. A one-line block whose only feedback
    /// trails the last of several entries is read the same way.
    std::optional<Segment> take_paper_general(std::vector<Entry>& entries) const
    {
        if (dialect_ != Dialect::Paper || entries.empty())
            return std::nullopt;
        auto& last = entries.back().hashes;
        if (last.empty())
            return std::nullopt;
        bool single_line = s_.substr(content_begin_, content_end_ - content_begin_).find('\n') ==
                           std::string_view::npos;
        bool others_plain = std::all_of(entries.begin(), entries.end() - 1,
                                        [](const Entry& e) { return e.hashes.empty(); });
        if (last.back().own_line ||
            (single_line && last.size() == 1 && entries.size() >= 2 && others_plain)) {
            auto g = last.back();
            last.pop_back();
            return g;
        }
        return std::nullopt;
    }

    /// Groups segments into entries, extracting general feedback. Returns
    /// false after reporting when the grouping is malformed.
    bool group(const std::vector<Segment>& segments, std::vector<Entry>& entries,
               std::optional<std::string>& general)
    {
        std::optional<Segment> quad;
        for (const auto& g : segments) {
            if (g.kind == Segment::Quad) {
                if (quad) {
                    error("duplicate-general-feedback", "general feedback given twice", g.marker);
                    return false;
                }
                quad = g;
                continue;
            }
            if (quad) {
                error("after-general-feedback", "answers must come before '####' general feedback",
                      g.marker);
                return false;
            }
            if (g.kind == Segment::Hash) {
                if (entries.empty()) {
                    error("text-before-marker", "feedback before any answer", g.marker);
                    return false;
                }
                entries.back().hashes.push_back(g);
            }
            else
                entries.push_back(Entry{g, {}});
        }
        auto paper_general = take_paper_general(entries);
        if (paper_general && quad) {
            error("duplicate-general-feedback", "general feedback given twice", paper_general->marker);
            return false;
        }
        if (auto g = quad ? quad : paper_general)
            general = optional_text(g->begin, g->end);
        for (const auto& e : entries) {
            if (e.hashes.size() > 1) {
                error("multiple-feedback", "an answer may carry only one '#' feedback",
                      e.hashes[1].marker);
                return false;
            }
        }
        return true;
    }

    struct Weighted {
        std::optional<double> weight;
        std::size_t text_begin;
    };

    std::optional<Weighted> read_weight(const Segment& g)
    {
        auto p = skip_space(g.begin, g.end);
        if (p >= g.end || s_[p] != '%')
            return Weighted{std::nullopt, g.begin};
        auto close = s_.find('%', p + 1);
        if (close == std::string_view::npos || close >= g.end) {
            error("bad-weight", "unterminated '%weight%'", p);
            return std::nullopt;
        }
        auto w = detail::parse_number(s_.substr(p + 1, close - p - 1));
        if (!w) {
            error("bad-weight", "weight is not a number", p);
            return std::nullopt;
        }
        return Weighted{w, close + 1};
    }

    std::pair<std::size_t, std::size_t> find_arrow(std::size_t begin, std::size_t end) const
    {
        for (std::size_t i = begin; i < end; ++i) {
            if (s_[i] == '\\') {
                ++i;
                continue;
            }
            if (s_[i] != '-')
                continue;
            auto k = i + 1;
            if (k < end && s_[k] == '>')
                return {i, k + 1};
            // An arrow broken across a line wrap: "-\n>".
            while (k < end && (s_[k] == ' ' || s_[k] == '\t'))
                ++k;
            if (k < end && s_[k] == '\n') {
                k = skip_space(k, end);
                if (k < end && s_[k] == '>')
                    return {i, k + 1};
            }
        }
        return {std::string_view::npos, std::string_view::npos};
    }

    std::optional<AnswerBlock> parse_true_false(bool answer, const std::vector<Segment>& segments)
    {
        TrueFalseBody body;
        body.answer = answer;
        AnswerBlock out;
        std::vector<Segment> hashes;
        std::optional<Segment> quad;
        for (const auto& g : segments) {
            if (g.kind == Segment::Quad) {
                if (quad) {
                    error("duplicate-general-feedback", "general feedback given twice", g.marker);
                    return std::nullopt;
                }
                quad = g;
            } else {
                hashes.push_back(g);
            }
        }
        if (dialect_ == Dialect::Paper && !hashes.empty() && hashes.back().own_line) {
            if (quad) {
                error("duplicate-general-feedback", "general feedback given twice",
                      hashes.back().marker);
                return std::nullopt;
            }
            quad = hashes.back();
            hashes.pop_back();
        }
        if (hashes.size() > 2) {
            error("multiple-feedback", "true/false takes at most two feedback texts",
                  hashes[2].marker);
            return std::nullopt;
        }
        if (hashes.size() > 0)
            body.feedback_wrong = optional_text(hashes[0].begin, hashes[0].end);
        if (hashes.size() > 1)
            body.feedback_right = optional_text(hashes[1].begin, hashes[1].end);
        if (quad)
            out.general_feedback = optional_text(quad->begin, quad->end);
        out.body = std::move(body);
        return out;
    }

    std::optional<NumericSpec> read_numeric(std::size_t begin, std::size_t end)
    {
        auto raw = detail::trim_view(s_.substr(begin, end - begin));
        auto at = raw.empty() ? begin : static_cast<std::size_t>(raw.data() - s_.data());
        auto range = raw.find("..");
        if (range != std::string_view::npos) {
            auto lo = detail::parse_number(raw.substr(0, range));
            auto hi = detail::parse_number(raw.substr(range + 2));
            if (lo && hi)
                return NumericRange{*lo, *hi};
        } else {
            auto colon = raw.find(':');
            auto value = detail::parse_number(raw.substr(0, colon));
            std::optional<double> tol = 0.0;
            if (colon != std::string_view::npos)
                tol = detail::parse_number(raw.substr(colon + 1));
            if (value && tol)
                return NumericPoint{*value, *tol};
        }
        error("bad-number", "expected 'value', 'value:tolerance' or 'min..max'", at);
        return std::nullopt;
    }

    std::optional<AnswerBlock> parse_numeric(const std::vector<Segment>& segments)
    {
        AnswerBlock out;
        NumericBody body;
        const auto& head = segments.front();
        std::vector<Segment> rest(segments.begin() + 1, segments.end());

        if (!detail::is_blank(s_.substr(head.begin, head.end - head.begin))) {
            // Single answer: "#value:tol" with optional feedback.
            auto spec = read_numeric(head.begin, head.end);
            if (!spec)
                return std::nullopt;
            for (const auto& g : rest) {
                if (g.kind == Segment::Eq || g.kind == Segment::Tilde) {
                    error("numeric-mixed", "use '#=' to list several numeric answers", g.marker);
                    return std::nullopt;
                }
            }
            // Treat the numeric value as the head entry so feedback grouping is shared.
            std::vector<Segment> all{Segment{Segment::Eq, head.marker, head.begin, head.end, head.own_line}};
            all.insert(all.end(), rest.begin(), rest.end());
            std::vector<Entry> entries;
            std::optional<std::string> general;
            if (!group(all, entries, general))
                return std::nullopt;
            NumericAnswer a{*spec, std::nullopt, std::nullopt};
            if (!entries.front().hashes.empty()) {
                auto& h = entries.front().hashes.front();
                a.feedback = optional_text(h.begin, h.end);
            }
            body.answers.push_back(std::move(a));
            out.general_feedback = std::move(general);
            out.body = std::move(body);
            return out;
        }

        for (const auto& g : rest) {
            if (g.kind == Segment::Tilde) {
                error("numeric-wrong-marker", "numeric answers are listed with '='", g.marker);
                return std::nullopt;
            }
        }
        if (rest.empty() || rest.front().kind != Segment::Eq) {
            error("numeric-empty", "numeric block has no answers", head.marker);
            return std::nullopt;
        }
        std::vector<Entry> entries;
        std::optional<std::string> general;
        if (!group(rest, entries, general))
            return std::nullopt;
        for (const auto& e : entries) {
            auto w = read_weight(e.head);
            if (!w)
                return std::nullopt;
            auto spec = read_numeric(w->text_begin, e.head.end);
            if (!spec)
                return std::nullopt;
            NumericAnswer a{*spec, w->weight, std::nullopt};
            if (!e.hashes.empty())
                a.feedback = optional_text(e.hashes[0].begin, e.hashes[0].end);
            body.answers.push_back(std::move(a));
        }
        out.general_feedback = std::move(general);
        out.body = std::move(body);
        return out;
    }

    std::optional<AnswerBlock> parse_entries(const std::vector<Segment>& segments)
    {
        std::vector<Entry> entries;
        AnswerBlock out;
        if (!group(segments, entries, out.general_feedback))
            return std::nullopt;

        struct Parsed {
            bool correct;
            std::optional<double> weight;
            std::size_t text_begin, text_end;
            std::size_t arrow_begin, arrow_end;
            std::optional<std::string> feedback;
        };
        std::vector<Parsed> parsed;
        std::size_t arrows = 0;
        for (const auto& e : entries) {
            auto w = read_weight(e.head);
            if (!w)
                return std::nullopt;
            Parsed p{e.head.kind == Segment::Eq, w->weight, w->text_begin, e.head.end,
                     std::string_view::npos, std::string_view::npos, std::nullopt};
            if (detail::is_blank(s_.substr(p.text_begin, p.text_end - p.text_begin))) {
                error("empty-answer", "answer marker with no text", e.head.marker);
                return std::nullopt;
            }
            std::tie(p.arrow_begin, p.arrow_end) = find_arrow(p.text_begin, p.text_end);
            if (p.arrow_begin != std::string_view::npos)
                ++arrows;
            if (!e.hashes.empty())
                p.feedback = optional_text(e.hashes[0].begin, e.hashes[0].end);
            parsed.push_back(std::move(p));
        }

        if (arrows > 0) {
            bool all_eq = std::all_of(parsed.begin(), parsed.end(), [](const Parsed& p) { return p.correct; });
            if (arrows != parsed.size() || !all_eq) {
                error("mixed-matching", "matching pairs ('=a -> b') cannot be mixed with other answers",
                      entries.front().head.marker);
                return std::nullopt;
            }
            MatchingBody body;
            for (std::size_t i = 0; i < parsed.size(); ++i) {
                const auto& p = parsed[i];
                if (p.weight) {
                    error("weight-on-pair", "matching pairs cannot be weighted", entries[i].head.marker);
                    return std::nullopt;
                }
                MatchPair pair{text(p.text_begin, p.arrow_begin), text(p.arrow_end, p.text_end),
                               p.feedback};
                if (pair.left.empty() || pair.right.empty()) {
                    error("empty-pair-side", "matching pair has an empty side", entries[i].head.marker);
                    return std::nullopt;
                }
                body.pairs.push_back(std::move(pair));
            }
            out.body = std::move(body);
            return out;
        }

        std::vector<Choice> choices;
        for (const auto& p : parsed)
            choices.push_back(Choice{text(p.text_begin, p.text_end), p.correct, p.weight, p.feedback});
        if (std::all_of(choices.begin(), choices.end(), [](const Choice& c) { return c.correct; }))
            out.body = ShortAnswerBody{std::move(choices)};
        else
            out.body = ChoicesBody{std::move(choices)};
        return out;
    }

    std::string_view s_;
    const SourceMap& map_;
    Dialect dialect_;
    std::vector<Diagnostic>& diags_;
    std::size_t content_begin_ = 0;
    std::size_t content_end_ = 0;
};

struct Block {
    std::string text;
    SourceMap map;
    int first_line = 0;
    std::optional<std::string> category;
};

bool is_comment(std::string_view line)
{
    return detail::trim_view(line).starts_with("//");
}

/// Splits a normalized document into question blocks. Blocks end at blank
/// lines; a comment, title or `$CATEGORY` line right after a closed answer
/// block also starts a new one.
class BlockSplitter {
public:
    std::vector<Block> split(std::string_view doc)
    {
        std::size_t pos = 0;
        int line_no = 0;
        while (pos <= doc.size()) {
            auto nl = doc.find('\n', pos);
            auto line = doc.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line_no;
            feed(line, line_no);
            if (nl == std::string_view::npos)
                break;
            pos = nl + 1;
        }
        flush();
        return std::move(blocks_);
    }

private:
    void feed(std::string_view line, int line_no)
    {
        auto t = detail::trim_view(line);
        if (t.empty()) {
            flush();
            return;
        }
        if (depth_ == 0 && t.starts_with("$CATEGORY:")) {
            flush();
            auto path = detail::trim(t.substr(10));
            category_ = path.empty() ? std::nullopt : std::optional<std::string>(path);
            return;
        }
        if (is_comment(line)) {
            if (depth_ == 0 && closed_)
                flush();
            return;
        }
        if (depth_ == 0 && closed_ && t.front() == ':')
            flush();

        if (current_.text.empty() && current_.first_line == 0) {
            current_.first_line = line_no;
            current_.category = category_;
        } else {
            current_.text.push_back('\n');
        }
        current_.map.add_line(current_.text.size(), line_no);
        current_.text.append(line);

        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '\\') {
                ++i;
            } else if (line[i] == '{' && depth_ == 0) {
                depth_ = 1;
            } else if (line[i] == '}' && depth_ == 1) {
                depth_ = 0;
                closed_ = true;
            }
        }
    }

    void flush()
    {
        if (current_.first_line != 0)
            blocks_.push_back(std::move(current_));
        current_ = Block{};
        depth_ = 0;
        closed_ = false;
    }

    std::vector<Block> blocks_;
    Block current_;
    std::optional<std::string> category_;
    int depth_ = 0;
    bool closed_ = false;
};

/// Drops bare metadata lines (e.g. "Course ID C300") sitting above a title
/// line, with a warning per line.
void strip_metadata(Block& b, std::vector<Diagnostic>& diags)
{
    std::string_view s = b.text;
    std::size_t pos = 0;
    std::vector<std::size_t> starts;
    while (pos < s.size()) {
        starts.push_back(pos);
        auto nl = s.find('\n', pos);
        if (nl == std::string_view::npos)
            break;
        pos = nl + 1;
    }
    if (starts.empty() || detail::trim_view(s).starts_with(":"))
        return;
    for (std::size_t k = 1; k < starts.size(); ++k) {
        auto prefix = s.substr(0, starts[k]);
        if (find_unescaped(prefix, '{', 0, prefix.size()) != std::string_view::npos)
            return;
        auto line = detail::trim_view(s.substr(starts[k]));
        if (!line.starts_with(":"))
            continue;
        for (std::size_t j = 0; j < k; ++j) {
            auto [ln, col] = b.map.locate(starts[j]);
            auto end = starts[j + 1] - 1;
            diags.push_back(make_warning(
                "skipped-metadata",
                "skipped line above the title: \"" + detail::trim(s.substr(starts[j], end - starts[j])) + "\"",
                ln, col));
        }
        SourceMap map;
        auto cut = starts[k];
        for (std::size_t j = k; j < starts.size(); ++j)
            map.add_line(starts[j] - cut, b.map.locate(starts[j]).first);
        b.text.erase(0, cut);
        b.map = std::move(map);
        return;
    }
}

} // namespace

std::string unescape_text(std::string_view raw, std::vector<Diagnostic>* warnings)
{
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        if (i + 1 >= raw.size()) {
            out.push_back('\\');
            if (warnings)
                warnings->push_back(make_warning("unknown-escape", "trailing backslash kept literally"));
            continue;
        }
        char n = raw[++i];
        switch (n) {
        case '~': case '=': case '#': case '{': case '}': case ':': case '\\': case '[':
            out.push_back(n);
            break;
        case 'n':
            out.push_back('\n');
            break;
        default:
            out.push_back('\\');
            out.push_back(n);
            if (warnings)
                warnings->push_back(make_warning(
                    "unknown-escape", std::string("unknown escape '\\") + n + "' kept literally"));
        }
    }
    return out;
}

std::optional<Question> parse_question(std::string_view block, Dialect dialect,
                                       std::vector<Diagnostic>& diags)
{
    auto text = normalize_input(block);
    auto map = SourceMap::for_text(text);
    return BlockParser(text, map, dialect, diags).parse_question();
}

Question parse_question(std::string_view block, Dialect dialect)
{
    std::vector<Diagnostic> diags;
    auto q = parse_question(block, dialect, diags);
    if (!q || has_errors(diags))
        throw Error(ErrorCode::Parse, "malformed question", std::move(diags));
    return std::move(*q);
}

std::optional<AnswerBlock> parse_answer_block(std::string_view content, Dialect dialect,
                                              std::vector<Diagnostic>& diags)
{
    auto map = SourceMap::for_text(content);
    return BlockParser(content, map, dialect, diags).parse_answer(0, content.size());
}

AnswerBlock parse_answer_block(std::string_view content, Dialect dialect)
{
    std::vector<Diagnostic> diags;
    auto a = parse_answer_block(content, dialect, diags);
    if (!a || has_errors(diags))
        throw Error(ErrorCode::Parse, "malformed answer block", std::move(diags));
    return std::move(*a);
}

ParseResult parse_document(std::string_view text, Dialect dialect)
{
    ParseResult result;
    auto doc = normalize_input(text);
    for (auto& block : BlockSplitter{}.split(doc)) {
        std::vector<Diagnostic> diags;
        strip_metadata(block, diags);
        auto q = BlockParser(block.text, block.map, dialect, diags).parse_question();
        if (q) {
            for (auto d : validate(*q, dialect)) {
                d.line = block.first_line;
                d.column = 1;
                diags.push_back(std::move(d));
            }
        }
        bool ok = q && !has_errors(diags);
        result.diagnostics.insert(result.diagnostics.end(), diags.begin(), diags.end());
        if (ok)
            result.questions.push_back(ParsedQuestion{std::move(*q), block.category, block.first_line});
    }
    return result;
}

} // namespace giftsmith
