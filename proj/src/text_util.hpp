#ifndef GIFTSMITH_TEXT_UTIL_HPP
#define GIFTSMITH_TEXT_UTIL_HPP

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace giftsmith::detail {

inline bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim_view(std::string_view s)
{
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

inline std::string trim(std::string_view s)
{
    return std::string(trim_view(s));
}

inline bool is_blank(std::string_view s)
{
    return trim_view(s).empty();
}

/// Collapses each run of raw whitespace to one space and trims the ends.
/// Newline characters that are part of the text (not layout) survive
/// because callers only apply this to still-escaped source text.
inline std::string collapse_space(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
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

/// Shortest representation that reads back to the same double.
inline std::string format_number(double v)
{
    if (v == 0)
        v = 0; // drop the sign of -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s)
{
    s = trim_view(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    if (s.empty())
        return std::nullopt;
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

} // namespace giftsmith::detail

#endif
