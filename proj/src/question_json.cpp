#include "giftsmith/question_json.hpp"

namespace giftsmith {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what)
{
    throw Error(ErrorCode::InvalidArgument, "invalid question payload: " + what);
}

void put(json& j, const char* key, const std::optional<std::string>& v)
{
    if (v)
        j[key] = *v;
}

void put(json& j, const char* key, const std::optional<double>& v)
{
    if (v)
        j[key] = *v;
}

const json& member(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end())
        bad(std::string("missing \"") + key + "\"");
    return *it;
}

std::string get_string(const json& j, const char* key)
{
    const auto& v = member(j, key);
    if (!v.is_string())
        bad(std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
}

std::optional<std::string> opt_string(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return std::nullopt;
    if (!it->is_string())
        bad(std::string("\"") + key + "\" must be a string");
    return it->get<std::string>();
}

double get_number(const json& j, const char* key)
{
    const auto& v = member(j, key);
    if (!v.is_number())
        bad(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
}

std::optional<double> opt_number(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return std::nullopt;
    if (!it->is_number())
        bad(std::string("\"") + key + "\" must be a number");
    return it->get<double>();
}

bool get_bool(const json& j, const char* key)
{
    const auto& v = member(j, key);
    if (!v.is_boolean())
        bad(std::string("\"") + key + "\" must be a boolean");
    return v.get<bool>();
}

const json& get_array(const json& j, const char* key)
{
    const auto& v = member(j, key);
    if (!v.is_array())
        bad(std::string("\"") + key + "\" must be an array");
    return v;
}

json choice_to_json(const Choice& c)
{
    json j{{"text", c.text}, {"correct", c.correct}};
    put(j, "weight", c.weight);
    put(j, "feedback", c.feedback);
    return j;
}

Choice choice_from_json(const json& j)
{
    if (!j.is_object())
        bad("choice entries must be objects");
    Choice c;
    c.text = get_string(j, "text");
    c.correct = j.contains("correct") ? get_bool(j, "correct") : false;
    c.weight = opt_number(j, "weight");
    c.feedback = opt_string(j, "feedback");
    return c;
}

} // namespace

json question_to_json(const Question& q)
{
    json j = json::object();
    put(j, "title", q.title);
    if (q.format)
        j["format"] = std::string(format_name(*q.format));
    j["stem"] = q.stem_prefix;
    if (!q.stem_suffix.empty())
        j["stem_suffix"] = q.stem_suffix;

    struct Visitor {
        json& j;
        void operator()(const TrueFalseBody& b) const
        {
            j["type"] = "true_false";
            j["answer"] = b.answer;
            put(j, "feedback_wrong", b.feedback_wrong);
            put(j, "feedback_right", b.feedback_right);
        }
        void operator()(const ChoicesBody& b) const
        {
            j["type"] = "choices";
            j["choices"] = json::array();
            for (const auto& c : b.choices)
                j["choices"].push_back(choice_to_json(c));
        }
        void operator()(const ShortAnswerBody& b) const
        {
            j["type"] = "short_answer";
            j["answers"] = json::array();
            for (const auto& c : b.answers)
                j["answers"].push_back(choice_to_json(c));
        }
        void operator()(const MatchingBody& b) const
        {
            j["type"] = "matching";
            j["pairs"] = json::array();
            for (const auto& p : b.pairs) {
                json pj{{"left", p.left}, {"right", p.right}};
                put(pj, "feedback", p.feedback);
                j["pairs"].push_back(std::move(pj));
            }
        }
        void operator()(const NumericBody& b) const
        {
            j["type"] = "numeric";
            j["numeric"] = json::array();
            for (const auto& a : b.answers) {
                json aj;
                if (auto* p = std::get_if<NumericPoint>(&a.spec)) {
                    aj["value"] = p->value;
                    aj["tolerance"] = p->tolerance;
                } else {
                    auto& r = std::get<NumericRange>(a.spec);
                    aj["min"] = r.min;
                    aj["max"] = r.max;
                }
                put(aj, "weight", a.weight);
                put(aj, "feedback", a.feedback);
                j["numeric"].push_back(std::move(aj));
            }
        }
    };
    std::visit(Visitor{j}, q.body);
    put(j, "general_feedback", q.general_feedback);
    return j;
}

Question question_from_json(const json& j)
{
    if (!j.is_object())
        bad("question must be an object");
    Question q;
    q.title = opt_string(j, "title");
    if (auto f = opt_string(j, "format")) {
        q.format = format_from_name(*f);
        if (!q.format)
            bad("unknown format \"" + *f + "\"");
    }
    q.stem_prefix = get_string(j, "stem");
    q.stem_suffix = opt_string(j, "stem_suffix").value_or("");
    q.general_feedback = opt_string(j, "general_feedback");

    auto type = get_string(j, "type");
    if (type == "true_false") {
        TrueFalseBody b;
        b.answer = get_bool(j, "answer");
        b.feedback_wrong = opt_string(j, "feedback_wrong");
        b.feedback_right = opt_string(j, "feedback_right");
        q.body = b;
    } else if (type == "choices") {
        ChoicesBody b;
        for (const auto& c : get_array(j, "choices"))
            b.choices.push_back(choice_from_json(c));
        q.body = std::move(b);
    } else if (type == "short_answer") {
        ShortAnswerBody b;
        for (const auto& c : get_array(j, "answers")) {
            auto choice = choice_from_json(c);
            if (!c.contains("correct"))
                choice.correct = true;
            b.answers.push_back(std::move(choice));
        }
        q.body = std::move(b);
    } else if (type == "matching") {
        MatchingBody b;
        for (const auto& p : get_array(j, "pairs")) {
            if (!p.is_object())
                bad("pairs must be objects");
            b.pairs.push_back(MatchPair{get_string(p, "left"), get_string(p, "right"),
                                        opt_string(p, "feedback")});
        }
        q.body = std::move(b);
    } else if (type == "numeric") {
        NumericBody b;
        for (const auto& a : get_array(j, "numeric")) {
            if (!a.is_object())
                bad("numeric answers must be objects");
            NumericAnswer ans;
            if (a.contains("min") || a.contains("max"))
                ans.spec = NumericRange{get_number(a, "min"), get_number(a, "max")};
            else
                ans.spec = NumericPoint{get_number(a, "value"), opt_number(a, "tolerance").value_or(0)};
            ans.weight = opt_number(a, "weight");
            ans.feedback = opt_string(a, "feedback");
            b.answers.push_back(std::move(ans));
        }
        q.body = std::move(b);
    } else {
        bad("unknown type \"" + type + "\"");
    }
    return q;
}

json diagnostic_to_json(const Diagnostic& d)
{
    json j{{"severity", d.severity == Severity::Error ? "error" : "warning"},
           {"code", d.code},
           {"message", d.message}};
    if (d.line)
        j["line"] = *d.line;
    if (d.column)
        j["column"] = *d.column;
    return j;
}

json diagnostics_to_json(const std::vector<Diagnostic>& diags)
{
    json arr = json::array();
    for (const auto& d : diags)
        arr.push_back(diagnostic_to_json(d));
    return arr;
}

} // namespace giftsmith
