#include "giftsmith/cli.hpp"

#include "giftsmith/bank.hpp"
#include "giftsmith/parser.hpp"
#include "giftsmith/service.hpp"
#include "giftsmith/writer.hpp"
#include "text_util.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace giftsmith::cli {

namespace {

struct Options {
    std::string bank = "./bank.giftsmith";
    std::string dialect = "paper";

    std::string course_id;
    std::string subject;

    std::string file;
    std::string course;
    std::string type;
    std::string out_path;

    std::string title;
    std::string stem;
    std::string suffix;
    std::string format;
    std::string feedback;
    std::string tf_answer;
    std::vector<std::string> opts;
    std::vector<std::string> pairs;
    std::vector<std::string> numerics;

    int port = kDefaultPort;
};

class Usage : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

Dialect parse_dialect(const std::string& name)
{
    auto d = dialect_from_name(name);
    if (!d)
        throw Usage("unknown dialect \"" + name + "\" (expected paper or moodle)");
    return *d;
}

std::optional<QuestionType> parse_type(const std::string& s)
{
    static const std::map<std::string, QuestionType> names = {
        {"1", QuestionType::TrueFalse},       {"tf", QuestionType::TrueFalse},
        {"truefalse", QuestionType::TrueFalse}, {"2", QuestionType::MultipleChoiceSingle},
        {"mc", QuestionType::MultipleChoiceSingle}, {"3", QuestionType::MultipleResponse},
        {"mr", QuestionType::MultipleResponse}, {"4", QuestionType::ShortAnswer},
        {"short", QuestionType::ShortAnswer}, {"blank", QuestionType::ShortAnswer},
        {"5", QuestionType::Matching},        {"matching", QuestionType::Matching},
        {"6", QuestionType::Numeric},         {"numeric", QuestionType::Numeric},
    };
    auto it = names.find(s);
    if (it == names.end())
        return std::nullopt;
    return it->second;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_diagnostics(const std::vector<Diagnostic>& diags, const std::string& source, std::ostream& err)
{
    for (const auto& d : diags)
        err << (source.empty() ? "" : source + ": ") << format_diagnostic(d) << "\n";
}

std::optional<NumericSpec> parse_numeric_arg(const std::string& s)
{
    auto range = s.find("..");
    if (range != std::string::npos) {
        auto lo = detail::parse_number(std::string_view(s).substr(0, range));
        auto hi = detail::parse_number(std::string_view(s).substr(range + 2));
        if (lo && hi)
            return NumericRange{*lo, *hi};
        return std::nullopt;
    }
    auto colon = s.find(':');
    auto v = detail::parse_number(std::string_view(s).substr(0, colon));
    std::optional<double> tol = 0.0;
    if (colon != std::string::npos)
        tol = detail::parse_number(std::string_view(s).substr(colon + 1));
    if (v && tol)
        return NumericPoint{*v, *tol};
    return std::nullopt;
}

/// Builds a question from `add` flags. Option correctness flags go through
/// markers_from_flags, the same mapping the lookup table documents.
Question question_from_flags(const Options& o, QuestionType type)
{
    Question q;
    if (!o.title.empty())
        q.title = o.title;
    if (!o.format.empty()) {
        q.format = format_from_name(o.format);
        if (!q.format)
            throw Usage("unknown --format \"" + o.format + "\"");
    }
    q.stem_prefix = o.stem;
    q.stem_suffix = o.suffix;
    if (!o.feedback.empty())
        q.general_feedback = o.feedback;

    switch (type) {
    case QuestionType::TrueFalse: {
        auto a = o.tf_answer;
        std::transform(a.begin(), a.end(), a.begin(), [](unsigned char c) { return std::toupper(c); });
        if (a != "T" && a != "F" && a != "TRUE" && a != "FALSE")
            throw Usage("true/false questions need --answer T or F");
        q.body = TrueFalseBody{a.front() == 'T', std::nullopt, std::nullopt};
        break;
    }
    case QuestionType::MultipleChoiceSingle:
    case QuestionType::MultipleResponse:
    case QuestionType::ShortAnswer: {
        if (o.opts.empty())
            throw Usage("give answers with --opt \"text:correct\" or --opt \"text:wrong\"");
        std::vector<std::string> texts;
        auto flags = std::make_unique<bool[]>(o.opts.size());
        for (std::size_t i = 0; i < o.opts.size(); ++i) {
            const auto& opt = o.opts[i];
            auto colon = opt.rfind(':');
            auto flag = colon == std::string::npos ? std::string() : opt.substr(colon + 1);
            if (flag != "correct" && flag != "wrong")
                throw Usage("--opt must end in \":correct\" or \":wrong\": " + opt);
            texts.push_back(opt.substr(0, colon));
            flags[i] = flag == "correct";
        }
        auto markers = markers_from_flags(std::span<const bool>(flags.get(), o.opts.size()));
        std::vector<Choice> choices;
        for (std::size_t i = 0; i < texts.size(); ++i)
            choices.push_back(Choice{texts[i], markers[i] == Marker::Correct, std::nullopt, std::nullopt});
        if (type == QuestionType::ShortAnswer)
            q.body = ShortAnswerBody{std::move(choices)};
        else
            q.body = ChoicesBody{std::move(choices)};
        break;
    }
    case QuestionType::Matching: {
        MatchingBody b;
        for (const auto& p : o.pairs) {
            auto arrow = p.find("->");
            if (arrow == std::string::npos)
                throw Usage("--pair must look like \"left->right\": " + p);
            b.pairs.push_back(MatchPair{detail::trim(p.substr(0, arrow)), detail::trim(p.substr(arrow + 2)),
                                        std::nullopt});
        }
        q.body = std::move(b);
        break;
    }
    case QuestionType::Numeric: {
        NumericBody b;
        for (const auto& n : o.numerics) {
            auto spec = parse_numeric_arg(n);
            if (!spec)
                throw Usage("--numeric must look like \"3:2\", \"7\" or \"1..5\": " + n);
            b.answers.push_back(NumericAnswer{*spec, std::nullopt, std::nullopt});
        }
        q.body = std::move(b);
        break;
    }
    }
    return q;
}

std::vector<std::int64_t> sorted(std::vector<std::int64_t> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

class Runner {
public:
    Runner(Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

    int init()
    {
        if (std::filesystem::exists(o_.bank)) {
            err_ << "bank already exists: " << o_.bank << "\n";
            return kFailure;
        }
        save_bank(Bank{}, o_.bank);
        out_ << "initialized empty bank " << o_.bank << "\n";
        return kSuccess;
    }

    int course_add()
    {
        auto bank = create_course(open_bank(o_.bank), o_.course_id, o_.subject);
        save_bank(bank, o_.bank);
        out_ << "added course " << o_.course_id << " (" << o_.subject << ")\n";
        return kSuccess;
    }

    int course_list()
    {
        for (const auto& c : open_bank(o_.bank).courses)
            out_ << c.course_id << "\t" << c.subject << "\n";
        return kSuccess;
    }

    int add()
    {
        auto dialect = parse_dialect(o_.dialect);
        auto type = parse_type(o_.type);
        if (!type)
            throw Usage("unknown --type \"" + o_.type + "\"");
        auto q = question_from_flags(o_, *type);
        auto diags = validate(q, dialect);
        if (has_errors(diags)) {
            print_diagnostics(diags, "", err_);
            return kDiagnostics;
        }
        auto actual = classify(q);
        if (actual != *type)
            throw Usage("the options describe a " + std::string(type_name(actual)) + " question (type " +
                        std::to_string(type_code(actual)) + "), not type " + std::to_string(type_code(*type)));
        auto bank = open_bank(o_.bank);
        auto added = add_question(bank, o_.course, q, dialect);
        save_bank(added.bank, o_.bank);
        print_diagnostics(added.warnings, "", err_);
        out_ << "added record " << added.record_id << " (type " << type_code(actual) << ")\n";
        return kSuccess;
    }

    int import()
    {
        auto dialect = parse_dialect(o_.dialect);
        auto text = read_file(o_.file);
        auto result = import_gift(open_bank(o_.bank), o_.course, text, dialect);
        save_bank(result.bank, o_.bank);
        print_diagnostics(result.diagnostics, o_.file, err_);
        out_ << "imported " << result.record_ids.size() << " questions into " << o_.course;
        if (!result.record_ids.empty()) {
            auto ids = sorted(result.record_ids);
            out_ << " (records " << ids.front() << "-" << ids.back() << ")";
        }
        out_ << "\n";
        return has_errors(result.diagnostics) ? kDiagnostics : kSuccess;
    }

    int export_()
    {
        auto dialect = parse_dialect(o_.dialect);
        auto bank = open_bank(o_.bank);
        RecordFilter f;
        if (!o_.course.empty()) {
            if (!find_course(bank, o_.course))
                throw Error(ErrorCode::UnknownCourse, "unknown course \"" + o_.course + "\"");
            f.course_id = o_.course;
        }
        if (!o_.type.empty()) {
            auto t = parse_type(o_.type);
            if (!t)
                throw Usage("unknown --type \"" + o_.type + "\"");
            f.qtype_code = type_code(*t);
        }
        auto text = export_gift(bank, f, dialect);
        if (o_.out_path.empty()) {
            out_ << text;
        } else {
            std::ofstream file(o_.out_path, std::ios::binary);
            if (!(file << text))
                throw Error(ErrorCode::Io, "cannot write " + o_.out_path);
            out_ << "exported " << list_records(bank, f).size() << " questions to " << o_.out_path << "\n";
        }
        return kSuccess;
    }

    int validate_file()
    {
        auto dialect = parse_dialect(o_.dialect);
        auto result = parse_document(read_file(o_.file), dialect);
        print_diagnostics(result.diagnostics, o_.file, err_);
        out_ << result.questions.size() << " questions, " << count_errors(result.diagnostics) << " errors, "
             << count_warnings(result.diagnostics) << " warnings\n";
        return has_errors(result.diagnostics) ? kDiagnostics : kSuccess;
    }

    int lookup_table()
    {
        out_ << "SL  CB1-4  Res1-4\n";
        for (const auto& row : generate_lookup_table()) {
            out_ << std::setw(2) << row.index << "  " << row.pattern << "  ";
            for (std::size_t i = 0; i < row.markers.size(); ++i)
                out_ << (i ? " " : "") << marker_symbol(row.markers[i]);
            out_ << "\n";
        }
        return kSuccess;
    }

    int stats()
    {
        auto bank = open_bank(o_.bank);
        out_ << bank.courses.size() << " courses, " << bank.records.size() << " questions\n";
        for (const auto& c : bank.courses) {
            auto records = list_records(bank, RecordFilter{c.course_id, std::nullopt, std::nullopt});
            out_ << c.course_id << " (" << c.subject << "): " << records.size() << " questions\n";
            for (int code = 1; code <= 6; ++code) {
                auto n = std::count_if(records.begin(), records.end(),
                                       [code](const QuestionRecord& r) { return r.qtype_code == code; });
                if (n > 0)
                    out_ << "  type " << code << " " << type_name(*type_from_code(code)) << ": " << n << "\n";
            }
        }
        return kSuccess;
    }

    int serve()
    {
        AuthoringService service(o_.bank);
        LoopbackServer server(service);
        int port = server.bind(o_.port);
        if (port < 0) {
            err_ << "cannot bind 127.0.0.1:" << o_.port << "\n";
            return kFailure;
        }
        out_ << "serving " << o_.bank << " on http://127.0.0.1:" << port << "/" << std::endl;
        return server.listen() ? kSuccess : kFailure;
    }

private:
    Options& o_;
    std::ostream& out_;
    std::ostream& err_;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Offline GIFT quiz authoring, validation, import and export", "giftsmith"};
    app.require_subcommand(1);
    app.add_option("--bank", o.bank, "Question bank file")->capture_default_str();

    auto* init = app.add_subcommand("init", "Create an empty question bank");

    auto* course = app.add_subcommand("course", "Manage courses");
    course->require_subcommand(1);
    auto* course_add = course->add_subcommand("add", "Add a course");
    course_add->add_option("course_id", o.course_id, "Course ID, e.g. C300")->required();
    course_add->add_option("subject", o.subject, "Subject name")->required();
    auto* course_list = course->add_subcommand("list", "List courses");

    auto* add = app.add_subcommand("add", "Add a question from flags");
    add->add_option("--course", o.course, "Course ID")->required();
    add->add_option("--type", o.type, "tf|mc|mr|short|matching|numeric or code 1-6")->required();
    add->add_option("--stem", o.stem, "Question text")->required();
    add->add_option("--title", o.title, "Question title");
    add->add_option("--suffix", o.suffix, "Text after the blank (missing-word questions)");
    add->add_option("--format", o.format, "html|markdown|plain|moodle");
    add->add_option("--opt", o.opts, "Answer option \"text:correct\" or \"text:wrong\" (repeatable)");
    add->add_option("--pair", o.pairs, "Matching pair \"left->right\" (repeatable)");
    add->add_option("--numeric", o.numerics, "Numeric answer \"3:2\", \"7\" or \"1..5\" (repeatable)");
    add->add_option("--answer", o.tf_answer, "T or F for true/false questions");
    add->add_option("--feedback", o.feedback, "General feedback");
    add->add_option("--dialect", o.dialect, "paper|moodle")->capture_default_str();

    auto* import = app.add_subcommand("import", "Import a GIFT file into a course");
    import->add_option("file", o.file, "GIFT file")->required();
    import->add_option("--course", o.course, "Course ID")->required();
    import->add_option("--dialect", o.dialect, "paper|moodle")->capture_default_str();

    auto* exp = app.add_subcommand("export", "Export questions as GIFT");
    exp->add_option("--course", o.course, "Only this course");
    exp->add_option("--type", o.type, "Only this question type");
    exp->add_option("--dialect", o.dialect, "paper|moodle")->capture_default_str();
    exp->add_option("--out", o.out_path, "Write to this file instead of stdout");

    auto* val = app.add_subcommand("validate", "Check a GIFT file");
    val->add_option("file", o.file, "GIFT file")->required();
    val->add_option("--dialect", o.dialect, "paper|moodle")->capture_default_str();

    auto* lookup = app.add_subcommand("lookup-table", "Print the 4-option correctness lookup table");
    auto* stats = app.add_subcommand("stats", "Summarize the bank");

    auto* serve = app.add_subcommand("serve", "Run the local authoring service");
    serve->add_option("--port", o.port, "Port on 127.0.0.1")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kFailure;
    }

    Runner r(o, out, err);
    try {
        if (*init)
            return r.init();
        if (*course_add)
            return r.course_add();
        if (*course_list)
            return r.course_list();
        if (*add)
            return r.add();
        if (*import)
            return r.import();
        if (*exp)
            return r.export_();
        if (*val)
            return r.validate_file();
        if (*lookup)
            return r.lookup_table();
        if (*stats)
            return r.stats();
        if (*serve)
            return r.serve();
    } catch (const Usage& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        print_diagnostics(e.diagnostics(), "", err);
        return e.code() == ErrorCode::Validation || e.code() == ErrorCode::Parse ? kDiagnostics : kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

} // namespace giftsmith::cli
