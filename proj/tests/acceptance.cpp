// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria. Usage: acceptance [path-to-giftsmith-binary]

#include "giftsmith/bank.hpp"
#include "giftsmith/cli.hpp"
#include "giftsmith/parser.hpp"
#include "giftsmith/writer.hpp"

#include "support/fixtures.hpp"
#include "support/question_gen.hpp"
#include "support/test_data.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <sys/wait.h>

using namespace giftsmith;
namespace fx = giftsmith::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Failure {
    std::string why;
};

void require(bool ok, const std::string& why)
{
    if (!ok)
        throw Failure{why};
}

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s)
{
    std::ostringstream ss;
    ss.precision(3);
    ss << std::fixed << s << " s";
    return ss.str();
}

// Returns a detail string for the PASS line.
using Criterion = std::function<std::string()>;

std::string golden_parse()
{
    auto start = Clock::now();
    auto text = fx::read_data("listing.gift");
    auto r = parse_document(text, Dialect::Paper);
    double elapsed = seconds_since(start);

    require(r.diagnostics.empty(), std::to_string(r.diagnostics.size()) + " diagnostics");
    require(r.questions.size() == 5, std::to_string(r.questions.size()) + " questions");
    const auto& q = r.questions;

    auto& tf = std::get<TrueFalseBody>(q[0].question.body);
    require(classify(q[0].question) == QuestionType::TrueFalse && tf.answer, "Q1 is not TrueFalse(true)");

    require(classify(q[1].question) == QuestionType::MultipleChoiceSingle, "Q2 is not single-answer choice");
    const auto& cs = std::get<ChoicesBody>(q[1].question.body).choices;
    require(cs.size() == 3 && cs[0].text == "yellow" && cs[0].correct && !cs[1].correct && !cs[2].correct,
            "Q2 correct answer is not yellow");
    require(std::all_of(cs.begin(), cs.end(), [](const Choice& c) { return c.feedback.has_value(); }),
            "Q2 lacks per-choice feedback");
    require(q[1].question == fx::q2_spectrum(), "Q2 structure differs");

    require(classify(q[2].question) == QuestionType::ShortAnswer, "Q3 is not ShortAnswer");
    const auto& sa = std::get<ShortAnswerBody>(q[2].question.body).answers;
    std::set<std::string> accepted;
    for (const auto& a : sa)
        accepted.insert(a.text);
    require(accepted == std::set<std::string>{"two", "2"}, "Q3 accepted answers differ");
    require(q[2].question.stem_suffix == "equals four.", "Q3 suffix differs");

    require(classify(q[3].question) == QuestionType::Matching, "Q4 is not Matching");
    const auto& pairs = std::get<MatchingBody>(q[3].question.body).pairs;
    require(pairs.size() == 2 && pairs[0].left == "cat" && pairs[0].right == "cat food" && pairs[1].left == "dog" &&
                pairs[1].right == "dog food",
            "Q4 pairs differ");

    require(classify(q[4].question) == QuestionType::Numeric, "Q5 is not Numeric");
    const auto& na = std::get<NumericBody>(q[4].question.body).answers;
    require(na.size() == 1 && na[0].spec == NumericSpec(NumericPoint{3, 2}), "Q5 is not Point(3,2)");

    require(elapsed < 1.0, "took " + fmt_seconds(elapsed));
    return "5 questions, 0 diagnostics, " + fmt_seconds(elapsed);
}

std::string numeric_equivalence()
{
    auto a = numeric_interval(NumericPoint{3, 2});
    auto b = numeric_interval(NumericRange{1, 5});
    require(a == std::pair<double, double>{1, 5}, "Point(3,2) interval is not (1,5)");
    require(b == std::pair<double, double>{1, 5}, "Range(1,5) interval is not (1,5)");
    return "(1,5) == (1,5)";
}

std::string lookup_parity()
{
    std::istringstream in(fx::read_data("lookup_table.txt"));
    auto table = generate_lookup_table();
    require(table.size() == 16, "table has " + std::to_string(table.size()) + " rows");
    const std::set<int> misprinted = {10, 11, 14};
    const std::map<int, std::string> recomputed = {{10, "TFTF"}, {11, "TFTT"}, {14, "TTTF"}};
    int rows = 0;
    int pattern_matches = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        int index = 0;
        std::string boxes, pattern;
        std::string marks[4];
        ls >> index >> boxes >> marks[0] >> marks[1] >> marks[2] >> marks[3] >> pattern;
        const auto& row = table.at(static_cast<std::size_t>(index));
        for (std::size_t i = 0; i < 4; ++i) {
            require(row.flags[i] == (boxes[i] == '1'), "flags differ at row " + std::to_string(index));
            char want = marks[i] == "-" ? '~' : marks[i][0];
            require(marker_symbol(row.markers[i]) == want, "markers differ at row " + std::to_string(index));
        }
        auto computed = pattern_from_flags(row.flags);
        require(computed == row.pattern, "row pattern is not pattern_from_flags at " + std::to_string(index));
        if (misprinted.count(index)) {
            require(computed == recomputed.at(index) && computed != pattern,
                    "misprinted row " + std::to_string(index) + " not as documented");
        } else {
            require(computed == pattern, "pattern differs at row " + std::to_string(index));
            ++pattern_matches;
        }
        ++rows;
    }
    require(rows == 16, "transcription has " + std::to_string(rows) + " rows");
    require(pattern_matches == 13, "pattern matches: " + std::to_string(pattern_matches));
    return "16/16 marker rows, 13/13 patterns, misprinted rows 10 11 14 recomputed";
}

std::string round_trip()
{
    auto start = Clock::now();
    constexpr int kPerDialect = 1200;
    int checked = 0;
    for (auto dialect : {Dialect::Paper, Dialect::Moodle}) {
        fx::QuestionGen g(dialect == Dialect::Paper ? 4001 : 4002);
        std::set<QuestionType> types;
        for (int i = 0; i < kPerDialect; ++i) {
            auto q = g.question(fx::kAllTypes[i % 6]);
            types.insert(classify(q));
            auto text = serialize_question(q, dialect);
            auto back = parse_question(text, dialect);
            // Under moodle the multiple-response rewrite is part of the
            // serialized meaning; compare against that canonical form.
            auto want = dialect == Dialect::Paper ? q : canonical_form(q, dialect);
            require(approx_equal(back, want), std::string(dialect_name(dialect)) + " round trip failed:\n" + text);
            require(serialize_question(back, dialect) == text,
                    std::string(dialect_name(dialect)) + " fixpoint failed:\n" + text);
            ++checked;
        }
        require(types.size() == 6, "generator covered " + std::to_string(types.size()) + " types");
    }
    double elapsed = seconds_since(start);
    require(elapsed < 30.0, "took " + fmt_seconds(elapsed));
    return std::to_string(checked) + " questions, both dialects, " + fmt_seconds(elapsed);
}

std::string export_fidelity()
{
    auto bank = create_course(Bank{}, "C300", "Chemistry");
    bank = add_question(bank, "C300", fx::water(), Dialect::Paper).bank;
    auto paper = export_gift(bank, {}, Dialect::Paper);
    for (const char* line : {"// Course ID: C300", "// Ques type: 3", "~ Nitrogen", "= Oxygen", "~ Carbon Di-Oxide",
                             "= Hydrogen", "# Oxygen and Hydrogen"}) {
        require(paper.find(std::string("\n") + line + "\n") != std::string::npos,
                std::string("paper export lacks line \"") + line + "\"");
    }
    auto moodle = export_gift(bank, {}, Dialect::Moodle);
    for (const char* line : {"~%-50% Nitrogen", "~%50% Oxygen", "~%-50% Carbon Di-Oxide", "~%50% Hydrogen"})
        require(moodle.find(std::string("\n") + line + "\n") != std::string::npos,
                std::string("moodle export lacks line \"") + line + "\"");
    auto r = parse_document(moodle, Dialect::Moodle);
    require(count_errors(r.diagnostics) == 0, "moodle export reparses with errors");
    require(r.questions.size() == 1, "moodle export reparses to " + std::to_string(r.questions.size()) + " questions");
    return "paper lines exact, moodle weights +-50%, reparse 0 errors";
}

std::vector<std::string> question_multiset(const Bank& b, Dialect dialect)
{
    std::vector<std::string> out;
    for (const auto& r : b.records) {
        auto q = canonical_form(r.question, dialect);
        // The export titles untitled questions with their record id.
        if (!q.title)
            q.title = std::to_string(r.record_id);
        out.push_back(serialize_question(q, dialect));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string interchange()
{
    int records = 0;
    for (auto dialect : {Dialect::Paper, Dialect::Moodle}) {
        fx::QuestionGen g(dialect == Dialect::Paper ? 6001 : 6002);
        auto source = g.bank(3, 72);
        std::set<int> types;
        for (const auto& r : source.records)
            types.insert(r.qtype_code);
        require(types.size() == 6, "bank covers " + std::to_string(types.size()) + " types");

        auto text = export_gift(source, {}, dialect);
        auto fresh = create_course(Bank{}, "FRESH", "import target");
        auto imported = import_gift(fresh, "FRESH", text, dialect);
        require(count_errors(imported.diagnostics) == 0, "import reported errors");
        require(imported.bank.records.size() == source.records.size(), "record count changed");

        // Both sides compared at structural tolerance, matched by canonical text.
        auto want = question_multiset(source, dialect);
        auto got = question_multiset(imported.bank, dialect);
        require(want == got, std::string(dialect_name(dialect)) + " question multiset differs");
        for (const auto& r : imported.bank.records) {
            auto match = std::find_if(source.records.begin(), source.records.end(), [&](const QuestionRecord& s) {
                auto q = canonical_form(s.question, dialect);
                if (!q.title)
                    q.title = std::to_string(s.record_id);
                return approx_equal(q, r.question);
            });
            require(match != source.records.end(), "imported question has no structural match");
        }
        records += static_cast<int>(source.records.size());
    }
    return std::to_string(records) + " records across both dialects, multisets equal";
}

std::string persistence()
{
    fx::TempDir dir("acceptance-bank");
    auto path = dir / "bank.giftsmith";
    fx::QuestionGen g(7001);
    for (int i = 0; i < 20; ++i) {
        auto b = g.bank(g.uniform(1, 4), g.uniform(0, 50));
        save_bank(b, path);
        require(open_bank(path) == b, "save/open identity failed on bank " + std::to_string(i));
    }
    auto prior = g.bank(2, 10);
    save_bank(prior, path);
    auto bytes = fx::read_file(path);
    SaveOptions crash;
    crash.before_rename = [] { throw Error(ErrorCode::Io, "simulated failure"); };
    bool threw = false;
    try {
        save_bank(g.bank(2, 12), path, crash);
    } catch (const Error&) {
        threw = true;
    }
    require(threw, "simulated failure did not surface");
    require(fx::read_file(path) == bytes, "prior file changed after failed save");
    require(open_bank(path) == prior, "prior bank unreadable after failed save");
    return "20 generated banks identical after save/open; failed save left prior file intact";
}

struct CliRun {
    int code = -1;
    std::string out;
};

// Runs the real binary when one was given, otherwise the in-process entry point.
CliRun run_cli(const std::string& binary, const fx::TempDir& dir, std::vector<std::string> args)
{
    if (binary.empty()) {
        std::ostringstream out, err;
        CliRun r;
        r.code = cli::run(args, out, err);
        r.out = out.str();
        return r;
    }
    auto quote = [](const std::string& s) {
        std::string q = "'";
        for (char c : s)
            q += c == '\'' ? std::string("'\\''") : std::string(1, c);
        return q + "'";
    };
    std::string cmd = quote(binary);
    for (const auto& a : args)
        cmd += " " + quote(a);
    auto out_file = dir / "stdout.txt";
    cmd += " > " + quote(out_file.string()) + " 2> " + quote((dir / "stderr.txt").string());
    int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = fx::read_file(out_file);
    return r;
}

std::string cli_end_to_end(const std::string& binary)
{
    std::vector<std::string> transcripts;
    for (int attempt = 0; attempt < 2; ++attempt) {
        fx::TempDir dir("acceptance-cli");
        auto bank = (dir / "bank.giftsmith").string();
        auto fresh = (dir / "fresh.giftsmith").string();
        auto listing = fx::data_path("listing.gift").string();
        auto exported = (dir / "export.gift").string();
        std::string transcript;
        auto step = [&](std::vector<std::string> args, int want_code) {
            auto r = run_cli(binary, dir, args);
            std::string joined;
            for (const auto& a : args)
                joined += a + " ";
            require(r.code == want_code, joined + "exited " + std::to_string(r.code));
            transcript += r.out;
            return r;
        };
        step({"--bank", bank, "init"}, 0);
        step({"--bank", bank, "course", "add", "C300", "Chemistry"}, 0);
        step({"--bank", bank, "import", "--course", "C300", listing}, 0);
        auto v = step({"--bank", bank, "validate", listing}, 0);
        require(v.out.find("5 questions") == 0, "validate printed: " + v.out);
        auto first = step({"--bank", bank, "export"}, 0);
        step({"--bank", bank, "export", "--out", exported}, 0);
        step({"--bank", fresh, "init"}, 0);
        step({"--bank", fresh, "course", "add", "C300", "Chemistry"}, 0);
        step({"--bank", fresh, "import", "--course", "C300", exported}, 0);
        auto second = step({"--bank", fresh, "export"}, 0);
        require(first.out == second.out, "re-imported bank exports differently");

        auto a = open_bank(bank);
        auto b = open_bank(fresh);
        require(a.records.size() == 5 && b.records.size() == 5, "expected 5 records in each bank");
        for (std::size_t i = 0; i < 5; ++i)
            require(a.records[i].question == b.records[i].question, "question " + std::to_string(i + 1) + " differs");
        // Bank paths differ between attempts; normalize them out of the transcript.
        for (const auto& p : {bank, fresh, exported}) {
            for (auto pos = transcript.find(p); pos != std::string::npos; pos = transcript.find(p))
                transcript.replace(pos, p.size(), "<path>");
        }
        transcripts.push_back(transcript);
    }
    require(transcripts[0] == transcripts[1], "stdout differs between repeated runs");
    return std::string(binary.empty() ? "in-process" : "binary") + " run, banks equal, stdout deterministic";
}

} // namespace

int main(int argc, char** argv)
{
    std::string binary = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, Criterion>> criteria = {
        {"1 golden parse of the sample listing", golden_parse},
        {"2 numeric point/range equivalence", numeric_equivalence},
        {"3 lookup table parity with the printed table", lookup_parity},
        {"4 round-trip and fixpoint on generated questions", round_trip},
        {"5 export fidelity for the water question", export_fidelity},
        {"6 interchange round-trip of a populated bank", interchange},
        {"7 persistence identity and atomic save", persistence},
        {"8 CLI end-to-end", [&] { return cli_end_to_end(binary); }},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        try {
            auto detail = check();
            std::cout << "PASS  criterion " << name << " (" << detail << ")\n";
        } catch (const Failure& f) {
            ++failed;
            std::cout << "FAIL  criterion " << name << ": " << f.why << "\n";
        } catch (const std::exception& e) {
            ++failed;
            std::cout << "FAIL  criterion " << name << ": exception: " << e.what() << "\n";
        }
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed\n";
    return failed;
}
