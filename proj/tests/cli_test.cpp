#include "giftsmith/bank.hpp"
#include "giftsmith/cli.hpp"

#include "support/test_data.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace giftsmith;
namespace fx = giftsmith::testing;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
protected:
    fx::TempDir dir{"cli"};

    std::string bank() const { return (dir / "bank.giftsmith").string(); }

    Outcome run(std::vector<std::string> args, const std::string& bank_path = {})
    {
        args.insert(args.begin(), {"--bank", bank_path.empty() ? bank() : bank_path});
        std::ostringstream out;
        std::ostringstream err;
        Outcome r;
        r.code = cli::run(args, out, err);
        r.out = out.str();
        r.err = err.str();
        return r;
    }

    void seed()
    {
        ASSERT_EQ(run({"init"}).code, 0);
        ASSERT_EQ(run({"course", "add", "C300", "Chemistry"}).code, 0);
    }
};

} // namespace

TEST_F(CliTest, InitCourseAndList)
{
    auto r = run({"init"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(std::filesystem::exists(bank()));
    EXPECT_EQ(run({"init"}).code, 2);

    EXPECT_EQ(run({"course", "add", "C300", "Chemistry"}).code, 0);
    r = run({"course", "add", "C300", "Again"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("course exists"), std::string::npos);
    r = run({"course", "list"});
    EXPECT_EQ(r.out, "C300\tChemistry\n");
}

TEST_F(CliTest, ValidateSampleListing)
{
    auto r = run({"validate", fx::data_path("listing.gift").string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "5 questions, 0 errors, 0 warnings\n");
    EXPECT_EQ(r.err, "");
}

TEST_F(CliTest, ValidateReportsErrorsWithLocation)
{
    auto file = dir / "bad.gift";
    std::ofstream(file) << "::ok:: a {T}\n\n::bad:: b {=x ~y\n";
    auto r = run({"validate", file.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.out, "1 questions, 1 errors, 0 warnings\n");
    EXPECT_NE(r.err.find("line 3, column 11: error [unterminated-answer-block]"), std::string::npos) << r.err;

    EXPECT_EQ(run({"validate", (dir / "missing.gift").string()}).code, 2);
}

TEST_F(CliTest, LookupTable)
{
    auto r = run({"lookup-table"});
    EXPECT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);)
        lines.push_back(l);
    ASSERT_EQ(lines.size(), 17u);
    EXPECT_EQ(lines[6], " 5  FTFT  ~ = ~ =");
    EXPECT_EQ(lines[16], "15  TTTT  = = = =");
}

TEST_F(CliTest, ExportUnknownCourse)
{
    seed();
    auto r = run({"export", "--course", "NOPE"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("unknown course"), std::string::npos);
}

TEST_F(CliTest, AddFromFlags)
{
    seed();
    auto r = run({"add", "--course", "C300", "--type", "mr", "--stem", "Water is a compound of two different elements.",
                  "--opt", "Nitrogen:wrong", "--opt", "Oxygen:correct", "--opt", "Carbon Di-Oxide:wrong", "--opt",
                  "Hydrogen:correct", "--feedback", "Oxygen and Hydrogen"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "added record 1 (type 3)\n");

    r = run({"export", "--course", "C300"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("// Course ID: C300\n// Ques type: 3\n::1:: Water"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("~ Nitrogen\n= Oxygen\n~ Carbon Di-Oxide\n= Hydrogen\n# Oxygen and Hydrogen\n}"),
              std::string::npos);

    EXPECT_EQ(run({"add", "--course", "C300", "--type", "tf", "--stem", "1+1=2", "--answer", "T"}).code, 0);
    EXPECT_EQ(run({"add", "--course", "C300", "--type", "5", "--stem", "pairs", "--pair", "cat->cat food", "--pair",
                   "dog -> dog food"}).code, 0);
    EXPECT_EQ(run({"add", "--course", "C300", "--type", "numeric", "--stem", "n?", "--numeric", "3:2"}).code, 0);
    EXPECT_EQ(run({"add", "--course", "C300", "--type", "short", "--stem", "Two plus", "--suffix", "equals four.",
                   "--opt", "two:correct", "--opt", "2:correct"}).code, 0);
    r = run({"stats"});
    EXPECT_EQ(r.out, "1 courses, 5 questions\n"
                     "C300 (Chemistry): 5 questions\n"
                     "  type 1 true/false: 1\n"
                     "  type 3 multiple response: 1\n"
                     "  type 4 fill in the blank: 1\n"
                     "  type 5 matching: 1\n"
                     "  type 6 numeric: 1\n");
}

TEST_F(CliTest, AddRejectsMismatchAndInvalid)
{
    seed();
    // One correct option is a single-answer question, not type 3.
    auto r = run({"add", "--course", "C300", "--type", "3", "--stem", "s", "--opt", "a:correct", "--opt", "b:wrong"});
    EXPECT_EQ(r.code, 2);
    r = run({"add", "--course", "C300", "--type", "mc", "--stem", "s", "--opt", "a:wrong", "--opt", "b:wrong"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("no-correct-answer"), std::string::npos);
    r = run({"add", "--course", "C300", "--type", "mc", "--stem", "s", "--opt", "a"});
    EXPECT_EQ(r.code, 2);
    r = run({"add", "--course", "ZZZ", "--type", "tf", "--stem", "s", "--answer", "F"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(open_bank(bank()).records.size(), 0u);
}

TEST_F(CliTest, BadArgumentsExitTwo)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"export", "--dialect", "klingon"}).code, 2);
    EXPECT_EQ(run({"stats"}).code, 2); // no bank yet
}

TEST_F(CliTest, EndToEndInterchange)
{
    seed();
    auto listing = fx::data_path("listing.gift").string();
    auto r = run({"import", "--course", "C300", listing});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "imported 5 questions into C300 (records 1-5)\n");

    auto exported = dir / "out.gift";
    EXPECT_EQ(run({"export", "--out", exported.string()}).code, 0);
    auto first = run({"export"});

    auto other = (dir / "fresh.giftsmith").string();
    EXPECT_EQ(run({"init"}, other).code, 0);
    EXPECT_EQ(run({"course", "add", "C300", "Chemistry"}, other).code, 0);
    EXPECT_EQ(run({"import", "--course", "C300", exported.string()}, other).code, 0);

    auto a = open_bank(bank());
    auto b = open_bank(other);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].question, b.records[i].question);
        EXPECT_EQ(a.records[i].qtype_code, b.records[i].qtype_code);
    }
    EXPECT_EQ(run({"export"}, other).out, first.out);
    EXPECT_EQ(run({"export"}).out, first.out);
}

TEST_F(CliTest, ImportPartialFailureExitsOne)
{
    seed();
    auto file = dir / "mixed.gift";
    std::ofstream(file) << "::a:: x {T}\n\n::b:: y {=a ~b\n\n::c:: z {F}\n";
    auto r = run({"import", "--course", "C300", file.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.out, "imported 2 questions into C300 (records 1-2)\n");
    EXPECT_EQ(open_bank(bank()).records.size(), 2u);
}

TEST_F(CliTest, MoodleExportReparses)
{
    seed();
    ASSERT_EQ(run({"import", "--course", "C300", fx::data_path("water.gift").string()}).code, 0);
    auto r = run({"export", "--dialect", "moodle"});
    EXPECT_NE(r.out.find("~%50% Oxygen"), std::string::npos) << r.out;
    auto file = dir / "m.gift";
    std::ofstream(file) << r.out;
    auto v = run({"validate", "--dialect", "moodle", file.string()});
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out, "1 questions, 0 errors, 0 warnings\n");
}
