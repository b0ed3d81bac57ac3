#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "pandora/cli.hpp"
#include "pandora/generators.hpp"
#include "pandora/json_io.hpp"
#include "pandora/parallel.hpp"

using namespace pandora;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string kTwoBox = PANDORA_FIXTURES "/two_box.json";

class TempDir {
public:
    explicit TempDir(const std::string& tag) : path_(fs::temp_directory_path() / ("pandora_test_" + tag)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

}  // namespace

TEST(Cli, Solve) {
    EXPECT_EQ(cli({"solve", "--instance", kTwoBox}).out, "5/8\n");
    EXPECT_EQ(cli({"solve", "--instance", kTwoBox, "--mode", "classic"}).out, "9/16\n");
    EXPECT_EQ(cli({"classic", "--instance", kTwoBox}).out, "9/16\n");
    EXPECT_EQ(cli({"solve", "--instance", kTwoBox, "--pretty"}).out, "5/8 (~0.625)\n");
    TempDir dir("solve");
    ASSERT_EQ(cli({"solve", "--instance", kTwoBox, "--table", dir / "t.json"}).code, kExitOk);
    auto table = Json::parse(read_text(dir / "t.json"));
    ASSERT_TRUE(table.is_array());
    EXPECT_EQ(table[0].size(), 4u);
    EXPECT_TRUE(table[0].contains("unopened") && table[0].contains("best"));
}

TEST(Cli, ErrorsExitTwo) {
    TempDir dir("errors");
    write_text(dir / "bad.json", "{\"boxes\": [");
    auto r = cli({"solve", "--instance", dir / "bad.json"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_FALSE(r.err.empty());
    write_text(dir / "invalid.json", R"({"boxes":[{"cost":"1","support":[["0","1/2"]]}]})");
    r = cli({"solve", "--instance", dir / "invalid.json"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("box 1"), std::string::npos) << r.err;
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(cli({"solve"}).code, kExitUsage);
    EXPECT_EQ(cli({"solve", "--instance", kTwoBox, "--limit", "1"}).code, kExitUsage);
    EXPECT_EQ(cli({"verify", "--suite", "nope"}).code, kExitUsage);
    EXPECT_EQ(cli({"ptas", "--instance", kTwoBox, "--epsilon", "3/4"}).code, kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, IndexAndSimulation) {
    auto r = cli({"index", "--instance", kTwoBox});
    EXPECT_EQ(r.out, "tau 1 3/4\ntau 2 3/4\npayoff 9/16\n");
    TempDir dir("index");
    r = cli({"index", "--instance", kTwoBox, "--trials", "200", "--seed", "4", "--traces", dir / "t.jsonl", "--summary",
             dir / "s.csv"});
    ASSERT_EQ(r.code, kExitOk);
    std::istringstream lines(read_text(dir / "t.jsonl"));
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        auto j = Json::parse(line);
        EXPECT_TRUE(j.contains("steps") && j.contains("payoff"));
        ++count;
    }
    EXPECT_EQ(count, 200);
    auto csv = read_text(dir / "s.csv");
    EXPECT_EQ(csv.rfind("policy,trials,seed,mean,stderr\nindex,200,4,", 0), 0u) << csv;
    auto again = cli({"index", "--instance", kTwoBox, "--trials", "200", "--seed", "4"});
    EXPECT_NE(again.out.find(csv.substr(csv.find('\n') + 1)), std::string::npos);
}

TEST(Cli, StructuredAndEval) {
    TempDir dir("structured");
    auto r = cli({"structured", "--instance", kTwoBox, "--out", dir / "p.json"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out.substr(0, 4), "5/8\n");
    EXPECT_EQ(cli({"eval", "--instance", kTwoBox, "--policy", dir / "p.json"}).out, "5/8\n");
    write_text(dir / "never.json", R"({"sigma":[1,2],"thresholds":["never"]})");
    EXPECT_EQ(cli({"eval", "--instance", kTwoBox, "--policy", dir / "never.json"}).out, "3/8\n");
    write_text(dir / "dup.json", R"({"sigma":[1,1],"thresholds":["never"]})");
    EXPECT_EQ(cli({"eval", "--instance", kTwoBox, "--policy", dir / "dup.json"}).code, kExitUsage);
}

TEST(Cli, Reduce) {
    TempDir dir("reduce");
    EXPECT_EQ(cli({"reduce", "--partition", "1,1", "--out", dir / "a.json", "--answer"}).out, "yes\n");
    EXPECT_EQ(cli({"reduce", "--partition", "1,2", "--out", dir / "b.json", "--answer"}).out, "no\n");
    EXPECT_EQ(cli({"reduce", "--partition", "1,1,2", "--out", dir / "c.json", "--answer"}).out, "yes\n");
    auto meta = Json::parse(read_text(dir / "c.meta.json"));
    for (const char* key : {"gamma", "delta", "y", "t", "tau_H", "k1", "k2", "C"}) {
        ASSERT_TRUE(meta.contains(key)) << key;
        EXPECT_TRUE(meta[key].is_string());
    }
    EXPECT_EQ(meta["gamma"], "16777216");
    EXPECT_EQ(load_instance(dir / "b.json"), load_instance(PANDORA_FIXTURES "/reduction_1_2.json"));

    auto big = cli({"reduce", "--partition", "1,1,1,1", "--out", dir / "d.json", "--answer"});
    EXPECT_EQ(big.code, kExitUsage);
    EXPECT_NE(big.err.find("n <= 3"), std::string::npos);
    EXPECT_EQ(cli({"reduce", "--partition", "1,1,1,1", "--out", dir / "d.json"}).code, kExitOk);
    EXPECT_EQ(cli({"reduce", "--partition", "1,9", "--out", dir / "e.json"}).code, kExitUsage);
    EXPECT_EQ(cli({"reduce", "--partition", "1,x", "--out", dir / "e.json"}).code, kExitUsage);
}

TEST(Cli, Verify) {
    auto r = cli({"verify", "--suite", "eq1", "--cases", "5", "--seed", "3"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out.rfind("PASS eq1: ", 0), 0u);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    for (const auto& s : verify_suites()) {
        std::ostringstream out;
        EXPECT_EQ(run_verify_suite(s, 2, 3, out), kExitOk) << out.str();
    }
}

TEST(Cli, Ptas) {
    TempDir dir("ptas");
    auto r = cli({"ptas", "--instance", kTwoBox, "--epsilon", "1/4", "--out", dir / "p.json", "--report", dir / "r.csv"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "5/8\n");
    EXPECT_EQ(read_text(dir / "r.csv"), "theta,m,opt_lower,opt_exact,opt_L,lifted_payoff,ratio\n9/2,1,9/16,5/8,65/128,5/8,1\n");
    auto pol = Json::parse(read_text(dir / "p.json"));
    EXPECT_TRUE(pol.is_array());
}

TEST(Cli, BenchIsSortedAndDeterministic) {
    TempDir dir("bench");
    EXPECT_EQ(cli({"bench", "--dir", dir.path().string()}).out, "instance,method,value\n");
    for (std::uint64_t k = 0; k < 6; ++k) {
        auto rng = case_rng(61, k);
        write_text(dir / ("i" + std::to_string(5 - k) + ".json"), instance_to_json(random_instance(rng)).dump());
    }
    fs::copy(kTwoBox, dir / "two_box.json");
    write_text(dir / "broken.json", "[");
    const std::vector<std::string> args{"bench", "--dir", dir.path().string(), "--methods", "dp,index,half-approx,ptas@1/4"};
    set_thread_count(1);
    auto one = cli(args);
    set_thread_count(4);
    auto four = cli(args);
    auto again = cli(args);
    set_thread_count(0);
    EXPECT_EQ(one.code, kExitOk);
    EXPECT_EQ(one.out, four.out);
    EXPECT_EQ(four.out, again.out);
    EXPECT_NE(one.err.find("broken.json"), std::string::npos);
    EXPECT_NE(one.out.find("two_box.json,dp,5/8\n"), std::string::npos);
    EXPECT_NE(one.out.find("two_box.json,index,9/16\n"), std::string::npos);
    std::istringstream lines(one.out);
    std::string line, prev;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        EXPECT_LT(prev, line);
        prev = line;
        ++rows;
    }
    EXPECT_EQ(rows, 7 * 4);
    EXPECT_EQ(cli({"bench", "--dir", dir.path().string(), "--methods", "magic"}).code, kExitUsage);
}

TEST(Cli, LimitsAreIndependentPerCommand) {
    TempDir dir("limits");
    PnoiInstance nine;
    for (int i = 0; i < 9; ++i) nine.boxes.push_back(load_instance(kTwoBox)[0]);
    write_text(dir / "nine.json", instance_to_json(nine).dump());
    EXPECT_EQ(cli({"solve", "--instance", dir / "nine.json"}).out, "767/1024\n");
    auto r = cli({"structured", "--instance", dir / "nine.json"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("limited to 6"), std::string::npos);
}
