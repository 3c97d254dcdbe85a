#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coevo/cli.hpp"
#include "support.hpp"

using namespace coevo;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("coevo-cli-" + std::to_string(::getpid()) + "-" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitOne) {
    EXPECT_EQ(cli({}).code, 1);
    EXPECT_EQ(cli({"frobnicate"}).code, 1);
    EXPECT_EQ(cli({"case", "run"}).code, 1);
    auto help = cli({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("history"), std::string::npos);
}

TEST_F(CliTest, CaseRunMatchesGolden) {
    ASSERT_EQ(cli({"case", "gen", "--states", "3", "--transitions", "1", "--pad", "0", "--seed", "42", "-o", path("f1.json")}).code, 0);
    EXPECT_EQ(testkit::read_text(path("f1.json")), testkit::read_text(testkit::fixture_path("f1.java-model.json")));
    auto run = cli({"case", "run", "--model", path("f1.json"), "-o", path("sm.json"), "--report", path("report.txt")});
    ASSERT_EQ(run.code, 0) << run.err;
    EXPECT_NE(run.out.find("step ExtractStates"), std::string::npos);
    EXPECT_EQ(testkit::read_text(path("report.txt")), run.out);
    auto diff = cli({"model", "diff", path("sm.json"), testkit::fixture_path("f1.sm.golden.json")});
    EXPECT_EQ(diff.code, 0);
    EXPECT_EQ(diff.out, "isomorphic\n");
}

TEST_F(CliTest, DiffReportsFirstDifference) {
    cli({"case", "gen", "--states", "3", "-o", path("a.json")});
    cli({"case", "gen", "--states", "4", "-o", path("b.json")});
    auto diff = cli({"model", "diff", path("a.json"), path("b.json")});
    EXPECT_EQ(diff.code, 1);
    EXPECT_FALSE(diff.out.empty());
}

TEST_F(CliTest, ModelCheckReportsViolations) {
    auto good = cli({"model", "check", "--model", testkit::fixture_path("f1.java-model.json")});
    EXPECT_EQ(good.code, 0);
    EXPECT_EQ(good.out, "conforms\n");
    auto bad = write("bad.json", R"({"resources":[{"uri":"r","roots":["m"]}],"elements":[
        {"id":"m","class":"sm.sm.StateMachine","slots":{"states":["s"]}},
        {"id":"s","class":"sm.sm.State","slots":{}}]})");
    auto r = cli({"model", "check", "--model", bad});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("sm.sm.State.name"), std::string::npos) << r.out;
    EXPECT_EQ(cli({"model", "check", "--model", path("missing.json")}).code, 1);
}

TEST_F(CliTest, HistoryLifecycle) {
    auto mm = write("shop.json", testkit::shop_metamodels()->dump("shop"));
    auto h = path("h.json");
    ASSERT_EQ(cli({"history", "init", "--metamodel", mm, "-o", h}).code, 0);
    auto apply = cli({"op", "apply", "--history", h, "--name", "rename", "--bind", "element=shop.shop.Item", "--bind", "newName=Thing"});
    ASSERT_EQ(apply.code, 0) << apply.err;
    EXPECT_EQ(apply.out, "rename(element=shop.shop.Item, newName=Thing)\n");
    auto refused = cli({"history", "apply", "--history", h, "--name", "rename", "--bind", "element=shop.shop.Thing", "--bind", "newName=Store"});
    EXPECT_EQ(refused.code, 1);
    EXPECT_NE(refused.err.find("[unique-name]"), std::string::npos) << refused.err;
    EXPECT_EQ(cli({"op", "apply", "--history", h, "--name", "rename", "--bind", "oops"}).code, 1);
    EXPECT_EQ(cli({"op", "apply", "--history", h, "--name", "nope"}).code, 1);

    auto prims = write("p.json", R"([{"kind":"set-property","element":"shop.shop.Thing.next","property":"upper","new":"*"}])");
    auto custom = cli({"history", "custom", "--history", h, "--primitives", prims});
    ASSERT_EQ(custom.code, 0) << custom.err;
    EXPECT_EQ(custom.out, "custom[1 change]\n");
    ASSERT_EQ(cli({"history", "release", "--history", h}).code, 0);
    EXPECT_EQ(cli({"history", "release", "--history", h}).code, 1);
    EXPECT_EQ(cli({"history", "release", "--history", h, "--force"}).code, 0);

    auto model = write("m.json", R"({"resources":[{"uri":"r","roots":["s"]}],"elements":[
        {"id":"s","class":"shop.shop.Store","slots":{"items":["i","j"]}},
        {"id":"i","class":"shop.shop.Item","slots":{"name":"a","color":"Red","next":["j"]}},
        {"id":"j","class":"shop.shop.Item","slots":{"name":"b","color":"Blue"}}]})");
    auto migrated = cli({"history", "migrate", "--history", h, "--model", model, "-o", path("out.json")});
    ASSERT_EQ(migrated.code, 0) << migrated.err;
    auto check = cli({"model", "check", "--history", h, "--model", path("out.json")});
    EXPECT_EQ(check.code, 0) << check.out;
    EXPECT_NE(testkit::read_text(path("out.json")).find("shop.shop.Thing"), std::string::npos);

    auto list = cli({"op", "list", "--history", h, "--select", "shop.shop.Thing.color"});
    ASSERT_EQ(list.code, 0);
    auto ops = json::parse(list.out);
    EXPECT_EQ(ops.size(), 7U);
    EXPECT_EQ(ops[5]["name"], "enumToSubclasses");
    EXPECT_EQ(ops[5]["applicable"], true);
}

TEST_F(CliTest, CaseHistoryMigrateMatchesCaseRun) {
    ASSERT_EQ(cli({"case", "history", "-o", path("h.json")}).code, 0);
    auto run = cli({"history", "migrate", "--history", path("h.json"), "--model", testkit::fixture_path("f1.java-model.json"),
                    "-o", path("out.json")});
    ASSERT_EQ(run.code, 0) << run.err;
    EXPECT_NE(testkit::read_text(path("out.json")).find("sm.sm.Transition"), std::string::npos);
}

TEST_F(CliTest, DeterministicOutputs) {
    std::vector<std::string> gen{"case", "gen", "--states", "5", "--transitions", "2", "--pad", "20", "--seed", "3", "-o"};
    auto a = gen;
    a.push_back(path("a.json"));
    auto b = gen;
    b.push_back(path("b.json"));
    EXPECT_EQ(cli(a).code, 0);
    EXPECT_EQ(cli(b).code, 0);
    EXPECT_EQ(testkit::read_text(path("a.json")), testkit::read_text(path("b.json")));
    cli({"case", "run", "--model", path("a.json"), "-o", path("sa.json")});
    cli({"case", "run", "--model", path("b.json"), "-o", path("sb.json")});
    EXPECT_EQ(testkit::read_text(path("sa.json")), testkit::read_text(path("sb.json")));
}

TEST_F(CliTest, BenchInverse) {
    auto r = cli({"bench", "inverse", "--size", "300", "--queries", "100", "--seed", "2"});
    ASSERT_EQ(r.code, 0);
    auto doc = json::parse(r.out);
    EXPECT_EQ(doc["modelSize"], 300);
    EXPECT_TRUE(doc.contains("ratio"));
}
