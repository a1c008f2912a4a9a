#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctd/app.hpp"

using namespace ctd;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = app::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string model(const std::string& name) { return std::string(CTD_MODELS_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("ctd_cli_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(CliCheck, PrisonersDilemma) {
  const Result ok = run({"check", model("pd.json"), "--conditions", "5a,5b,5c,5d"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_TRUE(contains(ok.out, "5d: holds"));

  const Result bad = run({"check", model("pd.json"), "--conditions", "5e"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_TRUE(contains(bad.out, "5e: fails: X={CC,CD,DC}, Y={CC,CD}, Z={CD,DC}")) << bad.out;

  const Result cap = run({"check", model("pd.json"), "--construction", "cap"});
  EXPECT_EQ(cap.code, 1);
  EXPECT_TRUE(contains(cap.out, "5d: fails: X={}, Y={}, Z={CC,CD}")) << cap.out;
  EXPECT_TRUE(contains(cap.out, "5e: holds"));
}

TEST(CliCheck, AxiomsAndEmptyContext) {
  EXPECT_EQ(run({"check", model("pd.json"), "--conditions", "sub,referee,I-d,Ie"}).code, 0);
  const Result empty = run({"check", model("pd.json"), "--conditions", "5a", "--include-empty-context"});
  EXPECT_EQ(empty.code, 1);
  EXPECT_TRUE(contains(empty.out, "5a: fails: X={}"));
  EXPECT_EQ(run({"check", model("two_worlds_ob.json")}).code, 0);
  EXPECT_EQ(run({"check", model("two_worlds_ob.json"), "--conditions", "Id"}).code, 2);
  EXPECT_EQ(run({"check", model("pd.json"), "--conditions", "5z"}).code, 2);
}

TEST(CliCheck, MalformedFilesExitTwo) {
  const std::string undeclared = write_temp("undeclared.json", R"({
    "worlds": ["a", "b"],
    "valuation": {"p": ["a", "c"]},
    "scores": {"a": 0, "b": 1},
    "options": {"construction": "sup"}
  })");
  const Result r = run({"check", undeclared});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "'c'")) << r.err;

  const std::string two_sources = write_temp("two_sources.json", R"({
    "worlds": ["a"], "scores": {"a": 0}, "F": {"a": ["a"]}, "options": {"construction": "sup"}
  })");
  EXPECT_EQ(run({"check", two_sources}).code, 2);

  const std::string no_construction = write_temp("no_construction.json", R"({"worlds": ["a"], "scores": {"a": 0}})");
  EXPECT_EQ(run({"check", no_construction}).code, 2);

  const std::string missing_ctx = write_temp("missing_ctx.json", R"({
    "worlds": ["a", "b"], "F": {"a,b": ["a"], "a": ["a"]}, "options": {"construction": "cap"}
  })");
  EXPECT_EQ(run({"check", missing_ctx}).code, 2);

  const std::string not_json = write_temp("not_json.json", "{ \"worlds\": [");
  EXPECT_EQ(run({"check", not_json}).code, 2);
  EXPECT_EQ(run({"check", "/nonexistent/model.json"}).code, 2);
}

TEST(CliQuery, Conditionals) {
  const Result r = run({"query", model("pd.json"), "O(~C_me | D_other)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "O(~C_me | D_other) under sup: true"));
  EXPECT_EQ(run({"query", model("pd.json"), "O(D_me|D_other)", "--construction", "cap"}).code, 0);
  EXPECT_EQ(run({"query", model("pd.json"), "O(T|T)"}).code, 0);
  EXPECT_EQ(run({"query", model("pd.json"), "O(F|T)"}).code, 1);
  // A disjunctive condition needs parentheses.
  EXPECT_EQ(run({"query", model("pd.json"), "O(D_me | (C_other | D_other))"}).code, 0);
}

TEST(CliQuery, ErrorsExitTwo) {
  const Result syntax = run({"query", model("pd.json"), "O(D_me | & D_other)"});
  EXPECT_EQ(syntax.code, 2);
  EXPECT_TRUE(contains(syntax.err, "offset 9")) << syntax.err;
  const Result unbound = run({"query", model("pd.json"), "O(nice | T)"});
  EXPECT_EQ(unbound.code, 2);
  EXPECT_TRUE(contains(unbound.err, "nice"));
  EXPECT_EQ(run({"query", model("pd.json"), "D_me"}).code, 2);
}

TEST(CliDerive, Replay) {
  const Result r = run({"derive"});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::vector<std::string> rules{"[seed]", "[R-e;", "[R-d;", "[set-identity;", "[R-e;", "[R-b;"};
  std::size_t at = 0;
  for (const auto& rule : rules) {
    at = r.out.find(rule, at);
    ASSERT_NE(at, std::string::npos) << rule;
  }
  EXPECT_TRUE(contains(r.out, "conclusion: {1,3} ∈ ob({0,1})"));

  const Result file = run({"derive", model("theorem1.json"), "--A", "A", "--B", "B"});
  EXPECT_EQ(file.code, 0);
  EXPECT_EQ(file.out, r.out);

  const Result closure = run({"derive", "--closure"});
  EXPECT_TRUE(contains(closure.out, "108 facts")) << closure.out;
  EXPECT_TRUE(contains(closure.out, "conclusion derived"));
}

TEST(CliDerive, NonGenericPair) {
  const Result r = run({"derive", "--A", "2,3", "--B", "2,3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "error:"));
  EXPECT_TRUE(contains(r.out, "A∖B"));
  EXPECT_EQ(run({"derive", "--n", "3", "--A", "1", "--B", "2"}).code, 1);
  EXPECT_EQ(run({"derive", "--A", "9", "--B", "1"}).code, 2);
}

TEST(CliSearch, Reports) {
  const Result t2 = run({"search", "theorem2", "--n", "3", "--exhaustive"});
  EXPECT_EQ(t2.code, 0);
  EXPECT_TRUE(contains(t2.out, "4096 candidates, 0 violations")) << t2.out;

  const Result cx = run({"search", "counterexample", "5d-under-cap", "--n", "3"});
  EXPECT_EQ(cx.code, 0);
  EXPECT_TRUE(contains(cx.out, "counterexample found"));
  EXPECT_TRUE(contains(cx.out, "smallest witnessing size: 2"));

  const Result none = run({"search", "counterexample", "5e-under-sup", "--n", "2"});
  EXPECT_EQ(none.code, 1);
  EXPECT_TRUE(contains(none.out, "no counterexample"));

  const Result conflict = run({"search", "conflict", "--n", "4"});
  EXPECT_EQ(conflict.code, 0);
  EXPECT_TRUE(contains(conflict.out, "24 ordered generic pairs (12 unordered), 24 confirmed"));
}

TEST(CliSearch, GuardsAndUsage) {
  EXPECT_EQ(run({"search", "theorem2", "--n", "5", "--exhaustive"}).code, 2);
  EXPECT_EQ(run({"search", "theorem2", "--n", "4", "--exhaustive"}).code, 2);
  EXPECT_EQ(run({"search", "theorem2", "--exhaustive", "--sampled"}).code, 2);
  EXPECT_EQ(run({"search", "counterexample", "5c-under-cap"}).code, 2);
  EXPECT_EQ(run({"search", "nonsense"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  const Result help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_TRUE(contains(help.out, "search"));
}

TEST(CliSearch, ByteIdenticalRepeats) {
  const std::vector<std::string> args{"--json", "--seed", "9", "--threads", "3", "search", "5abc", "--n", "4", "--samples", "3000"};
  const Result a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  std::vector<std::string> one = args;
  one[4] = "1";
  EXPECT_EQ(run(one).out, a.out);
}

TEST(CliJson, Structure) {
  const Result r = run({"--json", "check", model("pd.json")});
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["command"], "check");
  EXPECT_EQ(j["verdicts"].size(), 5u);
  EXPECT_EQ(j["verdicts"][4]["condition"], "5e");
  EXPECT_EQ(j["verdicts"][4]["holds"], false);
  EXPECT_FALSE(j["all_hold"].get<bool>());

  const auto q = nlohmann::json::parse(run({"--json", "query", model("pd.json"), "O(D_me|D_other)"}).out);
  EXPECT_TRUE(q["holds"].get<bool>());
  EXPECT_EQ(q["context"], nlohmann::json({"CD", "DD"}));

  const auto s = nlohmann::json::parse(run({"--json", "search", "theorem3", "--n", "2"}).out);
  EXPECT_EQ(s["report"]["violation_count"], 0);
  EXPECT_TRUE(s["report"]["clean"].get<bool>());

  const auto d = nlohmann::json::parse(run({"--json", "derive"}).out);
  EXPECT_EQ(d["trace"].size(), 6u);
  EXPECT_TRUE(d["valid"].get<bool>());
}

TEST(CliDump, RoundTrip) {
  for (const char* name : {"pd.json", "theorem1.json", "two_worlds_ob.json"}) {
    const Result first = run({"check", model(name), "--dump"});
    ASSERT_EQ(first.code, 0) << name << first.err;
    EXPECT_EQ(load_model_text(first.out), load_model_file(model(name))) << name;
    const std::string again = write_temp(std::string("dump_") + name, first.out);
    EXPECT_EQ(run({"check", again, "--dump"}).out, first.out) << name;
  }
  std::ifstream in(model("pd.json"));
  const std::string stored((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(run({"demo", "pd", "--dump"}).out, stored);
}

TEST(CliDemo, Fixtures) {
  const Result pd = run({"demo"});
  EXPECT_EQ(pd.code, 0);
  EXPECT_TRUE(contains(pd.out, "O(D_me | D_other): true"));
  EXPECT_TRUE(contains(pd.out, "F({CC,CD,DC,DD}) = {DC}"));
  EXPECT_TRUE(contains(pd.out, "F({CD,DD}) = {DD}"));
  EXPECT_EQ(run({"demo", "theorem1"}).code, 0);
  EXPECT_EQ(run({"demo", "other"}).code, 2);
}
