#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ofa/cli.hpp"

using namespace ofa;

TEST(Presets, ListHasStableNames) {
  auto names = preset_names();
  EXPECT_GE(names.size(), 7u);
  for (const char* n : {"C3-Z2", "C3-Z3", "B3-Z2", "C3-Z4-admissible-b0", "C3-Z4-admissible-b2",
                        "F4-Z4-admissible", "B2-smoke"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  std::string text = list_presets();
  for (const auto& n : names) EXPECT_NE(text.find(n), std::string::npos);
}

TEST(Presets, RoundTripThroughText) {
  for (const auto& n : preset_names()) {
    RunConfig c = preset(n);
    std::string s = serialize_config(c);
    RunConfig back = parse_config(s);
    EXPECT_EQ(serialize_config(back), s) << n;
    EXPECT_EQ(back.name, n);
  }
  EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(Config, ParseErrorsNameTheLine) {
  try {
    parse_config("name x\npair type=F K=Z/4\nconstruction ofasymp rnk=3\nsuites axioms\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line, 3);
  }
  try {
    parse_config("pair type=F K=Z/4\nsuites axioms,bogus\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line, 2);
  }
  EXPECT_THROW(parse_config("pair type=F K=Z/4\nsuites relative-dl\ndl system=C rank=3\n"), ConfigError);
  EXPECT_THROW(parse_config("pair type=F K=Z/99\nsuites dl\n"), ConfigError);
}

TEST(Config, ExplicitPairAndComments) {
  RunConfig c = parse_config(
      "# explicit tables\n"
      "pair type=C K=Z/2 L=Z/2 d=[0,0] u=[0,1]   # d(k) = 2k\n"
      "construction ofasymp rank=2\n"
      "suites axioms\n"
      "budget 5000\n");
  EXPECT_EQ(c.pair.type, 'C');
  EXPECT_EQ(c.pair.u, (std::vector<int>{0, 1}));
  RunResult r = run(c, {});
  EXPECT_EQ(r.failures, 0u);
}

TEST(Config, BrokenPairNamesAxiom) {
  RunConfig c = parse_config("pair type=C K=Z/4 L=Z/4 d=[0,1,0,1]\nconstruction ofasymp rank=2\nsuites axioms\n");
  try {
    run(c, {});
    FAIL();
  } catch (const ConstructionError& e) {
    EXPECT_FALSE(e.axiom.empty());
  }
  RunConfig bad = parse_config(
      "pair type=F K=Z/4\nadmissible a=[1] b=[0]\nconstruction ofasymp rank=2\nsuites crossed\n");
  EXPECT_THROW(run(bad, {}), ConstructionError);
}

TEST(Run, DeterministicAcrossWorkers) {
  RunConfig c = preset("C2-Z2");
  c.budget = 20000;
  RunOptions one, two;
  two.workers = 2;
  RunResult a = run(c, one), b = run(c, two);
  EXPECT_EQ(a.summary.dump(), b.summary.dump());
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_EQ(a.failures, 0u);
}

TEST(Run, MutationsFailEverySuite) {
  RunConfig c = preset("B2-smoke");
  c.suites = {"family", "injectivity", "lemmas"};
  RunOptions o;
  o.mutate = true;
  RunResult r = run(c, o);
  for (const auto& s : r.summary["suites"]) EXPECT_FALSE(s["pass"].get<bool>()) << s["suite"];
  EXPECT_FALSE(r.records.empty());
}

TEST(Main, ExitCodes) {
  auto dir = std::filesystem::temp_directory_path() / "ofa_cli_test";
  std::filesystem::create_directories(dir);
  std::string out = (dir / "out").string();
  {
    const char* argv[] = {"verify", "--preset", "C2-Z2", "--suites", "lemmas", "--out", out.c_str(),
                          "--format", "json"};
    EXPECT_EQ(verify_main(9, const_cast<char**>(argv)), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "records.jsonl"));
  }
  {
    const char* argv[] = {"verify", "--preset", "C2-Z2", "--suites", "lemmas", "--mutate"};
    EXPECT_EQ(verify_main(6, const_cast<char**>(argv)), 1);
  }
  {
    std::ofstream(dir / "bad.cfg") << "pair type=Q K=Z/4\n";
    std::string cfg = (dir / "bad.cfg").string();
    const char* argv[] = {"verify", "--config", cfg.c_str()};
    EXPECT_EQ(verify_main(3, const_cast<char**>(argv)), 2);
  }
  {
    const char* argv[] = {"verify"};
    EXPECT_EQ(verify_main(1, const_cast<char**>(argv)), 0);
  }
}
