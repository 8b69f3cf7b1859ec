#include <gtest/gtest.h>

#include <set>

#include "ofa/chevalley.hpp"
#include "ofa/pairs.hpp"

using namespace ofa;

namespace {

CoeffPtr zmod(int n) { return std::make_shared<CoeffRing>(CoeffRing::zmod(n)); }

uint64_t failures(const std::vector<FamilyOutcome>& outs) {
  uint64_t n = 0;
  for (const auto& o : outs) n += o.report.failures.size();
  return n;
}

}  // namespace

TEST(StructureConstants, ValidOnDoublyLacedSystems) {
  for (auto [k, n] : {std::pair{RootKind::B, 3}, {RootKind::C, 3}, {RootKind::F, 4}}) {
    RootSystem rs = build_root_system(k, n);
    StructureConstants sc = derive_structure_constants(rs);
    Report r = check_structure_constants(rs, sc);
    EXPECT_TRUE(r.ok()) << rs.name() << " " << r.failures.front().check;
    EXPECT_GT(r.instances, 1000u);
    for (int a = 0; a < rs.size(); ++a)
      for (int b = 0; b < rs.size(); ++b) {
        EXPECT_EQ(sc.at(a, b), -sc.at(b, a));
        if (rs.sum(a, b) < 0) EXPECT_EQ(sc.at(a, b), 0);
        else EXPECT_NE(sc.at(a, b), 0);
      }
  }
}

TEST(StructureConstants, ExtraspecialPairIsPositive) {
  RootSystem rs = build_root_system(RootKind::F, 4);
  StructureConstants sc = derive_structure_constants(rs);
  // the first positive pair with a root sum, in root order
  bool found = false;
  for (int s = 0; s < rs.size() && !found; ++s) {
    if (rs.roots[s].height <= 1) continue;
    for (int a = 0; a < rs.size() && !found; ++a) {
      int b = -1;
      for (int t = 0; t < rs.size(); ++t)
        if (rs.sum(a, t) == s) b = t;
      if (b < 0 || rs.roots[a].height <= 0 || rs.roots[b].height <= 0) continue;
      EXPECT_GT(sc.at(a, b), 0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(StructureConstants, MutationDetected) {
  RootSystem rs = build_root_system(RootKind::C, 3);
  StructureConstants sc = derive_structure_constants(rs);
  auto [a, b] = mutate_structure_constants(rs, sc);
  EXPECT_GE(a, 0);
  EXPECT_GE(b, 0);
  EXPECT_FALSE(check_structure_constants(rs, sc).ok());
}

TEST(Oracles, DictionaryRealizesDerivedConstants) {
  for (RootKind k : {RootKind::B, RootKind::C}) {
    RootSystem rs = build_root_system(k, 3);
    EXPECT_EQ(dictionary_signs(k, 3).size(), size_t(rs.size()));
    DLSetting st = dl_setting_ff(k, 3, zmod(5));
    ASSERT_FALSE(st.targets.empty());
    const DLTarget& t = *st.targets[0];
    for (int a = 0; a < rs.size(); ++a)
      for (int b = 0; b < rs.size(); ++b)
        if (rs.sum(a, b) >= 0) EXPECT_EQ(t.constant(a, b), st.sc.at(a, b)) << a << " " << b;
  }
}

TEST(Dl, SteinbergRelationsPass) {
  SuiteOptions opt;
  opt.budget = 0;
  for (auto [k, n] : {std::pair{RootKind::B, 2}, {RootKind::C, 3}}) {
    DLSetting st = dl_setting_ff(k, 3, zmod(n));
    auto outs = verify_dl(st, opt);
    EXPECT_EQ(failures(outs), 0u) << st.name;
    for (const auto& o : outs) EXPECT_EQ(o.report.mode, "exhaustive");
  }
}

TEST(Dl, TableMutationDetectedOverZ3) {
  DLSetting st = dl_setting_ff(RootKind::C, 3, zmod(3));
  mutate_setting(st);
  SuiteOptions opt;
  opt.budget = 0;
  auto outs = verify_dl(st, opt);
  ASSERT_GT(failures(outs), 0u);
  bool witness = false;
  for (const auto& o : outs)
    for (const auto& r : o.records) witness |= r.contains("lhs") && r.contains("rhs");
  EXPECT_TRUE(witness);
}

TEST(VModule, ShortSumLawMatchesProducts) {
  DLSetting st = dl_setting_ff(RootKind::C, 3, zmod(3));
  const CoeffRing& k = *st.co.ring;
  std::optional<VShape> sh;
  for (int a = 0; a < st.rs.size() && !sh; ++a)
    for (int b = 0; b < st.rs.size() && !sh; ++b) {
      auto s = v_shape(st.rs, a, b);
      if (s && s->kind == VKind::ShortSum) sh = s;
    }
  ASSERT_TRUE(sh);
  int typo_mismatch = 0;
  for (int x = 0; x < 27; ++x)
    for (int y = 0; y < 27; ++y) {
      VElem u{uint8_t(x % 3), uint8_t(x / 3 % 3), uint8_t(x / 9)};
      VElem v{uint8_t(y % 3), uint8_t(y / 3 % 3), uint8_t(y / 9)};
      auto w = v_word(*sh, u);
      auto wv = v_word(*sh, v);
      w.insert(w.end(), wv.begin(), wv.end());
      VElem prod = v_from_word(st, *sh, w);
      EXPECT_EQ(v_add(st, *sh, u, v), prod);
      // the law with a stray + z' in the middle slot
      VElem typo = v_add(st, *sh, u, v);
      typo[1] = k.add(typo[1], v[2]);
      typo_mismatch += typo != prod;
    }
  EXPECT_GT(typo_mismatch, 0);
  EXPECT_TRUE(check_vrep(st).ok());
}

TEST(Dispatch, RankThreeSpansOfF4AreClassified) {
  RootSystem rs = build_root_system(RootKind::F, 4);
  std::set<std::string> cats;
  for (int a = 0; a < rs.size(); ++a)
    for (int b = a + 1; b < rs.size(); ++b)
      for (int c = b + 1; c < rs.size(); ++c) {
        SpanInfo s = classify_span(rs, {a, b, c});
        if (s.rank == 3) cats.insert(s.category);
      }
  EXPECT_EQ(cats, (std::set<std::string>{"A1xA2", "B3", "C3"}));
}

TEST(Dispatch, EmbeddingsExistForEachCategory) {
  DLSetting st = dl_setting_ff(RootKind::F, 4, zmod(3));
  ASSERT_TRUE(st.dispatch);
  std::set<std::string> embedded;
  for (int a = 0; a < st.rs.size(); ++a)
    for (int b = 0; b < st.rs.size(); ++b)
      for (int c = 0; c < st.rs.size(); c += 5) {
        SpanInfo s = classify_span(st.rs, {a, b, c});
        if (s.rank != 3 || embedded.count(s.category)) continue;
        for (const auto& t : st.targets)
          if (embed_span(st.rs, st.sc, s, t)) {
            embedded.insert(s.category);
            break;
          }
      }
  EXPECT_EQ(embedded, (std::set<std::string>{"A1xA2", "B3", "C3"}));
}

TEST(Dispatch, F4RelationsPassThroughOracles) {
  DLSetting st = dl_setting_ff(RootKind::F, 4, zmod(3));
  st.cross_check = true;
  SuiteOptions opt;
  opt.budget = 4000;
  auto outs = verify_dl(st, opt);
  EXPECT_EQ(failures(outs), 0u);
  for (const auto& o : outs) EXPECT_EQ(o.report.counts.count("tuples:no-oracle"), 0u) << o.report.check;
}

TEST(Relative, CrossedC3Sampled) {
  DLSetting st = dl_setting_crossed(RootKind::C, 3, zmod(4), 0b0101, 0b0001);
  SuiteOptions opt;
  opt.budget = 3000;
  EXPECT_EQ(failures(verify_relative_dl(st, opt)), 0u);
}

TEST(Relative, TableMutationDetectedOverZ3) {
  // over (2Z/4, 0) every sign flip is invisible, so the fault is planted in char 3
  auto k = zmod(3);
  DLSetting st = dl_setting_crossed(RootKind::C, 3, k, k->full(), k->full());
  SuiteOptions opt;
  opt.budget = 3000;
  EXPECT_EQ(failures(verify_relative_dl(st, opt)), 0u);
  mutate_setting(st);
  EXPECT_GT(failures(verify_relative_dl(st, opt)), 0u);
}
