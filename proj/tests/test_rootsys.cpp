#include <gtest/gtest.h>

#include <bit>

#include "ofa/rootsys.hpp"

using namespace ofa;

TEST(RootSystem, Counts) {
  EXPECT_EQ(build_root_system(RootKind::BC, 1).size(), 4);
  EXPECT_EQ(build_root_system(RootKind::BC, 3).size(), 24);
  EXPECT_EQ(build_root_system(RootKind::B, 3).size(), 18);
  EXPECT_EQ(build_root_system(RootKind::C, 3).size(), 18);
  RootSystem f4 = build_root_system(RootKind::F, 4);
  ASSERT_EQ(f4.size(), 48);
  int shortc = 0;
  for (const auto& r : f4.roots) shortc += r.cls == LengthClass::Short;
  EXPECT_EQ(shortc, 24);
}

TEST(RootSystem, NegationAndSums) {
  for (auto [k, n] : {std::pair{RootKind::BC, 3}, {RootKind::F, 4}}) {
    RootSystem rs = build_root_system(k, n);
    for (int i = 0; i < rs.size(); ++i) {
      EXPECT_EQ(rs.negate(rs.negate(i)), i);
      EXPECT_EQ(rs.sum(i, rs.negate(i)), -1);
      for (int j = 0; j < rs.size(); ++j) EXPECT_EQ(rs.sum(i, j), rs.sum(j, i));
    }
  }
}

TEST(SaturatedSpecial, FrozenCounts) {
  EXPECT_EQ(saturated_special_subsets(build_root_system(RootKind::BC, 1)).size(), 3u);
  EXPECT_EQ(saturated_special_subsets(build_root_system(RootKind::BC, 2)).size(), 33u);
  EXPECT_EQ(saturated_special_subsets(build_root_system(RootKind::BC, 3)).size(), 941u);
  EXPECT_EQ(saturated_special_subsets(build_root_system(RootKind::B, 3)).size(), 1235u);
  EXPECT_EQ(saturated_special_subsets(build_root_system(RootKind::C, 3)).size(), 1225u);
}

TEST(SaturatedSpecial, EverySubsetIsSpecialAndSaturated) {
  RootSystem rs = build_root_system(RootKind::BC, 2);
  for (RootSet s : saturated_special_subsets(rs)) {
    EXPECT_TRUE(is_closed(rs, s));
    EXPECT_TRUE(is_special(rs, s));
    EXPECT_TRUE(is_saturated(rs, s));
    EXPECT_EQ(saturate(rs, s), s);
  }
  EXPECT_FALSE(is_special(rs, rs.all()));
}

TEST(SaturatedSpecial, SampleIsSeededAndValid) {
  RootSystem rs = build_root_system(RootKind::BC, 4);
  auto a = sample_saturated_special(rs, 20, 5);
  auto b = sample_saturated_special(rs, 20, 5);
  EXPECT_EQ(a, b);
  for (RootSet s : a) {
    EXPECT_TRUE(is_special(rs, s));
    EXPECT_TRUE(is_saturated(rs, s));
  }
}

TEST(Quotient, MergingTwoCoordinates) {
  RootSystem rs = build_root_system(RootKind::BC, 3);
  RootSet psi = 0;  // +-(e1 - e2)
  for (int i = 0; i < rs.size(); ++i) {
    const auto& c = rs.roots[i].c;
    if (c[2] == 0 && c[0] == -c[1] && c[0] != 0) psi |= RootSet(1) << i;
  }
  ASSERT_EQ(std::popcount(psi), 2);
  QuotientSystem q = quotient(rs, psi);
  EXPECT_EQ(q.kernel, psi);
  EXPECT_EQ(q.reps.size(), 2u);
  EXPECT_EQ(q.quotient.rank, 2);
  for (int i = 0; i < rs.size(); ++i) {
    if ((psi >> i) & 1) {
      EXPECT_EQ(q.proj[i], -1);
    } else {
      EXPECT_GE(q.proj[i], 0);
    }
  }
  EXPECT_EQ(q.preimage(q.image(rs.all() & ~psi)) & psi, 0u);
}
