#include <gtest/gtest.h>

#include "ofa/pairs.hpp"

using namespace ofa;

namespace {
CoeffPtr zmod(int n) { return std::make_shared<CoeffRing>(CoeffRing::zmod(n)); }
}  // namespace

TEST(Pairs, FFAndItsViewsSatisfyAxioms) {
  for (int n : {2, 3, 4}) {
    PairF f = FF(zmod(n));
    EXPECT_TRUE(check_pair(f).ok()) << n;
    EXPECT_TRUE(check_pair(as_B(f)).ok()) << n;
    EXPECT_TRUE(check_pair(as_C(f)).ok()) << n;
  }
}

TEST(Pairs, BrokenTableNamesAxiom) {
  PairC c = as_C(FF(zmod(4)));
  c.d[1] = 1;
  Report r = check_pair(c);
  ASSERT_FALSE(r.ok());
  EXPECT_FALSE(r.failures.front().check.empty());
}

TEST(Admissible, IdealsOfZ4) {
  CoeffRing k = CoeffRing::zmod(4);
  Mask two = 0b0101, zero = 0b0001, all = k.full();
  EXPECT_TRUE(admissible(k, two, zero, 'C'));
  EXPECT_TRUE(admissible(k, two, two, 'C'));
  EXPECT_TRUE(admissible(k, two, two, 'F'));
  EXPECT_TRUE(admissible(k, all, all, 'B'));
  EXPECT_FALSE(admissible(k, all, zero, 'C'));  // 2a must lie in b
  EXPECT_FALSE(admissible(k, zero, two, 'C'));  // b inside a
}

TEST(Crossed, SemidirectPairsPass) {
  EXPECT_TRUE(check_crossed_pair(semidirect_pair(zmod(4), 0b0101, 0b0001)).ok());
  EXPECT_TRUE(check_crossed_pair(semidirect_pair(zmod(4), 0b0101, 0b0101)).ok());
}

TEST(Crossed, ModulesFromAdmissiblePairs) {
  CrossedModule cm = crossed_ofasymp(zmod(4), 0b0101, 0b0001, 2);
  CheckOptions opt{200000, 1, 1};
  Report r = check_crossed(cm, opt);
  EXPECT_TRUE(r.ok()) << r.failures.front().check;
  EXPECT_THROW(crossed_ofasymp(zmod(4), 0b1111, 0b0001, 2), std::invalid_argument);
}

TEST(Crossed, ZeroDeltaDetected) {
  auto k = zmod(3);
  CrossedModule cm = crossed_ofasymp(k, k->full(), k->full(), 2);
  CheckOptions opt{100000, 1, 1};
  ASSERT_TRUE(check_crossed(cm, opt).ok());
  std::fill(cm.p1.begin(), cm.p1.end(), 0);
  EXPECT_FALSE(check_crossed(cm, opt).ok());
}

TEST(Crossed, SwappedActionDetected) {
  CrossedModule cm = crossed_ofasymp(zmod(4), 0b0101, 0b0101, 2);
  const OddFormRing* t = &cm.T;
  cm.act_SR = [t](const Mat& s, const Mat& r) { return t->mul(r, s); };
  CheckOptions opt{100000, 1, 1};
  EXPECT_FALSE(check_crossed(cm, opt).ok());
}

TEST(Crossed, OrthogonalModule) {
  CrossedModule cm = crossed_ofaorth(zmod(4), 0b0101, 0b0101, 1);
  CheckOptions opt{100000, 1, 1};
  EXPECT_TRUE(check_crossed(cm, opt).ok());
}
