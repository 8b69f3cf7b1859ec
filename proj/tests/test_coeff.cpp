#include <gtest/gtest.h>

#include "ofa/coeff.hpp"

using namespace ofa;

TEST(Zmod, TablesMatchIntegerArithmetic) {
  CoeffRing r = CoeffRing::zmod(6);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      EXPECT_EQ(r.add(a, b), (a + b) % 6);
      EXPECT_EQ(r.mul(a, b), (a * b) % 6);
    }
  EXPECT_EQ(r.neg(1), 5);
  EXPECT_EQ(r.from_int(-1), 5);
  EXPECT_EQ(r.from_int(13), 1);
  EXPECT_EQ(r.one(), 1);
}

TEST(Zmod, RejectsOversizedModulus) {
  EXPECT_THROW(CoeffRing::zmod(33), std::invalid_argument);
  EXPECT_THROW(CoeffRing::zmod(0), std::invalid_argument);
}

TEST(Zmod, AdditiveClosure) {
  CoeffRing r = CoeffRing::zmod(6);
  EXPECT_EQ(r.additive_closure(Mask(1) << 2), Mask(0b010101));
  EXPECT_EQ(r.additive_closure(Mask(1) << 1), r.full());
  EXPECT_EQ(r.elements(Mask(0b1001)), (std::vector<uint8_t>{0, 3}));
}

TEST(Semidirect, ProjectionsAndSectionAreRingMaps) {
  CoeffRing k = CoeffRing::zmod(4);
  std::vector<uint8_t> p1, p2, sec;
  Mask ideal = Mask(0b0101);  // 2Z/4
  CoeffRing s = CoeffRing::semidirect(k, ideal, &p1, &p2, &sec);
  ASSERT_EQ(s.size(), 8);
  for (int x = 0; x < s.size(); ++x)
    for (int y = 0; y < s.size(); ++y)
      for (auto* f : {&p1, &p2}) {
        EXPECT_EQ((*f)[s.add(x, y)], k.add((*f)[x], (*f)[y]));
        EXPECT_EQ((*f)[s.mul(x, y)], k.mul((*f)[x], (*f)[y]));
      }
  for (int x = 0; x < 4; ++x) {
    EXPECT_EQ(p1[sec[x]], x);
    EXPECT_EQ(p2[sec[x]], x);
  }
  EXPECT_EQ(p1[s.one()], k.one());
}

TEST(Semidirect, MapMask) {
  CoeffRing k = CoeffRing::zmod(4);
  std::vector<uint8_t> dbl = {0, 2, 0, 2};
  EXPECT_EQ(map_mask(k, k.full(), dbl), Mask(0b0101));
}
