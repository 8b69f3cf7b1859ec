#include <gtest/gtest.h>

#include "ofa/oddform.hpp"
#include "ofa/pairs.hpp"

using namespace ofa;

namespace {

CoeffPtr zmod(int n) { return std::make_shared<CoeffRing>(CoeffRing::zmod(n)); }

OddFormRing symp(int ell, int n) { return ofasymp(ell, as_C(FF(zmod(n)))); }
OddFormRing orth(int ell, int n) { return ofaorth(ell, as_B(FF(zmod(n)))); }

}  // namespace

TEST(Axioms, SymplecticAndOrthogonalPass) {
  for (const OddFormRing& o : {symp(2, 2), symp(2, 3), orth(1, 2), orth(2, 3)}) {
    Report r = check_axioms(o);
    EXPECT_TRUE(r.ok()) << o.name << ": " << r.failures.front().check << " " << r.failures.front().witness;
    EXPECT_GT(r.instances, 0u);
  }
}

TEST(Axioms, PlusSignFaultDetectedOverZ3) {
  OddFormRing o = symp(2, 3);
  o.fault = kFaultPlusSign;
  Report r = check_axioms(o);
  ASSERT_FALSE(r.ok());
  EXPECT_FALSE(r.failures.front().witness.empty());
}

TEST(Axioms, WorkerCountDoesNotChangeReport) {
  OddFormRing o = symp(2, 3);
  CheckOptions one{0, 3, 1}, three{0, 3, 3};
  EXPECT_EQ(check_axioms(o, one).to_json().dump(), check_axioms(o, three).to_json().dump());
}

TEST(Family, CanonicalFamilyIsHyperbolic) {
  for (const OddFormRing& o : {symp(3, 2), orth(2, 2)}) {
    HyperbolicFamily f = canonical_family(o);
    EXPECT_EQ(f.labels.size(), size_t(2 * o.ell));
    EXPECT_TRUE(check_family(o, f).ok()) << o.name;
  }
}

TEST(Family, SwappedIdempotentsDetected) {
  OddFormRing o = symp(2, 2);
  HyperbolicFamily f = canonical_family(o);
  std::swap(f.e[0], f.e[1]);
  EXPECT_FALSE(check_family(o, f).ok());
}

TEST(Unitary, ElementaryUnitariesAndInverses) {
  OddFormRing o = symp(2, 3);
  Mat a = o.unit(1, 2, 2);
  Heis g = o.T_ij({1}, {2}, a);
  EXPECT_TRUE(o.is_unitary(g));
  Heis one = o.umul(g, o.uinv(g));
  EXPECT_EQ(o.umul(one, g), g);
  EXPECT_EQ(o.umul(g, one), g);
}

TEST(Heisenberg, LawIsAssociativeOnPools) {
  OddFormRing o = orth(1, 3);
  auto pool = delta_pool(o, 4, 11);
  ASSERT_FALSE(pool.empty());
  for (const Heis& u : pool)
    for (const Heis& v : pool) {
      EXPECT_TRUE(o.in_delta(o.plus(u, v)));
      for (const Heis& w : pool) EXPECT_EQ(o.plus(o.plus(u, v), w), o.plus(u, o.plus(v, w)));
    }
}

TEST(Lemmas, RingAndFormPresentations) {
  OddFormRing o = symp(3, 2);
  EXPECT_TRUE(check_ring_pres(o).ok());
  EXPECT_TRUE(check_form_pres(o).ok());
  EXPECT_FALSE(check_ring_pres(o, true).ok());
  EXPECT_FALSE(check_form_pres(o, true).ok());
}

TEST(Closure, SmallInstance) {
  EXPECT_TRUE(check_closure(orth(1, 2)).ok());
}
