#include <gtest/gtest.h>

#include "ofa/pairs.hpp"
#include "ofa/steinberg.hpp"

using namespace ofa;

namespace {

CoeffPtr zmod(int n) { return std::make_shared<CoeffRing>(CoeffRing::zmod(n)); }
OddFormRing symp(int ell, int n) { return ofasymp(ell, as_C(FF(zmod(n)))); }
OddFormRing orth(int ell, int n) { return ofaorth(ell, as_B(FF(zmod(n)))); }

uint64_t failures(const std::vector<FamilyOutcome>& outs) {
  uint64_t n = 0;
  for (const auto& o : outs) n += o.report.failures.size();
  return n;
}

Generator root_gen(const RootSlot& s, const Heis& p) {
  return s.ultra ? gen_xj(s.j, p) : gen_x(s.i, s.j, p.pi);
}

}  // namespace

TEST(Families, UnrelativizedPassOverZ3) {
  for (const OddFormRing& o : {symp(2, 3), orth(2, 3)}) {
    StContext cx = context_of(o);
    SuiteOptions opt;
    opt.budget = 50000;
    EXPECT_EQ(failures(verify_families(cx, unrel_families(cx), opt)), 0u) << o.name;
    EXPECT_EQ(failures(verify_families(cx, presentation_families(cx), opt)), 0u) << o.name;
  }
}

TEST(Families, ChainSignMutationDetected) {
  StContext cx = context_of(symp(3, 3));
  cx.mutation = kMutChainSign;
  SuiteOptions opt;
  opt.budget = 20000;
  auto outs = verify_families(cx, unrel_families(cx), opt);
  ASSERT_GT(failures(outs), 0u);
  bool witnessed = false;
  for (const auto& o : outs)
    for (const auto& r : o.records) witnessed |= r.contains("lhs") && !r["pass"].get<bool>();
  EXPECT_TRUE(witnessed);
}

TEST(Families, SymSignMutationDetected) {
  StContext cx = context_of(symp(2, 3));
  cx.mutation = kMutSymSign;
  SuiteOptions opt;
  opt.budget = 20000;
  EXPECT_GT(failures(verify_families(cx, presentation_families(cx), opt)), 0u);
}

TEST(Families, RelativeOverAdmissibleCrossedModule) {
  CrossedModule cm = crossed_ofasymp(zmod(4), 0b0101, 0b0001, 2);
  StContext cx = context_of(cm);
  SuiteOptions opt;
  opt.budget = 20000;
  EXPECT_EQ(failures(verify_families(cx, presentation_families(cx), opt)), 0u);
}

TEST(Families, DigestIndependentOfWorkers) {
  StContext cx = context_of(symp(2, 3));
  SuiteOptions a, b;
  a.budget = b.budget = 3000;
  b.workers = 3;
  auto fa = verify_families(cx, presentation_families(cx), a);
  auto fb = verify_families(cx, presentation_families(cx), b);
  ASSERT_EQ(fa.size(), fb.size());
  for (size_t i = 0; i < fa.size(); ++i) {
    EXPECT_EQ(fa[i].digest, fb[i].digest) << fa[i].report.check;
    EXPECT_EQ(fa[i].report.to_json().dump(), fb[i].report.to_json().dump());
  }
}

TEST(Commutator, ExpansionMatchesGroupCommutator) {
  OddFormRing o = symp(2, 3);
  StContext cx = context_of(o);
  RootSystem rs = build_root_system(RootKind::BC, 2);
  int checked = 0;
  for (int a = 0; a < rs.size(); ++a)
    for (int b = 0; b < rs.size(); ++b) {
      if (a == b || rs.negate(a) == b) continue;
      // parallel and antiparallel pairs like (e_i, +-2e_i) have no expansion
      int na = rs.negate(a);
      if (rs.half(a) == b || rs.half(b) == a || rs.half(na) == b || rs.half(b) == na) continue;
      auto ca = root_carrier(cx, rs.roots[a]), cb = root_carrier(cx, rs.roots[b]);
      RootSlot sa = root_slot(rs.roots[a]), sb = root_slot(rs.roots[b]);
      for (size_t s = 0; s < std::min<size_t>(ca.size(), 4); ++s)
        for (size_t t = 0; t < std::min<size_t>(cb.size(), 4); ++t) {
          Heis lhs = o.ucomm(stmap(cx, {root_gen(sa, ca[s])}), stmap(cx, {root_gen(sb, cb[t])}));
          Heis rhs = stmap(cx, commutator_expansion(cx, rs.roots[a], rs.roots[b], ca[s], cb[t]));
          EXPECT_EQ(lhs, rhs) << rs.serialize(a) << " " << rs.serialize(b);
          ++checked;
        }
    }
  EXPECT_GT(checked, 100);
  EXPECT_THROW(commutator_expansion(cx, rs.roots[0], rs.roots[rs.negate(0)], Heis{}, Heis{}),
               std::exception);
}

TEST(Injectivity, AllSaturatedSpecialOfBC2) {
  StContext cx = context_of(symp(2, 2));
  RootSystem rs = build_root_system(RootKind::BC, 2);
  for (RootSet s : saturated_special_subsets(rs)) {
    Report r = product_injectivity(cx, rs, s);
    EXPECT_TRUE(r.ok()) << rs.serialize(s);
  }
}

TEST(Injectivity, DroppedFactorDetected) {
  StContext cx = context_of(symp(2, 2));
  cx.mutation = kMutDropFactor;
  RootSystem rs = build_root_system(RootKind::BC, 2);
  int caught = 0;
  for (RootSet s : saturated_special_subsets(rs))
    if (s) caught += !product_injectivity(cx, rs, s).ok();
  EXPECT_GT(caught, 0);
}

TEST(Quotients, SummedFamiliesAreHyperbolic) {
  OddFormRing o = symp(3, 2);
  RootSystem rs = build_root_system(RootKind::BC, 3);
  EXPECT_TRUE(check_quotient_family(o, quotient_family(o, rs, 0)).ok());
  // merge the first two coordinates: kernel is the BC subsystem on e1, e2 minus its
  // diagonal, i.e. the roots +-(e1 - e2)
  RootSet psi = 0;
  for (int i = 0; i < rs.size(); ++i) {
    const auto& c = rs.roots[i].c;
    if (c[2] == 0 && c[0] == -c[1] && c[0] != 0) psi |= RootSet(1) << i;
  }
  QuotientFamily qf = quotient_family(o, rs, psi);
  EXPECT_EQ(qf.classes.size(), 2u);
  EXPECT_TRUE(check_quotient_family(o, qf).ok());
}
