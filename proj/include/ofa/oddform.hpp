#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ofa/coeff.hpp"
#include "ofa/report.hpp"

namespace ofa {

constexpr int kMaxDim = 8;

// Square matrix over a CoeffRing, fixed 8x8 storage; only the leading dim x dim
// block is used.
struct Mat {
  std::array<uint8_t, kMaxDim * kMaxDim> v{};
  uint8_t at(int r, int c) const { return v[r * kMaxDim + c]; }
  uint8_t& at(int r, int c) { return v[r * kMaxDim + c]; }
  bool zero() const;
  auto operator<=>(const Mat&) const = default;
};

// Element of Heis(R): (pi, rho).
struct Heis {
  Mat pi, rho;
  bool zero() const { return pi.zero() && rho.zero(); }
  auto operator<=>(const Heis&) const = default;
};

// Ordered list of signed labels naming a (generalized) index, e.g. {1} or {1, 2}
// for the summed pair 1 (+) 2.
using Labels = std::vector<int>;

enum Fault : unsigned {
  kNoFault = 0,
  kFaultPlusSign = 1u << 0,  // cross term of the Heisenberg law gets the wrong sign
};

// Special odd form ring Delta <= Heis(R), R = matrices over a CoeffRing with a
// twisted product A*B = A diag(twist) B. Rows are labelled by signed indices
// (0 is the odd middle row of the orthogonal case). Masks cut out which ring
// elements may sit at which position, so a restricted copy describes a sub odd
// form ring (e.g. the kernel part of a semidirect product) sharing all tables.
struct OddFormRing {
  std::string name;
  CoeffPtr ring;
  bool orth = false;
  int ell = 0;
  int dim = 0;
  std::vector<int> label;       // row -> signed label
  std::vector<int8_t> sign;     // row -> +1/-1 used by the involution
  std::vector<uint8_t> twist;   // diagonal of the twist
  std::vector<Mask> rmask;      // dim*dim admissible entries of R
  std::vector<Mask> zmask;      // dim*dim, used only at positions (r, opp r)
  std::vector<uint8_t> qcoef;   // row -> c with slot (r,c) carrying rho = -c x^2
  unsigned fault = kNoFault;

  int row(int lab) const;
  int opp(int r) const { return dim - 1 - r; }
  const CoeffRing& K() const { return *ring; }

  // ring R
  Mat add(const Mat& a, const Mat& b) const;
  Mat neg(const Mat& a) const;
  Mat sub(const Mat& a, const Mat& b) const { return add(a, neg(b)); }
  Mat mul(const Mat& a, const Mat& b) const;
  Mat bar(const Mat& a) const;
  Mat unit(int rlab, int clab, uint8_t x) const;
  bool in_R(const Mat& a) const;

  // Delta
  Heis plus(const Heis& u, const Heis& v) const;
  Heis hneg(const Heis& u) const;
  Heis minus(const Heis& u, const Heis& v) const { return plus(u, hneg(v)); }
  Heis act(const Heis& u, const Mat& a) const;
  Heis phi(const Mat& a) const;
  Heis canon(const Mat& m) const;
  bool in_delta(const Heis& u) const;

  // unitary group
  bool is_unitary(const Heis& g) const;
  Heis umul(const Heis& g, const Heis& h) const;
  Heis uinv(const Heis& g) const;
  Heis ucomm(const Heis& g, const Heis& h) const;   // g h g^-1 h^-1
  Heis uconj(const Heis& g, const Heis& h) const;   // g h g^-1
  Mat conj_ring(const Heis& g, const Mat& a) const;
  Heis conj_delta(const Heis& g, const Heis& u) const;

  // hyperbolic family data and elementary unitaries
  Mat e_of(const Labels& idx) const;
  Heis q_of(const Labels& idx) const;
  Heis T_ij(const Labels& I, const Labels& J, const Mat& a) const;
  Heis T_j(const Labels& J, const Heis& u) const;
  bool diag_membership(const Heis& g) const;

  std::string show(const Mat& a) const;
  std::string show(const Heis& u) const;
};

// Copy of `base` with masks replaced (all tables shared).
OddFormRing restrict_to(const OddFormRing& base, std::vector<Mask> rmask,
                        std::vector<Mask> zmask, const std::string& name);

// ---- Peirce carriers --------------------------------------------------------

// S_IJ: matrices supported on I x J with admissible entries.
std::vector<Mat> carrier_S(const OddFormRing& ofr, const Labels& I, const Labels& J);
// Theta^0_J relative to the family whose labels are +-`family`: pi lives on the
// rows outside the family, rho on (-J) x J.
std::vector<Heis> carrier_theta0(const OddFormRing& ofr, const Labels& J,
                                 const std::vector<int>& family);
std::vector<int> full_family(const OddFormRing& ofr);
std::vector<int> family_without(const OddFormRing& ofr, int m);
Labels negate(const Labels& idx);

// ---- hyperbolic family checks -----------------------------------------------

struct HyperbolicFamily {
  // indexed by signed label, stored as (label, e, q)
  std::vector<int> labels;
  std::vector<Mat> e;
  std::vector<Heis> q;
};
HyperbolicFamily canonical_family(const OddFormRing& ofr);

struct CheckOptions {
  uint64_t budget = 0;  // 0 = no cap
  uint64_t seed = 1;
  int workers = 1;
};

Report check_axioms(const OddFormRing& ofr, const CheckOptions& opt = {});
Report check_family(const OddFormRing& ofr, const HyperbolicFamily& fam);
// Exhaustive Heisenberg-law associativity/unit plus a (pi, rho) collision scan
// over the closure of the Delta generators (small instances only).
Report check_closure(const OddFormRing& ofr, size_t cap = 1u << 20);

// ---- crossed modules --------------------------------------------------------

// Reflexive-graph presentation: T is the odd form ring over a semidirect
// coefficient ring, S its kernel part, Rsec the section image of R. Coefficient
// maps p1 (a,k) -> a+k, p2 (a,k) -> k, and sec k -> (0,k) act entrywise.
struct CrossedModule {
  std::string name;
  OddFormRing T, S, Rsec;
  std::vector<uint8_t> p1, p2, sec;  // on coefficient indices of T
  CoeffPtr base;                     // K
  // Action hooks; default to the operations of T. Tests swap them to plant faults.
  std::function<Mat(const Mat&, const Mat&)> act_RS, act_SR;
  std::function<Heis(const Heis&, const Mat&)> act_ThetaR, act_DeltaS;

  Mat delta(const Mat& a) const;     // sec(p1(.)) entrywise, lands in Rsec
  Heis delta(const Heis& u) const;
  Mat proj2(const Mat& a) const;     // sec(p2(.)) entrywise
  Heis proj2(const Heis& u) const;
  void reset_actions();
};

Report check_crossed(const CrossedModule& cm, const CheckOptions& opt = {});

// ---- lemma suites -----------------------------------------------------------

Report check_ring_pres(const OddFormRing& ofr, bool corrupt = false);
Report check_form_pres(const OddFormRing& ofr, bool corrupt = false);

// Elements used as test pools.
std::vector<Mat> ring_pool(const OddFormRing& ofr, size_t extra, uint64_t seed);
std::vector<Heis> delta_pool(const OddFormRing& ofr, size_t extra, uint64_t seed);

}  // namespace ofa
