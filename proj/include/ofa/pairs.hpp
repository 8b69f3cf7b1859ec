#pragma once

#include <string>
#include <vector>

#include "ofa/coeff.hpp"
#include "ofa/oddform.hpp"
#include "ofa/report.hpp"

namespace ofa {

// Finite abelian group by tables (used for the module K of a type B pair and the
// group L of a type C pair).
struct Group {
  int n = 0;
  std::vector<uint8_t> add_t, neg_t;
  std::vector<std::string> labels;
  uint8_t add(uint8_t a, uint8_t b) const { return add_t[a * n + b]; }
  uint8_t neg(uint8_t a) const { return neg_t[a]; }
  static Group of_ring(const CoeffRing& r);
  // Sub-group of a ring given by a mask; elements renumbered in mask order.
  static Group sub_of_ring(const CoeffRing& r, Mask m, std::vector<uint8_t>* embed);
};

// L a ring, K an L-module with a quadratic form s.
struct PairB {
  std::string name;
  CoeffPtr L;
  Group K;
  std::vector<uint8_t> smul;  // (l, k) -> l k, index l * K.n + k
  std::vector<uint8_t> s;     // K -> L
  uint8_t lk(uint8_t l, uint8_t k) const { return smul[l * K.n + k]; }
  uint8_t sb(uint8_t k, uint8_t k2) const;  // s(k|k')
};

// K a ring, L a group with d, u and the action l.k.
struct PairC {
  std::string name;
  CoeffPtr K;
  Group L;
  std::vector<uint8_t> d;    // K -> L
  std::vector<uint8_t> u;    // L -> K
  std::vector<uint8_t> dot;  // (l, k) -> l.k, index l * |K| + k
  uint8_t act(uint8_t l, uint8_t k) const { return dot[l * K->size() + k]; }
};

struct PairF {
  std::string name;
  CoeffPtr K, L;
  std::vector<uint8_t> u;  // L -> K
  std::vector<uint8_t> d;  // K -> L
  std::vector<uint8_t> s;  // K -> L
};

PairF FF(CoeffPtr K);
PairB as_B(const PairF& p);
PairC as_C(const PairF& p);

Report check_pair(const PairB& p);
Report check_pair(const PairC& p);
Report check_pair(const PairF& p);

// Abe admissible pair (a, b) inside (K, K); kind is 'B', 'C' or 'F'.
bool admissible(const CoeffRing& K, Mask a, Mask b, char kind);

// Semidirect pair (a x K, b x K) over FF(K); L' sits inside K' as the pairs with
// first coordinate in b. Requires b to be an ideal.
struct SemidirectPair {
  PairF pair;
  std::vector<uint8_t> p1, p2, sec;  // on K' indices
  Mask a = 0, b = 0;
  CoeffPtr base;
};
SemidirectPair semidirect_pair(CoeffPtr K, Mask a, Mask b);
Report check_crossed_pair(const SemidirectPair& sp);

OddFormRing ofasymp(int ell, const PairC& p);
OddFormRing ofaorth(int ell, const PairB& p);

// Crossed modules of odd form rings induced by admissible pairs of FF(K).
// The identity crossed module is the case a = b = K.
CrossedModule crossed_ofasymp(CoeffPtr K, Mask a, Mask b, int ell);
CrossedModule crossed_ofaorth(CoeffPtr K, Mask a, Mask b, int ell);

// Generators of the ideal I of the orthogonal construction, as entries at the
// middle position; empty when they all vanish.
std::vector<uint8_t> orth_ideal_generators(const SemidirectPair& sp);

}  // namespace ofa
