#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ofa {

enum class RootKind { BC, B, C, F };
enum class LengthClass { Ultrashort, Short, Long };

// Root in doubled integer coordinates (so F4 half-sums are integral).
struct Root {
  std::vector<int> c;
  int len2 = 0;  // squared length of the doubled vector
  LengthClass cls = LengthClass::Short;
  int height = 0;
};

// Subsets of a root system with at most 64 roots, one bit per root index.
using RootSet = uint64_t;

struct RootSystem {
  RootKind kind = RootKind::BC;
  int rank = 0;
  std::vector<Root> roots;              // sorted by (height, coords)
  std::vector<std::vector<int>> simple; // simple roots, doubled coordinates
  std::vector<int> sum_t, neg_t, half_t, twice_t;  // filled by build_root_system

  int size() const { return int(roots.size()); }
  int find(const std::vector<int>& c) const;  // -1 if not a root
  int negate(int i) const { return neg_t[i]; }
  int sum(int i, int j) const { return sum_t[i * size() + j]; }  // -1 if not a root
  int half(int i) const { return half_t[i]; }
  int twice(int i) const { return twice_t[i]; }
  int dot(int i, int j) const;
  RootSet all() const { return size() == 64 ? ~RootSet(0) : ((RootSet(1) << size()) - 1); }
  std::string name() const;
  std::string serialize(int i) const;
  std::string serialize(RootSet s) const;
};

RootSystem build_root_system(RootKind kind, int rank);
std::string kind_name(RootKind k);

// Coefficients of a vector (doubled coordinates) in the simple-root basis.
std::vector<int> simple_coefficients(const RootSystem& rs, const std::vector<int>& v);

bool is_closed(const RootSystem& rs, RootSet s);
bool is_saturated(const RootSystem& rs, RootSet s);
bool is_special(const RootSystem& rs, RootSet s);
RootSet saturate(const RootSystem& rs, RootSet x);
RootSet extreme_roots(const RootSystem& rs, RootSet s);  // throws unless saturated special

// All saturated special subsets (exhaustive, at most 24 roots) or a seeded sample
// obtained by saturating random special seeds.
std::vector<RootSet> saturated_special_subsets(const RootSystem& rs);
std::vector<RootSet> sample_saturated_special(const RootSystem& rs, size_t count, uint64_t seed);

// Partial equivalence classes of ultrashort roots of BC modulo a saturated
// subsystem; each class lists signed indices i standing for e_i.
std::vector<std::vector<int>> equivalence_classes(const RootSystem& rs, RootSet psi);

struct QuotientSystem {
  RootSet kernel = 0;
  std::vector<std::vector<int>> reps;  // one class per opposite pair, in order
  RootSystem quotient;
  std::vector<int> proj;  // root index -> quotient root index, -1 on the kernel
  RootSet preimage(RootSet q) const;
  RootSet image(RootSet s) const;
};

QuotientSystem quotient(const RootSystem& rs, RootSet psi);

}  // namespace ofa
