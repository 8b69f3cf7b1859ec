#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ofa/coeff.hpp"
#include "ofa/oddform.hpp"
#include "ofa/report.hpp"
#include "ofa/rootsys.hpp"
#include "ofa/steinberg.hpp"

namespace ofa {

// ---- structure constants ----------------------------------------------------

// Chevalley structure constants of a doubly laced system (B, C, F; A-type
// subsystems come along). N is the Lie-level constant, positive (= r+1) on
// extraspecial pairs with positive roots ordered as in RootSystem::roots.
// Group level, with [g,h] = g h g^-1 h^-1:
//   [x_a(p), x_b(q)] = x_{a+b}(N pq) x_{2a+b}(N21 q.p)     a short, b long
//   [x_a(p), x_b(q)] = x_{a+b}(N qp) x_{a+2b}(N12 p.q)     a long, b short
// with N21 = N_ab N_{a,a+b} / 2 and N12 = N_ab N_{b,a+b} / 2.
struct StructureConstants {
  int n = 0;
  std::vector<int> N, N21, N12;  // n*n, 0 where undefined
  int at(int a, int b) const { return N[a * n + b]; }
  int at21(int a, int b) const { return N21[a * n + b]; }
  int at12(int a, int b) const { return N12[a * n + b]; }
};

StructureConstants derive_structure_constants(const RootSystem& rs);
// Antisymmetry, N_{-a,-b} = -N_ab, the triple and quadruple identities, |N| = r+1.
Report check_structure_constants(const RootSystem& rs, const StructureConstants& sc);
// Planted fault: flips N on one same-length pair (both orders) and rederives
// the second-order constants. Returns the pair.
std::pair<int, int> mutate_structure_constants(const RootSystem& rs, StructureConstants& sc);

// ---- coefficients -------------------------------------------------------------

// A pair of type F living inside one coefficient ring: K is the ring, L sits in
// it (u = inclusion), s(k) = k^2, d(k) = 2k, s(p|q) = 2pq, l.k = l k^2. The
// S-level masks are the first parameters (a, b), the R-level masks the second
// (K, L); delta maps S-level coefficients to R-level ones.
struct DLCoeffs {
  std::string name;
  CoeffPtr ring;
  Mask short_S = 0, long_S = 0, short_R = 0, long_R = 0;
  std::vector<uint8_t> delta;
  CoeffPtr base;  // K before the semidirect product (same as ring when unrelativized)
  Mask a = 0, b = 0;
  bool crossed = false;
};
DLCoeffs dl_coeffs_ff(CoeffPtr K);
DLCoeffs dl_coeffs_crossed(CoeffPtr K, Mask a, Mask b);

// ---- oracles ------------------------------------------------------------------

// A concrete group with root elements x_r(c) for its own root list. Elements are
// stored as Heis values (matrix oracles keep (M, M^-1) in (pi, rho)).
class DLTarget {
 public:
  virtual ~DLTarget() = default;
  std::string name;
  std::string type;                     // "B3", "C3", "GL"
  std::vector<std::vector<int>> roots;  // doubled coordinates
  std::vector<int> len2;
  CoeffPtr ring;
  virtual Heis elem(int r, uint8_t c) const = 0;
  virtual Heis mul(const Heis& g, const Heis& h) const = 0;
  virtual Heis inv(const Heis& g) const = 0;
  virtual Heis one() const = 0;
  virtual int constant(int a, int b) const = 0;  // first-order N realized by elem
  virtual std::string show(const Heis& g) const = 0;
  int find(const std::vector<int>& v) const;
};
using TargetPtr = std::shared_ptr<const DLTarget>;

// Sign per root making the raw dictionary (X_ij(c e_ij), X_j(c at (-j,j)) for C,
// X_j(canon(c e_0j)) for B) realize the derived constants. Found once over Z/5.
std::vector<int8_t> dictionary_signs(RootKind kind, int rank);
// Unitary oracle on U(amb): kind C uses an ofasymp-type ring, kind B ofaorth.
TargetPtr unitary_target(RootKind kind, const OddFormRing& amb);
// Block GL3 + GL2 elementary matrices over `ring` (A2 on the first block, A1 on
// the second), 5x5.
TargetPtr gl_target(CoeffPtr ring);

// ---- subsystems and dispatch ----------------------------------------------------

struct SpanInfo {
  RootSet span = 0;            // R-span of the input roots intersected with the system
  int rank = 0;
  std::vector<int> simple;     // simple roots of the span (positive w.r.t. the system)
  std::string type;            // e.g. "A2", "B2", "A1xA1", "A1xA2", "B3"
  std::string category;        // "rank<=2", "A1xA2", "B3", "C3" or "unclassified"
};
SpanInfo classify_span(const RootSystem& rs, const std::vector<int>& roots);

// Root-system embedding of a span into a target, with a re-signing c (c_{-r} =
// c_r) that turns the target constants into the source constants.
struct DLEmbedding {
  TargetPtr target;
  std::vector<int> map;       // source root -> target root, -1 outside the span
  std::vector<uint8_t> flip;  // 1 where the parameter is negated
};
std::optional<DLEmbedding> embed_span(const RootSystem& rs, const StructureConstants& sc,
                                      const SpanInfo& span, const TargetPtr& target);

// Everything needed to evaluate relations: root system, constants, coefficient
// pair and oracles. With `dispatch` off the first target realizes the whole
// system directly (B_ell/C_ell); with it on every instance is sent to the
// oracles embedding its span (F4).
struct DLSetting {
  std::string name;
  RootSystem rs;
  StructureConstants sc;
  DLCoeffs co;
  std::vector<TargetPtr> targets;
  bool dispatch = false;
  bool cross_check = false;  // dispatch: evaluate in every embedding oracle, not just the preferred one
};
DLSetting dl_setting_ff(RootKind kind, int rank, CoeffPtr K);
DLSetting dl_setting_crossed(RootKind kind, int rank, CoeffPtr K, Mask a, Mask b);
// Re-applies a table fault to a setting.
void mutate_setting(DLSetting& st);

// ---- commutator formula and the modules V ---------------------------------------

using Factor = std::pair<int, uint8_t>;  // (root, coefficient)
// Factors of [x_a(p), x_b(q)] in product order; a != -b. Throws on a = -b.
std::vector<Factor> dl_commutator(const DLSetting& st, int a, uint8_t p, int b, uint8_t q);

enum class VKind {
  SameShort,  // a, b, a-b short: a e_a + a e_b
  SameLong,   // a, b, a-b long
  LongHalf,   // a, b long, (a+b)/2 short: b e_a + a e_m + b e_b
  ShortSum,   // a, b short, a+b long: a e_a + b e_{a+b} + a e_b, nilpotent
};
struct VShape {
  VKind kind = VKind::SameShort;
  int alpha = -1, beta = -1;
  std::vector<int> roots;  // component roots in order
};
std::optional<VShape> v_shape(const RootSystem& rs, int a, int b);
std::string vkind_name(VKind k);

using VElem = std::array<uint8_t, 3>;
VElem v_add(const DLSetting& st, const VShape& sh, const VElem& x, const VElem& y);
VElem v_neg(const DLSetting& st, const VShape& sh, const VElem& x);
std::vector<Factor> v_word(const VShape& sh, const VElem& x);
// Product of root factors read as an element of V; every root must be a component.
VElem v_from_word(const DLSetting& st, const VShape& sh, const std::vector<Factor>& w);
// Action of x_g(t) for a root g in R(a-b), through the commutator formula.
VElem v_act(const DLSetting& st, const VShape& sh, int g, uint8_t t, const VElem& x);
// Group law: associativity, unit, inverses over the S-level carriers.
Report check_vrep(const DLSetting& st, uint64_t cap = 1u << 20);

// ---- relation families ------------------------------------------------------------

struct DLTuple {
  std::vector<int> roots;
  SpanInfo span;
  std::vector<std::shared_ptr<const DLEmbedding>> embeddings;  // empty = nothing embeds it
  std::vector<const std::vector<uint8_t>*> carriers;
};

// Evaluation inside one embedding.
struct DLEval {
  const DLSetting& st;
  const DLEmbedding& emb;
  Heis x(int root, uint8_t c) const;
  Heis mul(const Heis& g, const Heis& h) const { return emb.target->mul(g, h); }
  Heis inv(const Heis& g) const { return emb.target->inv(g); }
  Heis conj(const Heis& g, const Heis& h) const { return mul(mul(g, h), inv(g)); }
  Heis comm(const Heis& g, const Heis& h) const { return mul(mul(g, h), mul(inv(g), inv(h))); }
  Heis word(const std::vector<Factor>& w) const;
  Heis z(int a, uint8_t x, uint8_t p) const;  // ^{x_{-a}(p)} x_a(x)
  Heis zv(const VShape& sh, const VElem& u, const VShape& shneg, const VElem& s) const;
};

struct DLFamily {
  std::string name;
  std::vector<DLTuple> tuples;
  std::function<std::pair<Heis, Heis>(const DLEval&, const std::vector<int>&,
                                      const std::vector<uint8_t>&)> eval;
  uint64_t count() const;
};

struct DLBundle {
  std::shared_ptr<std::map<std::string, std::vector<uint8_t>>> store;
  std::vector<DLFamily> families;
};

// Steinberg relations: additivity and the commutator formula, one family per
// pattern (trivial, equal lengths, short+short=long, short/long both ways).
DLBundle dl_relations(const DLSetting& st);
// Bundles evaluate against the setting they were built from; keep it alive.
// Relative presentation: Sym, Add1/2, Comm1/2, Simp, HW1/2, Delta, plus the
// homomorphism and equivariance of the V maps.
DLBundle relative_dl_relations(const DLSetting& st);

FamilyOutcome verify_dl_family(const DLSetting& st, const DLFamily& fam, const SuiteOptions& opt);
std::vector<FamilyOutcome> verify_dl_bundle(const DLSetting& st, const DLBundle& b,
                                            const SuiteOptions& opt);
std::vector<FamilyOutcome> verify_dl(const DLSetting& st, const SuiteOptions& opt);
std::vector<FamilyOutcome> verify_relative_dl(const DLSetting& st, const SuiteOptions& opt);

}  // namespace ofa
