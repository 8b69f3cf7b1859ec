#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ofa/oddform.hpp"
#include "ofa/report.hpp"
#include "ofa/rootsys.hpp"

namespace ofa {

// Planted relation mutations, used to show the verifier catches wrong formulas.
enum RelationMutation : unsigned {
  kMutNone = 0,
  kMutChainSign = 1u << 0,  // [X_ij(a), X_jk(b)] compared against X_ik(-ab)
  kMutSymSign = 1u << 1,    // Z_ij(a,p) compared against Z_-j,-i(abar, -pbar)
  kMutDropFactor = 1u << 2, // product map forgets its last root factor
};

// Where relations are evaluated. `amb` is the ring whose unitary group is the
// target (S x R for a crossed module); `src` cuts out first parameters (S, Theta)
// and `base` second parameters (R, Delta). Unrelativized contexts use one ring
// for all three and the identity for delta.
struct StContext {
  std::string name;
  std::shared_ptr<const OddFormRing> amb, src, base;
  std::function<Mat(const Mat&)> delta_r;
  std::function<Heis(const Heis&)> delta_d;
  unsigned mutation = kMutNone;
};
StContext context_of(const OddFormRing& ofr);
StContext context_of(const CrossedModule& cm);

// ---- generators and words ---------------------------------------------------

enum class GenKind {
  X,        // X_IJ(a), a in S_IJ
  Xj,       // X_J(u), u in Theta^0_J
  Zij,      // Z_ij(a, p)
  Zj,       // Z_j(u, s)
  ZsumRow,  // Z_{i+j,k}(a, p): idx {i, j, k}
  ZsumCol,  // Z_{i,j+k}(a, p): idx {i, j, k}
  Zsum,     // Z_{i+j}(u, s): idx {i, j}
  Zminus,   // Z^{-i}_j(u, s): idx {i, j}
};

// Ring parameters are stored in `first.pi` / `second.pi`.
struct Generator {
  GenKind kind = GenKind::X;
  std::vector<int> idx;
  Heis first, second;
  bool base_level = false;  // X/Xj only: parameter from (R, Delta) rather than (S, Theta)
};
using Word = std::vector<Generator>;

Generator gen_x(int i, int j, const Mat& a, bool base_level = false);
Generator gen_xj(int j, const Heis& u, bool base_level = false);

// Evaluates a word in U(amb). Every parameter is checked against its carrier.
Heis stmap(const StContext& cx, const Word& w);
// Z generators as conjugates ^{T(second)}T(first) in U(amb), carrier-checked.
Heis z_generator(const StContext& cx, GenKind kind, const std::vector<int>& idx,
                 const Heis& first, const Heis& second);
std::string show(const OddFormRing& o, const Generator& g);

// Membership tests for Peirce carriers of a layer.
bool in_S(const OddFormRing& layer, const Labels& I, const Labels& J, const Mat& a);
bool in_theta(const OddFormRing& layer, const Labels& J, const std::vector<int>& family,
              const Heis& u);

// ---- roots and the commutator formula --------------------------------------

// Root subgroup bookkeeping on BC_ell: e_j - e_i -> X_ij (i + j > 0),
// e_i -> X_i, 2e_i -> X_i on phi(S_-i,i).
struct RootSlot {
  bool ultra = false;  // X_j kind
  bool longroot = false;
  int i = 0, j = 0;    // X_ij, or j for X_j
};
RootSlot root_slot(const Root& r);
// Parameter carrier of a root subgroup, in the `src` layer.
std::vector<Heis> root_carrier(const StContext& cx, const Root& r);

// Right-hand side of [X_alpha(mu), X_beta(nu)] for non-antiparallel roots, with
// ultrashort factors last. Throws for antiparallel roots.
Word commutator_expansion(const StContext& cx, const Root& alpha, const Root& beta,
                          const Heis& mu, const Heis& nu);

// ---- relation families ------------------------------------------------------

// One relation family as an indexable instance space: a list of index tuples,
// each with a product of parameter carriers. Ring parameters sit in Heis::pi.
struct FamilySpace {
  std::string name;
  std::vector<std::vector<int>> indices;
  std::vector<std::vector<const std::vector<Heis>*>> carriers;
  std::vector<bool> param_is_delta;  // display only
  std::function<std::pair<Heis, Heis>(const std::vector<int>&, const std::vector<const Heis*>&)> eval;
  uint64_t count() const;
};

struct SuiteOptions {
  uint64_t budget = 10'000'000;  // 0 = always exhaustive
  uint64_t seed = 1;
  int workers = 1;
  bool all_records = false;      // JSON-lines record for every instance, not only failures
  std::set<std::string> only;    // restrict to these family names when non-empty
};

// Owns carrier storage shared by the families built from it.
struct FamilyBundle {
  std::shared_ptr<std::map<std::string, std::vector<Heis>>> store;
  std::vector<FamilySpace> families;
};

FamilyBundle unrel_families(const StContext& cx);
FamilyBundle presentation_families(const StContext& cx);

struct FamilyOutcome {
  Report report;
  std::vector<nlohmann::json> records;
  uint64_t digest = 0;  // order-independent fingerprint of (instance hash, pass)
};
FamilyOutcome verify_family(const StContext& cx, const FamilySpace& fam, const SuiteOptions& opt);
// Runs all families, merged deterministically in family order.
std::vector<FamilyOutcome> verify_families(const StContext& cx, const FamilyBundle& b,
                                           const SuiteOptions& opt);

// ---- summed hyperbolic families ---------------------------------------------

struct QuotientFamily {
  RootSet kernel = 0;
  std::vector<Labels> classes;  // one class per opposite pair
  std::vector<Mat> e_minus, e_plus;
  std::vector<Heis> q_minus, q_plus;
};
QuotientFamily quotient_family(const OddFormRing& ofr, const RootSystem& rs, RootSet psi);
Report check_quotient_family(const OddFormRing& ofr, const QuotientFamily& qf);
// T_IJ(a) using the summed pairs of qf for row/column classes a, b (signed:
// +c is class c, -c its opposite).
Heis quotient_T(const OddFormRing& ofr, const QuotientFamily& qf, int row_class, int col_class,
                const Mat& a);

// ---- injectivity over special subsets ---------------------------------------

// Evaluates the product map over Sigma \ 2Sigma (root order and reverse order)
// on the src layer; checks pairwise distinctness and equal image sets.
Report product_injectivity(const StContext& cx, const RootSystem& rs, RootSet sigma,
                           uint64_t cap = 1u << 22);

}  // namespace ofa
