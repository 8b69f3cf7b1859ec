#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ofa {

// Subset of a coefficient ring, one bit per element index.
using Mask = uint32_t;

// Finite commutative unital ring given by operation tables. Element 0 is the
// zero, element one() is the unit. At most 32 elements so subsets fit a Mask.
class CoeffRing {
 public:
  static CoeffRing zmod(int n);
  // a⋊K for an ideal a of K (given as a mask of K), stored as pairs (a, k).
  // Fills the projections (a,k) -> a+k, (a,k) -> k and the section k -> (0,k).
  static CoeffRing semidirect(const CoeffRing& base, Mask ideal,
                              std::vector<uint8_t>* p1 = nullptr,
                              std::vector<uint8_t>* p2 = nullptr,
                              std::vector<uint8_t>* sec = nullptr);

  int size() const { return n_; }
  uint8_t one() const { return one_; }
  uint8_t add(uint8_t a, uint8_t b) const { return add_[a * n_ + b]; }
  uint8_t mul(uint8_t a, uint8_t b) const { return mul_[a * n_ + b]; }
  uint8_t neg(uint8_t a) const { return neg_[a]; }
  uint8_t sub(uint8_t a, uint8_t b) const { return add(a, neg_[b]); }
  uint8_t from_int(long v) const;
  Mask full() const { return n_ >= 32 ? ~Mask(0) : ((Mask(1) << n_) - 1); }
  bool in(Mask m, uint8_t x) const { return (m >> x) & 1u; }
  std::vector<uint8_t> elements(Mask m) const;
  // Smallest additive subgroup containing the mask.
  Mask additive_closure(Mask m) const;
  const std::string& name() const { return name_; }
  const std::string& label(uint8_t x) const { return labels_[x]; }

 private:
  int n_ = 0;
  uint8_t one_ = 0;
  std::vector<uint8_t> add_, mul_, neg_;
  std::vector<std::string> labels_;
  std::string name_;
};

using CoeffPtr = std::shared_ptr<const CoeffRing>;

// Apply a coefficient map to a mask.
Mask map_mask(const CoeffRing& from, Mask m, const std::vector<uint8_t>& f);

}  // namespace ofa
