#include "ofa/coeff.hpp"

#include <stdexcept>

namespace ofa {

CoeffRing CoeffRing::zmod(int n) {
  if (n < 1 || n > 32) throw std::invalid_argument("Z/n needs 1 <= n <= 32");
  CoeffRing r;
  r.n_ = n;
  r.one_ = n == 1 ? 0 : 1;
  r.add_.resize(n * n);
  r.mul_.resize(n * n);
  r.neg_.resize(n);
  for (int a = 0; a < n; ++a) {
    r.neg_[a] = uint8_t((n - a) % n);
    r.labels_.push_back(std::to_string(a));
    for (int b = 0; b < n; ++b) {
      r.add_[a * n + b] = uint8_t((a + b) % n);
      r.mul_[a * n + b] = uint8_t((a * b) % n);
    }
  }
  r.name_ = "Z/" + std::to_string(n);
  return r;
}

CoeffRing CoeffRing::semidirect(const CoeffRing& base, Mask ideal,
                                std::vector<uint8_t>* p1,
                                std::vector<uint8_t>* p2,
                                std::vector<uint8_t>* sec) {
  std::vector<uint8_t> ids = base.elements(ideal);
  if (ids.empty() || ids[0] != 0) throw std::invalid_argument("ideal must contain 0");
  int k = base.size();
  int n = int(ids.size()) * k;
  if (n > 32) throw std::invalid_argument("semidirect ring too large");
  std::vector<int> pos(k, -1);
  for (size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = int(i);
  auto code = [&](uint8_t a, uint8_t x) -> uint8_t {
    if (pos[a] < 0) throw std::invalid_argument("ideal not closed under the ring operations");
    return uint8_t(pos[a] * k + x);
  };
  CoeffRing r;
  r.n_ = n;
  r.add_.resize(n * n);
  r.mul_.resize(n * n);
  r.neg_.resize(n);
  for (int u = 0; u < n; ++u) {
    uint8_t a = ids[u / k], x = uint8_t(u % k);
    r.neg_[u] = code(base.neg(a), base.neg(x));
    r.labels_.push_back("(" + base.label(a) + "," + base.label(x) + ")");
    for (int v = 0; v < n; ++v) {
      uint8_t b = ids[v / k], y = uint8_t(v % k);
      r.add_[u * n + v] = code(base.add(a, b), base.add(x, y));
      uint8_t ab = base.mul(a, b), ay = base.mul(a, y), xb = base.mul(x, b);
      r.mul_[u * n + v] = code(base.add(base.add(ab, ay), xb), base.mul(x, y));
    }
  }
  r.one_ = code(0, base.one());
  r.name_ = "[" + std::to_string(ids.size()) + "]x" + base.name();
  if (p1) {
    p1->resize(n);
    for (int u = 0; u < n; ++u) (*p1)[u] = base.add(ids[u / k], uint8_t(u % k));
  }
  if (p2) {
    p2->resize(n);
    for (int u = 0; u < n; ++u) (*p2)[u] = uint8_t(u % k);
  }
  if (sec) {
    sec->resize(k);
    for (int x = 0; x < k; ++x) (*sec)[x] = uint8_t(x);
  }
  return r;
}

uint8_t CoeffRing::from_int(long v) const {
  uint8_t acc = 0;
  uint8_t step = v >= 0 ? one_ : neg_[one_];
  for (long i = 0, e = v >= 0 ? v : -v; i < e; ++i) acc = add(acc, step);
  return acc;
}

std::vector<uint8_t> CoeffRing::elements(Mask m) const {
  std::vector<uint8_t> out;
  for (int i = 0; i < n_; ++i)
    if ((m >> i) & 1u) out.push_back(uint8_t(i));
  return out;
}

Mask CoeffRing::additive_closure(Mask m) const {
  Mask cur = m | 1u;
  for (;;) {
    Mask next = cur;
    for (uint8_t a : elements(cur))
      for (uint8_t b : elements(cur)) next |= Mask(1) << add(a, b);
    if (next == cur) return cur;
    cur = next;
  }
}

Mask map_mask(const CoeffRing& from, Mask m, const std::vector<uint8_t>& f) {
  Mask out = 0;
  for (uint8_t x : from.elements(m)) out |= Mask(1) << f[x];
  return out;
}

}  // namespace ofa
