#include "ofa/rootsys.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ofa {

namespace {

std::vector<int> unit_vec(int rank, int i, int scale) {
  std::vector<int> v(rank, 0);
  v[i] = scale;
  return v;
}

std::vector<int> vsum(const std::vector<int>& a, const std::vector<int>& b, int sb = 1) {
  std::vector<int> r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[k] = a[k] + sb * b[k];
  return r;
}

int norm2(const std::vector<int>& v) {
  int s = 0;
  for (int x : v) s += x * x;
  return s;
}

LengthClass classify(RootKind kind, int len2) {
  switch (kind) {
    case RootKind::BC:
      return len2 == 4 ? LengthClass::Ultrashort : len2 == 8 ? LengthClass::Short : LengthClass::Long;
    case RootKind::B:
    case RootKind::F:
      return len2 == 4 ? LengthClass::Short : LengthClass::Long;
    case RootKind::C:
      return len2 == 8 ? LengthClass::Short : LengthClass::Long;
  }
  return LengthClass::Short;
}

struct Frac {
  long long num = 0, den = 1;
  void norm() {
    if (den < 0) num = -num, den = -den;
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) num /= g, den /= g;
  }
  Frac operator-(const Frac& o) const {
    Frac r{num * o.den - o.num * den, den * o.den};
    r.norm();
    return r;
  }
  Frac operator*(const Frac& o) const {
    Frac r{num * o.num, den * o.den};
    r.norm();
    return r;
  }
  Frac operator/(const Frac& o) const {
    Frac r{num * o.den, den * o.num};
    r.norm();
    return r;
  }
};

}  // namespace

std::string kind_name(RootKind k) {
  switch (k) {
    case RootKind::BC: return "BC";
    case RootKind::B: return "B";
    case RootKind::C: return "C";
    case RootKind::F: return "F";
  }
  return "?";
}

std::vector<int> simple_coefficients(const RootSystem& rs, const std::vector<int>& v) {
  int n = rs.rank;
  // Solve sum_j c_j simple_j = v (columns are simple roots).
  std::vector<std::vector<Frac>> m(n, std::vector<Frac>(n + 1));
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n; ++j) m[r][j] = {rs.simple[j][r], 1};
    m[r][n] = {v[r], 1};
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && m[piv][col].num == 0) ++piv;
    if (piv == n) throw std::logic_error("simple roots are not a basis");
    std::swap(m[piv], m[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col].num == 0) continue;
      Frac f = m[r][col] / m[col][col];
      for (int j = col; j <= n; ++j) m[r][j] = m[r][j] - f * m[col][j];
    }
  }
  std::vector<int> out(n);
  for (int r = 0; r < n; ++r) {
    Frac c = m[r][n] / m[r][r];
    if (c.den != 1) throw std::invalid_argument("vector not in the root lattice");
    out[r] = int(c.num);
  }
  return out;
}

RootSystem build_root_system(RootKind kind, int rank) {
  if (rank < 1) throw std::invalid_argument("rank must be >= 1");
  if (kind == RootKind::F && rank != 4) throw std::invalid_argument("F requires rank 4");
  RootSystem rs;
  rs.kind = kind;
  rs.rank = rank;
  std::set<std::vector<int>> vecs;
  auto add = [&](const std::vector<int>& v) {
    vecs.insert(v);
    std::vector<int> n(v.size());
    for (size_t k = 0; k < v.size(); ++k) n[k] = -v[k];
    vecs.insert(n);
  };
  bool with_short_axis = kind == RootKind::BC || kind == RootKind::B || kind == RootKind::F;
  bool with_long_axis = kind == RootKind::BC || kind == RootKind::C;
  for (int i = 0; i < rank; ++i) {
    if (with_short_axis) add(unit_vec(rank, i, 2));
    if (with_long_axis) add(unit_vec(rank, i, 4));
    for (int j = i + 1; j < rank; ++j) {
      add(vsum(unit_vec(rank, i, 2), unit_vec(rank, j, 2)));
      add(vsum(unit_vec(rank, i, 2), unit_vec(rank, j, 2), -1));
    }
  }
  if (kind == RootKind::F) {
    for (int bits = 0; bits < 16; ++bits) {
      std::vector<int> v(4);
      for (int k = 0; k < 4; ++k) v[k] = (bits >> k) & 1 ? -1 : 1;
      vecs.insert(v);
    }
  }
  if (vecs.size() > 64) throw std::invalid_argument("root system too large for 64-bit subsets");

  // simple roots
  auto e = [&](int i, int s) { return unit_vec(rank, i, s); };
  if (kind == RootKind::F) {
    rs.simple = {vsum(e(1, 2), e(2, 2), -1), vsum(e(2, 2), e(3, 2), -1), e(3, 2), {1, -1, -1, -1}};
  } else {
    for (int i = 0; i + 1 < rank; ++i) rs.simple.push_back(vsum(e(i, 2), e(i + 1, 2), -1));
    rs.simple.push_back(kind == RootKind::C ? e(rank - 1, 4) : e(rank - 1, 2));
  }

  for (const auto& v : vecs) {
    Root r;
    r.c = v;
    r.len2 = norm2(v);
    r.cls = classify(kind, r.len2);
    rs.roots.push_back(r);
  }
  for (auto& r : rs.roots) {
    auto co = simple_coefficients(rs, r.c);
    r.height = std::accumulate(co.begin(), co.end(), 0);
  }
  std::sort(rs.roots.begin(), rs.roots.end(), [](const Root& a, const Root& b) {
    if (a.height != b.height) return a.height < b.height;
    return a.c < b.c;
  });
  int n = rs.size();
  rs.sum_t.assign(n * n, -1);
  rs.neg_t.assign(n, -1);
  rs.half_t.assign(n, -1);
  rs.twice_t.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    std::vector<int> neg(rs.roots[i].c), dbl(rs.roots[i].c), hf(rs.roots[i].c);
    bool even = true;
    for (int k = 0; k < rank; ++k) {
      neg[k] = -neg[k];
      dbl[k] *= 2;
      even = even && hf[k] % 2 == 0;
      hf[k] /= 2;
    }
    rs.neg_t[i] = rs.find(neg);
    rs.twice_t[i] = rs.find(dbl);
    if (even) rs.half_t[i] = rs.find(hf);
    for (int j = 0; j < n; ++j) rs.sum_t[i * n + j] = rs.find(vsum(rs.roots[i].c, rs.roots[j].c));
  }
  return rs;
}

int RootSystem::find(const std::vector<int>& c) const {
  for (int i = 0; i < size(); ++i)
    if (roots[i].c == c) return i;
  return -1;
}

int RootSystem::dot(int i, int j) const {
  int s = 0;
  for (int k = 0; k < rank; ++k) s += roots[i].c[k] * roots[j].c[k];
  return s;
}

std::string RootSystem::name() const { return kind_name(kind) + std::to_string(rank); }

std::string RootSystem::serialize(int i) const {
  std::ostringstream os;
  os << kind_name(kind) << ' ' << rank << " :";
  for (int x : roots[i].c) os << ' ' << x;
  return os.str();
}

std::string RootSystem::serialize(RootSet s) const {
  std::string out;
  for (int i = 0; i < size(); ++i)
    if ((s >> i) & 1) out += serialize(i) + "\n";
  return out;
}

static bool has(RootSet s, int i) { return i >= 0 && ((s >> i) & 1); }
static RootSet bit(int i) { return RootSet(1) << i; }

bool is_closed(const RootSystem& rs, RootSet s) {
  for (int i = 0; i < rs.size(); ++i) {
    if (!has(s, i)) continue;
    for (int j = i; j < rs.size(); ++j) {
      if (!has(s, j)) continue;
      int k = rs.sum(i, j);
      if (k >= 0 && !has(s, k)) return false;
    }
  }
  return true;
}

bool is_saturated(const RootSystem& rs, RootSet s) {
  if (!is_closed(rs, s)) return false;
  for (int i = 0; i < rs.size(); ++i) {
    if (!has(s, i)) continue;
    int h = rs.half(i);
    if (h >= 0 && !has(s, h)) return false;
  }
  return true;
}

bool is_special(const RootSystem& rs, RootSet s) {
  for (int i = 0; i < rs.size(); ++i)
    if (has(s, i) && has(s, rs.negate(i))) return false;
  return true;
}

RootSet saturate(const RootSystem& rs, RootSet x) {
  RootSet cur = x;
  for (bool grew = true; grew;) {
    grew = false;
    for (int i = 0; i < rs.size(); ++i) {
      if (!has(cur, i)) continue;
      int h = rs.half(i);
      if (h >= 0 && !has(cur, h)) cur |= bit(h), grew = true;
      for (int j = i; j < rs.size(); ++j) {
        if (!has(cur, j)) continue;
        int k = rs.sum(i, j);
        if (k >= 0 && !has(cur, k)) cur |= bit(k), grew = true;
      }
    }
  }
  return cur;
}

RootSet extreme_roots(const RootSystem& rs, RootSet s) {
  if (!is_saturated(rs, s) || !is_special(rs, s))
    throw std::invalid_argument("extreme_roots needs a saturated special subset");
  RootSet out = 0;
  for (int a = 0; a < rs.size(); ++a) {
    if (!has(s, a)) continue;
    bool ok = true;
    int dbl = rs.twice(a);
    for (int b = 0; b < rs.size() && ok; ++b) {
      if (!has(s, b)) continue;
      for (int c = b; c < rs.size() && ok; ++c) {
        if (!has(s, c)) continue;
        int k = rs.sum(b, c);
        if (k == a) ok = false;
        if (dbl >= 0 && k == dbl && b != c) ok = false;
      }
    }
    if (ok) out |= bit(a);
  }
  return out;
}

std::vector<RootSet> saturated_special_subsets(const RootSystem& rs) {
  if (rs.size() > 24) throw std::invalid_argument("too many roots for exhaustive enumeration; sample instead");
  // Every saturated special set is reached by adding one root at a time and
  // saturating, with all intermediate sets special.
  std::set<RootSet> seen{0};
  std::deque<RootSet> todo{0};
  while (!todo.empty()) {
    RootSet cur = todo.front();
    todo.pop_front();
    for (int i = 0; i < rs.size(); ++i) {
      if (has(cur, i)) continue;
      RootSet nxt = saturate(rs, cur | bit(i));
      if (!is_special(rs, nxt) || seen.count(nxt)) continue;
      seen.insert(nxt);
      todo.push_back(nxt);
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<RootSet> sample_saturated_special(const RootSystem& rs, size_t count, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<RootSet> out;
  std::set<RootSet> seen;
  size_t attempts = 0;
  while (out.size() < count && attempts < count * 50) {
    ++attempts;
    RootSet cur = 0;
    int steps = 1 + int(gen() % rs.size());
    for (int s = 0; s < steps; ++s) {
      int i = int(gen() % rs.size());
      RootSet nxt = saturate(rs, cur | bit(i));
      if (is_special(rs, nxt)) cur = nxt;
    }
    if (seen.insert(cur).second) out.push_back(cur);
  }
  return out;
}

// e_i for signed i in doubled coordinates
static std::vector<int> ultrashort_vec(int rank, int i) {
  return unit_vec(rank, std::abs(i) - 1, i > 0 ? 2 : -2);
}

static void require_bc_subsystem(const RootSystem& rs, RootSet psi) {
  if (rs.kind != RootKind::BC) throw std::invalid_argument("quotients are defined for BC systems");
  if (!is_saturated(rs, psi)) throw std::invalid_argument("kernel is not saturated");
  for (int i = 0; i < rs.size(); ++i)
    if (has(psi, i) && !has(psi, rs.negate(i))) throw std::invalid_argument("kernel is not a subsystem");
}

std::vector<std::vector<int>> equivalence_classes(const RootSystem& rs, RootSet psi) {
  require_bc_subsystem(rs, psi);
  std::vector<int> order;
  for (int i = 1; i <= rs.rank; ++i) order.push_back(i);
  for (int i = 1; i <= rs.rank; ++i) order.push_back(-i);
  auto related = [&](int i, int j) {
    if (i == j) return true;
    auto v = vsum(ultrashort_vec(rs.rank, i), ultrashort_vec(rs.rank, j), -1);
    // for i = -j this is 2e_i, which lies in a saturated kernel only together with e_i
    return has(psi, rs.find(v));
  };
  std::vector<std::vector<int>> classes;
  std::vector<bool> used(order.size(), false);
  for (size_t a = 0; a < order.size(); ++a) {
    if (used[a]) continue;
    if (has(psi, rs.find(ultrashort_vec(rs.rank, order[a])))) continue;
    std::vector<int> cls;
    for (size_t b = a; b < order.size(); ++b) {
      if (used[b] || !related(order[a], order[b])) continue;
      used[b] = true;
      cls.push_back(order[b]);
    }
    classes.push_back(cls);
  }
  return classes;
}

QuotientSystem quotient(const RootSystem& rs, RootSet psi) {
  QuotientSystem q;
  q.kernel = psi;
  auto classes = equivalence_classes(rs, psi);
  std::set<int> taken;
  for (const auto& cls : classes) {
    if (taken.count(-cls.front())) continue;
    for (int i : cls) taken.insert(i);
    q.reps.push_back(cls);
  }
  int m = int(q.reps.size());
  q.proj.assign(rs.size(), -1);
  if (m == 0) {
    if (psi != rs.all()) throw std::invalid_argument("kernel is not a saturated subsystem");
    q.quotient.kind = RootKind::BC;
    q.quotient.rank = 0;
    return q;
  }
  q.quotient = build_root_system(RootKind::BC, m);
  for (int r = 0; r < rs.size(); ++r) {
    if (has(psi, r)) continue;
    std::vector<int> img(m, 0);
    bool nonzero = false;
    for (int a = 0; a < m; ++a) {
      int d = 0;
      for (int i : q.reps[a]) d += rs.roots[r].c[std::abs(i) - 1] * (i > 0 ? 1 : -1);
      img[a] = d;  // (beta . s_a) in doubled units equals twice n_a, i.e. the doubled coordinate
      nonzero = nonzero || d != 0;
    }
    if (!nonzero) throw std::invalid_argument("kernel is not a saturated subsystem");
    int idx = q.quotient.find(img);
    if (idx < 0) throw std::logic_error("projection left the quotient system");
    q.proj[r] = idx;
  }
  return q;
}

RootSet QuotientSystem::preimage(RootSet s) const {
  RootSet out = 0;
  for (size_t r = 0; r < proj.size(); ++r)
    if (proj[r] >= 0 && has(s, proj[r])) out |= bit(int(r));
  return out;
}

RootSet QuotientSystem::image(RootSet s) const {
  RootSet out = 0;
  for (size_t r = 0; r < proj.size(); ++r)
    if (proj[r] >= 0 && has(s, int(r))) out |= bit(proj[r]);
  return out;
}

}  // namespace ofa
