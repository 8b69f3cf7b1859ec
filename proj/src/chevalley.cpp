#include "ofa/chevalley.hpp"

#include <algorithm>
#include <climits>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ofa/pairs.hpp"

namespace ofa {

namespace {

struct Q {
  long long p = 0, q = 1;
  Q() = default;
  Q(long long a, long long b = 1) : p(a), q(b) {
    if (q < 0) { p = -p; q = -q; }
    long long g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) { p /= g; q /= g; }
  }
  Q operator+(const Q& o) const { return Q(p * o.q + o.p * q, q * o.q); }
  Q operator*(const Q& o) const { return Q(p * o.p, q * o.q); }
  Q operator/(const Q& o) const { return Q(p * o.q, q * o.p); }
  bool operator==(const Q& o) const { return p == o.p && q == o.q; }
};

bool is_long(const RootSystem& rs, int r) { return rs.roots[r].cls == LengthClass::Long; }

std::vector<int> vdiff(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> d(a.size());
  for (size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return d;
}

long long vdot(const std::vector<int>& a, const std::vector<int>& b) {
  long long s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += (long long)a[k] * b[k];
  return s;
}

// rank of integer vectors, fraction-free elimination
int vrank(std::vector<std::vector<long long>> m) {
  int rank = 0;
  if (m.empty()) return 0;
  size_t cols = m[0].size();
  for (size_t c = 0; c < cols && rank < int(m.size()); ++c) {
    int piv = -1;
    for (size_t r = rank; r < m.size(); ++r)
      if (m[r][c]) { piv = int(r); break; }
    if (piv < 0) continue;
    std::swap(m[rank], m[piv]);
    for (size_t r = 0; r < m.size(); ++r) {
      if (int(r) == rank || !m[r][c]) continue;
      long long f = m[r][c], g = m[rank][c];
      for (size_t k = 0; k < cols; ++k) m[r][k] = m[r][k] * g - m[rank][k] * f;
      long long h = 0;
      for (long long v : m[r]) h = std::gcd(h, v < 0 ? -v : v);
      if (h > 1)
        for (auto& v : m[r]) v /= h;
    }
    ++rank;
  }
  return rank;
}

int vrank_int(const std::vector<std::vector<int>>& vs) {
  std::vector<std::vector<long long>> m;
  for (const auto& v : vs) m.emplace_back(v.begin(), v.end());
  return vrank(m);
}

// GF(2) system, at most 64 unknowns. Returns a solution or nothing.
struct Gf2 {
  std::vector<std::pair<uint64_t, bool>> rows;
  void add(uint64_t vars, bool rhs) { rows.push_back({vars, rhs}); }
  std::optional<uint64_t> solve(int nvars) const {
    auto m = rows;
    std::vector<int> pivcol;
    size_t r = 0;
    for (int c = 0; c < nvars && r < m.size(); ++c) {
      size_t p = r;
      while (p < m.size() && !((m[p].first >> c) & 1)) ++p;
      if (p == m.size()) continue;
      std::swap(m[r], m[p]);
      for (size_t k = 0; k < m.size(); ++k)
        if (k != r && ((m[k].first >> c) & 1)) {
          m[k].first ^= m[r].first;
          m[k].second ^= m[r].second;
        }
      pivcol.push_back(c);
      ++r;
    }
    for (size_t k = r; k < m.size(); ++k)
      if (m[k].second) return std::nullopt;
    uint64_t sol = 0;
    for (size_t k = 0; k < r; ++k)
      if (m[k].second) sol |= uint64_t(1) << pivcol[k];
    return sol;
  }
};

std::vector<int> root_vec_sum(const std::vector<int>& a, const std::vector<int>& b, int f = 1) {
  std::vector<int> s(a.size());
  for (size_t k = 0; k < a.size(); ++k) s[k] = a[k] + f * b[k];
  return s;
}

void fill_second_order(const RootSystem& rs, StructureConstants& sc) {
  int n = sc.n;
  sc.N21.assign(n * n, 0);
  sc.N12.assign(n * n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int s = rs.sum(a, b);
      if (s < 0) continue;
      if (rs.sum(a, s) >= 0) {
        int v = sc.at(a, b) * sc.at(a, s);
        if (v % 2) throw std::logic_error("odd second-order constant");
        sc.N21[a * n + b] = v / 2;
      }
      if (rs.sum(b, s) >= 0) {
        int v = sc.at(a, b) * sc.at(b, s);
        if (v % 2) throw std::logic_error("odd second-order constant");
        sc.N12[a * n + b] = v / 2;
      }
    }
}

// r + 1 with r maximal such that b - r a is a root
int string_bound(const RootSystem& rs, int a, int b) {
  int r = 0;
  std::vector<int> v = rs.roots[b].c;
  for (;;) {
    v = root_vec_sum(v, rs.roots[a].c, -1);
    if (rs.find(v) < 0) break;
    ++r;
  }
  return r + 1;
}

}  // namespace

// ---- structure constants ----------------------------------------------------

StructureConstants derive_structure_constants(const RootSystem& rs) {
  const int n = rs.size();
  StructureConstants sc;
  sc.n = n;
  sc.N.assign(n * n, INT_MIN);
  auto pos = [&](int r) { return rs.roots[r].height > 0; };
  auto len = [&](int r) { return (long long)rs.roots[r].len2; };

  // extraspecial pair of each positive non-simple root
  std::vector<std::pair<int, int>> extra(n, {-1, -1});
  for (int x = 0; x < n; ++x) {
    if (!pos(x)) continue;
    for (int a = 0; a < n && extra[x].first < 0; ++a) {
      if (!pos(a)) continue;
      int b = rs.find(root_vec_sum(rs.roots[x].c, rs.roots[a].c, -1));
      if (b >= 0 && pos(b)) extra[x] = {a, b};
    }
  }

  std::function<int(int, int)> get = [&](int a, int b) -> int {
    int s = rs.sum(a, b);
    if (s < 0) return 0;
    int& memo = sc.N[a * n + b];
    if (memo != INT_MIN) return memo;
    int val = 0;
    if (pos(a) && pos(b)) {
      auto [ea, eb] = extra[s];
      if (a == ea && b == eb) {
        val = string_bound(rs, ea, eb);
      } else if (a == eb && b == ea) {
        val = -string_bound(rs, ea, eb);
      } else if (a > b) {
        val = -get(b, a);
      } else {
        // quadruple identity on (ea, eb, -a, -b)
        Q t;
        int ma = rs.negate(a), mb = rs.negate(b);
        int d1 = rs.sum(eb, ma), d2 = rs.sum(ea, ma);
        if (d1 >= 0) t = t + Q(get(eb, ma) * get(ea, mb), len(d1));
        if (d2 >= 0) t = t + Q(get(ma, ea) * get(eb, mb), len(d2));
        Q v = t * Q(len(s)) / Q(get(ea, eb));
        if (v.q != 1) throw std::logic_error("non-integral structure constant");
        val = int(v.p);
      }
    } else if (!pos(a) && !pos(b)) {
      val = -get(rs.negate(a), rs.negate(b));
    } else if (!pos(a)) {
      val = -get(b, a);
    } else if (pos(s)) {
      // a > 0 > b, a + b > 0:  N_ab = (s,s)/(a,a) N_{s,-b}
      Q v = Q(len(s), len(a)) * Q(get(s, rs.negate(b)));
      if (v.q != 1) throw std::logic_error("non-integral structure constant");
      val = int(v.p);
    } else {
      val = -get(rs.negate(a), rs.negate(b));
    }
    sc.N[a * n + b] = val;
    return val;
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sc.N[a * n + b] = get(a, b);
  fill_second_order(rs, sc);
  return sc;
}

Report check_structure_constants(const RootSystem& rs, const StructureConstants& sc) {
  Report rep;
  rep.check = "structure-constants:" + rs.name();
  const int n = rs.size();
  auto len = [&](int r) { return (long long)rs.roots[r].len2; };
  auto pr = [&](int a, int b) { return [&rs, a, b] { return rs.serialize(a) + "," + rs.serialize(b); }; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int s = rs.sum(a, b);
      rep.expect(sc.at(a, b) == -sc.at(b, a), "antisymmetry", pr(a, b));
      rep.expect(sc.at(rs.negate(a), rs.negate(b)) == -sc.at(a, b), "N(-a,-b) = -N(a,b)", pr(a, b));
      int want = s < 0 ? 0 : string_bound(rs, a, b);
      rep.expect(std::abs(sc.at(a, b)) == want, "|N| = r+1", pr(a, b));
      if (s >= 0) {
        int c = rs.negate(s);
        rep.expect(sc.at(a, b) * len(a) == sc.at(b, c) * len(c) && sc.at(b, c) * len(b) == sc.at(c, a) * len(a),
                   "triple identity", pr(a, b));
      }
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (b == rs.negate(a)) continue;
      for (int c = 0; c < n; ++c) {
        if (c == rs.negate(a) || c == rs.negate(b)) continue;
        auto v = root_vec_sum(root_vec_sum(rs.roots[a].c, rs.roots[b].c), rs.roots[c].c);
        for (auto& x : v) x = -x;
        int d = rs.find(v);
        if (d < 0 || d == rs.negate(a) || d == rs.negate(b) || d == rs.negate(c)) continue;
        Q t;
        int ab = rs.sum(a, b), bc = rs.sum(b, c), ca = rs.sum(c, a);
        if (ab >= 0) t = t + Q(sc.at(a, b) * sc.at(c, d), len(ab));
        if (bc >= 0) t = t + Q(sc.at(b, c) * sc.at(a, d), len(bc));
        if (ca >= 0) t = t + Q(sc.at(c, a) * sc.at(b, d), len(ca));
        rep.expect(t.p == 0, "quadruple identity", [&] { return rs.serialize(a) + "," + rs.serialize(b) + "," + rs.serialize(c); });
      }
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int s = rs.sum(a, b);
      if (s >= 0 && rs.sum(a, s) >= 0)
        rep.expect(2 * sc.at21(a, b) == sc.at(a, b) * sc.at(a, s), "N21 = N N / 2", pr(a, b));
      if (s >= 0 && rs.sum(b, s) >= 0)
        rep.expect(2 * sc.at12(a, b) == sc.at(a, b) * sc.at(b, s), "N12 = N N / 2", pr(a, b));
    }
  return rep;
}

std::pair<int, int> mutate_structure_constants(const RootSystem& rs, StructureConstants& sc) {
  for (int a = 0; a < sc.n; ++a)
    for (int b = 0; b < sc.n; ++b) {
      int s = rs.sum(a, b);
      if (s < 0 || rs.roots[a].height <= 0 || rs.roots[b].height <= 0) continue;
      if (is_long(rs, a) != is_long(rs, b) || is_long(rs, a) != is_long(rs, s)) continue;
      sc.N[a * sc.n + b] = -sc.N[a * sc.n + b];
      sc.N[b * sc.n + a] = -sc.N[b * sc.n + a];
      fill_second_order(rs, sc);
      return {a, b};
    }
  throw std::invalid_argument("no same-length pair to mutate");
}

// ---- coefficients -------------------------------------------------------------

DLCoeffs dl_coeffs_ff(CoeffPtr K) {
  DLCoeffs co;
  co.name = "FF(" + K->name() + ")";
  co.ring = K;
  co.base = K;
  co.short_S = co.long_S = co.short_R = co.long_R = K->full();
  co.a = co.b = K->full();
  co.delta.resize(K->size());
  std::iota(co.delta.begin(), co.delta.end(), 0);
  return co;
}

DLCoeffs dl_coeffs_crossed(CoeffPtr K, Mask a, Mask b) {
  if (!admissible(*K, a, b, 'F')) throw std::invalid_argument("pair is not admissible of type F");
  DLCoeffs co;
  std::vector<uint8_t> p1, p2, sec;
  co.ring = std::make_shared<CoeffRing>(CoeffRing::semidirect(*K, a, &p1, &p2, &sec));
  co.base = K;
  co.a = a;
  co.b = b;
  co.crossed = true;
  co.name = "(" + std::to_string(K->elements(a).size()) + "," + std::to_string(K->elements(b).size()) +
            ")x" + K->name();
  const int n = co.ring->size();
  co.delta.resize(n);
  for (int v = 0; v < n; ++v) {
    co.delta[v] = sec[p1[v]];
    if (p2[v] == 0) {
      co.short_S |= Mask(1) << v;
      if (K->in(b, p1[v])) co.long_S |= Mask(1) << v;
    }
  }
  for (int k = 0; k < K->size(); ++k) co.short_R |= Mask(1) << sec[k];
  co.long_R = co.short_R;
  return co;
}

// ---- oracles ------------------------------------------------------------------

int DLTarget::find(const std::vector<int>& v) const {
  for (size_t r = 0; r < roots.size(); ++r)
    if (roots[r] == v) return int(r);
  return -1;
}

namespace {

// Raw dictionary of a unitary oracle: root of B_ell / C_ell -> elementary unitary.
Heis raw_unitary(const OddFormRing& o, RootKind kind, const Root& root, uint8_t c) {
  RootSlot sl = root_slot(root);
  if (!sl.ultra) return o.T_ij({sl.i}, {sl.j}, o.unit(sl.i, sl.j, c));
  if (kind == RootKind::C) {
    Heis u;
    u.rho = o.unit(-sl.j, sl.j, c);
    return o.T_j({sl.j}, u);
  }
  return o.T_j({sl.j}, o.canon(o.unit(0, sl.j, c)));
}

class UnitaryTarget : public DLTarget {
 public:
  UnitaryTarget(RootKind kind, const OddFormRing& amb)
      : kind_(kind), amb_(amb), rs_(build_root_system(kind, amb.ell)), sc_(derive_structure_constants(rs_)) {
    if ((kind == RootKind::B) != amb.orth) throw std::invalid_argument("oracle kind does not match the ring");
    if (kind == RootKind::B && amb.qcoef[amb.row(0)] != amb.K().one())
      throw std::invalid_argument("orthogonal oracle needs the unit as module generator");
    signs_ = dictionary_signs(kind, amb.ell);
    type = kind_name(kind) + std::to_string(amb.ell);
    name = type + "[" + amb.name + "]";
    ring = amb.ring;
    for (const auto& r : rs_.roots) {
      roots.push_back(r.c);
      len2.push_back(r.len2);
    }
  }
  Heis elem(int r, uint8_t c) const override {
    if (signs_[r] < 0) c = amb_.K().neg(c);
    return raw_unitary(amb_, kind_, rs_.roots[r], c);
  }
  Heis mul(const Heis& g, const Heis& h) const override { return amb_.umul(g, h); }
  Heis inv(const Heis& g) const override { return amb_.uinv(g); }
  Heis one() const override { return Heis{}; }
  int constant(int a, int b) const override { return sc_.at(a, b); }
  std::string show(const Heis& g) const override { return amb_.show(g); }

 private:
  RootKind kind_;
  OddFormRing amb_;
  RootSystem rs_;
  StructureConstants sc_;
  std::vector<int8_t> signs_;
};

constexpr int kGlDim = 5;

class GlTarget : public DLTarget {
 public:
  explicit GlTarget(CoeffPtr k) {
    ring = k;
    type = "GL";
    name = "GL3+GL2[" + k->name() + "]";
    auto add_root = [&](int i, int j) {
      std::vector<int> v(kGlDim, 0);
      v[i] = 2;
      v[j] = -2;
      roots.push_back(v);
      len2.push_back(8);
      ends_.push_back({i, j});
    };
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) add_root(i, j);
    add_root(3, 4);
    add_root(4, 3);
    for (int i = 0; i < kGlDim; ++i) id_.at(i, i) = k->one();
  }
  Heis elem(int r, uint8_t c) const override {
    Heis g{id_, id_};
    auto [i, j] = ends_[r];
    g.pi.at(i, j) = c;
    g.rho.at(i, j) = ring->neg(c);
    return g;
  }
  Heis mul(const Heis& g, const Heis& h) const override { return {mm(g.pi, h.pi), mm(h.rho, g.rho)}; }
  Heis inv(const Heis& g) const override { return {g.rho, g.pi}; }
  Heis one() const override { return {id_, id_}; }
  int constant(int a, int b) const override {
    auto [i, j] = ends_[a];
    auto [k, l] = ends_[b];
    if (j == k && i != l) return 1;
    if (l == i && j != k) return -1;
    return 0;
  }
  std::string show(const Heis& g) const override {
    std::string s = "[";
    for (int r = 0; r < kGlDim; ++r) {
      if (r) s += ";";
      for (int c = 0; c < kGlDim; ++c) s += (c ? " " : "") + ring->label(g.pi.at(r, c));
    }
    return s + "]";
  }

 private:
  Mat mm(const Mat& a, const Mat& b) const {
    Mat o;
    const CoeffRing& k = *ring;
    for (int r = 0; r < kGlDim; ++r)
      for (int m = 0; m < kGlDim; ++m) {
        uint8_t x = a.at(r, m);
        if (!x) continue;
        for (int c = 0; c < kGlDim; ++c)
          if (b.at(m, c)) o.at(r, c) = k.add(o.at(r, c), k.mul(x, b.at(m, c)));
      }
    return o;
  }
  std::vector<std::pair<int, int>> ends_;
  Mat id_;
};

}  // namespace

std::vector<int8_t> dictionary_signs(RootKind kind, int rank) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<int8_t>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(int(kind), rank);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (kind != RootKind::B && kind != RootKind::C) throw std::invalid_argument("unitary oracles are B or C");

  auto z5 = std::make_shared<CoeffRing>(CoeffRing::zmod(5));
  PairF ff = FF(z5);
  OddFormRing o = kind == RootKind::C ? ofasymp(rank, as_C(ff)) : ofaorth(rank, as_B(ff));
  RootSystem rs = build_root_system(kind, rank);
  StructureConstants sc = derive_structure_constants(rs);
  const int n = rs.size();
  if (n > 64) throw std::invalid_argument("too many roots");
  auto raw = [&](int r, int c) { return raw_unitary(o, kind, rs.roots[r], uint8_t(c)); };
  Gf2 sys;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int s = rs.sum(a, b);
      if (s < 0) continue;
      int second = rs.sum(a, s) >= 0 ? rs.sum(a, s) : rs.sum(b, s);
      Heis cm = o.ucomm(raw(a, 1), raw(b, 1));
      int found = -1;
      for (int v = 0; v < 5 && found < 0; ++v)
        for (int m = 0; m < (second >= 0 ? 5 : 1) && found < 0; ++m) {
          Heis rhs = raw(s, v);
          if (second >= 0) rhs = o.umul(rhs, raw(second, m));
          if (rhs == cm) found = v;
        }
      int signed_v = found <= 2 ? found : found - 5;
      int want = sc.at(a, b);
      bool flip;
      if (found >= 0 && signed_v == want) flip = false;
      else if (found >= 0 && signed_v == -want) flip = true;
      else throw std::logic_error("oracle commutator does not match the constant pattern at " +
                                  rs.serialize(a) + "," + rs.serialize(b));
      sys.add((uint64_t(1) << a) | (uint64_t(1) << b) | (uint64_t(1) << s), flip);
    }
  auto sol = sys.solve(n);
  if (!sol) throw std::logic_error("no dictionary re-signing exists for " + rs.name());
  std::vector<int8_t> signs(n);
  for (int r = 0; r < n; ++r) signs[r] = ((*sol >> r) & 1) ? -1 : 1;
  cache[key] = signs;
  return signs;
}

TargetPtr unitary_target(RootKind kind, const OddFormRing& amb) {
  return std::make_shared<UnitaryTarget>(kind, amb);
}
TargetPtr gl_target(CoeffPtr ring) { return std::make_shared<GlTarget>(ring); }

// ---- subsystems ---------------------------------------------------------------------

SpanInfo classify_span(const RootSystem& rs, const std::vector<int>& roots) {
  SpanInfo sp;
  std::vector<std::vector<int>> basis;
  for (int r : roots) {
    auto trial = basis;
    trial.push_back(rs.roots[r].c);
    if (vrank_int(trial) > int(basis.size())) basis = trial;
  }
  sp.rank = int(basis.size());
  for (int g = 0; g < rs.size(); ++g) {
    auto trial = basis;
    trial.push_back(rs.roots[g].c);
    if (vrank_int(trial) == sp.rank) sp.span |= RootSet(1) << g;
  }
  auto in = [&](int g) { return g >= 0 && ((sp.span >> g) & 1); };
  for (int g = 0; g < rs.size(); ++g) {
    if (!in(g) || rs.roots[g].height <= 0) continue;
    bool decomposable = false;
    for (int d = 0; d < rs.size() && !decomposable; ++d) {
      if (!in(d) || rs.roots[d].height <= 0) continue;
      int e = rs.find(vdiff(rs.roots[g].c, rs.roots[d].c));
      decomposable = in(e) && rs.roots[e].height > 0;
    }
    if (!decomposable) sp.simple.push_back(g);
  }
  const int r = int(sp.simple.size());
  if (r != sp.rank) throw std::logic_error("simple system size differs from the rank");
  // components of the Dynkin diagram
  std::vector<int> comp(r);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> root_of = [&](int x) { return comp[x] == x ? x : comp[x] = root_of(comp[x]); };
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      if (i != j && rs.dot(sp.simple[i], sp.simple[j]) != 0) comp[root_of(i)] = root_of(j);
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < r; ++i) groups[root_of(i)].push_back(sp.simple[i]);
  std::vector<std::pair<int, std::string>> names;
  for (const auto& [key, g] : groups) {
    int m = int(g.size());
    int maxlen = 0, nlong = 0;
    bool double_bond = false;
    for (int x : g) maxlen = std::max(maxlen, rs.roots[x].len2);
    for (int x : g) nlong += rs.roots[x].len2 == maxlen;
    for (int x : g)
      for (int y : g)
        if (rs.roots[x].len2 != rs.roots[y].len2 && rs.dot(x, y) != 0) double_bond = true;
    std::string nm;
    if (!double_bond) nm = "A" + std::to_string(m);
    else if (m == 2) nm = "B2";
    else if (m == 3) nm = nlong == 2 ? "B3" : "C3";
    else nm = (m == 4 ? "F4" : "X" + std::to_string(m));
    if (!double_bond && m >= 4) {
      // A_m or D_m: D has a branch node
      for (int x : g) {
        int deg = 0;
        for (int y : g)
          if (x != y && rs.dot(x, y) != 0) ++deg;
        if (deg == 3) nm = "D" + std::to_string(m);
      }
    }
    names.push_back({m, nm});
  }
  std::sort(names.begin(), names.end());
  for (size_t k = 0; k < names.size(); ++k) sp.type += (k ? "x" : "") + names[k].second;
  if (sp.rank <= 2) sp.category = "rank<=2";
  else if (sp.rank == 3 && (sp.type == "A1xA2" || sp.type == "B3" || sp.type == "C3")) sp.category = sp.type;
  else sp.category = "unclassified";
  return sp;
}

std::optional<DLEmbedding> embed_span(const RootSystem& rs, const StructureConstants& sc,
                                      const SpanInfo& span, const TargetPtr& target) {
  const int r = int(span.simple.size());
  std::vector<int> members;
  for (int g = 0; g < rs.size(); ++g)
    if ((span.span >> g) & 1) members.push_back(g);
  // coefficients of every member in the simple roots (Gram system, exact)
  std::vector<std::vector<long long>> coef;
  for (int g : members) {
    std::vector<std::vector<Q>> m(r, std::vector<Q>(r + 1));
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) m[i][j] = Q(rs.dot(span.simple[i], span.simple[j]));
      m[i][r] = Q(rs.dot(g, span.simple[i]));
    }
    for (int c = 0; c < r; ++c) {
      int p = c;
      while (m[p][c].p == 0) ++p;
      std::swap(m[p], m[c]);
      for (int i = 0; i < r; ++i) {
        if (i == c || m[i][c].p == 0) continue;
        Q f = m[i][c] / m[c][c];
        for (int j = 0; j <= r; ++j) m[i][j] = m[i][j] + Q(-1) * f * m[c][j];
      }
    }
    std::vector<long long> k(r);
    for (int i = 0; i < r; ++i) {
      Q v = m[i][r] / m[i][i];
      if (v.q != 1) throw std::logic_error("non-integral simple coefficients");
      k[i] = v.p;
    }
    coef.push_back(k);
  }
  const auto& tr = target->roots;
  const int nt = int(tr.size());
  std::vector<int> pick(r, 0);
  auto cartan_ok = [&]() {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        if (i != j && pick[i] == pick[j]) return false;
        long long s = 2LL * rs.dot(span.simple[i], span.simple[j]) * target->len2[pick[j]];
        long long t = 2LL * vdot(tr[pick[i]], tr[pick[j]]) * rs.roots[span.simple[j]].len2;
        if (s != t) return false;
      }
    return true;
  };
  std::vector<int> posidx(rs.size(), -1);
  int nvars = 0;
  for (int g : members)
    if (rs.roots[g].height > 0) posidx[g] = nvars++;
  for (int g : members)
    if (rs.roots[g].height < 0) posidx[g] = posidx[rs.negate(g)];

  for (;;) {
    if (cartan_ok()) {
      DLEmbedding emb;
      emb.target = target;
      emb.map.assign(rs.size(), -1);
      bool ok = true;
      for (size_t m = 0; m < members.size() && ok; ++m) {
        std::vector<int> img(tr[0].size(), 0);
        for (int i = 0; i < r; ++i)
          for (size_t k = 0; k < img.size(); ++k) img[k] += int(coef[m][i]) * tr[pick[i]][k];
        int t = target->find(img);
        ok = t >= 0;
        emb.map[members[m]] = t;
      }
      if (ok) {
        std::vector<std::vector<int>> base;
        for (int i = 0; i < r; ++i) base.push_back(tr[pick[i]]);
        int inside = 0;
        for (const auto& v : tr) {
          auto trial = base;
          trial.push_back(v);
          inside += vrank_int(trial) == r;
        }
        ok = inside == int(members.size());
      }
      if (ok) {
        Gf2 sys;
        for (int a : members)
          for (int b : members) {
            int s = rs.sum(a, b);
            if (s < 0 || !ok) continue;
            int ns = sc.at(a, b), nt2 = target->constant(emb.map[a], emb.map[b]);
            if (nt2 != ns && nt2 != -ns) ok = false;
            sys.add((uint64_t(1) << posidx[a]) ^ (uint64_t(1) << posidx[b]) ^ (uint64_t(1) << posidx[s]),
                    nt2 != ns);
          }
        std::optional<uint64_t> sol;
        if (ok) sol = sys.solve(nvars);
        if (sol) {
          emb.flip.assign(rs.size(), 0);
          for (int g : members) emb.flip[g] = (*sol >> posidx[g]) & 1;
          return emb;
        }
      }
    }
    int k = 0;
    while (k < r && ++pick[k] == nt) pick[k++] = 0;
    if (k == r) break;
  }
  return std::nullopt;
}

// ---- settings --------------------------------------------------------------------------

namespace {

void require_same_ring(const CoeffRing& x, const CoeffRing& y) {
  bool same = x.size() == y.size() && x.one() == y.one();
  for (int a = 0; a < x.size() && same; ++a)
    for (int b = 0; b < x.size() && same; ++b)
      same = x.add(uint8_t(a), uint8_t(b)) == y.add(uint8_t(a), uint8_t(b)) &&
             x.mul(uint8_t(a), uint8_t(b)) == y.mul(uint8_t(a), uint8_t(b));
  if (!same) throw std::logic_error("oracle ring encoding differs from the coefficient ring");
}

}  // namespace

DLSetting dl_setting_ff(RootKind kind, int rank, CoeffPtr K) {
  DLSetting st;
  st.rs = build_root_system(kind, rank);
  st.sc = derive_structure_constants(st.rs);
  st.co = dl_coeffs_ff(K);
  st.name = st.rs.name() + "/" + st.co.name;
  PairF ff = FF(K);
  if (kind == RootKind::B) {
    st.targets.push_back(unitary_target(kind, ofaorth(rank, as_B(ff))));
  } else if (kind == RootKind::C) {
    st.targets.push_back(unitary_target(kind, ofasymp(rank, as_C(ff))));
  } else if (kind == RootKind::F) {
    st.dispatch = true;
    st.targets.push_back(unitary_target(RootKind::B, ofaorth(3, as_B(ff))));
    st.targets.push_back(unitary_target(RootKind::C, ofasymp(3, as_C(ff))));
    st.targets.push_back(gl_target(K));
  } else {
    throw std::invalid_argument("doubly laced systems only");
  }
  for (const auto& t : st.targets) require_same_ring(*t->ring, *st.co.ring);
  return st;
}

DLSetting dl_setting_crossed(RootKind kind, int rank, CoeffPtr K, Mask a, Mask b) {
  DLSetting st;
  st.rs = build_root_system(kind, rank);
  st.sc = derive_structure_constants(st.rs);
  st.co = dl_coeffs_crossed(K, a, b);
  st.name = st.rs.name() + "/" + st.co.name;
  if (kind == RootKind::B) {
    st.targets.push_back(unitary_target(kind, crossed_ofaorth(K, a, b, rank).T));
  } else if (kind == RootKind::C) {
    st.targets.push_back(unitary_target(kind, crossed_ofasymp(K, a, b, rank).T));
  } else if (kind == RootKind::F) {
    st.dispatch = true;
    st.targets.push_back(unitary_target(RootKind::B, crossed_ofaorth(K, a, b, 3).T));
    st.targets.push_back(unitary_target(RootKind::C, crossed_ofasymp(K, a, b, 3).T));
    st.targets.push_back(gl_target(st.co.ring));
  } else {
    throw std::invalid_argument("doubly laced systems only");
  }
  for (const auto& t : st.targets) require_same_ring(*t->ring, *st.co.ring);
  return st;
}

void mutate_setting(DLSetting& st) {
  mutate_structure_constants(st.rs, st.sc);
  st.name += "+mutated";
}

// ---- commutator formula and V -----------------------------------------------------

std::vector<Factor> dl_commutator(const DLSetting& st, int a, uint8_t p, int b, uint8_t q) {
  const RootSystem& rs = st.rs;
  const CoeffRing& k = *st.co.ring;
  if (a == rs.negate(b)) throw std::invalid_argument("antiparallel roots");
  int s = rs.sum(a, b);
  if (s < 0) return {};
  auto times = [&](int n, uint8_t x) { return k.mul(k.from_int(n), x); };
  int s2 = rs.sum(a, s), s3 = rs.sum(b, s);
  if (s2 >= 0)  // a short, b long
    return {{s, times(st.sc.at(a, b), k.mul(p, q))},
            {s2, times(st.sc.at21(a, b), k.mul(q, k.mul(p, p)))}};
  if (s3 >= 0)  // a long, b short
    return {{s, times(st.sc.at(a, b), k.mul(q, p))},
            {s3, times(st.sc.at12(a, b), k.mul(p, k.mul(q, q)))}};
  if (!is_long(rs, a) && !is_long(rs, b) && is_long(rs, s)) {
    int n = st.sc.at(a, b);
    if (n % 2) throw std::logic_error("odd constant on a short+short=long pair");
    uint8_t spq = k.add(k.mul(p, q), k.mul(p, q));  // s(p|q) = 2pq
    return {{s, times(n / 2, spq)}};
  }
  return {{s, times(st.sc.at(a, b), k.mul(p, q))}};
}

std::string vkind_name(VKind k) {
  switch (k) {
    case VKind::SameShort: return "short-short";
    case VKind::SameLong: return "long-long";
    case VKind::LongHalf: return "long-half";
    case VKind::ShortSum: return "short-sum";
  }
  return "?";
}

std::optional<VShape> v_shape(const RootSystem& rs, int a, int b) {
  if (a == b || a == rs.negate(b)) return std::nullopt;
  bool la = is_long(rs, a), lb = is_long(rs, b);
  int d = rs.sum(a, rs.negate(b));
  int s = rs.sum(a, b);
  VShape sh;
  sh.alpha = a;
  sh.beta = b;
  if (!la && !lb && d >= 0 && !is_long(rs, d)) {
    sh.kind = VKind::SameShort;
    sh.roots = {a, b};
    return sh;
  }
  if (la && lb && d >= 0 && is_long(rs, d)) {
    sh.kind = VKind::SameLong;
    sh.roots = {a, b};
    return sh;
  }
  if (la && lb) {
    auto v = root_vec_sum(rs.roots[a].c, rs.roots[b].c);
    bool even = std::all_of(v.begin(), v.end(), [](int x) { return x % 2 == 0; });
    if (even) {
      for (auto& x : v) x /= 2;
      int m = rs.find(v);
      if (m >= 0 && !is_long(rs, m)) {
        sh.kind = VKind::LongHalf;
        sh.roots = {a, m, b};
        return sh;
      }
    }
  }
  if (!la && !lb && s >= 0 && is_long(rs, s)) {
    sh.kind = VKind::ShortSum;
    sh.roots = {a, s, b};
    return sh;
  }
  return std::nullopt;
}

VElem v_add(const DLSetting& st, const VShape& sh, const VElem& x, const VElem& y) {
  const CoeffRing& k = *st.co.ring;
  VElem z{};
  for (size_t c = 0; c < sh.roots.size(); ++c) z[c] = k.add(x[c], y[c]);
  if (sh.kind == VKind::ShortSum) {
    int n = st.sc.at(sh.alpha, sh.beta);
    if (n % 2) throw std::logic_error("odd constant on a short+short=long pair");
    uint8_t s = k.add(k.mul(x[2], y[0]), k.mul(x[2], y[0]));  // s(z|x')
    z[1] = k.sub(z[1], k.mul(k.from_int(n / 2), s));
  }
  return z;
}

VElem v_neg(const DLSetting& st, const VShape& sh, const VElem& x) {
  const CoeffRing& k = *st.co.ring;
  VElem z{};
  for (size_t c = 0; c < sh.roots.size(); ++c) z[c] = k.neg(x[c]);
  if (sh.kind == VKind::ShortSum) {
    int n = st.sc.at(sh.alpha, sh.beta);
    uint8_t s = k.mul(x[2], k.neg(x[0]));
    s = k.add(s, s);
    z[1] = k.add(k.neg(x[1]), k.mul(k.from_int(n / 2), s));
  }
  return z;
}

std::vector<Factor> v_word(const VShape& sh, const VElem& x) {
  std::vector<Factor> w;
  for (size_t c = 0; c < sh.roots.size(); ++c) w.push_back({sh.roots[c], x[c]});
  return w;
}

VElem v_from_word(const DLSetting& st, const VShape& sh, const std::vector<Factor>& w) {
  VElem acc{};
  for (const auto& [root, c] : w) {
    auto it = std::find(sh.roots.begin(), sh.roots.end(), root);
    if (it == sh.roots.end())
      throw std::logic_error("factor " + st.rs.serialize(root) + " outside V");
    VElem e{};
    e[it - sh.roots.begin()] = c;
    acc = v_add(st, sh, acc, e);
  }
  return acc;
}

VElem v_act(const DLSetting& st, const VShape& sh, int g, uint8_t t, const VElem& x) {
  std::vector<Factor> w;
  for (size_t c = 0; c < sh.roots.size(); ++c) {
    auto f = dl_commutator(st, g, t, sh.roots[c], x[c]);
    w.insert(w.end(), f.begin(), f.end());
    w.push_back({sh.roots[c], x[c]});
  }
  return v_from_word(st, sh, w);
}

namespace {

std::vector<VElem> v_elements(const DLSetting& st, const VShape& sh, bool base_level) {
  std::vector<std::vector<uint8_t>> comps;
  for (int r : sh.roots) {
    Mask m = base_level ? (is_long(st.rs, r) ? st.co.long_R : st.co.short_R)
                        : (is_long(st.rs, r) ? st.co.long_S : st.co.short_S);
    comps.push_back(st.co.ring->elements(m));
  }
  std::vector<VElem> out{VElem{}};
  for (size_t c = 0; c < comps.size(); ++c) {
    std::vector<VElem> next;
    for (const auto& v : out)
      for (uint8_t x : comps[c]) {
        VElem w = v;
        w[c] = x;
        next.push_back(w);
      }
    out = next;
  }
  return out;
}

}  // namespace

Report check_vrep(const DLSetting& st, uint64_t cap) {
  Report rep;
  rep.check = "vrep:" + st.name;
  uint64_t done = 0;
  for (int a = 0; a < st.rs.size(); ++a)
    for (int b = 0; b < st.rs.size(); ++b) {
      auto sh = v_shape(st.rs, a, b);
      if (!sh) continue;
      ++rep.counts["shape:" + vkind_name(sh->kind)];
      for (int lvl = 0; lvl < 2; ++lvl) {
        auto el = v_elements(st, *sh, lvl == 1);
        auto w = [&](const VElem& x) {
          return [&, x] {
            return st.rs.serialize(a) + "," + st.rs.serialize(b) + " (" + std::to_string(x[0]) + "," +
                   std::to_string(x[1]) + "," + std::to_string(x[2]) + ")";
          };
        };
        for (const auto& x : el) {
          rep.expect(v_add(st, *sh, x, VElem{}) == x && v_add(st, *sh, VElem{}, x) == x, "V unit", w(x));
          rep.expect(v_add(st, *sh, x, v_neg(st, *sh, x)) == VElem{}, "V inverse", w(x));
          for (const auto& y : el) {
            if (done >= cap) break;
            for (const auto& z : el) {
              if (++done > cap) break;
              rep.expect(v_add(st, *sh, v_add(st, *sh, x, y), z) == v_add(st, *sh, x, v_add(st, *sh, y, z)),
                         "V associative", w(x));
            }
          }
        }
      }
    }
  if (done > cap) rep.mode = "capped";
  return rep;
}

// ---- evaluation ---------------------------------------------------------------------

Heis DLEval::x(int root, uint8_t c) const {
  int t = emb.map[root];
  if (t < 0) throw std::logic_error("root " + st.rs.serialize(root) + " outside the embedded span");
  if (emb.flip[root]) c = st.co.ring->neg(c);
  return emb.target->elem(t, c);
}

Heis DLEval::word(const std::vector<Factor>& w) const {
  Heis g = emb.target->one();
  for (const auto& [r, c] : w) g = mul(g, x(r, c));
  return g;
}

Heis DLEval::z(int a, uint8_t xa, uint8_t p) const { return conj(x(st.rs.negate(a), p), x(a, xa)); }

Heis DLEval::zv(const VShape& sh, const VElem& u, const VShape& shneg, const VElem& s) const {
  return conj(word(v_word(shneg, s)), word(v_word(sh, u)));
}

uint64_t DLFamily::count() const {
  uint64_t total = 0;
  for (const auto& t : tuples) {
    uint64_t n = 1;
    for (const auto* c : t.carriers) n *= c->size();
    total += n;
  }
  return total;
}

// ---- family construction ------------------------------------------------------------

namespace {

struct Builder {
  const DLSetting& st;
  DLBundle b;
  std::map<RootSet, std::vector<std::shared_ptr<const DLEmbedding>>> cache;
  std::shared_ptr<const DLEmbedding> global;

  explicit Builder(const DLSetting& s) : st(s) {
    b.store = std::make_shared<std::map<std::string, std::vector<uint8_t>>>();
    auto put = [&](const std::string& key, Mask m) { (*b.store)[key] = st.co.ring->elements(m); };
    put("S-short", st.co.short_S);
    put("S-long", st.co.long_S);
    put("R-short", st.co.short_R);
    put("R-long", st.co.long_R);
    if (!st.dispatch) {
      auto e = std::make_shared<DLEmbedding>();
      e->target = st.targets.at(0);
      e->map.resize(st.rs.size());
      std::iota(e->map.begin(), e->map.end(), 0);
      e->flip.assign(st.rs.size(), 0);
      if (int(e->target->roots.size()) != st.rs.size()) throw std::logic_error("oracle does not realize the system");
      global = e;
    }
  }
  bool lng(int r) const { return is_long(st.rs, r); }
  const std::vector<uint8_t>* S(int r) const { return &b.store->at(lng(r) ? "S-long" : "S-short"); }
  const std::vector<uint8_t>* R(int r) const { return &b.store->at(lng(r) ? "R-long" : "R-short"); }

  std::vector<std::shared_ptr<const DLEmbedding>> embeddings(const SpanInfo& sp) {
    if (!st.dispatch) return {global};
    if (auto it = cache.find(sp.span); it != cache.end()) return it->second;
    std::vector<std::string> pref;
    if (sp.type == "A2" || sp.type == "A1xA2") pref = {"GL", "B3", "C3"};
    else if (sp.type == "B3") pref = {"B3"};
    else if (sp.type == "C3") pref = {"C3"};
    else pref = {"B3", "C3", "GL"};
    std::vector<std::shared_ptr<const DLEmbedding>> out;
    for (const auto& p : pref)
      for (const auto& t : st.targets) {
        if (t->type != p) continue;
        if (!out.empty() && !st.cross_check) break;
        if (auto e = embed_span(st.rs, st.sc, sp, t)) out.push_back(std::make_shared<DLEmbedding>(*e));
      }
    return cache[sp.span] = out;
  }

  DLTuple tuple(std::vector<int> roots, std::vector<const std::vector<uint8_t>*> car) {
    DLTuple t;
    t.span = classify_span(st.rs, roots);
    t.embeddings = embeddings(t.span);
    t.roots = std::move(roots);
    t.carriers = std::move(car);
    return t;
  }

  DLFamily& family(const std::string& name) {
    b.families.push_back({});
    b.families.back().name = name;
    return b.families.back();
  }

  std::vector<const std::vector<uint8_t>*> v_carriers(const VShape& sh, bool base_level) const {
    std::vector<const std::vector<uint8_t>*> out;
    for (int r : sh.roots) out.push_back(base_level ? R(r) : S(r));
    return out;
  }
};

VElem take(const std::vector<uint8_t>& p, size_t& at, size_t n) {
  VElem v{};
  for (size_t c = 0; c < n; ++c) v[c] = p[at++];
  return v;
}

template <class... Ts>
std::vector<const std::vector<uint8_t>*> cat(Ts... parts) {
  std::vector<const std::vector<uint8_t>*> out;
  (out.insert(out.end(), parts.begin(), parts.end()), ...);
  return out;
}

}  // namespace

DLBundle dl_relations(const DLSetting& st) {
  Builder B(st);
  const RootSystem& rs = st.rs;
  const int n = rs.size();
  {
    auto& f = B.family("dl.add");
    for (int a = 0; a < n; ++a) f.tuples.push_back(B.tuple({a}, {B.R(a), B.R(a)}));
    f.eval = [&st](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      return std::make_pair(ev.mul(ev.x(r[0], p[0]), ev.x(r[0], p[1])),
                            ev.x(r[0], st.co.ring->add(p[0], p[1])));
    };
  }
  const char* names[] = {"dl.comm_trivial", "dl.comm_equal", "dl.comm_short_short_long", "dl.comm_short_long",
                         "dl.comm_long_short"};
  for (int pattern = 0; pattern < 5; ++pattern) {
    auto& f = B.family(names[pattern]);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b || a == rs.negate(b)) continue;
        int s = rs.sum(a, b);
        int kind;
        if (s < 0) kind = 0;
        else if (rs.sum(a, s) >= 0) kind = 3;
        else if (rs.sum(b, s) >= 0) kind = 4;
        else if (!is_long(rs, a) && !is_long(rs, b) && is_long(rs, s)) kind = 2;
        else kind = 1;
        if (kind == pattern) f.tuples.push_back(B.tuple({a, b}, {B.R(a), B.R(b)}));
      }
    f.eval = [&st](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      Heis lhs = ev.comm(ev.x(r[0], p[0]), ev.x(r[1], p[1]));
      return std::make_pair(lhs, ev.word(dl_commutator(st, r[0], p[0], r[1], p[1])));
    };
  }
  if (st.dispatch) {
    // every rank-3 subsystem once, with all its commutator relations evaluated
    // through the embedding of the whole subsystem
    auto& f = B.family("dl.comm_span3");
    std::set<RootSet> seen;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c) {
          if (rs.roots[a].height < 0 || rs.roots[b].height < 0 || rs.roots[c].height < 0) continue;
          SpanInfo sp = classify_span(rs, {a, b, c});
          if (sp.rank != 3 || !seen.insert(sp.span).second) continue;
          for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
              if (!((sp.span >> x) & 1) || !((sp.span >> y) & 1) || x == y || x == rs.negate(y)) continue;
              f.tuples.push_back(B.tuple({x, y, a, b, c}, {B.R(x), B.R(y)}));
            }
        }
    f.eval = [&st](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      Heis lhs = ev.comm(ev.x(r[0], p[0]), ev.x(r[1], p[1]));
      return std::make_pair(lhs, ev.word(dl_commutator(st, r[0], p[0], r[1], p[1])));
    };
  }
  return B.b;
}

DLBundle relative_dl_relations(const DLSetting& st) {
  Builder B(st);
  const RootSystem& rs = st.rs;
  const int n = rs.size();
  auto neg = [&rs](int r) { return rs.negate(r); };
  auto shape = [&rs](int a, int b) {
    auto sh = v_shape(rs, a, b);
    if (!sh) throw std::logic_error("no V for " + rs.serialize(a) + "," + rs.serialize(b));
    return *sh;
  };
  std::vector<std::pair<int, int>> vpairs;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (v_shape(rs, a, b)) vpairs.push_back({a, b});
  auto parallel_roots = [&](int a, int b) {
    std::vector<int> out;
    auto d = vdiff(rs.roots[a].c, rs.roots[b].c);
    for (int g = 0; g < n; ++g)
      if (vrank_int({d, rs.roots[g].c}) == 1) out.push_back(g);
    return out;
  };
  const CoeffRing& K = *st.co.ring;

  {  // Sym
    auto& f = B.family("rel.sym");
    for (auto [a, b] : vpairs) {
      auto sh = shape(a, b), shn = shape(neg(a), neg(b));
      f.tuples.push_back(B.tuple({a, b}, cat(B.v_carriers(sh, false), B.v_carriers(shn, true))));
    }
    f.eval = [&st, shape, neg](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      auto sh = shape(r[0], r[1]), shn = shape(neg(r[0]), neg(r[1]));
      auto sh2 = shape(r[1], r[0]), shn2 = shape(neg(r[1]), neg(r[0]));
      size_t at = 0;
      VElem u = take(p, at, sh.roots.size()), s = take(p, at, shn.roots.size());
      VElem u2 = v_from_word(st, sh2, v_word(sh, u)), s2 = v_from_word(st, shn2, v_word(shn, s));
      return std::make_pair(ev.zv(sh, u, shn, s), ev.zv(sh2, u2, shn2, s2));
    };
  }
  {  // Add for root generators
    auto& f = B.family("rel.add1");
    for (int a = 0; a < n; ++a) f.tuples.push_back(B.tuple({a}, {B.S(a), B.S(a), B.R(neg(a))}));
    f.eval = [&K](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      return std::make_pair(ev.mul(ev.z(r[0], p[0], p[2]), ev.z(r[0], p[1], p[2])),
                            ev.z(r[0], K.add(p[0], p[1]), p[2]));
    };
  }
  {  // Add for V generators
    auto& f = B.family("rel.add2");
    for (auto [a, b] : vpairs) {
      auto sh = shape(a, b), shn = shape(neg(a), neg(b));
      f.tuples.push_back(B.tuple(
          {a, b}, cat(B.v_carriers(sh, false), B.v_carriers(sh, false), B.v_carriers(shn, true))));
    }
    f.eval = [&st, shape, neg](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      auto sh = shape(r[0], r[1]), shn = shape(neg(r[0]), neg(r[1]));
      size_t at = 0;
      VElem u = take(p, at, sh.roots.size()), v = take(p, at, sh.roots.size());
      VElem s = take(p, at, shn.roots.size());
      return std::make_pair(ev.mul(ev.zv(sh, u, shn, s), ev.zv(sh, v, shn, s)),
                            ev.zv(sh, v_add(st, sh, u, v), shn, s));
    };
  }
  {  // Comm1
    auto& f = B.family("rel.comm1");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b && rs.dot(a, b) == 0 && rs.sum(a, b) < 0)
          f.tuples.push_back(B.tuple({a, b}, {B.S(a), B.R(neg(a)), B.S(b), B.R(neg(b))}));
    f.eval = [](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      return std::make_pair(ev.comm(ev.z(r[0], p[0], p[1]), ev.z(r[1], p[2], p[3])), ev.emb.target->one());
    };
  }
  {  // Comm2
    auto& f = B.family("rel.comm2");
    for (auto [a, b] : vpairs) {
      auto sh = shape(a, b), shn = shape(neg(a), neg(b));
      for (int g : parallel_roots(a, b))
        f.tuples.push_back(B.tuple({a, b, g}, cat(std::vector<const std::vector<uint8_t>*>{B.S(g), B.R(neg(g))},
                                                  B.v_carriers(sh, false), B.v_carriers(shn, true))));
    }
    f.eval = [&st, &K, shape, neg](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      auto sh = shape(r[0], r[1]), shn = shape(neg(r[0]), neg(r[1]));
      int g = r[2];
      uint8_t x = p[0], q = p[1];
      size_t at = 2;
      VElem u = take(p, at, sh.roots.size()), s = take(p, at, shn.roots.size());
      uint8_t dx = st.co.delta[x];
      auto act = [&](const VShape& h, VElem v) {
        v = v_act(st, h, neg(g), K.neg(q), v);
        v = v_act(st, h, g, dx, v);
        return v_act(st, h, neg(g), q, v);
      };
      Heis lhs = ev.conj(ev.z(g, x, q), ev.zv(sh, u, shn, s));
      return std::make_pair(lhs, ev.zv(sh, act(sh, u), shn, act(shn, s)));
    };
  }
  {  // Simp
    auto& f = B.family("rel.simp");
    for (auto [a, b] : vpairs) f.tuples.push_back(B.tuple({a, b}, {B.S(a), B.R(neg(a))}));
    f.eval = [shape, neg](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      auto sh = shape(r[0], r[1]), shn = shape(neg(r[0]), neg(r[1]));
      return std::make_pair(ev.z(r[0], p[0], p[1]), ev.zv(sh, VElem{p[0], 0, 0}, shn, VElem{p[1], 0, 0}));
    };
  }
  {  // HW1: a, b basis of A2
    auto& f = B.family("rel.hw1");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        int s = rs.sum(a, b);
        if (a == b || s < 0 || is_long(rs, a) != is_long(rs, b) || is_long(rs, a) != is_long(rs, s)) continue;
        f.tuples.push_back(B.tuple({a, b}, {B.S(s), B.R(neg(a)), B.R(neg(s)), B.R(neg(b))}));
      }
    f.eval = [&st, &rs, shape, neg](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      int a = r[0], b = r[1], s = rs.sum(a, b);
      uint8_t x = p[0], pa = p[1], q = p[2], rr = p[3];
      auto sh1 = shape(a, s), shn1 = shape(neg(a), neg(s));
      auto sh2 = shape(s, b), shn2 = shape(neg(s), neg(b));
      Heis lhs = ev.zv(sh1, v_act(st, sh1, neg(b), rr, VElem{0, x, 0}), shn1, VElem{pa, q, 0});
      Heis rhs = ev.zv(sh2, v_act(st, sh2, neg(a), pa, VElem{x, 0, 0}), shn2,
                       v_act(st, shn2, neg(a), pa, VElem{q, rr, 0}));
      return std::make_pair(lhs, rhs);
    };
  }
  {  // HW2: a short, b long basis of B2
    auto& f = B.family("rel.hw2");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        int s1 = rs.sum(a, b);
        if (s1 < 0 || is_long(rs, a) || !is_long(rs, b)) continue;
        int s2 = rs.sum(a, s1);
        if (s2 < 0) continue;
        f.tuples.push_back(B.tuple({a, b}, {B.S(s2), B.S(s1), B.R(neg(a)), B.R(neg(s2)), B.R(neg(s1)),
                                            B.R(neg(b))}));
      }
    f.eval = [&st, &rs, shape, neg](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      int a = r[0], b = r[1], s1 = rs.sum(a, b), s2 = rs.sum(a, s1);
      uint8_t x = p[0], y = p[1], pa = p[2], q = p[3], rr = p[4], s = p[5];
      auto sh1 = shape(a, s1), shn1 = shape(neg(a), neg(s1));
      auto sh2 = shape(s2, b), shn2 = shape(neg(s2), neg(b));
      Heis lhs = ev.zv(sh1, v_act(st, sh1, neg(b), s, VElem{0, x, y}), shn1, VElem{pa, q, rr});
      Heis rhs = ev.zv(sh2, v_act(st, sh2, neg(a), pa, VElem{x, y, 0}), shn2,
                       v_act(st, shn2, neg(a), pa, VElem{q, rr, s}));
      return std::make_pair(lhs, rhs);
    };
  }
  {  // Delta
    auto& f = B.family("rel.delta");
    for (int a = 0; a < n; ++a) f.tuples.push_back(B.tuple({a}, {B.S(a), B.S(neg(a)), B.R(neg(a))}));
    f.eval = [&st, &K, neg](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      int a = r[0];
      Heis lhs = ev.z(a, p[0], K.add(st.co.delta[p[1]], p[2]));
      return std::make_pair(lhs, ev.conj(ev.x(neg(a), p[1]), ev.z(a, p[0], p[2])));
    };
  }
  {  // V maps: homomorphism and equivariance
    auto& f = B.family("rel.vhom");
    for (auto [a, b] : vpairs) {
      auto sh = shape(a, b);
      f.tuples.push_back(B.tuple({a, b}, cat(B.v_carriers(sh, false), B.v_carriers(sh, false))));
    }
    f.eval = [&st, shape](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      auto sh = shape(r[0], r[1]);
      size_t at = 0;
      VElem u = take(p, at, sh.roots.size()), v = take(p, at, sh.roots.size());
      return std::make_pair(ev.mul(ev.word(v_word(sh, u)), ev.word(v_word(sh, v))),
                            ev.word(v_word(sh, v_add(st, sh, u, v))));
    };
    auto& g = B.family("rel.vequiv");
    for (auto [a, b] : vpairs) {
      auto sh = shape(a, b);
      for (int c : parallel_roots(a, b))
        g.tuples.push_back(B.tuple({a, b, c}, cat(std::vector<const std::vector<uint8_t>*>{B.R(c)},
                                                  B.v_carriers(sh, false))));
    }
    g.eval = [&st, shape](const DLEval& ev, const std::vector<int>& r, const std::vector<uint8_t>& p) {
      auto sh = shape(r[0], r[1]);
      size_t at = 1;
      VElem u = take(p, at, sh.roots.size());
      return std::make_pair(ev.conj(ev.x(r[2], p[0]), ev.word(v_word(sh, u))),
                            ev.word(v_word(sh, v_act(st, sh, r[2], p[0], u))));
    };
  }
  return B.b;
}

// ---- verification ------------------------------------------------------------------

FamilyOutcome verify_dl_family(const DLSetting& st, const DLFamily& fam, const SuiteOptions& opt) {
  FamilyOutcome out;
  Report& rep = out.report;
  rep.check = fam.name;
  rep.seed = opt.seed;
  rep.budget = opt.budget;
  const CoeffRing& K = *st.co.ring;

  std::vector<uint64_t> prefix{0};
  for (const auto& t : fam.tuples) {
    uint64_t m = 1;
    for (const auto* c : t.carriers) m *= c->size();
    prefix.push_back(prefix.back() + m);
  }
  const uint64_t total = prefix.back();
  rep.counts["space"] = total;
  for (const auto& t : fam.tuples) {
    ++rep.counts["tuples:" + t.span.category];
    if (t.embeddings.empty()) ++rep.counts["tuples:no-oracle"];
  }
  std::vector<uint64_t> ids;
  if (opt.budget == 0 || total <= opt.budget) {
    ids.resize(total);
    std::iota(ids.begin(), ids.end(), 0);
  } else {
    rep.mode = "sampled";
    std::mt19937_64 rng(opt.seed ^ stable_hash(st.name + "/" + fam.name));
    ids.resize(opt.budget);
    for (auto& id : ids) id = rng() % total;
  }
  auto decode = [&](uint64_t id, std::vector<uint8_t>& params) -> size_t {
    size_t t = size_t(std::upper_bound(prefix.begin(), prefix.end(), id) - prefix.begin()) - 1;
    uint64_t rest = id - prefix[t];
    const auto& car = fam.tuples[t].carriers;
    params.resize(car.size());
    for (size_t s = car.size(); s-- > 0;) {
      params[s] = (*car[s])[rest % car[s]->size()];
      rest /= car[s]->size();
    }
    return t;
  };
  // evaluates one instance in every selected oracle; returns the first disagreement
  struct Outcome {
    bool pass = true;
    std::string lhs, rhs, oracle, error;
  };
  auto run = [&](size_t t, const std::vector<uint8_t>& params, bool detail) {
    Outcome o;
    const DLTuple& tu = fam.tuples[t];
    if (tu.embeddings.empty()) {
      o.pass = false;
      o.error = "no oracle embeds span " + tu.span.type;
      return o;
    }
    for (const auto& e : tu.embeddings) {
      try {
        DLEval ev{st, *e};
        auto [l, r] = fam.eval(ev, tu.roots, params);
        if (l != r) {
          o.pass = false;
          if (detail) {
            o.lhs = e->target->show(l);
            o.rhs = e->target->show(r);
            o.oracle = e->target->name;
          }
          return o;
        }
      } catch (const std::exception& ex) {
        o.pass = false;
        o.error = ex.what();
        o.oracle = e->target->name;
        return o;
      }
    }
    return o;
  };

  std::vector<char> pass(ids.size(), 1);
  std::vector<uint64_t> hashes(ids.size(), 0);
  parallel_for(ids.size(), opt.workers, [&](size_t m) {
    std::vector<uint8_t> params;
    size_t t = decode(ids[m], params);
    pass[m] = run(t, params, false).pass;
    std::string buf = st.name + "|" + fam.name + "|";
    for (int r : fam.tuples[t].roots) buf += std::to_string(r) + ",";
    buf += "|";
    buf.append(params.begin(), params.end());
    hashes[m] = stable_hash(buf);
  });

  uint64_t digest = 1469598103934665603ull;
  for (size_t m = 0; m < ids.size(); ++m) {
    digest = (digest ^ hashes[m]) * 1099511628211ull;
    digest = (digest ^ uint64_t(pass[m])) * 1099511628211ull;
    std::vector<uint8_t> params;
    size_t t = decode(ids[m], params);
    const DLTuple& tu = fam.tuples[t];
    ++rep.counts["category:" + tu.span.category];
    if (!tu.embeddings.empty()) ++rep.counts["oracle:" + tu.embeddings[0]->target->type];
    if (pass[m] && !opt.all_records) {
      ++rep.instances;
      continue;
    }
    nlohmann::json rec;
    rec["family"] = fam.name;
    std::vector<std::string> roots;
    for (int r : tu.roots) roots.push_back(st.rs.serialize(r));
    rec["roots"] = roots;
    rec["subsystemType"] = tu.span.type;
    rec["category"] = tu.span.category;
    std::vector<std::string> oracles;
    for (const auto& e : tu.embeddings) oracles.push_back(e->target->name);
    rec["oracle"] = oracles;
    std::vector<std::string> ps;
    for (uint8_t x : params) ps.push_back(K.label(x));
    rec["params"] = ps;
    rec["pass"] = bool(pass[m]);
    char hx[17];
    snprintf(hx, sizeof hx, "%016llx", static_cast<unsigned long long>(hashes[m]));
    rec["hash"] = hx;
    if (!pass[m]) {
      Outcome o = run(t, params, true);
      if (!o.lhs.empty()) {
        rec["lhs"] = o.lhs;
        rec["rhs"] = o.rhs;
      }
      if (!o.oracle.empty()) rec["failedIn"] = o.oracle;
      if (!o.error.empty()) rec["error"] = o.error;
    }
    out.records.push_back(rec);
    rep.expect(pass[m], fam.name, [&] { return rec.dump(); });
  }
  out.digest = digest;
  return out;
}

std::vector<FamilyOutcome> verify_dl_bundle(const DLSetting& st, const DLBundle& b, const SuiteOptions& opt) {
  std::vector<FamilyOutcome> out;
  for (const auto& fam : b.families) {
    if (!opt.only.empty() && !opt.only.count(fam.name)) continue;
    out.push_back(verify_dl_family(st, fam, opt));
  }
  return out;
}

std::vector<FamilyOutcome> verify_dl(const DLSetting& st, const SuiteOptions& opt) {
  return verify_dl_bundle(st, dl_relations(st), opt);
}

std::vector<FamilyOutcome> verify_relative_dl(const DLSetting& st, const SuiteOptions& opt) {
  return verify_dl_bundle(st, relative_dl_relations(st), opt);
}

}  // namespace ofa
