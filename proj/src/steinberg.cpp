#include "ofa/steinberg.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ofa {

// ---- contexts ---------------------------------------------------------------

StContext context_of(const OddFormRing& ofr) {
  StContext cx;
  cx.name = ofr.name;
  auto p = std::make_shared<const OddFormRing>(ofr);
  cx.amb = cx.src = cx.base = p;
  cx.delta_r = [](const Mat& a) { return a; };
  cx.delta_d = [](const Heis& u) { return u; };
  return cx;
}

StContext context_of(const CrossedModule& cm) {
  StContext cx;
  cx.name = cm.name;
  cx.amb = std::make_shared<const OddFormRing>(cm.T);
  cx.src = std::make_shared<const OddFormRing>(cm.S);
  cx.base = std::make_shared<const OddFormRing>(cm.Rsec);
  auto keep = std::make_shared<const CrossedModule>(cm);
  cx.delta_r = [keep](const Mat& a) { return keep->delta(a); };
  cx.delta_d = [keep](const Heis& u) { return keep->delta(u); };
  return cx;
}

// ---- carriers ---------------------------------------------------------------

static bool supported_on(const OddFormRing& o, const Mat& a, const std::vector<int>& rows,
                         const std::vector<int>& cols) {
  for (int r = 0; r < o.dim; ++r)
    for (int c = 0; c < o.dim; ++c) {
      if (!a.at(r, c)) continue;
      bool ok = std::find(rows.begin(), rows.end(), r) != rows.end() &&
                std::find(cols.begin(), cols.end(), c) != cols.end();
      if (!ok) return false;
    }
  return true;
}

static std::vector<int> rows_of(const OddFormRing& o, const Labels& L) {
  std::vector<int> out;
  for (int l : L) out.push_back(o.row(l));
  return out;
}

bool in_S(const OddFormRing& layer, const Labels& I, const Labels& J, const Mat& a) {
  return layer.in_R(a) && supported_on(layer, a, rows_of(layer, I), rows_of(layer, J));
}

bool in_theta(const OddFormRing& layer, const Labels& J, const std::vector<int>& family,
              const Heis& u) {
  if (!layer.in_delta(u)) return false;
  std::vector<int> free_rows;
  for (int r = 0; r < layer.dim; ++r)
    if (std::find(family.begin(), family.end(), std::abs(layer.label[r])) == family.end())
      free_rows.push_back(r);
  auto cols = rows_of(layer, J);
  return supported_on(layer, u.pi, free_rows, cols) &&
         supported_on(layer, u.rho, rows_of(layer, negate(J)), cols);
}

static std::vector<Heis> as_heis(const std::vector<Mat>& v) {
  std::vector<Heis> out;
  out.reserve(v.size());
  for (const Mat& m : v) out.push_back(Heis{m, Mat{}});
  return out;
}

// ---- generators -------------------------------------------------------------

Generator gen_x(int i, int j, const Mat& a, bool base_level) {
  Generator g;
  g.kind = GenKind::X;
  g.idx = {i, j};
  g.first = Heis{a, Mat{}};
  g.base_level = base_level;
  return g;
}

Generator gen_xj(int j, const Heis& u, bool base_level) {
  Generator g;
  g.kind = GenKind::Xj;
  g.idx = {j};
  g.first = u;
  g.base_level = base_level;
  return g;
}

namespace {

// Unchecked evaluators in the ambient ring.
struct Eval {
  const OddFormRing& T;
  Heis X(const Labels& I, const Labels& J, const Mat& a) const { return T.T_ij(I, J, a); }
  Heis Xu(const Labels& J, const Heis& u) const { return T.T_j(J, u); }
  Heis Zr(const Labels& I, const Labels& J, const Mat& a, const Mat& p) const {
    return T.uconj(T.T_ij(J, I, p), T.T_ij(I, J, a));
  }
  Heis Zu(const Labels& J, const Heis& u, const Heis& s) const {
    return T.uconj(T.T_j(negate(J), s), T.T_j(J, u));
  }
};

struct ZShape {
  Labels I, J;     // ring kinds: first in S_IJ, second in R_JI
  bool ring = true;
  std::vector<int> family;  // delta kinds: Theta^0 family
};

ZShape z_shape(const OddFormRing& o, GenKind kind, const std::vector<int>& idx) {
  auto need = [&](size_t n) {
    if (idx.size() != n) throw std::invalid_argument("wrong index count for generator");
  };
  ZShape s;
  switch (kind) {
    case GenKind::X:
    case GenKind::Zij:
      need(2);
      s.I = {idx[0]};
      s.J = {idx[1]};
      break;
    case GenKind::Xj:
    case GenKind::Zj:
      need(1);
      s.ring = false;
      s.J = {idx[0]};
      s.family = full_family(o);
      break;
    case GenKind::ZsumRow:
      need(3);
      s.I = {idx[0], idx[1]};
      s.J = {idx[2]};
      break;
    case GenKind::ZsumCol:
      need(3);
      s.I = {idx[0]};
      s.J = {idx[1], idx[2]};
      break;
    case GenKind::Zsum:
      need(2);
      s.ring = false;
      s.J = {idx[0], idx[1]};
      s.family = full_family(o);
      break;
    case GenKind::Zminus:
      need(2);
      s.ring = false;
      s.J = {idx[1]};
      s.family = family_without(o, idx[0]);
      break;
  }
  std::set<int> seen;
  for (int l : s.I) seen.insert(std::abs(l));
  for (int l : s.J) {
    if (s.ring && seen.count(std::abs(l))) throw std::invalid_argument("generator indices must satisfy i != +-j");
    seen.insert(std::abs(l));
  }
  if (!s.ring && s.J.size() == 2 && std::abs(s.J[0]) == std::abs(s.J[1]))
    throw std::invalid_argument("summed indices must satisfy i != +-j");
  return s;
}

}  // namespace

Heis z_generator(const StContext& cx, GenKind kind, const std::vector<int>& idx,
                 const Heis& first, const Heis& second) {
  const OddFormRing& T = *cx.amb;
  ZShape s = z_shape(T, kind, idx);
  Eval ev{T};
  if (s.ring) {
    if (!in_S(*cx.src, s.I, s.J, first.pi) || !first.rho.zero())
      throw std::invalid_argument("first parameter outside its S carrier");
    if (!in_S(*cx.base, s.J, s.I, second.pi) || !second.rho.zero())
      throw std::invalid_argument("second parameter outside its R carrier");
    return ev.Zr(s.I, s.J, first.pi, second.pi);
  }
  if (!in_theta(*cx.src, s.J, s.family, first))
    throw std::invalid_argument("first parameter outside its Theta carrier");
  if (!in_theta(*cx.base, negate(s.J), s.family, second))
    throw std::invalid_argument("second parameter outside its Delta carrier");
  return ev.Zu(s.J, first, second);
}

Heis stmap(const StContext& cx, const Word& w) {
  const OddFormRing& T = *cx.amb;
  Heis acc;
  for (const Generator& g : w) {
    Heis img;
    if (g.kind == GenKind::X || g.kind == GenKind::Xj) {
      const OddFormRing& layer = g.base_level ? *cx.base : *cx.src;
      ZShape s = z_shape(T, g.kind, g.idx);
      if (s.ring) {
        if (!in_S(layer, s.I, s.J, g.first.pi) || !g.first.rho.zero())
          throw std::invalid_argument("carrier mismatch for X_ij");
        img = T.T_ij(s.I, s.J, g.first.pi);
      } else {
        if (!in_theta(layer, s.J, s.family, g.first))
          throw std::invalid_argument("carrier mismatch for X_j");
        img = T.T_j(s.J, g.first);
      }
    } else {
      img = z_generator(cx, g.kind, g.idx, g.first, g.second);
    }
    acc = T.umul(acc, img);
  }
  return acc;
}

std::string show(const OddFormRing& o, const Generator& g) {
  static const char* names[] = {"X", "Xj", "Z", "Zj", "Zsum_row", "Zsum_col", "Zsum", "Zminus"};
  std::ostringstream os;
  os << names[int(g.kind)] << "(";
  for (size_t t = 0; t < g.idx.size(); ++t) os << (t ? "," : "") << g.idx[t];
  os << "; " << o.show(g.first);
  if (g.kind != GenKind::X && g.kind != GenKind::Xj) os << "; " << o.show(g.second);
  os << ")";
  return os.str();
}

// ---- roots ------------------------------------------------------------------

RootSlot root_slot(const Root& r) {
  std::vector<int> nz;
  for (size_t k = 0; k < r.c.size(); ++k)
    if (r.c[k]) nz.push_back(int(k));
  RootSlot s;
  if (nz.size() == 1) {
    int k = nz[0];
    int v = r.c[k];
    s.ultra = true;
    s.longroot = std::abs(v) == 4;
    s.j = (v > 0 ? 1 : -1) * (k + 1);
    return s;
  }
  if (nz.size() != 2 || std::abs(r.c[nz[0]]) != 2 || std::abs(r.c[nz[1]]) != 2)
    throw std::invalid_argument("not a root of BC type");
  int a = (r.c[nz[0]] > 0 ? 1 : -1) * (nz[0] + 1);
  int b = (r.c[nz[1]] > 0 ? 1 : -1) * (nz[1] + 1);
  // root = e_a + e_b = e_j - e_i; choose the form with i + j > 0
  if (-b + a > 0) {
    s.j = a;
    s.i = -b;
  } else {
    s.j = b;
    s.i = -a;
  }
  return s;
}

std::vector<Heis> root_carrier(const StContext& cx, const Root& r) {
  RootSlot s = root_slot(r);
  const OddFormRing& o = *cx.src;
  if (!s.ultra) return as_heis(carrier_S(o, {s.i}, {s.j}));
  if (!s.longroot) return carrier_theta0(o, {s.j}, full_family(o));
  std::vector<Heis> out;
  for (const Mat& a : carrier_S(o, {-s.j}, {s.j})) out.push_back(o.phi(a));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Generator in index form: ultra -> X_j(u), else X_ij(a).
struct IGen {
  bool ultra;
  int i, j;
  Heis p;
};

std::vector<int> root_vec(int ell, const IGen& g) {
  std::vector<int> v(ell, 0);
  auto addl = [&](int lab, int s) { v[std::abs(lab) - 1] += (lab > 0 ? s : -s); };
  addl(g.j, 1);
  if (!g.ultra) addl(g.i, -1);
  return v;
}

Word expand(const OddFormRing& o, const IGen& x, const IGen& y) {
  auto X = [&](int i, int j, const Mat& a) { return gen_x(i, j, a); };
  auto XJ = [&](int j, const Heis& u) { return gen_xj(j, u); };
  auto sym = [&](const IGen& g) { return IGen{false, -g.j, -g.i, Heis{o.neg(o.bar(g.p.pi)), Mat{}}}; };
  auto antiparallel = [&] {
    auto a = root_vec(o.ell, x), b = root_vec(o.ell, y);
    bool anti = true, nonzero = false;
    int ratio_num = 0, ratio_den = 0;
    for (size_t k = 0; k < a.size(); ++k) {
      if (a[k] || b[k]) nonzero = true;
      if ((a[k] == 0) != (b[k] == 0)) anti = false;
    }
    if (!anti || !nonzero) return false;
    // same support: check b = -c a with c > 0
    for (size_t k = 0; k < a.size(); ++k) {
      if (!a[k]) continue;
      if (!ratio_den) {
        ratio_num = b[k];
        ratio_den = a[k];
      } else if (b[k] * ratio_den != ratio_num * a[k]) {
        return false;
      }
    }
    return ratio_num * ratio_den < 0;
  };
  if (antiparallel()) throw std::invalid_argument("antiparallel roots have no commutator formula");

  if (!x.ultra && !y.ultra) {
    for (int sx = 0; sx < 2; ++sx)
      for (int sy = 0; sy < 2; ++sy) {
        IGen a = sx ? sym(x) : x, b = sy ? sym(y) : y;
        if (a.j == b.i) {
          Mat ab = o.mul(a.p.pi, b.p.pi);
          if (a.i == -b.j) return {XJ(b.j, o.phi(ab))};
          return {X(a.i, b.j, ab)};
        }
        if (b.j == a.i) {
          Mat ba = o.mul(b.p.pi, a.p.pi);
          if (b.i == -a.j) return {XJ(a.j, o.phi(o.neg(ba)))};
          return {X(b.i, a.j, o.neg(ba))};
        }
      }
    auto s = root_vec(o.ell, x), t = root_vec(o.ell, y);
    for (size_t k = 0; k < s.size(); ++k) s[k] += t[k];
    int n2 = 0;
    for (int c : s) n2 += c * c;
    bool is_root = n2 == 1 || n2 == 2 || (n2 == 4 && std::count(s.begin(), s.end(), 0) == int(s.size()) - 1);
    if (is_root) throw std::logic_error("commutator case analysis gap");
    return {};
  }
  if (!x.ultra && y.ultra) {
    for (int sx = 0; sx < 2; ++sx) {
      IGen a = sx ? sym(x) : x;
      if (a.i == y.j) {
        // [X_ij(a), X_i(u)] = X_-i,j(-rho(u) a) X_j(-(-(u.(-a))))
        const Heis& u = y.p;
        Heis w = o.hneg(o.act(u, o.neg(a.p.pi)));
        return {X(-a.i, a.j, o.neg(o.mul(u.rho, a.p.pi))), XJ(a.j, o.hneg(w))};
      }
    }
    return {};
  }
  if (x.ultra && !y.ultra) {
    for (int sy = 0; sy < 2; ++sy) {
      IGen b = sy ? sym(y) : y;
      if (b.i == x.j) {
        const Heis& u = x.p;
        return {X(-b.i, b.j, o.mul(u.rho, b.p.pi)), XJ(b.j, o.hneg(o.act(u, o.neg(b.p.pi))))};
      }
    }
    return {};
  }
  // both ultrashort
  Mat prod = o.neg(o.mul(o.bar(x.p.pi), y.p.pi));
  if (x.j == y.j) return {XJ(x.j, o.phi(prod))};
  return {X(-x.j, y.j, prod)};
}

}  // namespace

Word commutator_expansion(const StContext& cx, const Root& alpha, const Root& beta,
                          const Heis& mu, const Heis& nu) {
  RootSlot a = root_slot(alpha), b = root_slot(beta);
  IGen x{a.ultra, a.i, a.j, mu}, y{b.ultra, b.i, b.j, nu};
  return expand(*cx.amb, x, y);
}

// ---- families -----------------------------------------------------------------

uint64_t FamilySpace::count() const {
  uint64_t total = 0;
  for (const auto& c : carriers) {
    uint64_t n = 1;
    for (const auto* v : c) n *= v->size();
    total += n;
  }
  return total;
}

namespace {

struct Builder {
  const StContext& cx;
  std::shared_ptr<std::map<std::string, std::vector<Heis>>> store =
      std::make_shared<std::map<std::string, std::vector<Heis>>>();

  static std::string key(const char* tag, bool base, const Labels& a, const Labels& b) {
    std::string k = std::string(tag) + (base ? "R" : "S");
    for (int x : a) k += "," + std::to_string(x);
    k += "|";
    for (int x : b) k += "," + std::to_string(x);
    return k;
  }
  const OddFormRing& layer(bool base) const { return base ? *cx.base : *cx.src; }
  const std::vector<Heis>* S(bool base, const Labels& I, const Labels& J) {
    auto k = key("S", base, I, J);
    auto it = store->find(k);
    if (it == store->end()) it = store->emplace(k, as_heis(carrier_S(layer(base), I, J))).first;
    return &it->second;
  }
  const std::vector<Heis>* Th(bool base, const Labels& J, const std::vector<int>& fam) {
    auto k = key("T", base, J, fam);
    auto it = store->find(k);
    if (it == store->end()) it = store->emplace(k, carrier_theta0(layer(base), J, fam)).first;
    return &it->second;
  }
  std::vector<int> full() const { return full_family(*cx.amb); }
  std::vector<int> without(int m) const { return family_without(*cx.amb, m); }
};

std::vector<int> signed_labels(int ell) {
  std::vector<int> out;
  for (int i = -ell; i <= ell; ++i)
    if (i) out.push_back(i);
  return out;
}

bool distinct_abs(std::initializer_list<int> xs) {
  std::set<int> s;
  for (int x : xs)
    if (!s.insert(std::abs(x)).second) return false;
  return true;
}

using Params = std::vector<const Heis*>;

struct FamilyMaker {
  Builder& b;
  FamilySpace fam;
  FamilyMaker(Builder& bld, std::string name, std::vector<bool> is_delta) : b(bld) {
    fam.name = std::move(name);
    fam.param_is_delta = std::move(is_delta);
  }
  void add(std::vector<int> idx, std::vector<const std::vector<Heis>*> car) {
    fam.indices.push_back(std::move(idx));
    fam.carriers.push_back(std::move(car));
  }
};

}  // namespace

FamilyBundle unrel_families(const StContext& cx) {
  Builder b{cx};
  const OddFormRing& T = *cx.amb;
  const int ell = T.ell;
  auto L = signed_labels(ell);
  auto full = b.full();
  Eval ev{T};
  std::vector<FamilySpace> out;
  const unsigned mut = cx.mutation;

  {
    FamilyMaker m(b, "unrel.sym", {false});
    for (int i : L)
      for (int j : L)
        if (distinct_abs({i, j})) m.add({i, j}, {b.S(false, {i}, {j})});
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      const Mat& a = p[0]->pi;
      return std::make_pair(ev.X({x[0]}, {x[1]}, a), ev.X({-x[1]}, {-x[0]}, T.neg(T.bar(a))));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "unrel.add_ij", {false, false});
    for (int i : L)
      for (int j : L)
        if (distinct_abs({i, j})) m.add({i, j}, {b.S(false, {i}, {j}), b.S(false, {i}, {j})});
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      Labels I{x[0]}, J{x[1]};
      return std::make_pair(T.umul(ev.X(I, J, p[0]->pi), ev.X(I, J, p[1]->pi)),
                            ev.X(I, J, T.add(p[0]->pi, p[1]->pi)));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "unrel.add_j", {true, true});
    for (int j : L) m.add({j}, {b.Th(false, {j}, full), b.Th(false, {j}, full)});
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      Labels J{x[0]};
      return std::make_pair(T.umul(ev.Xu(J, *p[0]), ev.Xu(J, *p[1])), ev.Xu(J, T.plus(*p[0], *p[1])));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "unrel.comm_ij_kl", {false, false});
    for (int i : L)
      for (int j : L)
        for (int k : L)
          for (int l : L) {
            if (!distinct_abs({i, j}) || !distinct_abs({k, l})) continue;
            if (j == k || k == -i || i == l || l == -j) continue;
            m.add({i, j, k, l}, {b.S(false, {i}, {j}), b.S(false, {k}, {l})});
          }
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      return std::make_pair(T.ucomm(ev.X({x[0]}, {x[1]}, p[0]->pi), ev.X({x[2]}, {x[3]}, p[1]->pi)), Heis{});
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "unrel.comm_ij_l", {false, true});
    for (int i : L)
      for (int j : L)
        for (int l : L) {
          if (!distinct_abs({i, j}) || l == i || l == -j) continue;
          m.add({i, j, l}, {b.S(false, {i}, {j}), b.Th(false, {l}, full)});
        }
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      return std::make_pair(T.ucomm(ev.X({x[0]}, {x[1]}, p[0]->pi), ev.Xu({x[2]}, *p[1])), Heis{});
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "unrel.long", {false, false});
    for (int i : L)
      for (int j : L)
        if (distinct_abs({i, j})) m.add({i, j}, {b.S(false, {-i}, {j}), b.S(false, {j}, {i})});
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      int i = x[0], j = x[1];
      return std::make_pair(T.ucomm(ev.X({-i}, {j}, p[0]->pi), ev.X({j}, {i}, p[1]->pi)),
                            ev.Xu({i}, T.phi(T.mul(p[0]->pi, p[1]->pi))));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "unrel.comm_i_i", {true, true});
    for (int i : L) m.add({i}, {b.Th(false, {i}, full), b.Th(false, {i}, full)});
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      Labels I{x[0]};
      Mat c = T.neg(T.mul(T.bar(p[0]->pi), p[1]->pi));
      return std::make_pair(T.ucomm(ev.Xu(I, *p[0]), ev.Xu(I, *p[1])), ev.Xu(I, T.phi(c)));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "unrel.comm_i_j", {true, true});
    for (int i : L)
      for (int j : L)
        if (distinct_abs({i, j})) m.add({i, j}, {b.Th(false, {i}, full), b.Th(false, {j}, full)});
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      Mat c = T.neg(T.mul(T.bar(p[0]->pi), p[1]->pi));
      return std::make_pair(T.ucomm(ev.Xu({x[0]}, *p[0]), ev.Xu({x[1]}, *p[1])), ev.X({-x[0]}, {x[1]}, c));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "unrel.chain", {false, false});
    for (int i : L)
      for (int j : L)
        for (int k : L)
          if (distinct_abs({i, j, k})) m.add({i, j, k}, {b.S(false, {i}, {j}), b.S(false, {j}, {k})});
    m.fam.eval = [ev, &T, mut](const std::vector<int>& x, const Params& p) {
      Mat ab = T.mul(p[0]->pi, p[1]->pi);
      if (mut & kMutChainSign) ab = T.neg(ab);
      return std::make_pair(T.ucomm(ev.X({x[0]}, {x[1]}, p[0]->pi), ev.X({x[1]}, {x[2]}, p[1]->pi)),
                            ev.X({x[0]}, {x[2]}, ab));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "unrel.comm_i_ij", {true, false});
    for (int i : L)
      for (int j : L)
        if (distinct_abs({i, j})) m.add({i, j}, {b.Th(false, {i}, full), b.S(false, {i}, {j})});
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      int i = x[0], j = x[1];
      const Heis& u = *p[0];
      const Mat& a = p[1]->pi;
      Heis rhs = T.umul(ev.X({-i}, {j}, T.mul(u.rho, a)), ev.Xu({j}, T.hneg(T.act(u, T.neg(a)))));
      return std::make_pair(T.ucomm(ev.Xu({i}, u), ev.X({i}, {j}, a)), rhs);
    };
    out.push_back(std::move(m.fam));
  }
  return {b.store, std::move(out)};
}

FamilyBundle presentation_families(const StContext& cx) {
  Builder b{cx};
  const OddFormRing& T = *cx.amb;
  const int ell = T.ell;
  auto L = signed_labels(ell);
  auto full = b.full();
  Eval ev{T};
  auto dr = cx.delta_r;
  auto dd = cx.delta_d;
  const unsigned mut = cx.mutation;
  std::vector<FamilySpace> out;
  const bool S = false, R = true;

  auto pairs = [&](auto&& fn) {
    for (int i : L)
      for (int j : L)
        if (distinct_abs({i, j})) fn(i, j);
  };
  auto triples = [&](auto&& fn) {
    for (int i : L)
      for (int j : L)
        for (int k : L)
          if (distinct_abs({i, j, k})) fn(i, j, k);
  };

  // (Sym)
  {
    FamilyMaker m(b, "pres.sym_ij", {false, false});
    pairs([&](int i, int j) { m.add({i, j}, {b.S(S, {i}, {j}), b.S(R, {j}, {i})}); });
    m.fam.eval = [ev, &T, mut](const std::vector<int>& x, const Params& p) {
      Mat a2 = T.bar(p[0]->pi);
      if (!(mut & kMutSymSign)) a2 = T.neg(a2);
      return std::make_pair(ev.Zr({x[0]}, {x[1]}, p[0]->pi, p[1]->pi),
                            ev.Zr({-x[1]}, {-x[0]}, a2, T.neg(T.bar(p[1]->pi))));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.sym_sum_row", {false, false});
    triples([&](int i, int j, int k) { m.add({i, j, k}, {b.S(S, {i, j}, {k}), b.S(R, {k}, {i, j})}); });
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      return std::make_pair(ev.Zr({x[0], x[1]}, {x[2]}, p[0]->pi, p[1]->pi),
                            ev.Zr({-x[2]}, {-x[0], -x[1]}, T.neg(T.bar(p[0]->pi)), T.neg(T.bar(p[1]->pi))));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.sym_sum_row_swap", {false, false});
    triples([&](int i, int j, int k) { m.add({i, j, k}, {b.S(S, {i, j}, {k}), b.S(R, {k}, {i, j})}); });
    m.fam.eval = [ev](const std::vector<int>& x, const Params& p) {
      return std::make_pair(ev.Zr({x[0], x[1]}, {x[2]}, p[0]->pi, p[1]->pi),
                            ev.Zr({x[1], x[0]}, {x[2]}, p[0]->pi, p[1]->pi));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.sym_sum", {true, true});
    pairs([&](int i, int j) { m.add({i, j}, {b.Th(S, {i, j}, full), b.Th(R, {-i, -j}, full)}); });
    m.fam.eval = [ev](const std::vector<int>& x, const Params& p) {
      return std::make_pair(ev.Zu({x[0], x[1]}, *p[0], *p[1]), ev.Zu({x[1], x[0]}, *p[0], *p[1]));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.sym_minus", {true, true});
    pairs([&](int i, int j) {
      auto f = b.without(i);
      m.add({i, j}, {b.Th(S, {j}, f), b.Th(R, {-j}, f)});
    });
    // the carriers of the -i and the +i versions coincide, so both sides use one formula
    m.fam.eval = [ev](const std::vector<int>& x, const Params& p) {
      return std::make_pair(ev.Zu({x[1]}, *p[0], *p[1]), ev.Zu({x[1]}, *p[0], *p[1]));
    };
    out.push_back(std::move(m.fam));
  }

  // (Add)
  auto add_ring = [&](const char* name, auto&& shapes) {
    FamilyMaker m(b, name, {false, false, false});
    shapes([&](std::vector<int> idx, Labels I, Labels J) {
      m.add(idx, {b.S(S, I, J), b.S(S, I, J), b.S(R, J, I)});
    });
    return m;
  };
  {
    auto m = add_ring("pres.add_ij", [&](auto&& put) { pairs([&](int i, int j) { put({i, j}, {i}, {j}); }); });
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      Labels I{x[0]}, J{x[1]};
      return std::make_pair(T.umul(ev.Zr(I, J, p[0]->pi, p[2]->pi), ev.Zr(I, J, p[1]->pi, p[2]->pi)),
                            ev.Zr(I, J, T.add(p[0]->pi, p[1]->pi), p[2]->pi));
    };
    out.push_back(std::move(m.fam));
  }
  {
    auto m = add_ring("pres.add_sum_row",
                      [&](auto&& put) { triples([&](int i, int j, int k) { put({i, j, k}, {i, j}, {k}); }); });
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      Labels I{x[0], x[1]}, J{x[2]};
      return std::make_pair(T.umul(ev.Zr(I, J, p[0]->pi, p[2]->pi), ev.Zr(I, J, p[1]->pi, p[2]->pi)),
                            ev.Zr(I, J, T.add(p[0]->pi, p[1]->pi), p[2]->pi));
    };
    out.push_back(std::move(m.fam));
  }
  {
    auto m = add_ring("pres.add_sum_col",
                      [&](auto&& put) { triples([&](int i, int j, int k) { put({i, j, k}, {i}, {j, k}); }); });
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      Labels I{x[0]}, J{x[1], x[2]};
      return std::make_pair(T.umul(ev.Zr(I, J, p[0]->pi, p[2]->pi), ev.Zr(I, J, p[1]->pi, p[2]->pi)),
                            ev.Zr(I, J, T.add(p[0]->pi, p[1]->pi), p[2]->pi));
    };
    out.push_back(std::move(m.fam));
  }
  auto add_delta = [&](const char* name, auto&& shapes) {
    FamilyMaker m(b, name, {true, true, true});
    shapes([&](std::vector<int> idx, Labels J, std::vector<int> fam) {
      m.add(idx, {b.Th(S, J, fam), b.Th(S, J, fam), b.Th(R, negate(J), fam)});
    });
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      // the last index entries name J; the family only shapes the carriers
      Labels J = x.size() == 1 ? Labels{x[0]} : (x[0] == 0 ? Labels{x[1]} : Labels{x[0], x[1]});
      return std::make_pair(T.umul(ev.Zu(J, *p[0], *p[2]), ev.Zu(J, *p[1], *p[2])),
                            ev.Zu(J, T.plus(*p[0], *p[1]), *p[2]));
    };
    return m;
  };
  {
    auto m = add_delta("pres.add_j", [&](auto&& put) {
      for (int j : L) put({j}, {j}, full);
    });
    out.push_back(std::move(m.fam));
  }
  {
    auto m = add_delta("pres.add_sum", [&](auto&& put) { pairs([&](int i, int j) { put({i, j}, {i, j}, full); }); });
    out.push_back(std::move(m.fam));
  }
  {
    // index tuple {0, j, i}: the leading 0 tells the evaluator J = {j}
    auto m = add_delta("pres.add_minus",
                       [&](auto&& put) { pairs([&](int i, int j) { put({0, j, i}, {j}, b.without(i)); }); });
    out.push_back(std::move(m.fam));
  }

  // (Comm)
  {
    FamilyMaker m(b, "pres.comm1", {false, false, false, false});
    for (int i : L)
      for (int j : L)
        for (int k : L)
          for (int l : L)
            if (distinct_abs({i, j, k, l}))
              m.add({i, j, k, l}, {b.S(S, {i}, {j}), b.S(R, {j}, {i}), b.S(S, {k}, {l}), b.S(R, {l}, {k})});
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      return std::make_pair(T.ucomm(ev.Zr({x[0]}, {x[1]}, p[0]->pi, p[1]->pi),
                                    ev.Zr({x[2]}, {x[3]}, p[2]->pi, p[3]->pi)),
                            Heis{});
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.comm2", {false, false, true, true});
    triples([&](int i, int j, int l) {
      m.add({i, j, l}, {b.S(S, {i}, {j}), b.S(R, {j}, {i}), b.Th(S, {l}, full), b.Th(R, {-l}, full)});
    });
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      return std::make_pair(T.ucomm(ev.Zr({x[0]}, {x[1]}, p[0]->pi, p[1]->pi), ev.Zu({x[2]}, *p[2], *p[3])),
                            Heis{});
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.comm3", {false, false, false, false});
    triples([&](int i, int j, int k) {
      m.add({i, j, k}, {b.S(S, {i}, {j}), b.S(R, {j}, {i}), b.S(S, {i, j}, {k}), b.S(R, {k}, {i, j})});
    });
    m.fam.eval = [ev, &T, dd](const std::vector<int>& x, const Params& p) {
      Labels I{x[0], x[1]}, K{x[2]};
      Heis z = ev.Zr({x[0]}, {x[1]}, p[0]->pi, p[1]->pi);
      Heis dz = dd(z);
      return std::make_pair(T.uconj(z, ev.Zr(I, K, p[2]->pi, p[3]->pi)),
                            ev.Zr(I, K, T.conj_ring(z, p[2]->pi), T.conj_ring(dz, p[3]->pi)));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.comm4", {false, false, true, true});
    pairs([&](int i, int j) {
      m.add({i, j}, {b.S(S, {i}, {j}), b.S(R, {j}, {i}), b.Th(S, {i, j}, full), b.Th(R, {-i, -j}, full)});
    });
    m.fam.eval = [ev, &T, dd](const std::vector<int>& x, const Params& p) {
      Labels J{x[0], x[1]};
      Heis z = ev.Zr({x[0]}, {x[1]}, p[0]->pi, p[1]->pi);
      Heis dz = dd(z);
      return std::make_pair(T.uconj(z, ev.Zu(J, *p[2], *p[3])),
                            ev.Zu(J, T.conj_delta(z, *p[2]), T.conj_delta(dz, *p[3])));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.comm5", {true, true, true, true});
    pairs([&](int i, int j) {
      auto f = b.without(i);
      m.add({i, j}, {b.Th(S, {i}, full), b.Th(R, {-i}, full), b.Th(S, {j}, f), b.Th(R, {-j}, f)});
    });
    m.fam.eval = [ev, &T, dd](const std::vector<int>& x, const Params& p) {
      Labels J{x[1]};
      Heis z = ev.Zu({x[0]}, *p[0], *p[1]);
      Heis dz = dd(z);
      return std::make_pair(T.uconj(z, ev.Zu(J, *p[2], *p[3])),
                            ev.Zu(J, T.conj_delta(z, *p[2]), T.conj_delta(dz, *p[3])));
    };
    out.push_back(std::move(m.fam));
  }

  // (Simp)
  {
    FamilyMaker m(b, "pres.simp1", {false, false});
    triples([&](int i, int j, int k) { m.add({i, j, k}, {b.S(S, {i}, {k}), b.S(R, {k}, {i})}); });
    m.fam.eval = [ev](const std::vector<int>& x, const Params& p) {
      return std::make_pair(ev.Zr({x[0]}, {x[2]}, p[0]->pi, p[1]->pi),
                            ev.Zr({x[0], x[1]}, {x[2]}, p[0]->pi, p[1]->pi));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.simp2", {false, false});
    pairs([&](int i, int j) { m.add({i, j}, {b.S(S, {i}, {j}), b.S(R, {j}, {i})}); });
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      return std::make_pair(ev.Zr({x[0]}, {x[1]}, p[0]->pi, p[1]->pi),
                            ev.Zu({-x[0], x[1]}, T.phi(p[0]->pi), T.phi(p[1]->pi)));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.simp3", {true, true});
    pairs([&](int i, int j) {
      (void)i;
      m.add({i, j}, {b.Th(S, {j}, full), b.Th(R, {-j}, full)});
    });
    // Theta^0_j sits inside the -i carrier; Z^{-i}_j uses the same conjugation
    m.fam.eval = [ev, &T, f = b.cx.src](const std::vector<int>& x, const Params& p) {
      (void)T;
      Heis lhs = ev.Zu({x[1]}, *p[0], *p[1]);
      bool inside = in_theta(*f, {x[1]}, family_without(*f, x[0]), *p[0]);
      return std::make_pair(lhs, inside ? ev.Zu({x[1]}, *p[0], *p[1]) : Heis{});
    };
    out.push_back(std::move(m.fam));
  }

  // (HW)
  {
    FamilyMaker m(b, "pres.hw1", {false, false, false, false});
    triples([&](int i, int j, int k) {
      m.add({i, j, k}, {b.S(S, {k}, {i}), b.S(R, {i}, {j}), b.S(R, {i}, {k}), b.S(R, {j}, {k})});
    });
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      int i = x[0], j = x[1], k = x[2];
      const Mat &a = p[0]->pi, &pp = p[1]->pi, &q = p[2]->pi, &r = p[3]->pi;
      Heis tjk = ev.X({j}, {k}, r), tij = ev.X({i}, {j}, pp);
      Heis lhs = ev.Zr({j, k}, {i}, T.conj_ring(tjk, a), T.add(pp, q));
      Heis rhs = ev.Zr({k}, {i, j}, T.conj_ring(tij, a), T.conj_ring(tij, T.add(q, r)));
      return std::make_pair(lhs, rhs);
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.hw2", {true, false, true, false, true, false});
    pairs([&](int i, int j) {
      m.add({i, j}, {b.Th(S, {-j}, full), b.S(S, {i}, {-j}), b.Th(R, {i}, full), b.S(R, {-i}, {j}),
                     b.Th(R, {j}, full), b.S(R, {i}, {j})});
    });
    m.fam.eval = [ev, &T](const std::vector<int>& x, const Params& p) {
      int i = x[0], j = x[1];
      const Heis &u = *p[0], &s = *p[2], &t = *p[4];
      const Mat &a = p[1]->pi, &pp = p[3]->pi, &q = p[5]->pi;
      Heis tij = ev.X({i}, {j}, q);
      Heis ti = ev.Xu({i}, s);
      Heis lhs = ev.Zu({-j, -i}, T.conj_delta(tij, T.plus(u, T.phi(a))), T.plus(T.plus(s, T.phi(pp)), t));
      Heis first = T.conj_delta(ti, T.plus(u, T.act(T.q_of({i}), a)));
      Heis second = T.conj_delta(
          ti, T.plus(T.plus(T.act(T.q_of({-i}), pp), t), T.act(T.q_of({i}), q)));
      return std::make_pair(lhs, ev.Zu({-j}, first, second));
    };
    out.push_back(std::move(m.fam));
  }

  // (Delta)
  {
    FamilyMaker m(b, "pres.delta1", {false, false, false});
    pairs([&](int i, int j) { m.add({i, j}, {b.S(S, {i}, {j}), b.S(S, {j}, {i}), b.S(R, {j}, {i})}); });
    m.fam.eval = [ev, &T, dr](const std::vector<int>& x, const Params& p) {
      Labels I{x[0]}, J{x[1]};
      const Mat &a = p[0]->pi, &bb = p[1]->pi, &pp = p[2]->pi;
      return std::make_pair(ev.Zr(I, J, a, T.add(dr(bb), pp)), T.uconj(ev.X(J, I, bb), ev.Zr(I, J, a, pp)));
    };
    out.push_back(std::move(m.fam));
  }
  {
    FamilyMaker m(b, "pres.delta2", {true, true, true});
    for (int j : L) m.add({j}, {b.Th(S, {j}, full), b.Th(S, {-j}, full), b.Th(R, {-j}, full)});
    m.fam.eval = [ev, &T, dd](const std::vector<int>& x, const Params& p) {
      Labels J{x[0]};
      const Heis &u = *p[0], &v = *p[1], &s = *p[2];
      return std::make_pair(ev.Zu(J, u, T.plus(dd(v), s)), T.uconj(ev.Xu(negate(J), v), ev.Zu(J, u, s)));
    };
    out.push_back(std::move(m.fam));
  }
  return {b.store, std::move(out)};
}

// ---- verification -------------------------------------------------------------

namespace {

std::string idx_string(const std::vector<int>& idx) {
  std::string s;
  for (size_t t = 0; t < idx.size(); ++t) s += (t ? "," : "") + std::to_string(idx[t]);
  return s;
}

void hash_bytes(std::string& buf, const Mat& m, int dim) {
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) buf.push_back(char(m.at(r, c)));
}

}  // namespace

FamilyOutcome verify_family(const StContext& cx, const FamilySpace& fam, const SuiteOptions& opt) {
  const OddFormRing& T = *cx.amb;
  FamilyOutcome out;
  Report& rep = out.report;
  rep.check = fam.name;
  rep.seed = opt.seed;
  rep.budget = opt.budget;

  std::vector<uint64_t> prefix{0};
  for (const auto& c : fam.carriers) {
    uint64_t n = 1;
    for (const auto* v : c) n *= v->size();
    prefix.push_back(prefix.back() + n);
  }
  const uint64_t total = prefix.back();
  rep.counts["space"] = total;
  std::vector<uint64_t> ids;
  if (opt.budget == 0 || total <= opt.budget) {
    ids.resize(total);
    for (uint64_t t = 0; t < total; ++t) ids[t] = t;
  } else {
    rep.mode = "sampled";
    std::mt19937_64 rng(opt.seed ^ stable_hash(fam.name));
    ids.resize(opt.budget);
    for (auto& id : ids) id = rng() % total;
  }

  auto decode = [&](uint64_t id, std::vector<const Heis*>& params) -> size_t {
    size_t t = size_t(std::upper_bound(prefix.begin(), prefix.end(), id) - prefix.begin()) - 1;
    uint64_t rest = id - prefix[t];
    const auto& car = fam.carriers[t];
    params.resize(car.size());
    for (size_t s = car.size(); s-- > 0;) {
      params[s] = &(*car[s])[rest % car[s]->size()];
      rest /= car[s]->size();
    }
    return t;
  };

  std::vector<char> pass(ids.size(), 1);
  std::vector<uint64_t> hashes(ids.size(), 0);
  parallel_for(ids.size(), opt.workers, [&](size_t n) {
    std::vector<const Heis*> params;
    size_t t = decode(ids[n], params);
    auto [lhs, rhs] = fam.eval(fam.indices[t], params);
    pass[n] = lhs == rhs;
    std::string buf = fam.name + "|" + idx_string(fam.indices[t]) + "|";
    for (const Heis* h : params) {
      hash_bytes(buf, h->pi, T.dim);
      hash_bytes(buf, h->rho, T.dim);
    }
    hashes[n] = stable_hash(buf);
  });

  uint64_t digest = 1469598103934665603ull;
  for (size_t n = 0; n < ids.size(); ++n) {
    digest = (digest ^ hashes[n]) * 1099511628211ull;
    digest = (digest ^ uint64_t(pass[n])) * 1099511628211ull;
    if (pass[n] && !opt.all_records) {
      ++rep.instances;
      continue;
    }
    std::vector<const Heis*> params;
    size_t t = decode(ids[n], params);
    nlohmann::json rec;
    rec["family"] = fam.name;
    rec["indices"] = fam.indices[t];
    std::vector<std::string> ps;
    for (size_t s = 0; s < params.size(); ++s)
      ps.push_back(fam.param_is_delta[s] ? T.show(*params[s]) : T.show(params[s]->pi));
    rec["params"] = ps;
    rec["pass"] = bool(pass[n]);
    char hx[17];
    snprintf(hx, sizeof hx, "%016llx", static_cast<unsigned long long>(hashes[n]));
    rec["hash"] = hx;
    if (!pass[n]) {
      auto [lhs, rhs] = fam.eval(fam.indices[t], params);
      rec["lhs"] = T.show(lhs);
      rec["rhs"] = T.show(rhs);
    }
    out.records.push_back(rec);
    rep.expect(pass[n], fam.name, [&] { return rec.dump(); });
  }
  out.digest = digest;
  return out;
}

std::vector<FamilyOutcome> verify_families(const StContext& cx, const FamilyBundle& b,
                                           const SuiteOptions& opt) {
  std::vector<FamilyOutcome> out;
  for (const auto& fam : b.families) {
    if (!opt.only.empty() && !opt.only.count(fam.name)) continue;
    out.push_back(verify_family(cx, fam, opt));
  }
  return out;
}

// ---- summed hyperbolic families ---------------------------------------------

QuotientFamily quotient_family(const OddFormRing& o, const RootSystem& rs, RootSet psi) {
  if (rs.kind != RootKind::BC || rs.rank != o.ell)
    throw std::invalid_argument("quotient family needs the BC system of the ring's rank");
  QuotientFamily qf;
  qf.kernel = psi;
  QuotientSystem qs = quotient(rs, psi);
  for (const auto& cls : qs.reps) {
    qf.classes.push_back(cls);
    Mat em, ep;
    Heis qm, qp;
    for (int i : cls) {
      em = o.add(em, o.e_of({-i}));
      ep = o.add(ep, o.e_of({i}));
      qm = o.plus(qm, o.q_of({-i}));
      qp = o.plus(qp, o.q_of({i}));
    }
    qf.e_minus.push_back(em);
    qf.e_plus.push_back(ep);
    qf.q_minus.push_back(qm);
    qf.q_plus.push_back(qp);
  }
  return qf;
}

Report check_quotient_family(const OddFormRing& o, const QuotientFamily& qf) {
  Report rep;
  rep.check = "quotient-family:" + o.name;
  size_t n = qf.classes.size();
  for (size_t c = 0; c < n; ++c) {
    auto w = [&] { return "class " + std::to_string(c); };
    for (int side = 0; side < 2; ++side) {
      const Mat& e = side ? qf.e_plus[c] : qf.e_minus[c];
      const Heis& q = side ? qf.q_plus[c] : qf.q_minus[c];
      rep.expect(o.mul(e, e) == e, "summed e idempotent", w);
      rep.expect(q.pi == e && q.rho.zero(), "summed q has pi = e, rho = 0", w);
      rep.expect(o.act(q, e) == q, "summed q = q.e", w);
      rep.expect(o.in_delta(q), "summed q in Delta", w);
    }
    rep.expect(o.bar(qf.e_minus[c]) == qf.e_plus[c], "summed bar(e_-) = e_+", w);
    rep.expect(o.mul(qf.e_minus[c], qf.e_plus[c]).zero(), "summed e_- e_+ = 0", w);
    for (size_t d = 0; d < n; ++d) {
      if (d == c) continue;
      Mat a = o.add(qf.e_minus[c], qf.e_plus[c]), b = o.add(qf.e_minus[d], qf.e_plus[d]);
      rep.expect(o.mul(a, b).zero(), "summed pairs orthogonal", w);
    }
  }
  return rep;
}

Heis quotient_T(const OddFormRing& o, const QuotientFamily& qf, int row_class, int col_class,
                const Mat& a) {
  auto q = [&](int c) -> const Heis& {
    size_t k = size_t(std::abs(c) - 1);
    return c > 0 ? qf.q_plus.at(k) : qf.q_minus.at(k);
  };
  Heis x = o.act(q(row_class), a);
  Heis y = o.act(q(-col_class), o.bar(a));
  return o.minus(o.minus(x, y), o.phi(a));
}

// ---- injectivity --------------------------------------------------------------

Report product_injectivity(const StContext& cx, const RootSystem& rs, RootSet sigma, uint64_t cap) {
  Report rep;
  rep.check = "injectivity:" + cx.name;
  if (!is_special(rs, sigma)) throw std::invalid_argument("product map needs a special subset");
  const OddFormRing& T = *cx.amb;
  std::vector<int> roots;
  for (int r = 0; r < rs.size(); ++r) {
    if (!((sigma >> r) & 1)) continue;
    int h = rs.half(r);
    if (h >= 0 && ((sigma >> h) & 1)) continue;  // r in 2 Sigma
    roots.push_back(r);
  }
  std::vector<std::vector<Heis>> car;
  std::vector<RootSlot> slot;
  uint64_t total = 1;
  for (int r : roots) {
    car.push_back(root_carrier(cx, rs.roots[r]));
    slot.push_back(root_slot(rs.roots[r]));
    total *= car.back().size();
  }
  if (total > cap) throw std::invalid_argument("instance too large for the injectivity budget");
  rep.counts["tuples"] = total;
  rep.counts["roots"] = roots.size();
  auto image = [&](const std::vector<size_t>& order) {
    std::vector<Heis> img;
    img.reserve(total);
    std::vector<size_t> pos(roots.size(), 0);
    for (uint64_t t = 0; t < total; ++t) {
      Heis acc;
      for (size_t k : order) {
        if ((cx.mutation & kMutDropFactor) && k + 1 == roots.size()) continue;
        const Heis& prm = car[k][pos[k]];
        Heis g = slot[k].ultra ? T.T_j({slot[k].j}, prm) : T.T_ij({slot[k].i}, {slot[k].j}, prm.pi);
        acc = T.umul(acc, g);
      }
      img.push_back(acc);
      for (size_t k = 0; k < pos.size(); ++k) {
        if (++pos[k] < car[k].size()) break;
        pos[k] = 0;
      }
    }
    return img;
  };
  std::vector<size_t> fwd(roots.size()), rev;
  for (size_t k = 0; k < fwd.size(); ++k) fwd[k] = k;
  rev.assign(fwd.rbegin(), fwd.rend());
  auto a = image(fwd), b = image(rev);
  rep.instances = 2 * total;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t distinct = size_t(std::unique(a.begin(), a.end()) - a.begin());
  a.resize(distinct);
  std::string sig = rs.serialize(sigma);
  rep.expect(distinct == total, "product map injective", [&] {
    return "sigma={" + sig + "} tuples=" + std::to_string(total) + " images=" + std::to_string(distinct);
  });
  b.erase(std::unique(b.begin(), b.end()), b.end());
  rep.expect(a == b, "image independent of order", [&] { return "sigma={" + sig + "}"; });
  return rep;
}

}  // namespace ofa
