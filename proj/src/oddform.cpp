#include "ofa/oddform.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ofa {

bool Mat::zero() const {
  for (uint8_t x : v)
    if (x) return false;
  return true;
}

int OddFormRing::row(int lab) const {
  for (int r = 0; r < dim; ++r)
    if (label[r] == lab) return r;
  throw std::out_of_range("no row with label " + std::to_string(lab));
}

Mat OddFormRing::add(const Mat& a, const Mat& b) const {
  Mat c;
  for (int r = 0; r < dim; ++r)
    for (int s = 0; s < dim; ++s) c.at(r, s) = ring->add(a.at(r, s), b.at(r, s));
  return c;
}

Mat OddFormRing::neg(const Mat& a) const {
  Mat c;
  for (int r = 0; r < dim; ++r)
    for (int s = 0; s < dim; ++s) c.at(r, s) = ring->neg(a.at(r, s));
  return c;
}

Mat OddFormRing::mul(const Mat& a, const Mat& b) const {
  const CoeffRing& k = *ring;
  Mat c;
  for (int r = 0; r < dim; ++r)
    for (int m = 0; m < dim; ++m) {
      uint8_t x = a.at(r, m);
      if (!x) continue;
      x = k.mul(x, twist[m]);
      if (!x) continue;
      for (int s = 0; s < dim; ++s) {
        uint8_t y = b.at(m, s);
        if (y) c.at(r, s) = k.add(c.at(r, s), k.mul(x, y));
      }
    }
  return c;
}

Mat OddFormRing::bar(const Mat& a) const {
  Mat c;
  for (int r = 0; r < dim; ++r)
    for (int s = 0; s < dim; ++s) {
      uint8_t x = a.at(opp(s), opp(r));
      if (!x) continue;
      c.at(r, s) = sign[r] * sign[s] > 0 ? x : ring->neg(x);
    }
  return c;
}

Mat OddFormRing::unit(int rlab, int clab, uint8_t x) const {
  Mat c;
  c.at(row(rlab), row(clab)) = x;
  return c;
}

bool OddFormRing::in_R(const Mat& a) const {
  for (int r = 0; r < dim; ++r)
    for (int s = 0; s < dim; ++s)
      if (!ring->in(rmask[r * dim + s], a.at(r, s))) return false;
  return true;
}

Heis OddFormRing::plus(const Heis& u, const Heis& v) const {
  Mat cross = mul(bar(u.pi), v.pi);
  Heis w;
  w.pi = add(u.pi, v.pi);
  w.rho = (fault & kFaultPlusSign) ? add(add(u.rho, cross), v.rho)
                                   : add(sub(u.rho, cross), v.rho);
  return w;
}

Heis OddFormRing::hneg(const Heis& u) const {
  Heis w;
  w.pi = neg(u.pi);
  w.rho = sub(neg(u.rho), mul(bar(u.pi), u.pi));
  return w;
}

Heis OddFormRing::act(const Heis& u, const Mat& a) const {
  return {mul(u.pi, a), mul(mul(bar(a), u.rho), a)};
}

Heis OddFormRing::phi(const Mat& a) const { return {Mat{}, sub(a, bar(a))}; }

Heis OddFormRing::canon(const Mat& m) const {
  const CoeffRing& k = *ring;
  Heis out;
  out.pi = m;
  Mat& rho = out.rho;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      uint8_t x = m.at(a, b);
      if (!x) continue;
      if (qcoef[a]) {
        uint8_t q = k.mul(qcoef[a], k.mul(x, x));
        rho.at(opp(b), b) = k.sub(rho.at(opp(b), b), q);
      }
      int a2 = opp(a);
      uint8_t xs = sign[a] * sign[b] > 0 ? x : k.neg(x);
      xs = k.mul(xs, twist[a2]);
      if (!xs) continue;
      int p = a * dim + b;
      for (int d = 0; d < dim; ++d) {
        uint8_t y = m.at(a2, d);
        if (!y || a2 * dim + d <= p) continue;
        rho.at(opp(b), d) = k.sub(rho.at(opp(b), d), k.mul(xs, y));
      }
    }
  return out;
}

bool OddFormRing::in_delta(const Heis& u) const {
  if (!in_R(u.pi)) return false;
  Heis c = canon(u.pi);
  Mat z = sub(u.rho, c.rho);
  Mat zb = bar(z);
  for (int r = 0; r < dim; ++r)
    for (int s = 0; s < dim; ++s) {
      uint8_t x = z.at(r, s);
      if (s == opp(r)) {
        if (!ring->in(zmask[r * dim + s], x)) return false;
      } else if (!ring->in(rmask[r * dim + s], x)) {
        return false;
      }
      if (zb.at(r, s) != ring->neg(x)) return false;
    }
  return true;
}

bool OddFormRing::is_unitary(const Heis& g) const {
  if (g.pi != bar(g.rho)) return false;
  Mat pb = bar(g.pi);
  if (mul(g.pi, pb) != mul(pb, g.pi)) return false;
  return in_delta(g);
}

Heis OddFormRing::umul(const Heis& g, const Heis& h) const {
  return plus(plus(act(g, h.pi), h), g);
}

Heis OddFormRing::uinv(const Heis& g) const {
  return minus(hneg(act(g, bar(g.pi))), g);
}

Heis OddFormRing::ucomm(const Heis& g, const Heis& h) const {
  return umul(umul(g, h), umul(uinv(g), uinv(h)));
}

Heis OddFormRing::uconj(const Heis& g, const Heis& h) const {
  return umul(umul(g, h), uinv(g));
}

Mat OddFormRing::conj_ring(const Heis& g, const Mat& a) const {
  Mat mb = bar(g.pi);
  Mat ma = mul(g.pi, a);
  return add(add(a, ma), add(mul(a, mb), mul(ma, mb)));
}

Heis OddFormRing::conj_delta(const Heis& g, const Heis& u) const {
  Heis w = plus(act(g, u.pi), u);
  Mat mb = bar(g.pi);
  // w . (1 + mb) = w (+) phi(g.pi rho(w)) (+) w . mb
  return plus(plus(w, phi(mul(g.pi, w.rho))), act(w, mb));
}

Mat OddFormRing::e_of(const Labels& idx) const {
  Mat e;
  for (int i : idx) e.at(row(i), row(i)) = ring->add(e.at(row(i), row(i)), ring->one());
  return e;
}

Heis OddFormRing::q_of(const Labels& idx) const {
  Heis q;
  for (int i : idx) q = plus(q, Heis{unit(i, i, ring->one()), Mat{}});
  return q;
}

Labels negate(const Labels& idx) {
  Labels out;
  for (int i : idx) out.push_back(-i);
  return out;
}

Heis OddFormRing::T_ij(const Labels& I, const Labels& J, const Mat& a) const {
  Heis x = act(q_of(I), a);
  Heis y = act(q_of(negate(J)), bar(a));
  return minus(minus(x, y), phi(a));
}

Heis OddFormRing::T_j(const Labels& J, const Heis& u) const {
  Heis x = minus(u, phi(add(u.rho, u.pi)));
  return plus(x, act(q_of(negate(J)), sub(u.rho, bar(u.pi))));
}

bool OddFormRing::diag_membership(const Heis& g) const {
  Mat pb = bar(g.pi);
  for (int r = 0; r < dim; ++r) {
    int i = label[r];
    if (i == 0) continue;
    Mat e = e_of({i});
    Heis s = plus(plus(act(g, mul(e, pb)), act(q_of({i}), pb)), act(g, e));
    if (!s.zero()) return false;
  }
  return true;
}

std::string OddFormRing::show(const Mat& a) const {
  std::ostringstream os;
  os << "[";
  bool first = true;
  for (int r = 0; r < dim; ++r)
    for (int s = 0; s < dim; ++s)
      if (a.at(r, s)) {
        if (!first) os << " ";
        first = false;
        os << label[r] << "," << label[s] << ":" << ring->label(a.at(r, s));
      }
  os << "]";
  return os.str();
}

std::string OddFormRing::show(const Heis& u) const {
  return "(" + show(u.pi) + ", " + show(u.rho) + ")";
}

OddFormRing restrict_to(const OddFormRing& base, std::vector<Mask> rmask,
                        std::vector<Mask> zmask, const std::string& name) {
  OddFormRing out = base;
  out.rmask = std::move(rmask);
  out.zmask = std::move(zmask);
  out.name = name;
  return out;
}

// ---- carriers ---------------------------------------------------------------

namespace {

// Odometer over the product of value lists.
template <class Fn>
void for_each_tuple(const std::vector<std::vector<uint8_t>>& choices, Fn&& fn) {
  std::vector<size_t> pos(choices.size(), 0);
  for (const auto& c : choices)
    if (c.empty()) return;
  std::vector<uint8_t> vals(choices.size());
  for (;;) {
    for (size_t i = 0; i < choices.size(); ++i) vals[i] = choices[i][pos[i]];
    fn(vals);
    size_t i = 0;
    while (i < choices.size() && ++pos[i] == choices[i].size()) pos[i++] = 0;
    if (i == choices.size()) return;
  }
}

struct ZSlot {
  int r, c;      // representative position
  int pr, pc;    // partner position (== r,c when fixed)
  bool fixed;
  bool flip;     // partner value is -v (true) or v (false)
};

// Antisymmetric-z slots over a set of positions (closed under the partner map).
std::vector<ZSlot> z_slots(const OddFormRing& o, const std::vector<std::pair<int, int>>& pos) {
  std::vector<ZSlot> out;
  std::set<std::pair<int, int>> seen;
  for (auto [r, c] : pos) {
    if (seen.count({r, c})) continue;
    int pr = o.opp(c), pc = o.opp(r);
    seen.insert({r, c});
    seen.insert({pr, pc});
    ZSlot s{r, c, pr, pc, c == o.opp(r), false};
    // bar(z)(pr,pc) = sign[pr]sign[pc] z(r,c) must equal -z(pr,pc)
    s.flip = o.sign[pr] * o.sign[pc] > 0;
    out.push_back(s);
  }
  return out;
}

std::vector<std::vector<uint8_t>> z_choices(const OddFormRing& o, const std::vector<ZSlot>& slots) {
  std::vector<std::vector<uint8_t>> ch;
  for (const auto& s : slots) {
    if (s.fixed) {
      ch.push_back(o.K().elements(o.zmask[s.r * o.dim + s.c]));
    } else {
      std::vector<uint8_t> ok;
      for (uint8_t v : o.K().elements(o.rmask[s.r * o.dim + s.c])) {
        uint8_t pv = s.flip ? o.K().neg(v) : v;
        if (o.K().in(o.rmask[s.pr * o.dim + s.pc], pv)) ok.push_back(v);
      }
      ch.push_back(ok);
    }
  }
  return ch;
}

Mat z_build(const OddFormRing& o, const std::vector<ZSlot>& slots, const std::vector<uint8_t>& v) {
  Mat z;
  for (size_t i = 0; i < slots.size(); ++i) {
    const auto& s = slots[i];
    z.at(s.r, s.c) = v[i];
    if (!s.fixed) z.at(s.pr, s.pc) = s.flip ? o.K().neg(v[i]) : v[i];
  }
  return z;
}

std::vector<std::pair<int, int>> all_positions(const OddFormRing& o) {
  std::vector<std::pair<int, int>> p;
  for (int r = 0; r < o.dim; ++r)
    for (int c = 0; c < o.dim; ++c) p.push_back({r, c});
  return p;
}

template <class T>
void dedupe(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<Mat> carrier_S(const OddFormRing& o, const Labels& I, const Labels& J) {
  std::vector<std::pair<int, int>> pos;
  std::vector<std::vector<uint8_t>> ch;
  for (int i : I)
    for (int j : J) {
      int r = o.row(i), c = o.row(j);
      pos.push_back({r, c});
      ch.push_back(o.K().elements(o.rmask[r * o.dim + c]));
    }
  std::vector<Mat> out;
  for_each_tuple(ch, [&](const std::vector<uint8_t>& v) {
    Mat m;
    for (size_t t = 0; t < pos.size(); ++t) m.at(pos[t].first, pos[t].second) = v[t];
    out.push_back(m);
  });
  dedupe(out);
  return out;
}

std::vector<int> full_family(const OddFormRing& o) {
  std::vector<int> f;
  for (int i = 1; i <= o.ell; ++i) f.push_back(i);
  return f;
}

std::vector<int> family_without(const OddFormRing& o, int m) {
  std::vector<int> f;
  for (int i = 1; i <= o.ell; ++i)
    if (i != std::abs(m)) f.push_back(i);
  return f;
}

std::vector<Heis> carrier_theta0(const OddFormRing& o, const Labels& J,
                                 const std::vector<int>& family) {
  std::vector<int> rows;
  for (int r = 0; r < o.dim; ++r) {
    int l = std::abs(o.label[r]);
    if (std::find(family.begin(), family.end(), l) == family.end()) rows.push_back(r);
  }
  std::vector<std::pair<int, int>> ppos;
  std::vector<std::vector<uint8_t>> ch;
  for (int r : rows)
    for (int j : J) {
      int c = o.row(j);
      ppos.push_back({r, c});
      ch.push_back(o.K().elements(o.rmask[r * o.dim + c]));
    }
  std::vector<std::pair<int, int>> zpos;
  for (int j : J)
    for (int k : J) zpos.push_back({o.row(-j), o.row(k)});
  auto slots = z_slots(o, zpos);
  auto zch = z_choices(o, slots);
  size_t np = ch.size();
  for (auto& c : zch) ch.push_back(c);
  std::vector<Heis> out;
  for_each_tuple(ch, [&](const std::vector<uint8_t>& v) {
    Mat m;
    for (size_t t = 0; t < np; ++t) m.at(ppos[t].first, ppos[t].second) = v[t];
    Mat z = z_build(o, slots, std::vector<uint8_t>(v.begin() + np, v.end()));
    Heis u = o.plus(o.canon(m), Heis{Mat{}, z});
    if (o.in_delta(u)) out.push_back(u);
  });
  dedupe(out);
  return out;
}

// ---- pools ------------------------------------------------------------------

std::vector<Mat> ring_pool(const OddFormRing& o, size_t extra, uint64_t seed) {
  std::vector<Mat> out{Mat{}};
  for (int r = 0; r < o.dim; ++r)
    for (int c = 0; c < o.dim; ++c)
      for (uint8_t x : o.K().elements(o.rmask[r * o.dim + c]))
        if (x) {
          Mat m;
          m.at(r, c) = x;
          out.push_back(m);
        }
  std::mt19937_64 rng(seed);
  for (size_t t = 0; t < extra; ++t) {
    Mat m;
    for (int r = 0; r < o.dim; ++r)
      for (int c = 0; c < o.dim; ++c) {
        auto el = o.K().elements(o.rmask[r * o.dim + c]);
        m.at(r, c) = el[rng() % el.size()];
      }
    out.push_back(m);
  }
  return out;
}

std::vector<Heis> delta_pool(const OddFormRing& o, size_t extra, uint64_t seed) {
  std::vector<Heis> out{Heis{}};
  auto slots = z_slots(o, all_positions(o));
  auto zch = z_choices(o, slots);
  for (const Mat& m : ring_pool(o, 0, seed)) {
    if (m.zero()) continue;
    out.push_back(o.canon(m));
    out.push_back(o.phi(m));
  }
  for (size_t s = 0; s < slots.size(); ++s)
    for (uint8_t x : zch[s]) {
      if (!x) continue;
      std::vector<uint8_t> v(slots.size(), 0);
      v[s] = x;
      out.push_back(Heis{Mat{}, z_build(o, slots, v)});
    }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  auto rp = ring_pool(o, extra, seed + 1);
  for (size_t t = 0; t < extra; ++t) {
    std::vector<uint8_t> v;
    for (const auto& c : zch) v.push_back(c.empty() ? 0 : c[rng() % c.size()]);
    const Mat& m = rp[rp.size() - extra + t];
    out.push_back(o.plus(o.canon(m), Heis{Mat{}, z_build(o, slots, v)}));
  }
  dedupe(out);
  return out;
}

// ---- axiom checks -----------------------------------------------------------

namespace {

// Index tuples for a check of arity 2 or 3 over pool sizes; all tuples when the
// product fits the budget, else a seeded sample of `budget` tuples.
std::vector<std::array<size_t, 3>> tuples(std::array<size_t, 3> sizes, int arity,
                                          uint64_t budget, uint64_t seed, bool* sampled) {
  uint64_t total = 1;
  for (int a = 0; a < arity; ++a) total *= sizes[a];
  std::vector<std::array<size_t, 3>> out;
  *sampled = budget && total > budget;
  if (!*sampled) {
    out.reserve(total);
    for (uint64_t t = 0; t < total; ++t) {
      std::array<size_t, 3> ix{0, 0, 0};
      uint64_t rest = t;
      for (int a = arity - 1; a >= 0; --a) {
        ix[a] = rest % sizes[a];
        rest /= sizes[a];
      }
      out.push_back(ix);
    }
  } else {
    std::mt19937_64 rng(seed);
    for (uint64_t t = 0; t < budget; ++t) {
      std::array<size_t, 3> ix{0, 0, 0};
      for (int a = 0; a < arity; ++a) ix[a] = rng() % sizes[a];
      out.push_back(ix);
    }
  }
  return out;
}

void run_check(Report& rep, const std::string& name, std::array<size_t, 3> sizes, int arity,
               const CheckOptions& opt,
               const std::function<bool(const std::array<size_t, 3>&)>& ok,
               const std::function<std::string(const std::array<size_t, 3>&)>& witness) {
  bool sampled = false;
  auto tu = tuples(sizes, arity, opt.budget, opt.seed + stable_hash(name), &sampled);
  if (sampled) rep.mode = "sampled";
  std::vector<char> pass(tu.size(), 1);
  parallel_for(tu.size(), opt.workers, [&](size_t t) { pass[t] = ok(tu[t]); });
  for (size_t t = 0; t < tu.size(); ++t)
    rep.expect(pass[t], name, [&] { return witness(tu[t]); });
}

}  // namespace

Report check_axioms(const OddFormRing& o, const CheckOptions& opt) {
  Report rep;
  rep.check = "axioms:" + o.name;
  rep.seed = opt.seed;
  rep.budget = opt.budget;
  rep.mode = "basis-exhaustive";
  auto R = ring_pool(o, 8, opt.seed);
  auto D = delta_pool(o, 8, opt.seed);
  // basis pools for three-variable axioms
  std::vector<Mat> Rb{Mat{}};
  for (int r = 0; r < o.dim; ++r)
    for (int c = 0; c < o.dim; ++c) {
      auto el = o.K().elements(o.rmask[r * o.dim + c]);
      if (el.size() > 1) {
        Mat m;
        m.at(r, c) = el[1];
        Rb.push_back(m);
      }
    }
  for (size_t t = R.size() - 4; t < R.size(); ++t) Rb.push_back(R[t]);
  std::vector<Heis> Db{Heis{}};
  for (size_t t = 1; t < Rb.size(); ++t) {
    Db.push_back(o.canon(Rb[t]));
    Db.push_back(o.phi(Rb[t]));
  }
  for (size_t t = D.size() - 4; t < D.size(); ++t) Db.push_back(D[t]);
  dedupe(Db);

  const auto& K = o;
  auto sR = [&](size_t i) { return K.show(R[i]); };
  auto sD = [&](size_t i) { return K.show(D[i]); };
  size_t nR = R.size(), nD = D.size();

  auto one_mat = [&](const std::string& n, const std::function<bool(const Mat&)>& f) {
    run_check(rep, n, {nR, 1, 1}, 1, opt, [&](auto& t) { return f(R[t[0]]); },
              [&](auto& t) { return "a=" + sR(t[0]); });
  };
  one_mat("pi(phi(a))=0", [&](const Mat& a) { return o.phi(a).pi.zero(); });
  one_mat("rho(phi(a))=a-abar", [&](const Mat& a) { return o.phi(a).rho == o.sub(a, o.bar(a)); });
  one_mat("phi(a+abar)=0", [&](const Mat& a) { return o.phi(o.add(a, o.bar(a))).zero(); });
  one_mat("phi(abar a)=0", [&](const Mat& a) { return o.phi(o.mul(o.bar(a), a)).zero(); });
  one_mat("bar(bar(a))=a", [&](const Mat& a) { return o.bar(o.bar(a)) == a; });
  one_mat("phi(a) in Delta", [&](const Mat& a) { return o.in_delta(o.phi(a)); });

  run_check(rep, "rho(u)bar+pi(u)bar pi(u)+rho(u)=0", {nD, 1, 1}, 1, opt,
            [&](auto& t) {
              const Heis& u = D[t[0]];
              return o.add(o.add(o.bar(u.rho), o.mul(o.bar(u.pi), u.pi)), u.rho).zero();
            },
            [&](auto& t) { return "u=" + sD(t[0]); });
  run_check(rep, "-u in Delta", {nD, 1, 1}, 1, opt,
            [&](auto& t) {
              Heis n = o.hneg(D[t[0]]);
              return o.in_delta(n) && o.plus(D[t[0]], n).zero();
            },
            [&](auto& t) { return "u=" + sD(t[0]); });

  run_check(rep, "phi additive", {nR, nR, 1}, 2, opt,
            [&](auto& t) {
              const Mat &a = R[t[0]], &b = R[t[1]];
              return o.phi(o.add(a, b)) == o.plus(o.phi(a), o.phi(b));
            },
            [&](auto& t) { return "a=" + sR(t[0]) + " b=" + sR(t[1]); });
  run_check(rep, "phi(bbar a b)=phi(a).b", {nR, nR, 1}, 2, opt,
            [&](auto& t) {
              const Mat &a = R[t[0]], &b = R[t[1]];
              return o.phi(o.mul(o.mul(o.bar(b), a), b)) == o.act(o.phi(a), b);
            },
            [&](auto& t) { return "a=" + sR(t[0]) + " b=" + sR(t[1]); });
  run_check(rep, "bar(ab)=bbar abar", {nR, nR, 1}, 2, opt,
            [&](auto& t) {
              const Mat &a = R[t[0]], &b = R[t[1]];
              return o.bar(o.mul(a, b)) == o.mul(o.bar(b), o.bar(a)) &&
                     o.bar(o.add(a, b)) == o.add(o.bar(a), o.bar(b));
            },
            [&](auto& t) { return "a=" + sR(t[0]) + " b=" + sR(t[1]); });

  auto sDD = [&](auto& t) { return "u=" + sD(t[0]) + " v=" + sD(t[1]); };
  run_check(rep, "pi additive", {nD, nD, 1}, 2, opt,
            [&](auto& t) {
              const Heis &u = D[t[0]], &v = D[t[1]];
              return o.plus(u, v).pi == o.add(u.pi, v.pi);
            },
            sDD);
  run_check(rep, "rho(u+v)", {nD, nD, 1}, 2, opt,
            [&](auto& t) {
              const Heis &u = D[t[0]], &v = D[t[1]];
              Mat want = o.add(o.sub(u.rho, o.mul(o.bar(u.pi), v.pi)), v.rho);
              return o.plus(u, v).rho == want;
            },
            sDD);
  run_check(rep, "[u,v]=phi(-pibar(u)pi(v))", {nD, nD, 1}, 2, opt,
            [&](auto& t) {
              const Heis &u = D[t[0]], &v = D[t[1]];
              Heis c = o.minus(o.minus(o.plus(u, v), u), v);
              return c == o.phi(o.neg(o.mul(o.bar(u.pi), v.pi)));
            },
            sDD);
  run_check(rep, "Delta closed under (+)", {nD, nD, 1}, 2, opt,
            [&](auto& t) { return o.in_delta(o.plus(D[t[0]], D[t[1]])); }, sDD);

  auto sDR = [&](auto& t) { return "u=" + sD(t[0]) + " a=" + sR(t[1]); };
  run_check(rep, "pi(u.a)=pi(u)a", {nD, nR, 1}, 2, opt,
            [&](auto& t) {
              const Heis& u = D[t[0]];
              const Mat& a = R[t[1]];
              return o.act(u, a).pi == o.mul(u.pi, a);
            },
            sDR);
  run_check(rep, "rho(u.a)=abar rho(u) a", {nD, nR, 1}, 2, opt,
            [&](auto& t) {
              const Heis& u = D[t[0]];
              const Mat& a = R[t[1]];
              return o.act(u, a).rho == o.mul(o.mul(o.bar(a), u.rho), a);
            },
            sDR);
  run_check(rep, "Delta closed under action", {nD, nR, 1}, 2, opt,
            [&](auto& t) { return o.in_delta(o.act(D[t[0]], R[t[1]])); }, sDR);

  size_t nRb = Rb.size(), nDb = Db.size();
  auto sB3 = [&](auto& t) {
    return "u=" + o.show(Db[t[0]]) + " a=" + o.show(Rb[t[1]]) + " b=" + o.show(Rb[t[2]]);
  };
  run_check(rep, "u.(a+b)", {nDb, nRb, nRb}, 3, opt,
            [&](auto& t) {
              const Heis& u = Db[t[0]];
              const Mat &a = Rb[t[1]], &b = Rb[t[2]];
              Heis want = o.plus(o.plus(o.act(u, a), o.phi(o.mul(o.mul(o.bar(b), u.rho), a))),
                                 o.act(u, b));
              return o.act(u, o.add(a, b)) == want;
            },
            sB3);
  run_check(rep, "(u.a).b=u.(ab)", {nDb, nRb, nRb}, 3, opt,
            [&](auto& t) {
              const Heis& u = Db[t[0]];
              const Mat &a = Rb[t[1]], &b = Rb[t[2]];
              return o.act(o.act(u, a), b) == o.act(u, o.mul(a, b));
            },
            sB3);
  run_check(rep, "(u+v).a", {nDb, nDb, nRb}, 3, opt,
            [&](auto& t) {
              const Heis &u = Db[t[0]], &v = Db[t[1]];
              const Mat& a = Rb[t[2]];
              return o.act(o.plus(u, v), a) == o.plus(o.act(u, a), o.act(v, a));
            },
            [&](auto& t) {
              return "u=" + o.show(Db[t[0]]) + " v=" + o.show(Db[t[1]]) + " a=" + o.show(Rb[t[2]]);
            });
  run_check(rep, "(ab)c=a(bc)", {nRb, nRb, nRb}, 3, opt,
            [&](auto& t) {
              const Mat &a = Rb[t[0]], &b = Rb[t[1]], &c = Rb[t[2]];
              return o.mul(o.mul(a, b), c) == o.mul(a, o.mul(b, c));
            },
            [&](auto& t) {
              return "a=" + o.show(Rb[t[0]]) + " b=" + o.show(Rb[t[1]]) + " c=" + o.show(Rb[t[2]]);
            });
  return rep;
}

HyperbolicFamily canonical_family(const OddFormRing& o) {
  HyperbolicFamily f;
  for (int r = 0; r < o.dim; ++r) {
    int i = o.label[r];
    if (i == 0) continue;
    f.labels.push_back(i);
    f.e.push_back(o.e_of({i}));
    f.q.push_back(o.q_of({i}));
  }
  return f;
}

Report check_family(const OddFormRing& o, const HyperbolicFamily& f) {
  Report rep;
  rep.check = "family:" + o.name;
  auto at = [&](int lab) {
    for (size_t t = 0; t < f.labels.size(); ++t)
      if (f.labels[t] == lab) return t;
    throw std::out_of_range("family lacks label");
  };
  for (int i = 1; i <= o.ell; ++i) {
    size_t m = at(-i), p = at(i);
    std::string w = "pair " + std::to_string(i);
    for (size_t s : {m, p}) {
      const Mat& e = f.e[s];
      const Heis& q = f.q[s];
      std::string ws = w + " side " + std::to_string(f.labels[s]);
      rep.expect(o.mul(e, e) == e, "e idempotent", [&] { return ws; });
      rep.expect(q.pi == e, "pi(q)=e", [&] { return ws + " q=" + o.show(q); });
      rep.expect(q.rho.zero(), "rho(q)=0", [&] { return ws + " q=" + o.show(q); });
      rep.expect(o.act(q, e) == q, "q_pm = q_pm.e_pm", [&] { return ws + " q=" + o.show(q); });
      rep.expect(o.in_delta(q), "q in Delta", [&] { return ws + " q=" + o.show(q); });
    }
    rep.expect(o.mul(f.e[m], f.e[p]).zero() && o.mul(f.e[p], f.e[m]).zero(),
               "e_- e_+ orthogonal", [&] { return w; });
    rep.expect(o.bar(f.e[m]) == f.e[p], "bar(e_-)=e_+", [&] { return w; });
  }
  for (int i = 1; i <= o.ell; ++i)
    for (int j = 1; j <= o.ell; ++j) {
      if (i == j) continue;
      Mat ei = o.add(f.e[at(i)], f.e[at(-i)]);
      Mat ej = o.add(f.e[at(j)], f.e[at(-j)]);
      rep.expect(o.mul(ei, ej).zero(), "e_|i| e_|j| = 0",
                 [&] { return std::to_string(i) + "," + std::to_string(j); });
    }
  // Fullness e_i in R e_j R: the span of r e_j r' at position (i,i) is generated
  // by x D_j^2 y with x, y admissible at (i,j), (j,i).
  const CoeffRing& K = o.K();
  for (int i : f.labels)
    for (int j : f.labels) {
      const Mat& ei = f.e[at(i)];
      const Mat& ej = f.e[at(j)];
      bool ok = true;
      for (int a = 0; a < o.dim && ok; ++a)
        for (int d = 0; d < o.dim && ok; ++d) {
          uint8_t target = ei.at(a, d);
          if (!target) continue;
          Mask gens = 1;
          for (int b = 0; b < o.dim; ++b)
            for (int c = 0; c < o.dim; ++c) {
              uint8_t mid = K.mul(K.mul(o.twist[b], ej.at(b, c)), o.twist[c]);
              if (!mid) continue;
              for (uint8_t x : K.elements(o.rmask[a * o.dim + b]))
                for (uint8_t y : K.elements(o.rmask[c * o.dim + d]))
                  gens |= Mask(1) << K.mul(K.mul(x, mid), y);
            }
          ok = K.in(K.additive_closure(gens), target);
        }
      rep.expect(ok, "e_i in R e_j R", [&] { return std::to_string(i) + "," + std::to_string(j); });
    }
  return rep;
}

Report check_closure(const OddFormRing& o, size_t cap) {
  Report rep;
  rep.check = "closure:" + o.name;
  std::vector<Heis> gens;
  for (const Mat& m : ring_pool(o, 0, 1)) {
    if (m.zero()) continue;
    gens.push_back(o.canon(m));
    gens.push_back(o.phi(m));
  }
  auto slots = z_slots(o, all_positions(o));
  auto zch = z_choices(o, slots);
  for (size_t s = 0; s < slots.size(); ++s)
    for (uint8_t x : zch[s])
      if (x) {
        std::vector<uint8_t> v(slots.size(), 0);
        v[s] = x;
        gens.push_back(Heis{Mat{}, z_build(o, slots, v)});
      }
  dedupe(gens);
  std::set<Heis> seen{Heis{}};
  std::vector<Heis> frontier{Heis{}};
  while (!frontier.empty() && seen.size() <= cap) {
    std::vector<Heis> next;
    for (const Heis& u : frontier)
      for (const Heis& g : gens) {
        Heis w = o.plus(u, g);
        if (seen.insert(w).second) next.push_back(w);
      }
    frontier.swap(next);
  }
  rep.expect(seen.size() <= cap, "closure terminates", [&] { return std::to_string(seen.size()); });
  rep.counts["closure size"] = seen.size();
  // every closure element satisfies the membership predicate, and the predicate
  // carves out exactly as many elements as the closure (collision-free lift)
  size_t bad = 0;
  for (const Heis& u : seen)
    if (!o.in_delta(u)) ++bad;
  rep.expect(bad == 0, "closure inside predicate", [&] { return std::to_string(bad); });
  uint64_t pred = 1;
  for (int r = 0; r < o.dim; ++r)
    for (int c = 0; c < o.dim; ++c) pred *= o.K().elements(o.rmask[r * o.dim + c]).size();
  for (const auto& c : zch) pred *= c.size();
  rep.expect(pred == seen.size(), "closure equals predicate",
             [&] { return std::to_string(pred) + " vs " + std::to_string(seen.size()); });
  // Heisenberg law: unit and associativity on generator triples
  for (const Heis& a : gens) {
    rep.expect(o.plus(a, Heis{}) == a && o.plus(Heis{}, a) == a, "Heis unit",
               [&] { return o.show(a); });
  }
  size_t step = std::max<size_t>(1, gens.size() / 24);
  for (size_t i = 0; i < gens.size(); i += step)
    for (size_t j = 0; j < gens.size(); j += step)
      for (size_t k = 0; k < gens.size(); k += step) {
        const Heis &a = gens[i], &b = gens[j], &c = gens[k];
        rep.expect(o.plus(o.plus(a, b), c) == o.plus(a, o.plus(b, c)), "Heis associative",
                   [&] { return o.show(a) + " " + o.show(b) + " " + o.show(c); });
      }
  return rep;
}

// ---- crossed modules --------------------------------------------------------

Mat CrossedModule::delta(const Mat& a) const {
  Mat c;
  for (int r = 0; r < T.dim; ++r)
    for (int s = 0; s < T.dim; ++s) c.at(r, s) = sec[p1[a.at(r, s)]];
  return c;
}

Heis CrossedModule::delta(const Heis& u) const { return {delta(u.pi), delta(u.rho)}; }

Mat CrossedModule::proj2(const Mat& a) const {
  Mat c;
  for (int r = 0; r < T.dim; ++r)
    for (int s = 0; s < T.dim; ++s) c.at(r, s) = sec[p2[a.at(r, s)]];
  return c;
}

Heis CrossedModule::proj2(const Heis& u) const { return {proj2(u.pi), proj2(u.rho)}; }

void CrossedModule::reset_actions() {
  // hooks hold their own copy so a copied CrossedModule stays valid
  auto t = std::make_shared<const OddFormRing>(T);
  act_RS = [t](const Mat& r, const Mat& s) { return t->mul(r, s); };
  act_SR = [t](const Mat& s, const Mat& r) { return t->mul(s, r); };
  act_ThetaR = [t](const Heis& u, const Mat& r) { return t->act(u, r); };
  act_DeltaS = [t](const Heis& u, const Mat& s) { return t->act(u, s); };
}

Report check_crossed(const CrossedModule& cm, const CheckOptions& opt) {
  Report rep;
  rep.check = "crossed:" + cm.name;
  rep.seed = opt.seed;
  rep.budget = opt.budget;
  rep.mode = "basis-exhaustive";
  const OddFormRing& T = cm.T;
  auto Sp = ring_pool(cm.S, 4, opt.seed);
  auto Rp = ring_pool(cm.Rsec, 4, opt.seed + 7);
  auto Th = delta_pool(cm.S, 4, opt.seed);
  auto Dl = delta_pool(cm.Rsec, 4, opt.seed + 7);

  // T itself is the semidirect product; it must be an odd form ring.
  Report ax = check_axioms(T, opt);
  for (const auto& f : ax.failures) rep.failures.push_back({"semidirect " + f.check, f.witness});
  rep.instances += ax.instances;
  rep.counts["semidirect axioms"] = ax.instances;

  for (const Mat& a : Sp) {
    rep.expect(cm.S.in_R(a), "S admissible", [&] { return T.show(a); });
    rep.expect(cm.proj2(a).zero(), "p2 kills S", [&] { return T.show(a); });
    rep.expect(cm.delta(cm.delta(a)) == cm.delta(a), "delta lands in section image",
               [&] { return T.show(a); });
  }
  for (const Mat& r : Rp) rep.expect(cm.proj2(r) == r && cm.delta(r) == r, "p1 d = p2 d = id",
                                     [&] { return T.show(r); });

  bool sampled = false;
  auto pairs = tuples({Sp.size(), Sp.size(), 1}, 2, opt.budget, opt.seed, &sampled);
  for (auto& t : pairs) {
    const Mat &a = Sp[t[0]], &b = Sp[t[1]];
    auto w = [&] { return "a=" + T.show(a) + " b=" + T.show(b); };
    Mat ab = T.mul(a, b);
    rep.expect(cm.delta(T.add(a, b)) == T.add(cm.delta(a), cm.delta(b)), "delta additive", w);
    rep.expect(cm.delta(ab) == T.mul(cm.delta(a), cm.delta(b)), "delta multiplicative", w);
    rep.expect(cm.act_RS(cm.delta(a), b) == ab, "Peiffer ab = delta(a)b", w);
    rep.expect(cm.act_SR(a, cm.delta(b)) == ab, "Peiffer ab = a delta(b)", w);
    rep.expect(cm.S.in_R(ab), "S closed under product", w);
  }
  for (const Mat& a : Sp)
    rep.expect(cm.delta(T.bar(a)) == T.bar(cm.delta(a)), "delta commutes with involution",
               [&] { return T.show(a); });

  auto rs = tuples({Rp.size(), Sp.size(), 1}, 2, opt.budget, opt.seed + 1, &sampled);
  for (auto& t : rs) {
    const Mat &r = Rp[t[0]], &s = Sp[t[1]];
    auto w = [&] { return "r=" + T.show(r) + " s=" + T.show(s); };
    Mat rsm = cm.act_RS(r, s), srm = cm.act_SR(s, r);
    rep.expect(cm.S.in_R(rsm) && cm.S.in_R(srm), "R-action preserves S", w);
    rep.expect(cm.delta(rsm) == T.mul(r, cm.delta(s)), "delta equivariant (R.S)", w);
    rep.expect(cm.delta(srm) == T.mul(cm.delta(s), r), "delta equivariant (S.R)", w);
  }
  auto ts = tuples({Th.size(), Sp.size(), 1}, 2, opt.budget, opt.seed + 2, &sampled);
  for (auto& t : ts) {
    const Heis& u = Th[t[0]];
    const Mat& a = Sp[t[1]];
    auto w = [&] { return "u=" + T.show(u) + " a=" + T.show(a); };
    Heis ua = T.act(u, a);
    rep.expect(cm.act_ThetaR(u, cm.delta(a)) == ua, "Peiffer u.a = u.delta(a)", w);
    rep.expect(cm.act_DeltaS(cm.delta(u), a) == ua, "Peiffer u.a = delta(u).a", w);
  }
  auto tr = tuples({Th.size(), Rp.size(), 1}, 2, opt.budget, opt.seed + 3, &sampled);
  for (auto& t : tr) {
    const Heis& u = Th[t[0]];
    const Mat& r = Rp[t[1]];
    auto w = [&] { return "u=" + T.show(u) + " r=" + T.show(r); };
    Heis ur = cm.act_ThetaR(u, r);
    rep.expect(cm.S.in_delta(ur), "Theta closed under R-action", w);
    rep.expect(cm.delta(ur) == T.act(cm.delta(u), r), "delta equivariant (Theta.R)", w);
  }
  auto ds = tuples({Dl.size(), Sp.size(), 1}, 2, opt.budget, opt.seed + 4, &sampled);
  for (auto& t : ds) {
    const Heis& v = Dl[t[0]];
    const Mat& s = Sp[t[1]];
    auto w = [&] { return "v=" + T.show(v) + " s=" + T.show(s); };
    Heis vs = cm.act_DeltaS(v, s);
    rep.expect(cm.S.in_delta(vs), "Delta.S lands in Theta", w);
    rep.expect(cm.delta(vs) == T.act(v, cm.delta(s)), "delta equivariant (Delta.S)", w);
  }
  auto tt = tuples({Th.size(), Th.size(), 1}, 2, opt.budget, opt.seed + 5, &sampled);
  for (auto& t : tt) {
    const Heis &u = Th[t[0]], &v = Th[t[1]];
    auto w = [&] { return "u=" + T.show(u) + " v=" + T.show(v); };
    rep.expect(cm.delta(T.plus(u, v)) == T.plus(cm.delta(u), cm.delta(v)), "delta on Theta additive", w);
    rep.expect(cm.S.in_delta(T.plus(u, v)), "Theta closed", w);
  }
  for (const Heis& u : Th)
    rep.expect(cm.proj2(u).zero(), "p2 kills Theta", [&] { return T.show(u); });
  return rep;
}

// ---- lemma suites -----------------------------------------------------------

namespace {

// Decomposition e_j = sum_m x_m y_m with x_m in R_jk, y_m in R_kj.
bool decompose(const OddFormRing& o, int j, int k, std::vector<std::pair<Mat, Mat>>* out) {
  const CoeffRing& K = o.K();
  int rj = o.row(j), rk = o.row(k);
  std::vector<std::pair<uint8_t, uint8_t>> prods;
  for (uint8_t x : K.elements(o.rmask[rj * o.dim + rk]))
    for (uint8_t y : K.elements(o.rmask[rk * o.dim + rj])) prods.push_back({x, y});
  // breadth-first search over sums of products to reach 1
  std::map<uint8_t, std::vector<size_t>> reach{{0, {}}};
  std::vector<uint8_t> frontier{0};
  for (int depth = 0; depth < 4 && !reach.count(K.one()); ++depth) {
    std::vector<uint8_t> next;
    for (uint8_t s : frontier)
      for (size_t p = 0; p < prods.size(); ++p) {
        uint8_t v = K.add(s, K.mul(K.mul(prods[p].first, o.twist[rk]), prods[p].second));
        if (reach.count(v)) continue;
        auto path = reach[s];
        path.push_back(p);
        reach[v] = path;
        next.push_back(v);
      }
    frontier.swap(next);
  }
  if (!reach.count(K.one())) return false;
  for (size_t p : reach[K.one()])
    out->push_back({o.unit(j, k, prods[p].first), o.unit(k, j, prods[p].second)});
  return true;
}

}  // namespace

Report check_ring_pres(const OddFormRing& o, bool corrupt) {
  Report rep;
  rep.check = "ring-pres:" + o.name;
  auto labs = canonical_family(o).labels;
  for (int i : labs)
    for (int j : labs)
      for (int k : labs) {
        std::vector<std::pair<Mat, Mat>> xy;
        bool found = decompose(o, j, k, &xy);
        rep.expect(found, "e_j in R_jk R_kj",
                   [&] { return std::to_string(j) + "," + std::to_string(k); });
        if (!found) continue;
        if (corrupt) xy.back().first = Mat{};
        for (const Mat& a : carrier_S(o, {i}, {j})) {
          Mat back;
          for (auto& [x, y] : xy) back = o.add(back, o.mul(o.mul(a, x), y));
          rep.expect(back == a, "sum (a x_m) y_m = a", [&] {
            return "i,j,k=" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) +
                   " a=" + o.show(a);
          });
        }
        // forward direction on generators: a r with a in S_ik, r in R_kj
        for (const Mat& a : carrier_S(o, {i}, {k}))
          for (const Mat& r : carrier_S(o, {k}, {j})) {
            Mat ar = o.mul(a, r);
            Mat back;
            for (auto& [x, y] : xy) back = o.add(back, o.mul(o.mul(ar, x), y));
            rep.expect(back == ar, "multiplication then section", [&] { return o.show(ar); });
          }
      }
  return rep;
}

Report check_form_pres(const OddFormRing& o, bool corrupt) {
  Report rep;
  rep.check = "form-pres:" + o.name;
  auto labs = canonical_family(o).labels;
  auto fam = full_family(o);
  for (int j : labs)
    for (int k : labs) {
      std::vector<std::pair<Mat, Mat>> xy;
      if (!decompose(o, j, k, &xy)) {
        rep.expect(false, "e_j in R_jk R_kj", [&] { return std::to_string(j) + "," + std::to_string(k); });
        continue;
      }
      if (corrupt) xy.back().first = Mat{};
      auto round_trip = [&](const Heis& u) {
        // g(u) = sum (u.x_m) [x] y_m (+) phi(sum_{m<m'} ybar xbar rho(u) x y); f reads [x] as the action
        Heis img;
        for (auto& [x, y] : xy) img = o.plus(img, o.act(o.act(u, x), y));
        Mat corr;
        for (size_t m = 0; m < xy.size(); ++m)
          for (size_t m2 = m + 1; m2 < xy.size(); ++m2) {
            Mat left = o.mul(o.bar(xy[m2].second), o.bar(xy[m2].first));
            Mat right = o.mul(xy[m].first, xy[m].second);
            corr = o.add(corr, o.mul(o.mul(left, u.rho), right));
          }
        return o.plus(img, o.phi(corr));
      };
      for (const Heis& u : carrier_theta0(o, {j}, fam))
        rep.expect(round_trip(u) == u, "f(g(u)) = u", [&] {
          return "j,k=" + std::to_string(j) + "," + std::to_string(k) + " u=" + o.show(u);
        });
      for (const Mat& a : carrier_S(o, {-j}, {j}))
        rep.expect(round_trip(o.phi(a)) == o.phi(a), "g(f(phi(a))) = phi(a)",
                   [&] { return "a=" + o.show(a); });
    }
  return rep;
}

}  // namespace ofa
