#include "ofa/pairs.hpp"

#include <memory>
#include <stdexcept>

namespace ofa {

Group Group::of_ring(const CoeffRing& r) {
  Group g;
  g.n = r.size();
  for (int a = 0; a < g.n; ++a) {
    g.neg_t.push_back(r.neg(uint8_t(a)));
    g.labels.push_back(r.label(uint8_t(a)));
    for (int b = 0; b < g.n; ++b) g.add_t.push_back(r.add(uint8_t(a), uint8_t(b)));
  }
  return g;
}

Group Group::sub_of_ring(const CoeffRing& r, Mask m, std::vector<uint8_t>* embed) {
  auto el = r.elements(m);
  std::vector<int> pos(r.size(), -1);
  for (size_t i = 0; i < el.size(); ++i) pos[el[i]] = int(i);
  Group g;
  g.n = int(el.size());
  for (uint8_t a : el) {
    if (pos[r.neg(a)] < 0) throw std::invalid_argument("subgroup not closed under negation");
    g.neg_t.push_back(uint8_t(pos[r.neg(a)]));
    g.labels.push_back(r.label(a));
    for (uint8_t b : el) {
      if (pos[r.add(a, b)] < 0) throw std::invalid_argument("subgroup not closed under addition");
      g.add_t.push_back(uint8_t(pos[r.add(a, b)]));
    }
  }
  if (embed) *embed = el;
  return g;
}

uint8_t PairB::sb(uint8_t k, uint8_t k2) const {
  const CoeffRing& l = *L;
  return l.sub(l.sub(s[K.add(k, k2)], s[k]), s[k2]);
}

PairF FF(CoeffPtr K) {
  PairF p;
  p.name = "FF(" + K->name() + ")";
  p.K = K;
  p.L = K;
  for (int k = 0; k < K->size(); ++k) {
    uint8_t x = uint8_t(k);
    p.u.push_back(x);
    p.d.push_back(K->add(x, x));
    p.s.push_back(K->mul(x, x));
  }
  return p;
}

PairB as_B(const PairF& p) {
  PairB b;
  b.name = p.name + ":B";
  b.L = p.L;
  b.K = Group::of_ring(*p.K);
  for (int l = 0; l < p.L->size(); ++l)
    for (int k = 0; k < p.K->size(); ++k) b.smul.push_back(p.K->mul(uint8_t(k), p.u[l]));
  b.s = p.s;
  return b;
}

PairC as_C(const PairF& p) {
  PairC c;
  c.name = p.name + ":C";
  c.K = p.K;
  c.L = Group::of_ring(*p.L);
  c.d = p.d;
  c.u = p.u;
  for (int l = 0; l < p.L->size(); ++l)
    for (int k = 0; k < p.K->size(); ++k) c.dot.push_back(p.L->mul(uint8_t(l), p.s[k]));
  return c;
}

Report check_pair(const PairB& p) {
  Report rep;
  rep.check = "pairB:" + p.name;
  const CoeffRing& L = *p.L;
  int nL = L.size(), nK = p.K.n;
  auto w2 = [&](int x, int y) { return [=] { return std::to_string(x) + "," + std::to_string(y); }; };
  for (int k = 0; k < nK; ++k)
    rep.expect(p.lk(L.one(), uint8_t(k)) == k, "1k = k", w2(k, 0));
  for (int l = 0; l < nL; ++l)
    for (int k = 0; k < nK; ++k) {
      uint8_t kl = p.lk(uint8_t(l), uint8_t(k));
      rep.expect(p.s[kl] == L.mul(p.s[k], L.mul(uint8_t(l), uint8_t(l))), "s(kl)=s(k)l^2", w2(l, k));
      for (int l2 = 0; l2 < nL; ++l2) {
        rep.expect(p.lk(L.add(uint8_t(l), uint8_t(l2)), uint8_t(k)) ==
                       p.K.add(kl, p.lk(uint8_t(l2), uint8_t(k))),
                   "(l+l')k = lk + l'k", w2(l, k));
        rep.expect(p.lk(L.mul(uint8_t(l), uint8_t(l2)), uint8_t(k)) ==
                       p.lk(uint8_t(l), p.lk(uint8_t(l2), uint8_t(k))),
                   "(ll')k = l(l'k)", w2(l, k));
      }
      for (int k2 = 0; k2 < nK; ++k2) {
        rep.expect(p.lk(uint8_t(l), p.K.add(uint8_t(k), uint8_t(k2))) ==
                       p.K.add(kl, p.lk(uint8_t(l), uint8_t(k2))),
                   "l(k+k') = lk + lk'", w2(k, k2));
        rep.expect(p.sb(kl, uint8_t(k2)) == L.mul(uint8_t(l), p.sb(uint8_t(k), uint8_t(k2))),
                   "s(lk|k') = l s(k|k')", w2(k, k2));
      }
    }
  for (int k = 0; k < nK; ++k)
    for (int k2 = 0; k2 < nK; ++k2)
      for (int k3 = 0; k3 < nK; ++k3)
        rep.expect(p.sb(p.K.add(uint8_t(k), uint8_t(k2)), uint8_t(k3)) ==
                       L.add(p.sb(uint8_t(k), uint8_t(k3)), p.sb(uint8_t(k2), uint8_t(k3))),
                   "s(.|.) additive", w2(k, k2));
  return rep;
}

Report check_pair(const PairC& p) {
  Report rep;
  rep.check = "pairC:" + p.name;
  const CoeffRing& K = *p.K;
  const Group& L = p.L;
  int nK = K.size(), nL = L.n;
  auto w = [](int x, int y) { return [=] { return std::to_string(x) + "," + std::to_string(y); }; };
  for (int k = 0; k < nK; ++k) {
    uint8_t x = uint8_t(k);
    rep.expect(p.u[p.d[x]] == K.add(x, x), "u(d(k))=2k", w(k, 0));
    for (int k2 = 0; k2 < nK; ++k2) {
      uint8_t y = uint8_t(k2);
      rep.expect(p.d[K.add(x, y)] == L.add(p.d[x], p.d[y]), "d additive", w(k, k2));
      rep.expect(p.act(p.d[x], y) == p.d[K.mul(x, K.mul(y, y))], "d(k).k'=d(kk'^2)", w(k, k2));
    }
  }
  for (int l = 0; l < nL; ++l) {
    uint8_t a = uint8_t(l);
    rep.expect(p.d[p.u[a]] == L.add(a, a), "d(u(l))=2l", w(l, 0));
    rep.expect(p.act(a, K.one()) == a, "l.1=l", w(l, 0));
    for (int l2 = 0; l2 < nL; ++l2)
      rep.expect(p.u[L.add(a, uint8_t(l2))] == K.add(p.u[a], p.u[l2]), "u additive", w(l, l2));
    for (int k = 0; k < nK; ++k) {
      uint8_t x = uint8_t(k);
      rep.expect(p.u[p.act(a, x)] == K.mul(p.u[a], K.mul(x, x)), "u(l.k)=u(l)k^2", w(l, k));
      for (int l2 = 0; l2 < nL; ++l2)
        rep.expect(p.act(L.add(a, uint8_t(l2)), x) == L.add(p.act(a, x), p.act(uint8_t(l2), x)),
                   "(l+l').k", w(l, k));
      for (int k2 = 0; k2 < nK; ++k2) {
        uint8_t y = uint8_t(k2);
        uint8_t lhs = p.act(a, K.add(x, y));
        uint8_t rhs = L.add(L.add(p.act(a, x), p.d[K.mul(K.mul(x, y), p.u[a])]), p.act(a, y));
        rep.expect(lhs == rhs, "l.(k+k')=l.k+d(kk'u(l))+l.k'", w(k, k2));
        rep.expect(p.act(p.act(a, x), y) == p.act(a, K.mul(x, y)), "(l.k).k'=l.kk'", w(k, k2));
      }
    }
  }
  return rep;
}

Report check_pair(const PairF& p) {
  Report rep;
  rep.check = "pairF:" + p.name;
  const CoeffRing &K = *p.K, &L = *p.L;
  auto w = [](int x, int y) { return [=] { return std::to_string(x) + "," + std::to_string(y); }; };
  rep.expect(p.u[L.one()] == K.one(), "u unital", w(0, 0));
  for (int l = 0; l < L.size(); ++l) {
    uint8_t a = uint8_t(l);
    rep.expect(p.d[p.u[a]] == L.add(a, a), "d(u(l))=2l", w(l, 0));
    rep.expect(p.s[p.u[a]] == L.mul(a, a), "s(u(l))=l^2", w(l, 0));
    for (int l2 = 0; l2 < L.size(); ++l2) {
      uint8_t b = uint8_t(l2);
      rep.expect(p.u[L.add(a, b)] == K.add(p.u[a], p.u[b]) && p.u[L.mul(a, b)] == K.mul(p.u[a], p.u[b]),
                 "u ring homomorphism", w(l, l2));
    }
  }
  for (int k = 0; k < K.size(); ++k) {
    uint8_t x = uint8_t(k);
    rep.expect(p.u[p.d[x]] == K.add(x, x), "u(d(k))=2k", w(k, 0));
    rep.expect(p.u[p.s[x]] == K.mul(x, x), "u(s(k))=k^2", w(k, 0));
    for (int l = 0; l < L.size(); ++l)
      rep.expect(p.d[K.mul(x, p.u[l])] == L.mul(p.d[x], uint8_t(l)), "d(ku(l))=d(k)l", w(k, l));
    for (int k2 = 0; k2 < K.size(); ++k2) {
      uint8_t y = uint8_t(k2);
      rep.expect(p.d[K.add(x, y)] == L.add(p.d[x], p.d[y]), "d additive", w(k, k2));
      rep.expect(p.s[K.add(x, y)] == L.add(L.add(p.s[x], p.d[K.mul(x, y)]), p.s[y]),
                 "s(k+k')=s(k)+d(kk')+s(k')", w(k, k2));
      rep.expect(p.s[K.mul(x, y)] == L.mul(p.s[x], p.s[y]), "s(kk')=s(k)s(k')", w(k, k2));
    }
  }
  return rep;
}

namespace {

bool is_subgroup(const CoeffRing& K, Mask m) {
  return K.in(m, 0) && K.additive_closure(m) == m;
}

}  // namespace

bool admissible(const CoeffRing& K, Mask a, Mask b, char kind) {
  if (!is_subgroup(K, a) || !is_subgroup(K, b)) return false;
  if ((b & ~a) != 0) return false;
  for (uint8_t x : K.elements(a)) {
    if (!K.in(b, K.add(x, x))) return false;
    for (int k = 0; k < K.size(); ++k) {
      if (!K.in(a, K.mul(uint8_t(k), x))) return false;  // a is an ideal
      if (!K.in(b, K.mul(uint8_t(k), K.mul(x, x)))) return false;
    }
  }
  for (uint8_t y : K.elements(b))
    for (int k = 0; k < K.size(); ++k) {
      uint8_t kk = uint8_t(k);
      if (kind == 'C') {
        if (!K.in(b, K.mul(y, K.mul(kk, kk)))) return false;
      } else if (!K.in(b, K.mul(y, kk))) {
        return false;
      }
    }
  return true;
}

namespace {

// Index of (x, k) in CoeffRing::semidirect(K, ideal): position of x in the
// ideal times |K| plus k.
uint8_t sd_encode(const CoeffRing& K, Mask ideal, uint8_t x, uint8_t k) {
  auto el = K.elements(ideal);
  for (size_t i = 0; i < el.size(); ++i)
    if (el[i] == x) return uint8_t(i * K.size() + k);
  throw std::invalid_argument("element outside the ideal");
}

std::pair<uint8_t, uint8_t> sd_decode(const CoeffRing& K, Mask ideal, uint8_t v) {
  auto el = K.elements(ideal);
  return {el[v / K.size()], uint8_t(v % K.size())};
}

}  // namespace

SemidirectPair semidirect_pair(CoeffPtr Kp, Mask a, Mask b) {
  const CoeffRing& K = *Kp;
  SemidirectPair sp;
  sp.a = a;
  sp.b = b;
  sp.base = Kp;
  auto Kd = std::make_shared<CoeffRing>(CoeffRing::semidirect(K, a, &sp.p1, &sp.p2, &sp.sec));
  auto Ld = std::make_shared<CoeffRing>(CoeffRing::semidirect(K, b));
  PairF& f = sp.pair;
  f.name = "(" + std::to_string(K.elements(a).size()) + "," + std::to_string(K.elements(b).size()) +
           ")x" + K.name();
  f.K = Kd;
  f.L = Ld;
  for (int v = 0; v < Ld->size(); ++v) {
    auto [y, k] = sd_decode(K, b, uint8_t(v));
    f.u.push_back(sd_encode(K, a, y, k));
  }
  for (int v = 0; v < Kd->size(); ++v) {
    auto [x, k] = sd_decode(K, a, uint8_t(v));
    f.d.push_back(sd_encode(K, b, K.add(x, x), K.add(k, k)));
    uint8_t sq = K.add(K.mul(x, x), K.mul(K.add(x, x), k));
    f.s.push_back(sd_encode(K, b, sq, K.mul(k, k)));
  }
  return sp;
}

Report check_crossed_pair(const SemidirectPair& sp) {
  Report rep = check_pair(sp.pair);
  rep.check = "crossed-pair:" + sp.pair.name;
  rep.merge(check_pair(as_B(sp.pair)));
  rep.merge(check_pair(as_C(sp.pair)));
  const CoeffRing& Kd = *sp.pair.K;
  // kernel of p2 and its image under p1, sec
  std::vector<uint8_t> ker;
  for (int v = 0; v < Kd.size(); ++v)
    if (sp.p2[v] == 0) ker.push_back(uint8_t(v));
  for (uint8_t x : ker)
    for (uint8_t y : ker) {
      uint8_t xy = Kd.mul(x, y);
      auto w = [&] { return Kd.label(x) + "," + Kd.label(y); };
      rep.expect(Kd.mul(sp.sec[sp.p1[x]], y) == xy, "Peiffer ab = delta(a)b", w);
      rep.expect(Kd.mul(x, sp.sec[sp.p1[y]]) == xy, "Peiffer ab = a delta(b)", w);
    }
  return rep;
}

OddFormRing ofasymp(int ell, const PairC& p) {
  if (ell < 1 || 2 * ell > kMaxDim) throw std::invalid_argument("ofasymp rank out of range");
  const CoeffRing& K = *p.K;
  Mask uimg = 0;
  for (int l = 0; l < p.L.n; ++l) uimg |= Mask(1) << p.u[l];
  if (int(K.elements(uimg).size()) != p.L.n)
    throw std::invalid_argument("ofasymp needs an injective u");
  OddFormRing o;
  o.name = "ofasymp(" + std::to_string(2 * ell) + ";" + p.name + ")";
  o.ring = p.K;
  o.orth = false;
  o.ell = ell;
  o.dim = 2 * ell;
  for (int i = -ell; i <= ell; ++i)
    if (i != 0) {
      o.label.push_back(i);
      o.sign.push_back(i > 0 ? 1 : -1);
    }
  o.twist.assign(o.dim, K.one());
  o.qcoef.assign(o.dim, 0);
  o.rmask.assign(o.dim * o.dim, K.full());
  o.zmask.assign(o.dim * o.dim, 1);
  for (int r = 0; r < o.dim; ++r) o.zmask[r * o.dim + o.opp(r)] = uimg;
  return o;
}

OddFormRing ofaorth(int ell, const PairB& p) {
  if (ell < 0 || 2 * ell + 1 > kMaxDim) throw std::invalid_argument("ofaorth rank out of range");
  const CoeffRing& L = *p.L;
  // K must be free of rank one over L; find a generator
  // try the unit first so that for K = L the entries are the K-parameters themselves
  int gen = -1;
  std::vector<int> order{L.one()};
  for (int g = 0; g < p.K.n; ++g)
    if (g != L.one()) order.push_back(g);
  for (int g : order) {
    if (g >= p.K.n || gen >= 0) continue;
    std::vector<int> hit(p.K.n, 0);
    bool ok = p.K.n == L.size();
    for (int l = 0; l < L.size() && ok; ++l) ok = !hit[p.lk(uint8_t(l), uint8_t(g))]++;
    if (ok) gen = g;
  }
  if (gen < 0) throw std::invalid_argument("ofaorth needs K free of rank one over L");
  uint8_t c = p.s[gen];
  OddFormRing o;
  o.name = "ofaorth(" + std::to_string(2 * ell + 1) + ";" + p.name + ")";
  o.ring = p.L;
  o.orth = true;
  o.ell = ell;
  o.dim = 2 * ell + 1;
  for (int i = -ell; i <= ell; ++i) {
    o.label.push_back(i);
    o.sign.push_back(1);
  }
  o.twist.assign(o.dim, L.one());
  o.twist[ell] = L.add(c, c);
  o.qcoef.assign(o.dim, 0);
  o.qcoef[ell] = c;
  o.rmask.assign(o.dim * o.dim, L.full());
  o.zmask.assign(o.dim * o.dim, 1);
  return o;
}

namespace {

CrossedModule assemble(OddFormRing T, const SemidirectPair& sp, const std::string& name,
                       Mask zS, Mask zR) {
  CrossedModule cm;
  cm.name = name;
  cm.p1 = sp.p1;
  cm.p2 = sp.p2;
  cm.sec = sp.sec;
  cm.base = sp.base;
  const CoeffRing& Kd = *T.ring;
  Mask ker = 0, img = 0;
  for (int v = 0; v < Kd.size(); ++v)
    if (sp.p2[v] == 0) ker |= Mask(1) << v;
  for (uint8_t s : sp.sec) img |= Mask(1) << s;
  std::vector<Mask> rS(T.dim * T.dim), zSv(T.dim * T.dim, 1), rR(T.dim * T.dim), zRv(T.dim * T.dim, 1);
  for (int r = 0; r < T.dim; ++r)
    for (int c = 0; c < T.dim; ++c) {
      int p = r * T.dim + c;
      rS[p] = T.rmask[p] & ker;
      rR[p] = T.rmask[p] & img;
      if (c == T.opp(r)) {
        zSv[p] = T.zmask[p] & zS;
        zRv[p] = T.zmask[p] & zR;
      }
    }
  cm.S = restrict_to(T, rS, zSv, "S:" + name);
  cm.Rsec = restrict_to(T, rR, zRv, "R:" + name);
  cm.T = std::move(T);
  cm.reset_actions();
  return cm;
}

Mask kernel_mask(const SemidirectPair& sp) {
  Mask m = 0;
  for (size_t v = 0; v < sp.p2.size(); ++v)
    if (sp.p2[v] == 0) m |= Mask(1) << v;
  return m;
}

Mask section_mask(const SemidirectPair& sp) {
  Mask m = 0;
  for (uint8_t s : sp.sec) m |= Mask(1) << s;
  return m;
}

}  // namespace

CrossedModule crossed_ofasymp(CoeffPtr K, Mask a, Mask b, int ell) {
  if (!admissible(*K, a, b, 'C')) throw std::invalid_argument("pair is not admissible of type C");
  const CoeffRing& k = *K;
  SemidirectPair sp;
  sp.a = a;
  sp.b = b;
  sp.base = K;
  auto Kd = std::make_shared<CoeffRing>(CoeffRing::semidirect(k, a, &sp.p1, &sp.p2, &sp.sec));
  // L' = pairs (y, k) with y in b, as a subgroup of K'
  Mask lmask = 0;
  for (uint8_t y : k.elements(b))
    for (int x = 0; x < k.size(); ++x) lmask |= Mask(1) << sd_encode(k, a, y, uint8_t(x));
  PairC c;
  c.name = "(" + std::to_string(k.elements(a).size()) + "," + std::to_string(k.elements(b).size()) +
           ")x" + k.name();
  c.K = Kd;
  c.L = Group::sub_of_ring(*Kd, lmask, &c.u);
  std::vector<int> pos(Kd->size(), -1);
  for (size_t i = 0; i < c.u.size(); ++i) pos[c.u[i]] = int(i);
  for (int v = 0; v < Kd->size(); ++v) {
    uint8_t twice = Kd->add(uint8_t(v), uint8_t(v));
    if (pos[twice] < 0) throw std::invalid_argument("2K' not inside L'");
    c.d.push_back(uint8_t(pos[twice]));
  }
  for (size_t l = 0; l < c.u.size(); ++l)
    for (int v = 0; v < Kd->size(); ++v) {
      uint8_t prod = Kd->mul(c.u[l], Kd->mul(uint8_t(v), uint8_t(v)));
      if (pos[prod] < 0) throw std::invalid_argument("L' not closed under l.k");
      c.dot.push_back(uint8_t(pos[prod]));
    }
  OddFormRing T = ofasymp(ell, c);
  Mask ker = kernel_mask(sp), img = section_mask(sp);
  std::string name = "ofasymp(" + std::to_string(2 * ell) + ";" + c.name + ")";
  return assemble(std::move(T), sp, name, ker & lmask, img & lmask);
}

std::vector<uint8_t> orth_ideal_generators(const SemidirectPair& sp) {
  // With L' = K' the tensor square K' (x) K' is K' via x (x) y -> xy. The
  // generators a(x)a' - a(x)delta(a') and a(x)a' - delta(a)(x)a' become products.
  const CoeffRing& Kd = *sp.pair.K;
  std::vector<uint8_t> out;
  for (int x = 0; x < Kd.size(); ++x) {
    if (sp.p2[x]) continue;
    for (int y = 0; y < Kd.size(); ++y) {
      if (sp.p2[y]) continue;
      uint8_t xy = Kd.mul(uint8_t(x), uint8_t(y));
      uint8_t g1 = Kd.sub(xy, Kd.mul(uint8_t(x), sp.sec[sp.p1[y]]));
      uint8_t g2 = Kd.sub(xy, Kd.mul(sp.sec[sp.p1[x]], uint8_t(y)));
      if (g1) out.push_back(g1);
      if (g2) out.push_back(g2);
    }
  }
  return out;
}

CrossedModule crossed_ofaorth(CoeffPtr K, Mask a, Mask b, int ell) {
  if (!admissible(*K, a, b, 'B')) throw std::invalid_argument("pair is not admissible of type B");
  if (a != b) throw std::invalid_argument("orthogonal crossed module implemented for a = b only");
  SemidirectPair sp = semidirect_pair(K, a, b);
  if (!orth_ideal_generators(sp).empty())
    throw std::runtime_error("nonzero ideal I: quotient not implemented");
  // a = b makes L' = K' (same encoding), so the type B pair is K' over itself
  PairB pb;
  pb.name = sp.pair.name;
  pb.L = sp.pair.K;
  pb.K = Group::of_ring(*sp.pair.K);
  const CoeffRing& Kd = *sp.pair.K;
  for (int l = 0; l < Kd.size(); ++l)
    for (int k = 0; k < Kd.size(); ++k) pb.smul.push_back(Kd.mul(uint8_t(l), uint8_t(k)));
  for (int k = 0; k < Kd.size(); ++k) pb.s.push_back(Kd.mul(uint8_t(k), uint8_t(k)));
  OddFormRing T = ofaorth(ell, pb);
  std::string name = "ofaorth(" + std::to_string(2 * ell + 1) + ";" + pb.name + ")";
  return assemble(std::move(T), sp, name, kernel_mask(sp), section_mask(sp));
}

}  // namespace ofa
