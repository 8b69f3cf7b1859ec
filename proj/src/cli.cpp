#include "ofa/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ofa/chevalley.hpp"
#include "ofa/oddform.hpp"
#include "ofa/pairs.hpp"
#include "ofa/rootsys.hpp"
#include "ofa/steinberg.hpp"

namespace ofa {

ConfigError::ConfigError(int ln, const std::string& msg)
    : std::runtime_error(ln > 0 ? "config line " + std::to_string(ln) + ": " + msg : "config: " + msg),
      line(ln) {}

ConstructionError::ConstructionError(const std::string& ax, const std::string& msg)
    : std::runtime_error("construction failed, axiom '" + ax + "': " + msg), axiom(ax) {}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"axioms", "family",  "crossed",     "unrel",
                                                 "presentation", "dl", "relative-dl",
                                                 "injectivity",  "lemmas"};
  return names;
}

// ---- presets --------------------------------------------------------------------

namespace {

RunConfig make(const std::string& name, const std::string& cons, int rank, int k,
               std::vector<std::string> suites) {
  RunConfig c;
  c.name = name;
  c.construction = cons;
  c.rank = rank;
  c.pair.type = 'F';
  c.pair.k = c.pair.l = k;
  c.suites = std::move(suites);
  return c;
}

std::vector<RunConfig> all_presets() {
  std::vector<RunConfig> v;
  {
    auto c = make("C3-Z2", "ofasymp", 3, 2, {"axioms", "family", "unrel", "presentation", "lemmas"});
    v.push_back(c);
  }
  {
    auto c = make("C3-Z3", "ofasymp", 3, 3, {"axioms", "family", "unrel", "presentation", "dl"});
    c.dl_system = 'C';
    c.dl_rank = 3;
    v.push_back(c);
  }
  {
    auto c = make("B3-Z2", "ofaorth", 3, 2, {"axioms", "family", "unrel", "presentation", "dl"});
    c.dl_system = 'B';
    c.dl_rank = 3;
    v.push_back(c);
  }
  {
    auto c = make("C3-Z4-admissible-b0", "ofasymp", 3, 4, {"crossed", "presentation"});
    c.adm_a = std::vector<int>{2};
    c.adm_b = std::vector<int>{0};
    v.push_back(c);
  }
  {
    auto c = make("C3-Z4-admissible-b2", "ofasymp", 3, 4, {"crossed", "presentation"});
    c.adm_a = std::vector<int>{2};
    c.adm_b = std::vector<int>{2};
    v.push_back(c);
  }
  {
    auto c = make("F4-Z4-admissible", "", 0, 4, {"dl", "relative-dl"});
    c.adm_a = std::vector<int>{2};
    c.adm_b = std::vector<int>{2};
    c.dl_system = 'F';
    c.dl_rank = 4;
    v.push_back(c);
  }
  {
    auto c = make("B2-smoke", "ofaorth", 2, 2,
                  {"axioms", "family", "unrel", "presentation", "injectivity", "lemmas"});
    v.push_back(c);
  }
  {
    auto c = make("C2-Z2", "ofasymp", 2, 2, {"axioms", "family", "injectivity", "lemmas"});
    v.push_back(c);
  }
  {
    auto c = make("C3-Z2-identity", "ofasymp", 3, 2, {"crossed", "presentation"});
    c.adm_a = std::vector<int>{1};
    c.adm_b = std::vector<int>{1};
    v.push_back(c);
  }
  {
    auto c = make("C3-Z3-crossed-dl", "", 0, 3, {"relative-dl"});
    c.adm_a = std::vector<int>{1};
    c.adm_b = std::vector<int>{1};
    c.dl_system = 'C';
    c.dl_rank = 3;
    c.budget = 100'000;
    v.push_back(c);
  }
  return v;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& c : all_presets()) out.push_back(c.name);
  return out;
}

RunConfig preset(const std::string& name) {
  for (const auto& c : all_presets())
    if (c.name == name) return c;
  throw ConfigError(0, "unknown preset '" + name + "'");
}

std::string list_presets() {
  std::ostringstream os;
  for (const auto& c : all_presets()) {
    os << c.name << "  ";
    if (!c.construction.empty()) os << c.construction << " rank=" << c.rank << " ";
    os << "Z/" << c.pair.k;
    if (c.adm_a) os << " crossed";
    if (c.dl_system) os << " dl=" << c.dl_system << c.dl_rank;
    os << "  suites=";
    for (size_t i = 0; i < c.suites.size(); ++i) os << (i ? "," : "") << c.suites[i];
    os << "\n";
  }
  return os.str();
}

// ---- text form ------------------------------------------------------------------

namespace {

std::string list_str(const std::vector<int>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

long parse_int(int ln, const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(ln, "expected an integer for " + what + ", got '" + s + "'");
  }
}

uint64_t parse_u64(int ln, const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    uint64_t v = std::stoull(s, &pos);
    if (pos != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(ln, "expected a non-negative integer for " + what + ", got '" + s + "'");
  }
}

std::vector<int> parse_list(int ln, const std::string& s, const std::string& what) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ConfigError(ln, what + " must look like [x,y,...], got '" + s + "'");
  std::vector<int> out;
  std::string body = s.substr(1, s.size() - 2);
  if (trim(body).empty()) return out;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(int(parse_int(ln, trim(tok), what)));
  return out;
}

int parse_modulus(int ln, const std::string& s, const std::string& what) {
  if (s.rfind("Z/", 0) != 0) throw ConfigError(ln, what + " must be Z/n, got '" + s + "'");
  long n = parse_int(ln, s.substr(2), what);
  if (n < 2 || n > 32) throw ConfigError(ln, what + " modulus must lie in 2..32");
  return int(n);
}

std::map<std::string, std::string> keyvals(int ln, const std::vector<std::string>& toks,
                                           const std::set<std::string>& allowed) {
  std::map<std::string, std::string> kv;
  for (size_t i = 1; i < toks.size(); ++i) {
    size_t eq = toks[i].find('=');
    if (eq == std::string::npos) throw ConfigError(ln, "expected key=value, got '" + toks[i] + "'");
    std::string k = toks[i].substr(0, eq);
    if (!allowed.count(k)) throw ConfigError(ln, "unknown key '" + k + "' for " + toks[0]);
    if (kv.count(k)) throw ConfigError(ln, "duplicate key '" + k + "'");
    kv[k] = toks[i].substr(eq + 1);
  }
  return kv;
}

std::vector<std::string> split_suites(int ln, const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    if (std::find(suite_names().begin(), suite_names().end(), tok) == suite_names().end())
      throw ConfigError(ln, "unknown suite '" + tok + "'");
    if (std::find(out.begin(), out.end(), tok) != out.end())
      throw ConfigError(ln, "suite '" + tok + "' listed twice");
    out.push_back(tok);
  }
  return out;
}

}  // namespace

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "name " << c.name << "\n";
  if (!c.construction.empty()) os << "construction " << c.construction << " rank=" << c.rank << "\n";
  const PairSpec& p = c.pair;
  if (p.type == 'F') {
    os << "pair type=F K=Z/" << p.k << "\n";
  } else {
    os << "pair type=" << p.type << " K=Z/" << p.k << " L=Z/" << p.l;
    auto put = [&](const char* key, const std::vector<int>& v) {
      if (!v.empty()) os << " " << key << "=" << list_str(v);
    };
    put("d", p.d);
    put("u", p.u);
    put("s", p.s);
    put("dot", p.dot);
    put("smul", p.smul);
    os << "\n";
  }
  if (c.adm_a) os << "admissible a=" << list_str(*c.adm_a) << " b=" << list_str(*c.adm_b) << "\n";
  if (c.dl_system) os << "dl system=" << c.dl_system << " rank=" << c.dl_rank << "\n";
  os << "suites ";
  for (size_t i = 0; i < c.suites.size(); ++i) os << (i ? "," : "") << c.suites[i];
  os << "\n";
  os << "budget " << c.budget << "\n";
  os << "seed " << c.seed << "\n";
  return os.str();
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  c.suites.clear();
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    std::vector<std::string> toks;
    {
      std::istringstream ts(line);
      std::string t;
      while (ts >> t) toks.push_back(t);
    }
    const std::string& head = toks[0];
    if (seen.count(head)) throw ConfigError(ln, "directive '" + head + "' given twice");
    seen.insert(head);
    auto single = [&]() -> const std::string& {
      if (toks.size() != 2) throw ConfigError(ln, head + " takes exactly one value");
      return toks[1];
    };
    if (head == "name") {
      c.name = single();
    } else if (head == "construction") {
      if (toks.size() < 2) throw ConfigError(ln, "construction needs a builder name");
      c.construction = toks[1];
      if (c.construction != "ofasymp" && c.construction != "ofaorth")
        throw ConfigError(ln, "unknown construction '" + c.construction + "' (ofasymp, ofaorth)");
      std::vector<std::string> rest(toks.begin() + 1, toks.end());
      auto kv = keyvals(ln, rest, {"rank"});
      if (!kv.count("rank")) throw ConfigError(ln, "construction needs rank=");
      c.rank = int(parse_int(ln, kv["rank"], "rank"));
    } else if (head == "pair") {
      if (toks.size() == 2 && toks[1].rfind("FF(", 0) == 0 && toks[1].back() == ')') {
        c.pair = PairSpec{};
        c.pair.k = c.pair.l = parse_modulus(ln, toks[1].substr(3, toks[1].size() - 4), "FF");
        continue;
      }
      auto kv = keyvals(ln, toks, {"type", "K", "L", "d", "u", "s", "dot", "smul"});
      if (!kv.count("type") || kv["type"].size() != 1 || std::string("FCB").find(kv["type"][0]) == std::string::npos)
        throw ConfigError(ln, "pair needs type=F, type=C or type=B");
      PairSpec p;
      p.type = kv["type"][0];
      if (!kv.count("K")) throw ConfigError(ln, "pair needs K=Z/n");
      p.k = parse_modulus(ln, kv["K"], "K");
      if (p.type == 'F') {
        for (const char* k : {"L", "d", "u", "s", "dot", "smul"})
          if (kv.count(k)) throw ConfigError(ln, std::string("type=F takes only K, not ") + k);
        p.l = p.k;
      } else {
        if (!kv.count("L")) throw ConfigError(ln, "pair needs L=Z/n");
        p.l = parse_modulus(ln, kv["L"], "L");
        for (const char* k : {"d", "u", "s", "dot", "smul"})
          if (kv.count(k)) {
            std::vector<int> v = parse_list(ln, kv[k], k);
            std::string key = k;
            if (key == "d") p.d = v;
            if (key == "u") p.u = v;
            if (key == "s") p.s = v;
            if (key == "dot") p.dot = v;
            if (key == "smul") p.smul = v;
          }
        if (p.type == 'C' && (!p.s.empty() || !p.smul.empty()))
          throw ConfigError(ln, "type=C takes d, u, dot");
        if (p.type == 'B' && (!p.d.empty() || !p.u.empty() || !p.dot.empty()))
          throw ConfigError(ln, "type=B takes s, smul");
        size_t nk = size_t(p.k), nl = size_t(p.l);
        auto len = [&](const std::vector<int>& v, size_t n, const char* what) {
          if (!v.empty() && v.size() != n)
            throw ConfigError(ln, std::string(what) + " needs " + std::to_string(n) + " entries");
        };
        len(p.d, nk, "d");
        len(p.u, nl, "u");
        len(p.s, nk, "s");
        len(p.dot, nl * nk, "dot");
        len(p.smul, nl * nk, "smul");
      }
      c.pair = p;
    } else if (head == "admissible") {
      auto kv = keyvals(ln, toks, {"a", "b"});
      if (!kv.count("a") || !kv.count("b")) throw ConfigError(ln, "admissible needs a=[..] b=[..]");
      c.adm_a = parse_list(ln, kv["a"], "a");
      c.adm_b = parse_list(ln, kv["b"], "b");
    } else if (head == "dl") {
      auto kv = keyvals(ln, toks, {"system", "rank"});
      if (!kv.count("system") || kv["system"].size() != 1 ||
          std::string("BCF").find(kv["system"][0]) == std::string::npos)
        throw ConfigError(ln, "dl needs system=B, C or F");
      if (!kv.count("rank")) throw ConfigError(ln, "dl needs rank=");
      c.dl_system = kv["system"][0];
      c.dl_rank = int(parse_int(ln, kv["rank"], "rank"));
    } else if (head == "suites") {
      c.suites = split_suites(ln, single());
    } else if (head == "budget") {
      c.budget = parse_u64(ln, single(), "budget");
    } else if (head == "seed") {
      c.seed = parse_u64(ln, single(), "seed");
    } else {
      throw ConfigError(ln, "unknown directive '" + head + "'");
    }
  }
  if (!seen.count("pair")) throw ConfigError(0, "missing 'pair' line");
  if (c.suites.empty()) throw ConfigError(0, "no suites selected");
  validate_config(c);
  return c;
}

void validate_config(const RunConfig& c) {
  auto has = [&](const char* s) { return std::find(c.suites.begin(), c.suites.end(), s) != c.suites.end(); };
  for (const auto& s : c.suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw ConfigError(0, "unknown suite '" + s + "'");
  if (c.suites.empty()) throw ConfigError(0, "no suites selected");
  for (const char* s : {"axioms", "family", "crossed", "unrel", "presentation", "injectivity", "lemmas"})
    if (has(s) && c.construction.empty())
      throw ConfigError(0, std::string("suite '") + s + "' needs a construction line");
  if (!c.construction.empty()) {
    if (c.rank < 1 || c.rank > 4) throw ConfigError(0, "construction rank must lie in 1..4");
    if (c.pair.type == 'C' && c.construction != "ofasymp")
      throw ConfigError(0, "a type-C pair builds ofasymp");
    if (c.pair.type == 'B' && c.construction != "ofaorth")
      throw ConfigError(0, "a type-B pair builds ofaorth");
  }
  if (c.adm_a.has_value() != c.adm_b.has_value()) throw ConfigError(0, "admissible needs both a and b");
  if (c.adm_a && c.pair.type != 'F') throw ConfigError(0, "admissible pairs live inside a type-F pair");
  if (has("crossed") && !c.adm_a) throw ConfigError(0, "suite 'crossed' needs an admissible line");
  if ((has("dl") || has("relative-dl")) && !c.dl_system)
    throw ConfigError(0, "suites dl/relative-dl need a dl line");
  if (has("relative-dl") && !c.adm_a)
    throw ConfigError(0, "suite 'relative-dl' needs a crossed pair (admissible line)");
  if (c.dl_system) {
    if (c.pair.type != 'F') throw ConfigError(0, "dl needs a type-F pair");
    if (c.dl_system == 'F' && c.dl_rank != 4) throw ConfigError(0, "dl system=F has rank 4");
    if (c.dl_system != 'F' && c.dl_rank != 3) throw ConfigError(0, "dl system=B/C is checked at rank 3");
  }
}

// ---- running ----------------------------------------------------------------------

namespace {

Mask ideal_mask(const CoeffRing& K, const std::vector<int>& gens) {
  Mask m = 1;  // zero
  for (int g : gens) {
    uint8_t x = K.from_int(g);
    for (int k = 0; k < K.size(); ++k) m |= Mask(1) << K.mul(uint8_t(k), x);
  }
  return K.additive_closure(m);
}

void require(const Report& r, const std::string& what) {
  if (r.ok()) return;
  const Failure& f = r.failures.front();
  throw ConstructionError(f.check, what + ": " + f.witness);
}

uint8_t entry(const std::vector<int>& v, size_t i, int fallback, int mod, const char* what) {
  int x = v.empty() ? fallback : v[i];
  if (x < 0 || x >= mod)
    throw ConstructionError("table range", std::string(what) + " entry " + std::to_string(x) +
                                               " is outside Z/" + std::to_string(mod));
  return uint8_t(x);
}

PairC build_pair_c(const PairSpec& s) {
  PairC p;
  p.name = "C(Z/" + std::to_string(s.k) + ",Z/" + std::to_string(s.l) + ")";
  p.K = std::make_shared<CoeffRing>(CoeffRing::zmod(s.k));
  p.L = Group::of_ring(CoeffRing::zmod(s.l));
  for (int k = 0; k < s.k; ++k) p.d.push_back(entry(s.d, k, (2 * k) % s.l, s.l, "d"));
  for (int l = 0; l < s.l; ++l) p.u.push_back(entry(s.u, l, l % s.k, s.k, "u"));
  for (int l = 0; l < s.l; ++l)
    for (int k = 0; k < s.k; ++k)
      p.dot.push_back(entry(s.dot, size_t(l * s.k + k), (l * k * k) % s.l, s.l, "dot"));
  return p;
}

PairB build_pair_b(const PairSpec& s) {
  PairB p;
  p.name = "B(Z/" + std::to_string(s.l) + ",Z/" + std::to_string(s.k) + ")";
  p.L = std::make_shared<CoeffRing>(CoeffRing::zmod(s.l));
  p.K = Group::of_ring(CoeffRing::zmod(s.k));
  for (int l = 0; l < s.l; ++l)
    for (int k = 0; k < s.k; ++k)
      p.smul.push_back(entry(s.smul, size_t(l * s.k + k), (l * k) % s.k, s.k, "smul"));
  for (int k = 0; k < s.k; ++k) p.s.push_back(entry(s.s, k, (k * k) % s.l, s.l, "s"));
  return p;
}

struct Instance {
  CoeffPtr K;
  Mask a = 0, b = 0;
  std::shared_ptr<OddFormRing> ofr;
  std::shared_ptr<CrossedModule> cm;
  std::shared_ptr<DLSetting> st;
};

RootKind dl_kind(char c) { return c == 'B' ? RootKind::B : c == 'C' ? RootKind::C : RootKind::F; }

Instance build(const RunConfig& c) {
  Instance in;
  const PairSpec& p = c.pair;
  if (p.type == 'F') {
    in.K = std::make_shared<CoeffRing>(CoeffRing::zmod(p.k));
    require(check_pair(FF(in.K)), "pair FF(Z/" + std::to_string(p.k) + ")");
  }
  if (c.adm_a) {
    in.a = ideal_mask(*in.K, *c.adm_a);
    in.b = ideal_mask(*in.K, *c.adm_b);
    std::string kinds;
    if (c.construction == "ofasymp") kinds += 'C';
    if (c.construction == "ofaorth") kinds += 'B';
    if (c.dl_system) kinds += c.dl_system;
    for (char k : kinds)
      if (!admissible(*in.K, in.a, in.b, k))
        throw ConstructionError(std::string("admissible pair of type ") + k,
                                "a=" + list_str(*c.adm_a) + " b=" + list_str(*c.adm_b) +
                                    " over Z/" + std::to_string(p.k));
    require(check_crossed_pair(semidirect_pair(in.K, in.a, in.b)), "crossed pair");
  }
  if (!c.construction.empty()) {
    if (c.adm_a) {
      in.cm = std::make_shared<CrossedModule>(c.construction == "ofasymp"
                                                  ? crossed_ofasymp(in.K, in.a, in.b, c.rank)
                                                  : crossed_ofaorth(in.K, in.a, in.b, c.rank));
      in.ofr = std::make_shared<OddFormRing>(in.cm->T);
    } else if (p.type == 'F') {
      PairF f = FF(in.K);
      in.ofr = std::make_shared<OddFormRing>(c.construction == "ofasymp" ? ofasymp(c.rank, as_C(f))
                                                                         : ofaorth(c.rank, as_B(f)));
    } else if (p.type == 'C') {
      PairC pc = build_pair_c(p);
      require(check_pair(pc), "pair " + pc.name);
      in.ofr = std::make_shared<OddFormRing>(ofasymp(c.rank, pc));
    } else {
      PairB pb = build_pair_b(p);
      require(check_pair(pb), "pair " + pb.name);
      in.ofr = std::make_shared<OddFormRing>(ofaorth(c.rank, pb));
    }
  }
  if (c.dl_system) {
    RootKind k = dl_kind(c.dl_system);
    in.st = std::make_shared<DLSetting>(c.adm_a ? dl_setting_crossed(k, c.dl_rank, in.K, in.a, in.b)
                                                : dl_setting_ff(k, c.dl_rank, in.K));
  }
  return in;
}

struct SuiteRun {
  std::vector<Report> reports;
  std::vector<uint64_t> digests;   // parallel to reports; 0 when not a family run
  std::vector<nlohmann::json> records;
  std::vector<uint64_t> dropped;   // parallel to reports
};

void add_report(SuiteRun& sr, const std::string& suite, const Report& r, const RunOptions& opt) {
  sr.reports.push_back(r);
  sr.digests.push_back(0);
  size_t keep = std::min(r.failures.size(), std::max<size_t>(opt.record_cap, 1));
  for (size_t i = 0; i < keep; ++i)
    sr.records.push_back({{"suite", suite},
                          {"check", r.check},
                          {"failed", r.failures[i].check},
                          {"witness", r.failures[i].witness},
                          {"pass", false}});
  sr.dropped.push_back(r.failures.size() - keep);
}

void add_outcomes(SuiteRun& sr, const std::string& suite, const std::vector<FamilyOutcome>& outs,
                  const RunOptions& opt) {
  for (const auto& o : outs) {
    sr.reports.push_back(o.report);
    sr.digests.push_back(o.digest);
    size_t cap = std::max<size_t>(opt.record_cap, 1);
    size_t kept = 0, dropped = 0;
    for (const auto& rec : o.records) {
      bool fail = rec.contains("pass") && !rec["pass"].get<bool>();
      if (fail && kept >= cap) {
        ++dropped;
        continue;
      }
      if (fail) ++kept;
      nlohmann::json r = rec;
      r["suite"] = suite;
      sr.records.push_back(std::move(r));
    }
    sr.dropped.push_back(dropped);
  }
}

std::string hex(uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

Report injectivity_suite(const StContext& cx, int ell, uint64_t seed, uint64_t budget, int workers) {
  RootSystem rs = build_root_system(RootKind::BC, ell);
  std::vector<RootSet> subsets = ell <= 3 ? saturated_special_subsets(rs)
                                          : sample_saturated_special(rs, 200, seed);
  std::vector<Report> parts(subsets.size());
  std::vector<int> skipped(subsets.size(), 0);
  uint64_t cap = budget == 0 ? (uint64_t(1) << 22) : std::min<uint64_t>(budget, uint64_t(1) << 22);
  parallel_for(subsets.size(), workers, [&](size_t i) {
    try {
      parts[i] = product_injectivity(cx, rs, subsets[i], cap);
    } catch (const std::invalid_argument&) {
      skipped[i] = 1;
    }
  });
  Report rep;
  rep.check = "injectivity:" + cx.name + ":" + rs.name();
  rep.seed = seed;
  rep.budget = cap;
  rep.mode = ell <= 3 ? "exhaustive" : "sampled";
  uint64_t checked = 0, skip = 0;
  for (size_t i = 0; i < subsets.size(); ++i) {
    if (skipped[i]) {
      ++skip;
      continue;
    }
    ++checked;
    for (const auto& f : parts[i].failures)
      rep.failures.push_back({f.check, "Sigma=" + rs.serialize(subsets[i]) + " " + f.witness});
    rep.instances += parts[i].instances;
  }
  rep.counts["subsets"] = checked;
  rep.counts["subsets over budget"] = skip;
  return rep;
}

}  // namespace

RunResult run(const RunConfig& cfg, const RunOptions& opt) {
  validate_config(cfg);
  Instance in;
  try {
    in = build(cfg);
  } catch (const ConstructionError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConstructionError("construction", e.what());
  }
  auto has = [&](const char* s) { return std::find(cfg.suites.begin(), cfg.suites.end(), s) != cfg.suites.end(); };

  CheckOptions co{cfg.budget, cfg.seed, opt.workers};
  SuiteOptions so;
  so.budget = cfg.budget;
  so.seed = cfg.seed;
  so.workers = opt.workers;
  so.all_records = opt.all_records;

  if (opt.mutate) {
    // One planted fault per suite; each is independent of the others.
    if (has("axioms") && in.ofr) in.ofr->fault = kFaultPlusSign;
    if (has("crossed") && in.cm) {
      const OddFormRing* t = &in.cm->T;
      in.cm->act_SR = [t](const Mat& s, const Mat& r) { return t->mul(r, s); };
    }
    if (in.st) mutate_setting(*in.st);
  }

  RunResult res;
  nlohmann::json suites = nlohmann::json::array();
  std::ostringstream txt;
  txt << "config " << cfg.name << (opt.mutate ? " (mutated)" : "") << " seed " << cfg.seed << " budget "
      << cfg.budget << "\n";

  for (const std::string& suite : cfg.suites) {
    SuiteRun sr;
    if (suite == "axioms") {
      add_report(sr, suite, check_axioms(*in.ofr, co), opt);
    } else if (suite == "family") {
      OddFormRing clean = *in.ofr;
      clean.fault = kNoFault;
      HyperbolicFamily fam = canonical_family(clean);
      if (opt.mutate && fam.e.size() >= 2) std::swap(fam.e[0], fam.e[1]);
      add_report(sr, suite, check_family(clean, fam), opt);
    } else if (suite == "crossed") {
      add_report(sr, suite, check_crossed(*in.cm, co), opt);
      SemidirectPair sp = semidirect_pair(in.K, in.a, in.b);
      add_report(sr, suite, check_crossed_pair(sp), opt);
    } else if (suite == "unrel") {
      OddFormRing clean = *in.ofr;
      clean.fault = kNoFault;
      StContext cx = context_of(clean);
      if (opt.mutate) cx.mutation = kMutChainSign;
      FamilyBundle b = unrel_families(cx);
      add_outcomes(sr, suite, verify_families(cx, b, so), opt);
    } else if (suite == "presentation") {
      OddFormRing clean = *in.ofr;
      clean.fault = kNoFault;
      StContext cx;
      std::optional<CrossedModule> cm_clean;
      if (in.cm) {
        cm_clean = *in.cm;
        cm_clean->reset_actions();
        cx = context_of(*cm_clean);
      } else {
        cx = context_of(clean);
      }
      if (opt.mutate) cx.mutation = kMutSymSign;
      FamilyBundle b = presentation_families(cx);
      add_outcomes(sr, suite, verify_families(cx, b, so), opt);
    } else if (suite == "injectivity") {
      OddFormRing clean = *in.ofr;
      clean.fault = kNoFault;
      StContext cx = context_of(clean);
      if (opt.mutate) cx.mutation = kMutDropFactor;
      add_report(sr, suite, injectivity_suite(cx, cfg.rank, cfg.seed, cfg.budget, opt.workers), opt);
    } else if (suite == "lemmas") {
      OddFormRing clean = *in.ofr;
      clean.fault = kNoFault;
      add_report(sr, suite, check_ring_pres(clean, opt.mutate), opt);
      add_report(sr, suite, check_form_pres(clean, opt.mutate), opt);
    } else if (suite == "dl") {
      add_report(sr, suite, check_structure_constants(in.st->rs, in.st->sc), opt);
      add_outcomes(sr, suite, verify_dl(*in.st, so), opt);
    } else if (suite == "relative-dl") {
      add_report(sr, suite, check_vrep(*in.st), opt);
      add_outcomes(sr, suite, verify_relative_dl(*in.st, so), opt);
    }

    nlohmann::json js;
    js["suite"] = suite;
    nlohmann::json reps = nlohmann::json::array();
    uint64_t fails = 0, inst = 0;
    for (size_t i = 0; i < sr.reports.size(); ++i) {
      const Report& r = sr.reports[i];
      nlohmann::json rj = r.to_json();
      if (rj["failures"].size() > 20) {
        nlohmann::json head = nlohmann::json::array();
        for (size_t k = 0; k < 20; ++k) head.push_back(rj["failures"][k]);
        rj["failures"] = head;
      }
      rj["failures_total"] = r.failures.size();
      if (sr.digests[i]) rj["digest"] = hex(sr.digests[i]);
      if (sr.dropped[i]) rj["records_dropped"] = sr.dropped[i];
      reps.push_back(rj);
      fails += r.failures.size();
      inst += r.instances;
      txt << "  " << suite << "  " << r.check << "  mode=" << r.mode << "  instances=" << r.instances
          << "  failures=" << r.failures.size();
      if (sr.digests[i]) txt << "  digest=" << hex(sr.digests[i]);
      txt << (r.ok() ? "  PASS" : "  FAIL") << "\n";
      if (!r.ok())
        txt << "    witness: " << r.failures.front().check << ": " << r.failures.front().witness << "\n";
    }
    js["reports"] = reps;
    js["instances"] = inst;
    js["failures"] = fails;
    js["pass"] = fails == 0;
    suites.push_back(js);
    res.failures += fails;
    res.instances += inst;
    for (auto& r : sr.records) res.records.push_back(std::move(r));
  }

  res.summary["config"] = cfg.name;
  res.summary["config_text"] = serialize_config(cfg);
  res.summary["mutate"] = opt.mutate;
  res.summary["seed"] = cfg.seed;
  res.summary["budget"] = cfg.budget;
  res.summary["suites"] = suites;
  res.summary["instances"] = res.instances;
  res.summary["failures"] = res.failures;
  res.summary["pass"] = res.failures == 0;
  txt << "total instances=" << res.instances << " failures=" << res.failures
      << (res.failures == 0 ? "  PASS" : "  FAIL") << "\n";
  res.text = txt.str();
  return res;
}

// ---- command line ------------------------------------------------------------------

int verify_main(int argc, char** argv) {
  CLI::App app{"Exact verification of odd form rings, Steinberg relations and doubly laced presentations"};
  std::string preset_name, config_file, suites, out_dir, format = "text";
  std::optional<uint64_t> budget, seed;
  int workers = 1;
  bool list = false, mutate = false, all_records = false, print_config = false;
  app.add_option("--preset", preset_name, "built-in preset");
  app.add_option("--config", config_file, "declarative config file");
  app.add_option("--suites", suites, "comma-separated suites (overrides the config)");
  app.add_option("--budget", budget, "max instances per family before sampling");
  app.add_option("--seed", seed, "sampling seed");
  app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 256));
  app.add_option("--out", out_dir, "directory for summary and records.jsonl");
  app.add_option("--format", format, "summary format")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--list-presets", list, "print the built-in presets");
  app.add_flag("--mutate", mutate, "plant one fault per suite");
  app.add_flag("--all-records", all_records, "record every family instance, not only failures");
  app.add_flag("--print-config", print_config, "print the resolved config and stop");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list || (preset_name.empty() && config_file.empty())) {
    std::cout << list_presets();
    return 0;
  }
  try {
    if (!preset_name.empty() && !config_file.empty())
      throw ConfigError(0, "give either --preset or --config, not both");
    RunConfig cfg;
    if (!preset_name.empty()) {
      cfg = preset(preset_name);
    } else {
      std::ifstream f(config_file);
      if (!f) throw ConfigError(0, "cannot read " + config_file);
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = parse_config(ss.str());
    }
    if (!suites.empty()) cfg.suites = split_suites(0, suites);
    if (budget) cfg.budget = *budget;
    if (seed) cfg.seed = *seed;
    validate_config(cfg);
    if (print_config) {
      std::cout << serialize_config(cfg);
      return 0;
    }

    RunOptions ro;
    ro.workers = workers;
    ro.mutate = mutate;
    ro.all_records = all_records;
    RunResult res = run(cfg, ro);

    std::string summary = format == "json" ? res.summary.dump(2) + "\n" : res.text;
    std::cout << summary;
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::ofstream(std::filesystem::path(out_dir) / (format == "json" ? "summary.json" : "summary.txt"))
          << summary;
      std::ofstream rec(std::filesystem::path(out_dir) / "records.jsonl");
      for (const auto& r : res.records) rec << r.dump() << "\n";
    }
    return res.failures == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  } catch (const ConstructionError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}

}  // namespace ofa
