#include "iwalab/algebra.hpp"

#include <algorithm>
#include <set>

namespace iwalab {

namespace {

CoeffRing join_rings(const Config&, CoeffRing a, CoeffRing b) {
  if (a == b) return a;
  if (a == CoeffRing::ExactInt) return b;
  if (b == CoeffRing::ExactInt) return a;
  throw input_error("algebra: incompatible coefficient rings (mod-p^M vs cyclotomic)");
}

void check_dim(const Config& cfg, const AlgebraElement& x) {
  for (const auto& [v, c] : x.terms)
    if (static_cast<int>(v.size()) != cfg.d) throw input_error("algebra: exponent vector length != d");
}

long p_pow_long(long p, int n) {
  long r = 1;
  for (int i = 0; i < n; ++i) r *= p;
  return r;
}

}  // namespace

AlgebraElement AlgebraElement::zero(const Config&) { return AlgebraElement{}; }

AlgebraElement AlgebraElement::one(const Config& cfg) {
  return monomial(cfg, ExpVec(cfg.d, 0));
}

AlgebraElement AlgebraElement::monomial(const Config& cfg, const ExpVec& v, const Int& coeff) {
  if (static_cast<int>(v.size()) != cfg.d)
    throw input_error("algebra: exponent vector length != d");
  AlgebraElement x;
  if (coeff != 0) x.terms.emplace(v, Cyclotomic::integer(cfg.p, coeff));
  return x;
}

unsigned AlgebraElement::coeff_order() const {
  unsigned l = 0;
  for (const auto& [v, c] : terms) l = std::max(l, c.order_exponent());
  return l;
}

AlgebraElement normalized(const Config& cfg, AlgebraElement x) {
  const Int pM = cfg.p_precision();
  std::map<ExpVec, Cyclotomic> out;
  for (auto& [v, c] : x.terms) {
    Cyclotomic cc = c.reduced_order();
    if (x.ring == CoeffRing::ModPM) {
      if (cc.order_exponent() != 0)
        throw input_error("algebra: mod-p^M element with cyclotomic coefficient");
      cc.reduce_coords_mod(pM);
      cc = cc.reduced_order();
    }
    if (!cc.is_zero()) out.emplace(v, std::move(cc));
  }
  x.terms = std::move(out);
  if (x.ring == CoeffRing::ModPM) {
    x.denom = 1;
    return x;
  }
  // pull common p factors out of the denominator
  Int g = x.denom;
  for (const auto& [v, c] : x.terms) {
    for (const auto& co : c.coords())
      if (co != 0) g = gcd(g, co);
    if (g == 1) break;
  }
  if (g > 1) {
    Int q;
    mpz_divexact(q.get_mpz_t(), x.denom.get_mpz_t(), g.get_mpz_t());
    x.denom = q;
    std::map<ExpVec, Cyclotomic> scaled;
    for (auto& [v, c] : x.terms) {
      std::vector<Int> coords = c.coords();
      for (auto& co : coords) mpz_divexact(co.get_mpz_t(), co.get_mpz_t(), g.get_mpz_t());
      scaled.emplace(v, Cyclotomic(cfg.p, c.order_exponent(), std::move(coords)));
    }
    x.terms = std::move(scaled);
  }
  if (x.terms.empty()) x.denom = 1;
  return x;
}

bool equal(const Config& cfg, const AlgebraElement& x, const AlgebraElement& y) {
  if ((x.ring == CoeffRing::ModPM) != (y.ring == CoeffRing::ModPM)) {
    // an exact element may be compared against a mod-p^M one by reduction
    AlgebraElement a = x, b = y;
    a.ring = CoeffRing::ModPM;
    b.ring = CoeffRing::ModPM;
    return equal(cfg, a, b);
  }
  AlgebraElement a = normalized(cfg, x), b = normalized(cfg, y);
  if (a.denom != b.denom) return false;
  if (a.terms.size() != b.terms.size()) return false;
  auto it = a.terms.begin();
  auto jt = b.terms.begin();
  for (; it != a.terms.end(); ++it, ++jt) {
    if (it->first != jt->first) return false;
    if (!(it->second == jt->second)) return false;
  }
  return true;
}

AlgebraElement add(const Config& cfg, const AlgebraElement& x, const AlgebraElement& y) {
  check_dim(cfg, x);
  check_dim(cfg, y);
  AlgebraElement r;
  r.ring = join_rings(cfg, x.ring, y.ring);
  r.denom = x.denom * y.denom / gcd(x.denom, y.denom);
  Int sx = r.denom / x.denom, sy = r.denom / y.denom;
  for (const auto& [v, c] : x.terms) {
    auto [it, fresh] = r.terms.emplace(v, c.scaled(sx));
    if (!fresh) it->second = it->second + c.scaled(sx);
  }
  for (const auto& [v, c] : y.terms) {
    auto [it, fresh] = r.terms.emplace(v, c.scaled(sy));
    if (!fresh) it->second = it->second + c.scaled(sy);
  }
  return normalized(cfg, r);
}

AlgebraElement negate(const Config& cfg, const AlgebraElement& x) {
  AlgebraElement r = x;
  for (auto& [v, c] : r.terms) c = -c;
  return normalized(cfg, r);
}

AlgebraElement subtract(const Config& cfg, const AlgebraElement& x, const AlgebraElement& y) {
  return add(cfg, x, negate(cfg, y));
}

AlgebraElement scale(const Config& cfg, const AlgebraElement& x, const Int& c) {
  AlgebraElement r = x;
  for (auto& [v, co] : r.terms) co = co.scaled(c);
  return normalized(cfg, r);
}

AlgebraElement multiply(const Config& cfg, const AlgebraElement& x, const AlgebraElement& y,
                        std::optional<int> level) {
  check_dim(cfg, x);
  check_dim(cfg, y);
  AlgebraElement r;
  r.ring = join_rings(cfg, x.ring, y.ring);
  r.denom = x.denom * y.denom;
  long pn = level ? p_pow_long(cfg.p, *level) : 0;
  for (const auto& [u, cu] : x.terms)
    for (const auto& [v, cv] : y.terms) {
      ExpVec w(cfg.d);
      for (int i = 0; i < cfg.d; ++i) {
        long e = u[i] + v[i];
        if (level) {
          e %= pn;
          if (e < 0) e += pn;
        }
        w[i] = e;
      }
      Cyclotomic prod = cu * cv;
      auto [it, fresh] = r.terms.emplace(std::move(w), prod);
      if (!fresh) it->second = it->second + prod;
    }
  return normalized(cfg, r);
}

AlgebraElement reduce_level(const Config& cfg, const AlgebraElement& x, int level) {
  check_dim(cfg, x);
  long pn = p_pow_long(cfg.p, level);
  AlgebraElement r;
  r.ring = x.ring;
  r.denom = x.denom;
  for (const auto& [v, c] : x.terms) {
    ExpVec w(cfg.d);
    for (int i = 0; i < cfg.d; ++i) {
      long e = v[i] % pn;
      if (e < 0) e += pn;
      w[i] = e;
    }
    auto [it, fresh] = r.terms.emplace(std::move(w), c);
    if (!fresh) it->second = it->second + c;
  }
  return normalized(cfg, r);
}

AlgebraElement sharp(const Config& cfg, const AlgebraElement& x) {
  check_dim(cfg, x);
  AlgebraElement r;
  r.ring = x.ring;
  r.denom = x.denom;
  for (const auto& [v, c] : x.terms) {
    ExpVec w(cfg.d);
    for (int i = 0; i < cfg.d; ++i) w[i] = -v[i];
    r.terms.emplace(std::move(w), c);
  }
  return normalized(cfg, r);
}

AlgebraElement simple_element(const Config& cfg, const ExpVec& gamma_exps, unsigned l) {
  if (static_cast<int>(gamma_exps.size()) != cfg.d)
    throw input_error("simple_element: exponent vector length != d");
  bool unit_entry = false;
  for (long e : gamma_exps)
    if (e % cfg.p != 0) unit_entry = true;
  if (!unit_entry)
    throw input_error("simple_element: gamma lies in Gamma^p (all exponents divisible by p)");
  AlgebraElement f;
  if (l == 0) {
    // single Galois conjugate zeta = 1: gamma - 1
    f = subtract(cfg, AlgebraElement::monomial(cfg, gamma_exps), AlgebraElement::one(cfg));
    return f;
  }
  long step = p_pow_long(cfg.p, static_cast<int>(l - 1));
  for (long j = 0; j < cfg.p; ++j) {
    ExpVec w(cfg.d);
    for (int i = 0; i < cfg.d; ++i) w[i] = gamma_exps[i] * j * step;
    f = add(cfg, f, AlgebraElement::monomial(cfg, w));
  }
  return f;
}

void check_unit_character(const Config& cfg, const UnitCharacter& phi) {
  if (static_cast<int>(phi.units.size()) != cfg.d)
    throw input_error("unit character: value tuple length != d");
  const Int pM = cfg.p_precision();
  for (const Int& u : phi.units) {
    Int r = mod_reduce(u, Int(cfg.p));
    if (r != 1) throw input_error("unit character: value not = 1 mod p");
    if (cfg.p == 2 && mod_reduce(u, Int(4)) != 1)
      throw input_error("unit character: value not = 1 mod 4 (p = 2)");
    if (gcd(mod_reduce(u, pM), pM) != 1)
      throw input_error("unit character: value not invertible mod p^M");
  }
}

Int unit_character_value(const Config& cfg, const UnitCharacter& phi, const ExpVec& v) {
  const Int pM = cfg.p_precision();
  Int r(1);
  for (int i = 0; i < cfg.d; ++i) {
    if (v[i] == 0) continue;
    r = mod_reduce(r * mod_pow(phi.units[i], Int(v[i]), pM), pM);
  }
  return r;
}

UnitCharacter unit_character_inverse(const Config& cfg, const UnitCharacter& phi) {
  const Int pM = cfg.p_precision();
  UnitCharacter inv;
  for (const Int& u : phi.units) inv.units.push_back(mod_inverse(mod_reduce(u, pM), pM));
  return inv;
}

AlgebraElement twist_endo(const Config& cfg, const UnitCharacter& phi, const AlgebraElement& x,
                          bool inverse) {
  check_unit_character(cfg, phi);
  check_dim(cfg, x);
  if (x.ring == CoeffRing::Cyclotomic)
    throw input_error("twist_endo: cyclotomic coefficients not supported");
  if (x.denom != 1) throw input_error("twist_endo: element has a denominator");
  const Int pM = cfg.p_precision();
  AlgebraElement r;
  r.ring = CoeffRing::ModPM;
  for (const auto& [v, c] : x.terms) {
    Int u = unit_character_value(cfg, phi, v);
    if (!inverse) u = mod_inverse(u, pM);
    r.terms.emplace(v, Cyclotomic::integer(cfg.p, mod_reduce(c.integer_value() * u, pM)));
  }
  return normalized(cfg, r);
}

AlgebraElement norm_element(const Config& cfg, int n, int m) {
  if (n < m || m < 0) throw input_error("norm_element: requires n >= m >= 0");
  long pm = p_pow_long(cfg.p, m);
  long q = p_pow_long(cfg.p, n - m);
  AlgebraElement r;
  ExpVec w(cfg.d, 0);
  // kernel of Gamma_n -> Gamma_m: exponent vectors p^m * [0, p^{n-m})^d
  for (;;) {
    ExpVec e(cfg.d);
    for (int i = 0; i < cfg.d; ++i) e[i] = pm * w[i];
    r.terms.emplace(std::move(e), Cyclotomic::integer(cfg.p, Int(1)));
    int i = 0;
    while (i < cfg.d && ++w[i] == q) w[i++] = 0;
    if (i == cfg.d) break;
  }
  return r;
}

void check_character(const Config& cfg, const Character& omega) {
  if (static_cast<int>(omega.exps.size()) != cfg.d)
    throw input_error("character: exponent tuple length != d");
  if (omega.level < 0) throw input_error("character: negative level");
}

unsigned character_order_exponent(const Config& cfg, const Character& omega) {
  check_character(cfg, omega);
  long pn = p_pow_long(cfg.p, omega.level);
  unsigned min_v = static_cast<unsigned>(omega.level);
  for (long c : omega.exps) {
    long cc = ((c % pn) + pn) % pn;
    if (cc == 0) continue;
    unsigned v = static_cast<unsigned>(vp(Int(cc), cfg.p));
    min_v = std::min(min_v, v);
  }
  return static_cast<unsigned>(omega.level) - min_v;
}

Cyclotomic character_value(const Config& cfg, const Character& omega, const ExpVec& v) {
  long pn = p_pow_long(cfg.p, omega.level);
  unsigned l = character_order_exponent(cfg, omega);
  Int e(0);
  for (int i = 0; i < cfg.d; ++i) e += Int(omega.exps[i]) * Int(v[i]);
  e = mod_reduce(e, Int(pn));
  // e is divisible by p^{n-l}; rewrite as a power of zeta_{p^l}
  Int shift = p_pow(cfg.p, static_cast<unsigned long>(omega.level) - l);
  Int ep;
  mpz_divexact(ep.get_mpz_t(), e.get_mpz_t(), shift.get_mpz_t());
  return Cyclotomic::root_power(cfg.p, l, ep);
}

CharValue evaluate_character(const Config& cfg, const Character& omega, const AlgebraElement& x) {
  check_character(cfg, omega);
  check_dim(cfg, x);
  if (x.denom != 1) throw input_error("evaluate_character: element has a denominator");
  CharValue out;
  out.exact = (x.ring != CoeffRing::ModPM);
  Cyclotomic acc = Cyclotomic::integer(cfg.p, Int(0));
  for (const auto& [v, c] : x.terms) acc = acc + c * character_value(cfg, omega, v);
  out.value = acc.reduced_order();
  return out;
}

bool character_value_is_zero(const CharValue& v) {
  if (!v.exact)
    throw input_error("character value: zero test refused on inexact (mod-p^M) value");
  return v.value.is_zero();
}

std::vector<Character> galois_orbit(const Config& cfg, const Character& omega) {
  check_character(cfg, omega);
  long pn = p_pow_long(cfg.p, omega.level);
  std::set<std::vector<long>> seen;
  for (long u = 1; u < pn; ++u) {
    if (u % cfg.p == 0) continue;
    std::vector<long> t(cfg.d);
    for (int i = 0; i < cfg.d; ++i) t[i] = (omega.exps[i] % pn * u % pn + pn) % pn;
    seen.insert(std::move(t));
  }
  if (pn == 1) seen.insert(std::vector<long>(cfg.d, 0));
  std::vector<Character> orbit;
  for (const auto& t : seen) orbit.push_back(Character{omega.level, t});
  return orbit;
}

std::vector<ExpVec> group_vectors(const Config& cfg, int level) {
  long pn = p_pow_long(cfg.p, level);
  std::vector<ExpVec> out;
  ExpVec w(cfg.d, 0);
  for (;;) {
    out.push_back(w);
    int i = 0;
    while (i < cfg.d && ++w[i] == pn) w[i++] = 0;
    if (i == cfg.d) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Character> all_characters(const Config& cfg, int level) {
  std::vector<Character> out;
  for (auto& v : group_vectors(cfg, level)) out.push_back(Character{level, v});
  return out;
}

ExpVec SimpleForm::canonical_line() const {
  long g = 0;
  for (long e : direction) {
    Int gg = gcd(Int(g), Int(e));
    g = static_cast<long>(gg.get_si());
  }
  ExpVec v(direction.size());
  for (std::size_t i = 0; i < direction.size(); ++i) v[i] = direction[i] / g;
  for (long e : v) {
    if (e == 0) continue;
    if (e < 0)
      for (auto& x : v) x = -x;
    break;
  }
  return v;
}

std::optional<SimpleForm> detect_simple(const Config& cfg, const AlgebraElement& x) {
  if (x.ring != CoeffRing::ExactInt || x.denom != 1) return std::nullopt;
  const std::size_t t = x.terms.size();
  auto primitive = [&](const ExpVec& v) {
    for (long e : v)
      if (e % cfg.p != 0) return true;
    return false;
  };
  std::vector<std::pair<ExpVec, Int>> terms;
  for (const auto& [v, c] : x.terms) {
    if (!c.is_integer()) return std::nullopt;
    terms.emplace_back(v, c.integer_value());
  }
  if (t == 2) {
    ExpVec diff(cfg.d);
    for (int i = 0; i < cfg.d; ++i) diff[i] = terms[1].first[i] - terms[0].first[i];
    const Int &c0 = terms[0].second, &c1 = terms[1].second;
    if (c0 == -c1 && (c1 == 1 || c1 == -1)) {
      // unit * gamma^shift * (gamma^diff - 1), a simple element with zeta = 1
      if (!primitive(diff)) return std::nullopt;
      return SimpleForm{diff, 0, terms[0].first, c1};
    }
    if (cfg.p == 2 && c0 == c1 && (c0 == 1 || c0 == -1)) {
      // unit * gamma^shift * (gamma^step + 1) = Phi_{2^l} in the monomial
      long content = -1;
      for (long e : diff)
        if (e != 0) {
          long v = static_cast<long>(vp(Int(e), 2));
          content = content < 0 ? v : std::min(content, v);
        }
      if (content < 0) return std::nullopt;
      ExpVec base(cfg.d);
      long div = 1;
      for (long i = 0; i < content; ++i) div *= 2;
      for (int i = 0; i < cfg.d; ++i) base[i] = diff[i] / div;
      return SimpleForm{base, static_cast<unsigned>(content + 1), terms[0].first, c0};
    }
    return std::nullopt;
  }
  if (cfg.p > 2 && t == static_cast<std::size_t>(cfg.p)) {
    // p terms in arithmetic progression with equal unit coefficients
    const Int& c = terms[0].second;
    if (c != 1 && c != -1) return std::nullopt;
    for (const auto& [v, co] : terms)
      if (co != c) return std::nullopt;
    ExpVec step(cfg.d);
    for (int i = 0; i < cfg.d; ++i) step[i] = terms[1].first[i] - terms[0].first[i];
    for (std::size_t j = 0; j < t; ++j)
      for (int i = 0; i < cfg.d; ++i)
        if (terms[j].first[i] != terms[0].first[i] + static_cast<long>(j) * step[i])
          return std::nullopt;
    long content = -1;
    for (long e : step)
      if (e != 0) {
        long v = static_cast<long>(vp(Int(e), cfg.p));
        content = content < 0 ? v : std::min(content, v);
      }
    if (content < 0) return std::nullopt;
    long div = 1;
    for (long i = 0; i < content; ++i) div *= cfg.p;
    ExpVec base(cfg.d);
    for (int i = 0; i < cfg.d; ++i) base[i] = step[i] / div;
    if (!primitive(base)) return std::nullopt;
    return SimpleForm{base, static_cast<unsigned>(content + 1), terms[0].first, c};
  }
  return std::nullopt;
}

bool simple_same_ideal(const Config&, const SimpleForm& f, const SimpleForm& g) {
  return f.order_exponent == g.order_exponent && f.canonical_line() == g.canonical_line();
}

AlgebraElement element_pow(const Config& cfg, const AlgebraElement& x, int e,
                           std::optional<int> level) {
  if (e < 0) throw input_error("element_pow: negative exponent");
  AlgebraElement r = AlgebraElement::one(cfg);
  for (int i = 0; i < e; ++i) r = multiply(cfg, r, x, level);
  return r;
}

AlgebraElement idempotent(const Config& cfg, const Character& omega) {
  check_character(cfg, omega);
  long pn = p_pow_long(cfg.p, omega.level);
  AlgebraElement e;
  e.ring = CoeffRing::Cyclotomic;
  e.denom = p_pow(cfg.p, static_cast<unsigned long>(omega.level) * cfg.d);
  for (const auto& v : group_vectors(cfg, omega.level)) {
    ExpVec mv(cfg.d);
    for (int i = 0; i < cfg.d; ++i) mv[i] = (pn - v[i]) % pn;
    Cyclotomic c = character_value(cfg, omega, mv);  // omega(gamma^{-1})
    if (!c.is_zero()) e.terms.emplace(v, std::move(c));
  }
  return normalized(cfg, e);
}

}  // namespace iwalab
