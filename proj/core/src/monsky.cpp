#include "iwalab/monsky.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <thread>

namespace iwalab {

namespace {

long p_pow_long(long p, int n) {
  long r = 1;
  for (int i = 0; i < n; ++i) r *= p;
  return r;
}

void check_exact(const AlgebraElement& xi, const std::string& what) {
  if (xi.ring != CoeffRing::ExactInt || xi.denom != 1)
    throw input_error(what + ": exact integer coefficients required");
}

void check_budget(const Config& cfg, int level, const EnumerationOptions& opts,
                  const std::string& what) {
  long count = 1;
  for (int i = 0; i < cfg.d * level; ++i) {
    count *= cfg.p;
    if (count > opts.budget)
      throw budget_error(
          what + ": enumerating p^(d*n) = " +
              Int(p_pow(cfg.p, static_cast<unsigned long>(cfg.d) * level)).get_str() +
              " characters exceeds the budget " + std::to_string(opts.budget) +
              " (raise --budget or IWALAB_BUDGET)",
          p_pow_long(cfg.p, cfg.d * level));
  }
}

}  // namespace

std::vector<Character> zero_set_level(const Config& cfg, const AlgebraElement& xi, int level,
                                      const EnumerationOptions& opts) {
  check_exact(xi, "zero_set_level");
  check_budget(cfg, level, opts, "zero_set_level");
  auto chars = all_characters(cfg, level);
  int jobs = std::max(1, opts.jobs);
  std::vector<std::vector<Character>> parts(jobs);
  auto work = [&](int w) {
    for (std::size_t i = w; i < chars.size(); i += static_cast<std::size_t>(jobs)) {
      auto v = evaluate_character(cfg, chars[i], xi);
      if (character_value_is_zero(v)) parts[w].push_back(chars[i]);
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::vector<Character> zeros;
  for (auto& p : parts) zeros.insert(zeros.end(), p.begin(), p.end());
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

bool flat_is_expandable(const Config& cfg, const FlatLevel& flat) {
  if (flat.basis.rows() == 0) return false;
  SmithForm s = smith_form(flat.basis);
  if (s.rank < flat.basis.rows()) return false;
  for (const Int& d : s.divisors)
    if (mod_reduce(d, Int(cfg.p)) == 0) return false;
  return true;
}

std::vector<Character> flat_characters(const Config& cfg, const FlatLevel& flat,
                                       const EnumerationOptions& opts) {
  check_budget(cfg, flat.level, opts, "flat_characters");
  long pn = p_pow_long(cfg.p, flat.level);
  std::vector<Character> out;
  for (const auto& c : all_characters(cfg, flat.level)) {
    bool in = true;
    for (std::size_t i = 0; i < flat.basis.rows() && in; ++i) {
      Int acc(0);
      for (int j = 0; j < cfg.d; ++j) acc += flat.basis.at(i, j) * Int(c.exps[j]);
      if (mod_reduce(acc - Int(flat.targets[i]), Int(pn)) != 0) in = false;
    }
    if (in) out.push_back(c);
  }
  return out;
}

namespace {

// canonical representatives of primitive row vectors mod p^n up to unit scale
std::vector<std::vector<long>> canonical_directions(const Config& cfg, int level) {
  long pn = p_pow_long(cfg.p, level);
  std::set<std::vector<long>> seen;
  std::vector<long> w(cfg.d, 0);
  for (;;) {
    bool primitive = false;
    for (long e : w)
      if (e % cfg.p != 0) primitive = true;
    if (primitive) {
      Int u(0);
      for (long e : w)
        if (e % cfg.p != 0) {
          u = mod_inverse(Int(e), Int(pn));
          break;
        }
      std::vector<long> canon(cfg.d);
      for (int i = 0; i < cfg.d; ++i)
        canon[i] = static_cast<long>(mod_reduce(Int(w[i]) * u, Int(pn)).get_si());
      seen.insert(std::move(canon));
    }
    int i = 0;
    while (i < cfg.d && ++w[i] == pn) w[i++] = 0;
    if (i == cfg.d) break;
  }
  return {seen.begin(), seen.end()};
}

long dot_mod(const std::vector<long>& b, const std::vector<long>& c, long pn) {
  Int acc(0);
  for (std::size_t i = 0; i < b.size(); ++i) acc += Int(b[i]) * Int(c[i]);
  return static_cast<long>(mod_reduce(acc, Int(pn)).get_si());
}

}  // namespace

ZeroSetReport detect_flats(const Config& cfg, const std::vector<Character>& zeros, int level,
                           const EnumerationOptions& opts) {
  check_budget(cfg, level, opts, "detect_flats");
  ZeroSetReport rep;
  rep.level = level;
  rep.zeros = zeros;
  std::sort(rep.zeros.begin(), rep.zeros.end());
  if (rep.zeros.empty()) return rep;

  long pn = p_pow_long(cfg.p, level);
  std::set<std::vector<long>> zero_set;
  for (const auto& z : rep.zeros) zero_set.insert(z.exps);
  std::set<std::vector<long>> covered;

  auto add_flat = [&](const FlatLevel& f, const std::vector<std::vector<long>>& members) {
    bool fresh = false;
    for (const auto& m : members)
      if (!covered.count(m)) fresh = true;
    if (!fresh) return;
    for (const auto& m : members) covered.insert(m);
    rep.cover.push_back(f);
  };

  auto dirs = canonical_directions(cfg, level);

  // codimension 1: full cosets cut by one primitive direction
  {
    long coset_size = 1;
    for (int i = 0; i < cfg.d - 1; ++i) coset_size *= pn;
    for (const auto& b : dirs) {
      std::map<long, std::vector<std::vector<long>>> buckets;
      for (const auto& z : zero_set) buckets[dot_mod(b, z, pn)].push_back(z);
      for (auto& [t, members] : buckets) {
        if (static_cast<long>(members.size()) != coset_size) continue;
        FlatLevel f;
        f.level = level;
        f.basis = IntMat(1, cfg.d);
        for (int i = 0; i < cfg.d; ++i) f.basis.at(0, i) = b[i];
        f.targets = {t};
        add_flat(f, members);
      }
    }
  }

  // intermediate codimensions (only d >= 3 has any): combinations of
  // canonical directions, guarded by the budget
  for (int k = 2; k < cfg.d; ++k) {
    double combos = 1;
    for (int i = 0; i < k; ++i) combos *= static_cast<double>(dirs.size() - i);
    if (combos > static_cast<double>(opts.budget) * 64) {
      rep.full_codim_scan = false;
      break;
    }
    if (dirs.size() < static_cast<std::size_t>(k)) continue;
    long cs = 1;
    for (int i = 0; i < cfg.d - k; ++i) cs *= pn;
    std::vector<std::size_t> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    auto next_comb = [&]() {
      int i = k - 1;
      while (i >= 0 && pick[i] == dirs.size() - (k - i)) --i;
      if (i < 0) return false;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
      return true;
    };
    do {
      IntMat B(k, cfg.d);
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < cfg.d; ++c) B.at(r, c) = dirs[pick[r]][c];
      FlatLevel probe{level, B, std::vector<long>(k, 0)};
      if (!flat_is_expandable(cfg, probe)) continue;
      std::map<std::vector<long>, std::vector<std::vector<long>>> buckets;
      for (const auto& z : zero_set) {
        std::vector<long> key(k);
        for (int r = 0; r < k; ++r) key[r] = dot_mod(dirs[pick[r]], z, pn);
        buckets[key].push_back(z);
      }
      for (auto& [t, members] : buckets) {
        if (static_cast<long>(members.size()) != cs) continue;
        add_flat(FlatLevel{level, B, t}, members);
      }
    } while (next_comb());
  }

  // codimension d: every remaining zero is a point flat
  for (const auto& z : zero_set) {
    if (covered.count(z)) continue;
    FlatLevel f;
    f.level = level;
    f.basis = IntMat::identity(cfg.d);
    f.targets = z;
    add_flat(f, {z});
  }

  for (const auto& z : zero_set)
    if (!covered.count(z)) rep.residual.push_back(Character{level, z});
  rep.cover_exact = rep.residual.empty();
  return rep;
}

NsReport ns_hypothesis_level(const Config& cfg, const AlgebraElement& xi, int level,
                             const EnumerationOptions& opts) {
  NsReport rep;
  rep.level = level;
  auto zeros = zero_set_level(cfg, xi, level, opts);
  rep.zero_report = detect_flats(cfg, zeros, level, opts);
  if (zeros.empty()) {
    rep.verdict = NsVerdict::Holds;
    rep.note = "zero set empty at level " + std::to_string(level);
    return rep;
  }
  for (const auto& f : rep.zero_report.cover) {
    if (f.codim() == 1) {
      rep.verdict = NsVerdict::Violated;
      rep.witness = f;
      rep.note = "full codimension-one flat of zeros at level " + std::to_string(level) +
                 "; necessary but not sufficient for a simple divisor";
      return rep;
    }
  }
  if (!rep.zero_report.cover_exact) {
    rep.verdict = NsVerdict::Undetermined;
    rep.note = "zero set not fully covered at level " + std::to_string(level);
    return rep;
  }
  rep.verdict = NsVerdict::Holds;
  rep.note = "zero set covered by flats of codimension >= 2 at level " + std::to_string(level);
  return rep;
}

PhiPair construct_phi_pair(const Config& cfg, const std::vector<FlatLevel>& flats,
                           const EnumerationOptions& opts) {
  PhiPair out;
  out.phi1 = AlgebraElement::one(cfg);
  out.phi2 = AlgebraElement::one(cfg);
  if (flats.empty()) return out;

  std::vector<ExpVec> chosen;
  auto independent_mod_p = [&](const ExpVec& s1, const ExpVec& s2) {
    for (int i = 0; i < cfg.d; ++i)
      for (int j = i + 1; j < cfg.d; ++j) {
        Int det = Int(s1[i]) * Int(s2[j]) - Int(s1[j]) * Int(s2[i]);
        if (mod_reduce(det, Int(cfg.p)) != 0) return true;
      }
    return false;
  };

  for (std::size_t jf = 0; jf < flats.size(); ++jf) {
    const FlatLevel& flat = flats[jf];
    if (flat.codim() < 2)
      throw input_error("construct_phi_pair: flat " + std::to_string(jf) +
                        " has codimension < 2");
    if (!flat_is_expandable(cfg, flat))
      throw input_error("construct_phi_pair: flat " + std::to_string(jf) +
                        " rows are not expandable to a basis");
    long pn = p_pow_long(cfg.p, flat.level);
    const std::size_t k = flat.codim();

    // candidate directions inside the flat's direction subgroup: small
    // integer combinations of the rows, smallest first
    std::vector<std::vector<long>> combos;
    std::vector<long> x(k, 0);
    for (;;) {
      bool nonzero = false;
      for (long e : x)
        if (e != 0) nonzero = true;
      if (nonzero) combos.push_back(x);
      std::size_t i = 0;
      while (i < k && ++x[i] == 3) x[i++] = 0;
      if (i == k) break;
    }
    std::sort(combos.begin(), combos.end(), [](const auto& a, const auto& b) {
      long sa = 0, sb = 0;
      for (long e : a) sa += e;
      for (long e : b) sb += e;
      if (sa != sb) return sa < sb;
      return a > b;  // earlier flat rows first
    });

    std::vector<std::pair<ExpVec, long>> picks;
    for (const auto& combo : combos) {
      if (picks.size() == 2) break;
      ExpVec sigma(cfg.d, 0);
      for (std::size_t r = 0; r < k; ++r)
        for (int c = 0; c < cfg.d; ++c)
          sigma[c] += combo[r] * static_cast<long>(flat.basis.at(r, c).get_si());
      bool primitive = false;
      for (long e : sigma)
        if (e % cfg.p != 0) primitive = true;
      if (!primitive) continue;
      bool indep = true;
      for (const auto& prev : chosen)
        if (!independent_mod_p(prev, sigma)) indep = false;
      if (!picks.empty() && !independent_mod_p(picks[0].first, sigma)) indep = false;
      if (!indep) continue;
      Int e(0);
      for (std::size_t r = 0; r < k; ++r) e += Int(combo[r]) * Int(flat.targets[r]);
      picks.emplace_back(sigma, static_cast<long>(mod_reduce(e, Int(pn)).get_si()));
    }
    if (picks.size() < 2)
      throw input_error(
          "construct_phi_pair: could not find two independent directions in flat " +
          std::to_string(jf) + " (obstruction: candidate combinations exhausted)");

    for (int which = 0; which < 2; ++which) {
      const auto& [sigma, tval] = picks[which];
      unsigned l = 0;
      if (tval != 0)
        l = static_cast<unsigned>(flat.level) - static_cast<unsigned>(vp(Int(tval), cfg.p));
      AlgebraElement f = simple_element(cfg, sigma, l);
      auto form = detect_simple(cfg, f);
      if (!form) throw input_error("construct_phi_pair: internal simple-form detection failed");
      if (which == 0) {
        out.phi1 = multiply(cfg, out.phi1, f);
        out.factors1.push_back(*form);
      } else {
        out.phi2 = multiply(cfg, out.phi2, f);
        out.factors2.push_back(*form);
      }
      chosen.push_back(sigma);
    }
  }

  for (const auto& f1 : out.factors1)
    for (const auto& f2 : out.factors2)
      if (simple_same_ideal(cfg, f1, f2))
        throw input_error("construct_phi_pair: factor ideals not coprime");
  for (const auto& flat : flats) {
    for (const auto& omega : flat_characters(cfg, flat, opts)) {
      if (!character_value_is_zero(evaluate_character(cfg, omega, out.phi1)) ||
          !character_value_is_zero(evaluate_character(cfg, omega, out.phi2)))
        throw input_error("construct_phi_pair: product does not vanish on a flat character");
    }
  }
  return out;
}

namespace {

// multiplicative content of a line-supported element: unit rational roots
// (simploid beta in Z_p inter Q) and cyclotomic factors (simple elements)
struct LineFactors {
  ExpVec direction;
  std::vector<Int> unit_roots;
  std::vector<unsigned> cyclotomic_orders;
};

std::optional<LineFactors> detect_line_factors(const Config& cfg, const AlgebraElement& xi) {
  std::vector<std::pair<ExpVec, Int>> terms;
  for (const auto& [v, c] : xi.terms) {
    if (!c.is_integer()) return std::nullopt;
    terms.emplace_back(v, c.integer_value());
  }
  if (terms.empty()) return std::nullopt;
  LineFactors out;
  if (terms.size() == 1) {
    out.direction = ExpVec(cfg.d, 0);
    return out;  // constant times a monomial: no simploid factors
  }
  ExpVec base = terms[0].first;
  ExpVec dir(cfg.d, 0);
  for (std::size_t t = 1; t < terms.size(); ++t) {
    ExpVec diff(cfg.d);
    for (int i = 0; i < cfg.d; ++i) diff[i] = terms[t].first[i] - base[i];
    if (dir == ExpVec(cfg.d, 0)) dir = diff;
    for (int i = 0; i < cfg.d; ++i)
      for (int j = i + 1; j < cfg.d; ++j)
        if (Int(dir[i]) * Int(diff[j]) != Int(dir[j]) * Int(diff[i])) return std::nullopt;
  }
  Int g(0);
  for (long e : dir) g = gcd(g, Int(e));
  ExpVec prim(cfg.d);
  for (int i = 0; i < cfg.d; ++i) prim[i] = dir[i] / static_cast<long>(g.get_si());
  out.direction = prim;

  int pivot = 0;
  while (prim[pivot] == 0) ++pivot;
  std::map<long, Int> poly;
  long maxdeg = 0, mindeg = 0;
  for (const auto& [w, c] : terms) {
    long num = w[pivot] - base[pivot];
    if (num % prim[pivot] != 0) return std::nullopt;
    long deg = num / prim[pivot];
    poly[deg] = c;
    maxdeg = std::max(maxdeg, deg);
    mindeg = std::min(mindeg, deg);
  }
  std::vector<Int> coeffs(maxdeg - mindeg + 1, Int(0));
  for (auto& [deg, c] : poly) coeffs[deg - mindeg] = c;

  auto divide_exact = [&](const std::vector<Int>& divisor) -> bool {
    if (coeffs.size() < divisor.size()) return false;
    std::vector<Int> rem = coeffs;
    std::vector<Int> quot(rem.size() - divisor.size() + 1, Int(0));
    for (std::size_t k = quot.size(); k-- > 0;) {
      Int top = rem[k + divisor.size() - 1];
      if (top == 0) continue;
      if (!mpz_divisible_p(top.get_mpz_t(), divisor.back().get_mpz_t())) return false;
      Int q;
      mpz_divexact(q.get_mpz_t(), top.get_mpz_t(), divisor.back().get_mpz_t());
      quot[k] = q;
      for (std::size_t i = 0; i < divisor.size(); ++i) rem[k + i] -= q * divisor[i];
    }
    for (const Int& c : rem)
      if (c != 0) return false;
    coeffs = quot;
    return true;
  };

  for (unsigned l = 0; l <= 8; ++l) {
    long deg = euler_phi_p_power(cfg.p, l);
    if (static_cast<std::size_t>(deg) + 1 > coeffs.size()) break;
    std::vector<Int> phi_poly;
    if (l == 0) {
      phi_poly = {Int(-1), Int(1)};
    } else {
      long step = p_pow_long(cfg.p, static_cast<int>(l - 1));
      phi_poly.assign(deg + 1, Int(0));
      for (long j = 0; j < cfg.p; ++j) phi_poly[j * step] = 1;
    }
    while (coeffs.size() > 1 && divide_exact(phi_poly)) out.cyclotomic_orders.push_back(l);
  }

  // rational integer roots by trial on the divisors of the constant term
  bool progress = true;
  while (progress && coeffs.size() > 1) {
    progress = false;
    if (coeffs.front() == 0) return std::nullopt;
    Int c0 = abs(coeffs.front());
    std::vector<Int> cands;
    for (Int cand(1); cand * cand <= c0; ++cand) {
      if (!mpz_divisible_p(c0.get_mpz_t(), cand.get_mpz_t())) continue;
      cands.push_back(cand);
      cands.push_back(c0 / cand);
    }
    for (const Int& base_root : cands) {
      if (progress) break;
      for (int sign = 0; sign < 2 && !progress; ++sign) {
        Int r = sign ? Int(-base_root) : base_root;
        Int val(0);
        for (std::size_t k = coeffs.size(); k-- > 0;) val = val * r + coeffs[k];
        if (val != 0) continue;
        // synthetic division by (t - r)
        const std::size_t D = coeffs.size() - 1;
        std::vector<Int> q(D);
        q[D - 1] = coeffs[D];
        for (std::size_t k = D - 1; k-- > 0;) q[k] = coeffs[k + 1] + r * q[k + 1];
        coeffs = q;
        if (mod_reduce(r, Int(cfg.p)) != 0) out.unit_roots.push_back(r);
        progress = true;
      }
    }
  }

  if (coeffs.size() > 1) return std::nullopt;  // unrecognized factor left over
  return out;
}

// true when z^{p^j} = 1 mod p^M for some j <= jmax: z cannot be certified to
// stay off the p-power roots of unity at this precision
bool power_hits_one(const Config& cfg, const Int& z, int jmax, const Int& pM) {
  Int w = mod_reduce(z, pM);
  for (int j = 0; j <= jmax; ++j) {
    if (w == 1) return true;
    w = mod_pow(w, Int(cfg.p), pM);
  }
  return false;
}

}  // namespace

UnitCharacter find_nonsimple_twist(const Config& cfg, const AlgebraElement& xi,
                                   const TwistSearchOptions& opts) {
  check_exact(xi, "find_nonsimple_twist");
  if (xi.is_zero()) throw input_error("find_nonsimple_twist: xi = 0");
  auto fac = detect_line_factors(cfg, xi);
  if (!fac)
    throw input_error(
        "find_nonsimple_twist: simploid factors not recognizable in canonical "
        "single-monomial form (unknown)");

  const Int pM = cfg.p_precision();
  int jmax = opts.exponent_bound_exp >= 0 ? opts.exponent_bound_exp : cfg.precision / 2;
  unsigned k = std::max(1u, opts.order_bound);
  if (cfg.p == 2) k = std::max(2u, k);
  Int pk = p_pow(cfg.p, k);

  if (fac->unit_roots.empty() && fac->cyclotomic_orders.empty())
    return UnitCharacter::trivial(cfg.d);

  long range = std::min<long>(cfg.p * cfg.p, 9);
  std::vector<long> t(cfg.d, 0);
  long tried = 0;
  for (;;) {
    UnitCharacter phi;
    for (int i = 0; i < cfg.d; ++i) phi.units.push_back(mod_reduce(Int(1) + pk * Int(t[i]), pM));
    ++tried;
    bool ok = true;
    Int u = unit_character_value(cfg, phi, fac->direction);
    Int uinv = mod_inverse(u, pM);
    // a simple factor f_{gamma,zeta}: (phi(gamma) zeta)^{p^j} = 1 forces
    // phi(gamma)^{p^j} = 1; the sharp factor imposes the inverse condition
    if (!fac->cyclotomic_orders.empty())
      if (power_hits_one(cfg, u, jmax, pM) || power_hits_one(cfg, uinv, jmax, pM)) ok = false;
    for (const Int& c : fac->unit_roots) {
      if (!ok) break;
      Int cm = mod_reduce(c, pM);
      Int cinv = mod_inverse(cm, pM);
      if (power_hits_one(cfg, mod_reduce(u * cm, pM), jmax, pM) ||
          power_hits_one(cfg, mod_reduce(u * cinv, pM), jmax, pM) ||
          power_hits_one(cfg, mod_reduce(uinv * cm, pM), jmax, pM) ||
          power_hits_one(cfg, mod_reduce(uinv * cinv, pM), jmax, pM))
        ok = false;
    }
    if (ok) return phi;
    if (tried >= opts.search_budget)
      throw input_error("find_nonsimple_twist: no candidate within the search budget");
    int i = 0;
    while (i < cfg.d && ++t[i] == range) t[i++] = 0;
    if (i == cfg.d) throw input_error("find_nonsimple_twist: candidate tuples exhausted");
  }
}

}  // namespace iwalab
