#include "iwalab/module.hpp"

#include <algorithm>
#include <sstream>

namespace iwalab {

namespace {

long p_pow_long(long p, int n) {
  long r = 1;
  for (int i = 0; i < n; ++i) r *= p;
  return r;
}

// reduce entry (i, j) modulo the divisor of row i
void reduce_rows_mod_divisors(IntMat& m, const std::vector<Int>& divisors) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = mod_reduce(m.at(i, j), divisors[i]);
}

bool equal_mod_divisors(const IntMat& a, const IntMat& b, const std::vector<Int>& divisors) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (mod_reduce(a.at(i, j) - b.at(i, j), divisors[i]) != 0) return false;
  return true;
}

// columns of kernel of [A | diag(divisors)], restricted to the A-block
IntMat lattice_kernel_cols(const IntMat& A, const std::vector<Int>& divisors) {
  IntMat diag(divisors.size(), divisors.size());
  for (std::size_t i = 0; i < divisors.size(); ++i) diag.at(i, i) = divisors[i];
  IntMat K = kernel_lattice(A.hstack(diag));
  std::vector<std::size_t> rows(A.cols());
  for (std::size_t i = 0; i < A.cols(); ++i) rows[i] = i;
  std::vector<std::size_t> cols(K.cols());
  for (std::size_t j = 0; j < K.cols(); ++j) cols[j] = j;
  return K.submatrix(rows, cols);
}

std::optional<std::vector<Int>> solve_mod_divisors(const IntMat& A, const std::vector<Int>& divisors,
                                                   const std::vector<Int>& b) {
  IntMat diag(divisors.size(), divisors.size());
  for (std::size_t i = 0; i < divisors.size(); ++i) diag.at(i, i) = divisors[i];
  auto z = solve_integer(A.hstack(diag), b);
  if (!z) return std::nullopt;
  return std::vector<Int>(z->begin(), z->begin() + A.cols());
}

std::optional<IntMat> inverse_mod_divisors(const IntMat& A, const std::vector<Int>& divisors) {
  const std::size_t r = A.rows();
  IntMat X(r, r);
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<Int> e(r, Int(0));
    e[j] = 1;
    auto x = solve_mod_divisors(A, divisors, e);
    if (!x) return std::nullopt;
    X.set_column(j, *x);
  }
  reduce_rows_mod_divisors(X, divisors);
  return X;
}

IntMat mat_pow_mod(const IntMat& A, long e, const std::vector<Int>& divisors) {
  IntMat r = IntMat::identity(A.rows());
  IntMat base = A;
  long k = e;
  while (k > 0) {
    if (k & 1) {
      r = r * base;
      reduce_rows_mod_divisors(r, divisors);
    }
    base = base * base;
    reduce_rows_mod_divisors(base, divisors);
    k >>= 1;
  }
  return r;
}

Int element_order_in(const std::vector<Int>& divisors, const std::vector<Int>& x) {
  Int ord(1);
  for (std::size_t i = 0; i < divisors.size(); ++i) {
    Int xi = mod_reduce(x[i], divisors[i]);
    if (xi == 0) continue;
    Int o = divisors[i] / gcd(divisors[i], xi);
    ord = ord * o / gcd(ord, o);
  }
  return ord;
}

}  // namespace

Int FiniteModule::order() const {
  Int o(1);
  for (const Int& q : divisors) o *= q;
  return o;
}

Int FiniteModule::exponent() const { return divisors.empty() ? Int(1) : divisors.back(); }

std::vector<Int> FiniteModule::reduce_element(std::vector<Int> x) const {
  if (x.size() != rank()) throw input_error("module element: wrong length");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = mod_reduce(x[i], divisors[i]);
  return x;
}

bool FiniteModule::element_is_zero(const std::vector<Int>& x) const {
  auto r = reduce_element(x);
  return std::all_of(r.begin(), r.end(), [](const Int& v) { return v == 0; });
}

FiniteModule zero_module(const Config& cfg, int level) {
  FiniteModule m;
  m.cfg = cfg;
  m.level = level;
  m.actions.assign(cfg.d, IntMat(0, 0));
  m.action_invs.assign(cfg.d, IntMat(0, 0));
  m.ambient_rank = 0;
  m.coords = IntMat(0, 0);
  m.section = IntMat(0, 0);
  return m;
}

FiniteModule presented_module(const Config& cfg, int level, std::size_t ambient_rank,
                              const IntMat& relations, const std::vector<IntMat>& actions,
                              TorsionPolicy policy, bool strict) {
  cfg.check();
  if (level < 0) throw input_error("module: negative level");
  if (actions.size() != static_cast<std::size_t>(cfg.d))
    throw input_error("module: expected one action matrix per generator");
  if (relations.rows() != ambient_rank && relations.cols() != 0)
    throw input_error("module: relation matrix must have one row per generator");
  for (const auto& A : actions)
    if (A.rows() != ambient_rank || A.cols() != ambient_rank)
      throw input_error("module: action matrix has wrong shape");

  IntMat rel = relations.rows() == ambient_rank ? relations : IntMat(ambient_rank, 0);
  SmithForm s = smith_form(rel);

  std::vector<Int> full_div(ambient_rank);
  for (std::size_t i = 0; i < ambient_rank; ++i) full_div[i] = s.divisor_at(i);

  std::vector<std::size_t> surv;
  std::vector<Int> q, mult;
  for (std::size_t i = 0; i < ambient_rank; ++i) {
    if (full_div[i] == 0) {
      if (policy == TorsionPolicy::RequireFinite)
        throw input_error("module: quotient is not finite (free coordinate present)");
      continue;
    }
    unsigned long a = full_div[i] == 1 ? 0 : vp(full_div[i], cfg.p);
    Int ppart = p_pow(cfg.p, a);
    if (ppart == 1) continue;  // unit or prime-to-p coordinate
    surv.push_back(i);
    q.push_back(ppart);
    Int m_i;
    mpz_divexact(m_i.get_mpz_t(), full_div[i].get_mpz_t(), ppart.get_mpz_t());
    mult.push_back(m_i);
  }

  const std::size_t r = surv.size();
  FiniteModule m;
  m.cfg = cfg;
  m.level = level;
  m.divisors = q;
  m.ambient_rank = ambient_rank;

  // coordinates: C = rows of U at the surviving indices
  m.coords = IntMat(r, ambient_rank);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < ambient_rank; ++j)
      m.coords.at(i, j) = mod_reduce(s.U.at(surv[i], j), q[i]);

  // section: columns of U^{-1}, corrected for the prime-to-p multiplier
  m.section = IntMat(ambient_rank, r);
  for (std::size_t j = 0; j < r; ++j) {
    Int scale = mult[j] == 1 ? Int(1) : mult[j] * mod_inverse(mod_reduce(mult[j], q[j]), q[j]);
    for (std::size_t i = 0; i < ambient_rank; ++i)
      m.section.at(i, j) = s.Ui.at(i, surv[j]) * scale;
  }

  for (const auto& A : actions) {
    IntMat B = s.U * A * s.Ui;  // action on SNF coordinates of the full quotient
    // A must carry the relation lattice into itself
    for (std::size_t j = 0; j < ambient_rank; ++j) {
      if (full_div[j] == 0) continue;
      for (std::size_t i = 0; i < ambient_rank; ++i) {
        Int x = full_div[j] * B.at(i, j);
        if (full_div[i] == 0 ? x != 0 : mod_reduce(x, full_div[i]) != 0)
          throw input_error("module: action does not preserve the relation lattice");
      }
    }
    IntMat sub(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) sub.at(i, j) = mod_reduce(B.at(surv[i], surv[j]), q[i]);
    m.actions.push_back(std::move(sub));
  }

  for (const auto& A : m.actions) {
    auto inv = inverse_mod_divisors(A, m.divisors);
    m.action_invs.push_back(inv ? *inv : IntMat(0, 0));
  }

  if (strict) {
    auto bad = module_invariant_violations(m);
    if (!bad.empty()) throw input_error("module: " + bad.front());
  }
  return m;
}

FiniteModule module_from_divisors(const Config& cfg, int level, std::vector<Int> divisors,
                                  std::vector<IntMat> actions, bool strict) {
  const std::size_t g = divisors.size();
  IntMat rel(g, g);
  for (std::size_t i = 0; i < g; ++i) rel.at(i, i) = divisors[i];
  return presented_module(cfg, level, g, rel, actions, TorsionPolicy::RequireFinite, strict);
}

std::vector<std::string> module_invariant_violations(const FiniteModule& m) {
  std::vector<std::string> out;
  const std::size_t r = m.rank();
  for (std::size_t k = 0; k < m.actions.size(); ++k) {
    const IntMat& A = m.actions[k];
    if (A.rows() != r || A.cols() != r) {
      out.push_back("action " + std::to_string(k + 1) + " has wrong shape");
      continue;
    }
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < r; ++i)
        if (mod_reduce(m.divisors[j] * A.at(i, j), m.divisors[i]) != 0)
          out.push_back("action " + std::to_string(k + 1) + " not well defined at entry (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
  }
  for (std::size_t k = 0; k < m.actions.size(); ++k)
    for (std::size_t l = k + 1; l < m.actions.size(); ++l) {
      if (!equal_mod_divisors(m.actions[k] * m.actions[l], m.actions[l] * m.actions[k],
                              m.divisors))
        out.push_back("actions " + std::to_string(k + 1) + " and " + std::to_string(l + 1) +
                      " do not commute");
    }
  long pn = p_pow_long(m.cfg.p, m.level);
  for (std::size_t k = 0; k < m.actions.size(); ++k) {
    if (m.actions[k].rows() != r) continue;
    if (k < m.action_invs.size() && m.action_invs[k].rows() != r)
      out.push_back("action " + std::to_string(k + 1) + " is not invertible");
    IntMat pw = mat_pow_mod(m.actions[k], pn, m.divisors);
    if (!equal_mod_divisors(pw, IntMat::identity(r), m.divisors))
      out.push_back("action " + std::to_string(k + 1) +
                    " does not factor through level " + std::to_string(m.level));
  }
  return out;
}

bool same_presentation(const FiniteModule& a, const FiniteModule& b) {
  return a.divisors == b.divisors && a.actions == b.actions;
}

IntMat monomial_action(const FiniteModule& m, const ExpVec& v) {
  if (v.size() != static_cast<std::size_t>(m.cfg.d))
    throw input_error("monomial_action: exponent length != d");
  long pn = p_pow_long(m.cfg.p, m.level);
  IntMat r = IntMat::identity(m.rank());
  for (int i = 0; i < m.cfg.d; ++i) {
    long e = ((v[i] % pn) + pn) % pn;
    if (e == 0) continue;
    r = r * mat_pow_mod(m.actions[i], e, m.divisors);
    reduce_rows_mod_divisors(r, m.divisors);
  }
  return r;
}

IntMat element_action(const FiniteModule& m, const AlgebraElement& lambda,
                      std::optional<int> declared_level) {
  if (declared_level && *declared_level != m.level)
    throw input_error("act: element level " + std::to_string(*declared_level) +
                      " does not match module level " + std::to_string(m.level));
  if (lambda.ring == CoeffRing::Cyclotomic)
    throw input_error("act: cyclotomic coefficients cannot act on a module");
  if (lambda.denom != 1) throw input_error("act: element has a denominator");
  IntMat r(m.rank(), m.rank());
  for (const auto& [v, c] : lambda.terms) {
    Int cv = c.integer_value();
    r = r + monomial_action(m, v).scaled(cv);
  }
  reduce_rows_mod_divisors(r, m.divisors);
  return r;
}

std::vector<Int> act(const FiniteModule& m, const AlgebraElement& lambda,
                     const std::vector<Int>& x, std::optional<int> declared_level) {
  return m.reduce_element(element_action(m, lambda, declared_level).apply(x));
}

ModuleMap ModuleMap::make(FiniteModule src, FiniteModule tgt, IntMat mat,
                          const std::string& what) {
  if (mat.rows() != tgt.rank() || mat.cols() != src.rank())
    throw input_error(what + ": matrix shape mismatch");
  for (std::size_t j = 0; j < src.rank(); ++j)
    for (std::size_t i = 0; i < tgt.rank(); ++i)
      if (mod_reduce(src.divisors[j] * mat.at(i, j), tgt.divisors[i]) != 0)
        throw input_error(what + ": not well defined on generator " + std::to_string(j));
  reduce_rows_mod_divisors(mat, tgt.divisors);
  return ModuleMap{std::move(src), std::move(tgt), std::move(mat)};
}

ModuleMap ModuleMap::identity(const FiniteModule& m) {
  return ModuleMap{m, m, IntMat::identity(m.rank())};
}

ModuleMap ModuleMap::zero(const FiniteModule& src, const FiniteModule& tgt) {
  return ModuleMap{src, tgt, IntMat(tgt.rank(), src.rank())};
}

std::vector<Int> ModuleMap::apply(const std::vector<Int>& x) const {
  return tgt.reduce_element(mat.apply(src.reduce_element(x)));
}

bool ModuleMap::is_equivariant() const {
  for (int i = 0; i < src.cfg.d; ++i)
    if (!equal_mod_divisors(mat * src.actions[i], tgt.actions[i] * mat, tgt.divisors))
      return false;
  return true;
}

bool ModuleMap::is_injective() const {
  IntMat K = lattice_kernel_cols(mat, tgt.divisors);
  for (std::size_t j = 0; j < K.cols(); ++j)
    if (!src.element_is_zero(K.column_vec(j))) return false;
  return true;
}

bool ModuleMap::is_surjective() const {
  IntMat diag(tgt.rank(), tgt.rank());
  for (std::size_t i = 0; i < tgt.rank(); ++i) diag.at(i, i) = tgt.divisors[i];
  SmithForm s = smith_form(mat.hstack(diag));
  for (std::size_t i = 0; i < tgt.rank(); ++i)
    if (s.divisor_at(i) != 1) return false;
  return true;
}

bool ModuleMap::is_zero_map() const {
  for (std::size_t j = 0; j < mat.cols(); ++j)
    if (!tgt.element_is_zero(mat.column_vec(j))) return false;
  return true;
}

bool maps_equal(const ModuleMap& a, const ModuleMap& b) {
  if (a.src.divisors != b.src.divisors || a.tgt.divisors != b.tgt.divisors) return false;
  return equal_mod_divisors(a.mat, b.mat, a.tgt.divisors);
}

ModuleMap compose(const ModuleMap& g, const ModuleMap& f) {
  if (f.tgt.divisors != g.src.divisors) throw input_error("compose: middle modules differ");
  IntMat m = g.mat * f.mat;
  reduce_rows_mod_divisors(m, g.tgt.divisors);
  return ModuleMap{f.src, g.tgt, std::move(m)};
}

ModuleMap scale_map(const ModuleMap& f, const Int& c) {
  IntMat m = f.mat.scaled(c);
  reduce_rows_mod_divisors(m, f.tgt.divisors);
  return ModuleMap{f.src, f.tgt, std::move(m)};
}

FiniteModule dual_module(const FiniteModule& m) {
  FiniteModule d;
  d.cfg = m.cfg;
  d.level = m.level;
  d.divisors = m.divisors;
  d.ambient_rank = m.rank();
  d.coords = IntMat::identity(m.rank());
  d.section = IntMat::identity(m.rank());
  const std::size_t r = m.rank();
  for (int k = 0; k < m.cfg.d; ++k) {
    if (m.action_invs[k].rows() != r)
      throw input_error("dual: action is not invertible");
    IntMat B(r, r), Binv(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) {
        // contragredient action: (gamma f)(x) = f(gamma^{-1} x)
        Int num = m.action_invs[k].at(i, j) * m.divisors[j];
        Int den = m.divisors[i];
        Int e;
        mpz_divexact(e.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        B.at(j, i) = mod_reduce(e, m.divisors[j]);
        Int num2 = m.actions[k].at(i, j) * m.divisors[j];
        mpz_divexact(e.get_mpz_t(), num2.get_mpz_t(), den.get_mpz_t());
        Binv.at(j, i) = mod_reduce(e, m.divisors[j]);
      }
    d.actions.push_back(std::move(B));
    d.action_invs.push_back(std::move(Binv));
  }
  return d;
}

ModuleMap dual_map(const ModuleMap& f) {
  FiniteModule dn = dual_module(f.tgt), dm = dual_module(f.src);
  IntMat t(f.src.rank(), f.tgt.rank());
  for (std::size_t i = 0; i < f.src.rank(); ++i)
    for (std::size_t j = 0; j < f.tgt.rank(); ++j) {
      Int num = f.mat.at(j, i) * f.src.divisors[i];
      Int e;
      mpz_divexact(e.get_mpz_t(), num.get_mpz_t(), f.tgt.divisors[j].get_mpz_t());
      t.at(i, j) = mod_reduce(e, f.src.divisors[i]);
    }
  return ModuleMap{std::move(dn), std::move(dm), std::move(t)};
}

FiniteModule sharp_module(const FiniteModule& m) {
  FiniteModule s = m;
  std::swap(s.actions, s.action_invs);
  for (const auto& A : s.actions)
    if (A.rows() != m.rank()) throw input_error("sharp: action is not invertible");
  return s;
}

FiniteModule twist_module(const FiniteModule& m, const UnitCharacter& phi, bool inverse,
                          bool strict) {
  check_unit_character(m.cfg, phi);
  const Int pM = m.cfg.p_precision();
  if (m.exponent() > pM)
    throw input_error("twist: module exponent exceeds working precision p^M");
  FiniteModule t = m;
  for (int k = 0; k < m.cfg.d; ++k) {
    Int u = mod_reduce(phi.units[k], pM);
    if (inverse) u = mod_inverse(u, pM);
    t.actions[k] = m.actions[k].scaled(u);
    reduce_rows_mod_divisors(t.actions[k], t.divisors);
    if (m.action_invs[k].rows() == m.rank()) {
      t.action_invs[k] = m.action_invs[k].scaled(mod_inverse(u, pM));
      reduce_rows_mod_divisors(t.action_invs[k], t.divisors);
    }
  }
  if (strict) {
    auto bad = module_invariant_violations(t);
    if (!bad.empty()) throw input_error("twist: " + bad.front());
  }
  return t;
}

Submodule submodule(const FiniteModule& m, const IntMat& generator_cols, const std::string& what) {
  const std::size_t s = generator_cols.cols();
  if (generator_cols.rows() != m.rank() && s != 0)
    throw input_error(what + ": generator columns have wrong length");
  if (s == 0 || m.rank() == 0) {
    FiniteModule z = zero_module(m.cfg, m.level);
    return Submodule{z, ModuleMap::zero(z, m), IntMat(m.rank(), 0)};
  }
  IntMat rel = lattice_kernel_cols(generator_cols, m.divisors);
  std::vector<IntMat> acts;
  for (int k = 0; k < m.cfg.d; ++k) {
    IntMat Ak(s, s);
    for (std::size_t j = 0; j < s; ++j) {
      std::vector<Int> img = m.reduce_element(m.actions[k].apply(generator_cols.column_vec(j)));
      auto x = solve_mod_divisors(generator_cols, m.divisors, img);
      if (!x)
        throw input_error(what + ": not stable under action " + std::to_string(k + 1) +
                          " on generator " + std::to_string(j));
      Ak.set_column(j, *x);
    }
    acts.push_back(std::move(Ak));
  }
  FiniteModule sub = presented_module(m.cfg, m.level, s, rel, acts, TorsionPolicy::RequireFinite);
  IntMat incl = generator_cols * sub.section;
  return Submodule{sub, ModuleMap::make(sub, m, std::move(incl), what + " inclusion"),
                   generator_cols};
}

Quotient quotient(const FiniteModule& m, const IntMat& generator_cols) {
  IntMat rel(m.rank(), m.rank());
  for (std::size_t i = 0; i < m.rank(); ++i) rel.at(i, i) = m.divisors[i];
  if (generator_cols.cols() > 0) rel = rel.hstack(generator_cols);
  FiniteModule q =
      presented_module(m.cfg, m.level, m.rank(), rel, m.actions, TorsionPolicy::RequireFinite);
  ModuleMap proj = ModuleMap::make(m, q, q.coords, "quotient projection");
  return Quotient{q, std::move(proj), q.section};
}

Submodule kernel_of_map(const ModuleMap& f) {
  IntMat K = lattice_kernel_cols(f.mat, f.tgt.divisors);
  return submodule(f.src, K, "kernel");
}

Submodule image_of_map(const ModuleMap& f) { return submodule(f.tgt, f.mat, "image"); }

std::optional<std::vector<Int>> express_in_span(const FiniteModule& m, const IntMat& gens,
                                                const std::vector<Int>& x) {
  if (gens.cols() == 0) return m.element_is_zero(x) ? std::optional(std::vector<Int>{}) : std::nullopt;
  return solve_mod_divisors(gens, m.divisors, m.reduce_element(x));
}

DirectSum direct_sum(const FiniteModule& a, const FiniteModule& b) {
  if (a.level != b.level) throw input_error("direct sum: level mismatch");
  const std::size_t ra = a.rank(), rb = b.rank();
  std::vector<Int> div;
  div.insert(div.end(), a.divisors.begin(), a.divisors.end());
  div.insert(div.end(), b.divisors.begin(), b.divisors.end());
  std::vector<IntMat> acts;
  for (int k = 0; k < a.cfg.d; ++k) {
    IntMat A(ra + rb, ra + rb);
    for (std::size_t i = 0; i < ra; ++i)
      for (std::size_t j = 0; j < ra; ++j) A.at(i, j) = a.actions[k].at(i, j);
    for (std::size_t i = 0; i < rb; ++i)
      for (std::size_t j = 0; j < rb; ++j) A.at(ra + i, ra + j) = b.actions[k].at(i, j);
    acts.push_back(std::move(A));
  }
  FiniteModule s = module_from_divisors(a.cfg, a.level, div, acts);
  // the ambient presentation of s is the block presentation above
  IntMat ea(ra + rb, ra), eb(ra + rb, rb);
  for (std::size_t i = 0; i < ra; ++i) ea.at(i, i) = 1;
  for (std::size_t i = 0; i < rb; ++i) eb.at(ra + i, i) = 1;
  IntMat pa(ra, ra + rb), pb(rb, ra + rb);
  for (std::size_t i = 0; i < ra; ++i) pa.at(i, i) = 1;
  for (std::size_t i = 0; i < rb; ++i) pb.at(i, ra + i) = 1;
  return DirectSum{
      s,
      ModuleMap::make(a, s, s.coords * ea, "direct sum inclusion"),
      ModuleMap::make(b, s, s.coords * eb, "direct sum inclusion"),
      ModuleMap::make(s, a, pa * s.section, "direct sum projection"),
      ModuleMap::make(s, b, pb * s.section, "direct sum projection"),
  };
}

namespace {

// integer realization of a root of unity of order p^l inside (Z/p^e)^*
std::optional<Int> root_of_unity_mod(long p, unsigned l, unsigned e, const Int& pe) {
  if (l == 0) return Int(1);
  if (p == 2) return l == 1 ? std::optional(mod_reduce(Int(-1), pe)) : std::nullopt;
  if (e == 0 || l > e - 1) return std::nullopt;
  // (1+p) generates the p-part of the units mod p^e; take the power of order p^l
  return mod_pow(Int(1 + p), p_pow(p, e - 1 - l), pe);
}

Submodule kernel_of_stacked(const FiniteModule& m, const std::vector<IntMat>& blocks,
                            const std::string& what) {
  const std::size_t r = m.rank();
  const std::size_t nb = blocks.size();
  IntMat big(nb * r, r + nb * r);
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j) big.at(b * r + i, j) = blocks[b].at(i, j);
      big.at(b * r + i, r + b * r + i) = m.divisors[i];
    }
  IntMat K = kernel_lattice(big);
  std::vector<std::size_t> rows(r), cols(K.cols());
  for (std::size_t i = 0; i < r; ++i) rows[i] = i;
  for (std::size_t j = 0; j < K.cols(); ++j) cols[j] = j;
  return submodule(m, K.submatrix(rows, cols), what);
}

}  // namespace

Submodule eigenspace(const FiniteModule& m, const Character& psi, bool extend_scalars) {
  check_character(m.cfg, psi);
  if (psi.level != m.level)
    throw input_error("eigenspace: character level does not match module level");
  if (m.is_zero()) {
    FiniteModule z = zero_module(m.cfg, m.level);
    return Submodule{z, ModuleMap::zero(z, m), IntMat(0, 0)};
  }
  unsigned l = character_order_exponent(m.cfg, psi);
  unsigned e = static_cast<unsigned>(vp(m.exponent(), m.cfg.p));
  Int pe = m.exponent();
  long pn = p_pow_long(m.cfg.p, psi.level);
  long shift = p_pow_long(m.cfg.p, psi.level - static_cast<int>(l));
  auto root_exp = [&](int k) {
    long c = ((psi.exps[k] % pn) + pn) % pn;
    return c / shift;
  };
  auto zeta = root_of_unity_mod(m.cfg.p, l, e, pe);
  if (zeta && !extend_scalars) {
    std::vector<IntMat> blocks;
    for (int k = 0; k < m.cfg.d; ++k) {
      Int val = mod_pow(*zeta, Int(root_exp(k)), pe);
      IntMat B = m.actions[k] - IntMat::identity(m.rank()).scaled(val);
      blocks.push_back(std::move(B));
    }
    return kernel_of_stacked(m, blocks, "eigenspace");
  }
  if (!extend_scalars)
    throw input_error(
        "eigenspace: character order exceeds the roots of unity available in the module "
        "(request cyclotomic scalar extension)");

  // extend scalars: M tensor Z[zeta_{p^l}], zeta acting as the companion matrix
  const long phi = Cyclotomic::degree(m.cfg.p, l);
  const std::size_t r = m.rank();
  IntMat comp(phi, phi);
  for (long j = 0; j < phi; ++j) {
    Cyclotomic pw = Cyclotomic::root_power(m.cfg.p, l, Int(j + 1));
    for (long i = 0; i < phi; ++i) comp.at(i, j) = pw.coords()[i];
  }
  std::vector<Int> div;
  std::vector<IntMat> acts;
  for (std::size_t i = 0; i < r; ++i)
    for (long a = 0; a < phi; ++a) div.push_back(m.divisors[i]);
  for (int k = 0; k < m.cfg.d; ++k) {
    IntMat A(r * phi, r * phi);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j)
        for (long a = 0; a < phi; ++a) A.at(i * phi + a, j * phi + a) = m.actions[k].at(i, j);
    acts.push_back(std::move(A));
  }
  FiniteModule ext = module_from_divisors(m.cfg, m.level, div, acts);
  IntMat Z(r * phi, r * phi);
  for (std::size_t i = 0; i < r; ++i)
    for (long a = 0; a < phi; ++a)
      for (long b = 0; b < phi; ++b) Z.at(i * phi + a, i * phi + b) = comp.at(a, b);
  std::vector<IntMat> blocks;
  for (int k = 0; k < m.cfg.d; ++k) {
    IntMat zk = mat_pow_mod(ext.coords * Z * ext.section, root_exp(k), ext.divisors);
    blocks.push_back(ext.actions[k] - zk);
  }
  return kernel_of_stacked(ext, blocks, "eigenspace (extended scalars)");
}

Submodule invariants(const FiniteModule& m, int sublevel) {
  if (sublevel < 0 || sublevel > m.level) throw input_error("invariants: bad sublevel");
  long e = p_pow_long(m.cfg.p, sublevel);
  std::vector<IntMat> blocks;
  for (int k = 0; k < m.cfg.d; ++k)
    blocks.push_back(mat_pow_mod(m.actions[k], e, m.divisors) - IntMat::identity(m.rank()));
  return kernel_of_stacked(m, blocks, "invariants");
}

Quotient coinvariants(const FiniteModule& m, int sublevel) {
  if (sublevel < 0 || sublevel > m.level) throw input_error("coinvariants: bad sublevel");
  long e = p_pow_long(m.cfg.p, sublevel);
  IntMat cols(m.rank(), 0);
  for (int k = 0; k < m.cfg.d; ++k) {
    IntMat B = mat_pow_mod(m.actions[k], e, m.divisors) - IntMat::identity(m.rank());
    cols = cols.hstack(B);
  }
  return quotient(m, cols);
}

Rat PairingMatrix::pair(const std::vector<Int>& x, const std::vector<Int>& y) const {
  Rat acc(0);
  auto xr = left.reduce_element(x);
  auto yr = right.reduce_element(y);
  for (std::size_t i = 0; i < left.rank(); ++i)
    for (std::size_t j = 0; j < right.rank(); ++j)
      if (xr[i] != 0 && yr[j] != 0) acc += Rat(xr[i]) * vals[i][j] * Rat(yr[j]);
  return mod_one(acc);
}

PairingMatrix make_pairing(FiniteModule left, FiniteModule right,
                           std::vector<std::vector<Rat>> vals, const std::string& what) {
  if (vals.size() != left.rank()) throw input_error(what + ": value matrix shape mismatch");
  for (auto& row : vals) {
    if (row.size() != right.rank()) throw input_error(what + ": value matrix shape mismatch");
    for (auto& v : row) v = mod_one(v);
  }
  for (std::size_t i = 0; i < left.rank(); ++i)
    for (std::size_t j = 0; j < right.rank(); ++j) {
      Rat a = mod_one(vals[i][j] * Rat(left.divisors[i]));
      Rat b = mod_one(vals[i][j] * Rat(right.divisors[j]));
      if (a != 0 || b != 0)
        throw input_error(what + ": value (" + std::to_string(i) + "," + std::to_string(j) +
                          ") is not bilinear on the presentations");
    }
  return PairingMatrix{std::move(left), std::move(right), std::move(vals)};
}

PairingMatrix evaluation_pairing(const FiniteModule& m) {
  FiniteModule d = dual_module(m);
  std::vector<std::vector<Rat>> vals(m.rank(), std::vector<Rat>(m.rank(), Rat(0)));
  for (std::size_t i = 0; i < m.rank(); ++i) vals[i][i] = Rat(Int(1), m.divisors[i]);
  return PairingMatrix{std::move(d), m, std::move(vals)};
}

bool pairing_gamma_invariant(const PairingMatrix& P) {
  for (int k = 0; k < P.left.cfg.d; ++k) {
    const IntMat& A = P.left.actions[k];
    const IntMat& B = P.right.actions[k];
    for (std::size_t i = 0; i < P.left.rank(); ++i)
      for (std::size_t j = 0; j < P.right.rank(); ++j) {
        Rat lhs(0);
        for (std::size_t a = 0; a < P.left.rank(); ++a)
          for (std::size_t b = 0; b < P.right.rank(); ++b)
            if (A.at(a, i) != 0 && B.at(b, j) != 0)
              lhs += Rat(A.at(a, i)) * P.vals[a][b] * Rat(B.at(b, j));
        if (mod_one(lhs) != P.vals[i][j]) return false;
      }
  }
  return true;
}

std::vector<std::string> pairing_violations(const PairingMatrix& P) {
  std::vector<std::string> out;
  if (!pairing_gamma_invariant(P)) out.push_back("pairing is not Gamma-invariant");
  return out;
}

ModuleMap pairing_left_map(const PairingMatrix& P) {
  FiniteModule dr = dual_module(P.right);
  IntMat mat(P.right.rank(), P.left.rank());
  for (std::size_t i = 0; i < P.left.rank(); ++i)
    for (std::size_t j = 0; j < P.right.rank(); ++j) {
      Rat v = P.vals[i][j] * Rat(P.right.divisors[j]);
      v.canonicalize();
      if (v.get_den() != 1) throw input_error("pairing: value not bilinear");
      mat.at(j, i) = mod_reduce(v.get_num(), P.right.divisors[j]);
    }
  return ModuleMap{P.left, std::move(dr), std::move(mat)};
}

ModuleMap pairing_right_map(const PairingMatrix& P) {
  FiniteModule dl = dual_module(P.left);
  IntMat mat(P.left.rank(), P.right.rank());
  for (std::size_t i = 0; i < P.left.rank(); ++i)
    for (std::size_t j = 0; j < P.right.rank(); ++j) {
      Rat v = P.vals[i][j] * Rat(P.left.divisors[i]);
      v.canonicalize();
      if (v.get_den() != 1) throw input_error("pairing: value not bilinear");
      mat.at(i, j) = mod_reduce(v.get_num(), P.left.divisors[i]);
    }
  return ModuleMap{P.right, std::move(dl), std::move(mat)};
}

bool is_perfect(const PairingMatrix& P) {
  ModuleMap a = pairing_left_map(P);
  ModuleMap b = pairing_right_map(P);
  return a.is_injective() && a.is_surjective() && b.is_injective() && b.is_surjective();
}

Submodule pairing_annihilator_right(const PairingMatrix& P, const IntMat& left_gens) {
  const std::size_t s = left_gens.cols();
  // {y : <g_j, y> = 0 in Q/Z for all generators}: integer congruences
  // t_j <g_j, y> = 0 mod t_j with t_j the order of g_j.
  IntMat big(s, P.right.rank() + s);
  for (std::size_t j = 0; j < s; ++j) {
    auto g = P.left.reduce_element(left_gens.column_vec(j));
    Int t = element_order_in(P.left.divisors, g);
    for (std::size_t k = 0; k < P.right.rank(); ++k) {
      Rat v(0);
      for (std::size_t i = 0; i < P.left.rank(); ++i)
        if (g[i] != 0) v += Rat(g[i]) * P.vals[i][k];
      v *= Rat(t);
      v.canonicalize();
      if (v.get_den() != 1) throw input_error("annihilator: pairing not bilinear");
      big.at(j, k) = mod_reduce(v.get_num(), t);
    }
    big.at(j, P.right.rank() + j) = t;
  }
  IntMat K = kernel_lattice(big);
  std::vector<std::size_t> ridx(P.right.rank()), cidx(K.cols());
  for (std::size_t i = 0; i < P.right.rank(); ++i) ridx[i] = i;
  for (std::size_t j = 0; j < K.cols(); ++j) cidx[j] = j;
  return submodule(P.right, K.submatrix(ridx, cidx), "annihilator");
}

Submodule pairing_annihilator_left(const PairingMatrix& P, const IntMat& right_gens) {
  // transpose the pairing and reuse
  std::vector<std::vector<Rat>> tv(P.right.rank(), std::vector<Rat>(P.left.rank()));
  for (std::size_t i = 0; i < P.left.rank(); ++i)
    for (std::size_t j = 0; j < P.right.rank(); ++j) tv[j][i] = P.vals[i][j];
  PairingMatrix Q{P.right, P.left, std::move(tv)};
  return pairing_annihilator_right(Q, right_gens);
}

std::vector<std::vector<Int>> enumerate_elements(const FiniteModule& m, unsigned long max_order) {
  if (m.order() > Int(max_order))
    throw input_error("enumerate_elements: module order exceeds the enumeration guard");
  std::vector<std::vector<Int>> out;
  std::vector<Int> x(m.rank(), Int(0));
  for (;;) {
    out.push_back(x);
    std::size_t i = 0;
    while (i < m.rank()) {
      x[i] += 1;
      if (x[i] < m.divisors[i]) break;
      x[i] = 0;
      ++i;
    }
    if (i == m.rank()) break;
  }
  return out;
}

std::vector<Int> random_element(const FiniteModule& m, std::mt19937& rng) {
  std::vector<Int> x(m.rank());
  for (std::size_t i = 0; i < m.rank(); ++i) {
    unsigned long q = mpz_get_ui(m.divisors[i].get_mpz_t());
    std::uniform_int_distribution<unsigned long> dist(0, q - 1);
    x[i] = Int(dist(rng));
  }
  return x;
}

namespace {

struct RTools {
  std::vector<ExpVec> monos;
  std::vector<IntMat> acts_a, acts_b;
};

RTools r_tools(const FiniteModule& a, const FiniteModule& b) {
  RTools t;
  t.monos = group_vectors(a.cfg, a.level);
  for (const auto& v : t.monos) {
    t.acts_a.push_back(monomial_action(a, v));
    t.acts_b.push_back(monomial_action(b, v));
  }
  return t;
}

// matrix whose columns are gamma^v x over all monomials
IntMat span_matrix(const FiniteModule& m, const std::vector<IntMat>& acts,
                   const std::vector<Int>& x) {
  IntMat W(m.rank(), acts.size());
  for (std::size_t v = 0; v < acts.size(); ++v)
    W.set_column(v, m.reduce_element(acts[v].apply(x)));
  return W;
}

bool spans_everything(const FiniteModule& m, const IntMat& W) {
  IntMat diag(m.rank(), m.rank());
  for (std::size_t i = 0; i < m.rank(); ++i) diag.at(i, i) = m.divisors[i];
  SmithForm s = smith_form(W.hstack(diag));
  for (std::size_t i = 0; i < m.rank(); ++i)
    if (s.divisor_at(i) != 1) return false;
  return true;
}

}  // namespace

namespace {

// candidate generators: coordinate vectors, their running sums, then plain
// enumeration up to the cap
std::vector<std::vector<Int>> generator_candidates(const FiniteModule& m, unsigned long cap) {
  std::vector<std::vector<Int>> out;
  std::vector<Int> acc(m.rank(), Int(0));
  for (std::size_t i = m.rank(); i-- > 0;) {
    std::vector<Int> e(m.rank(), Int(0));
    e[i] = 1;
    out.push_back(e);
  }
  for (std::size_t i = 0; i < m.rank(); ++i) {
    acc[i] = 1;
    if (i > 0) out.push_back(acc);
  }
  if (m.order() <= Int(cap)) {
    auto all = enumerate_elements(m);
    out.insert(out.end(), all.begin(), all.end());
  }
  return out;
}

bool lattice_contains(const IntMat& L, const std::vector<Int>& v) {
  return solve_integer(L, v).has_value();
}

bool lattices_equal(const IntMat& L1, const IntMat& L2) {
  for (std::size_t j = 0; j < L2.cols(); ++j)
    if (!lattice_contains(L1, L2.column_vec(j))) return false;
  for (std::size_t j = 0; j < L1.cols(); ++j)
    if (!lattice_contains(L2, L1.column_vec(j))) return false;
  return true;
}

// the hom determined by generators g_i -> y_i, where Wall stacks the monomial
// spans of the g_i and Wb[i] the monomial images of y_i
std::optional<IntMat> build_hom(const FiniteModule& a, const FiniteModule& b, const IntMat& Wall,
                                const std::vector<IntMat>& Wb) {
  const std::size_t G = Wb.empty() ? 0 : Wb[0].cols();
  IntMat T(b.rank(), a.rank());
  for (std::size_t j = 0; j < a.rank(); ++j) {
    std::vector<Int> e(a.rank(), Int(0));
    e[j] = 1;
    auto z = solve_mod_divisors(Wall, a.divisors, e);
    if (!z) return std::nullopt;
    std::vector<Int> img(b.rank(), Int(0));
    for (std::size_t i = 0; i < Wb.size(); ++i)
      for (std::size_t v = 0; v < G; ++v) {
        const Int& cv = (*z)[i * G + v];
        if (cv == 0) continue;
        for (std::size_t k = 0; k < b.rank(); ++k) img[k] += cv * Wb[i].at(k, v);
      }
    T.set_column(j, b.reduce_element(img));
  }
  return T;
}

}  // namespace

IsoResult equivariant_isomorphism(const FiniteModule& a, const FiniteModule& b,
                                  unsigned long node_budget) {
  if (a.divisors != b.divisors)
    return {IsoVerdict::No, std::nullopt, "elementary divisors differ"};
  if (a.rank() == 0) return {IsoVerdict::Yes, IntMat(0, 0), "both trivial"};
  if (a.actions == b.actions)
    return {IsoVerdict::Yes, IntMat::identity(a.rank()), "identical presentations"};

  long monocount = p_pow_long(a.cfg.p, a.level * a.cfg.d);
  if (monocount > 4096 || a.order() > Int(1u << 16))
    return {IsoVerdict::Undetermined, std::nullopt, "search space exceeds the guard"};

  RTools t = r_tools(a, b);

  // cyclic route: a cyclic module over the level group ring is determined up
  // to equivariant isomorphism by the annihilator ideal of a generator.
  std::optional<std::vector<Int>> gen_a;
  for (const auto& x : generator_candidates(a, 1u << 16)) {
    if (spans_everything(a, span_matrix(a, t.acts_a, x))) {
      gen_a = x;
      break;
    }
  }
  if (gen_a) {
    IntMat Wa = span_matrix(a, t.acts_a, *gen_a);
    IntMat La = lattice_kernel_cols(Wa, a.divisors);
    std::optional<std::vector<Int>> gen_b;
    for (const auto& y : generator_candidates(b, 1u << 16)) {
      if (spans_everything(b, span_matrix(b, t.acts_b, y))) {
        gen_b = y;
        break;
      }
    }
    if (!gen_b) return {IsoVerdict::No, std::nullopt, "one side cyclic, the other not"};
    IntMat Wb = span_matrix(b, t.acts_b, *gen_b);
    IntMat Lb = lattice_kernel_cols(Wb, b.divisors);
    if (!lattices_equal(La, Lb))
      return {IsoVerdict::No, std::nullopt, "cyclic annihilator ideals differ"};
    auto T = build_hom(a, b, Wa, {Wb});
    if (T) {
      ModuleMap f = ModuleMap::make(a, b, *T, "isomorphism candidate");
      if (f.is_equivariant() && f.is_injective() && f.is_surjective())
        return {IsoVerdict::Yes, f.mat, "cyclic generator match"};
    }
    return {IsoVerdict::No, std::nullopt, "cyclic annihilator match failed to verify"};
  }

  // generic bounded backtracking over images of a greedy generating set
  if (b.order() > Int(1u << 16))
    return {IsoVerdict::Undetermined, std::nullopt, "search space exceeds the guard"};
  auto elems_b = enumerate_elements(b);
  std::vector<std::vector<Int>> gens;
  {
    IntMat cols(a.rank(), 0);
    for (std::size_t i = 0; i < a.rank(); ++i) {
      std::vector<Int> e(a.rank(), Int(0));
      e[i] = 1;
      if (express_in_span(a, cols, e)) continue;
      gens.push_back(e);
      cols = cols.hstack(span_matrix(a, t.acts_a, e));
    }
  }
  const std::size_t s = gens.size();
  IntMat Wall(a.rank(), 0);
  for (const auto& g : gens) Wall = Wall.hstack(span_matrix(a, t.acts_a, g));
  IntMat rel = lattice_kernel_cols(Wall, a.divisors);

  unsigned long nodes = 0;
  std::vector<IntMat> Wb_choice(s, IntMat(0, 0));
  IsoResult result{IsoVerdict::No, std::nullopt, "exhausted search"};

  auto relations_hold = [&](std::size_t depth) {
    // check relation columns supported on the first `depth` generators
    for (std::size_t c = 0; c < rel.cols(); ++c) {
      bool supported = true;
      for (std::size_t i = depth; i < s && supported; ++i)
        for (std::size_t v = 0; v < t.monos.size(); ++v)
          if (rel.at(i * t.monos.size() + v, c) != 0) supported = false;
      if (!supported) continue;
      std::vector<Int> img(b.rank(), Int(0));
      for (std::size_t i = 0; i < depth; ++i)
        for (std::size_t v = 0; v < t.monos.size(); ++v) {
          const Int& cv = rel.at(i * t.monos.size() + v, c);
          if (cv == 0) continue;
          for (std::size_t k = 0; k < b.rank(); ++k) img[k] += cv * Wb_choice[i].at(k, v);
        }
      if (!b.element_is_zero(img)) return false;
    }
    return true;
  };

  auto search = [&](auto&& self, std::size_t depth) -> bool {
    if (nodes++ > node_budget) {
      result = {IsoVerdict::Undetermined, std::nullopt, "node budget exhausted"};
      return true;
    }
    if (depth == s) {
      auto T = build_hom(a, b, Wall, Wb_choice);
      if (!T) return false;
      ModuleMap f = ModuleMap::make(a, b, *T, "isomorphism candidate");
      if (f.is_equivariant() && f.is_injective() && f.is_surjective()) {
        result = {IsoVerdict::Yes, f.mat, "backtracking match"};
        return true;
      }
      return false;
    }
    for (const auto& y : elems_b) {
      Wb_choice[depth] = span_matrix(b, t.acts_b, y);
      if (!relations_hold(depth + 1)) continue;
      if (self(self, depth + 1)) return true;
    }
    return false;
  };
  search(search, 0);
  return result;
}

}  // namespace iwalab
