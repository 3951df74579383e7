#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace iwalab {

using Int = mpz_class;
using Rat = mpq_class;

// Thrown on malformed documents and violated operation preconditions.
// The CLI maps it to exit code 2.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an enumeration would exceed the configured budget.
class budget_error : public input_error {
 public:
  budget_error(const std::string& what, long required)
      : input_error(what), required_budget(required) {}
  long required_budget;
};

inline Int int_pow(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int p_pow(long p, unsigned long e) { return int_pow(Int(p), e); }

// p-adic valuation of a nonzero integer.
inline unsigned long vp(const Int& x, long p) {
  if (x == 0) throw input_error("vp: zero has infinite valuation");
  Int q, r = abs(x);
  Int pp(p);
  unsigned long v = 0;
  while (mpz_divisible_p(r.get_mpz_t(), pp.get_mpz_t())) {
    mpz_divexact(q.get_mpz_t(), r.get_mpz_t(), pp.get_mpz_t());
    r = q;
    ++v;
  }
  return v;
}

inline bool is_p_power(const Int& x, long p) {
  if (x <= 0) return false;
  Int r = x;
  Int q;
  Int pp(p);
  while (r > 1) {
    if (!mpz_divisible_p(r.get_mpz_t(), pp.get_mpz_t())) return false;
    mpz_divexact(q.get_mpz_t(), r.get_mpz_t(), pp.get_mpz_t());
    r = q;
  }
  return true;
}

// Least nonnegative residue.
inline Int mod_reduce(const Int& x, const Int& m) {
  Int r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline Int mod_inverse(const Int& x, const Int& m) {
  Int r;
  if (!mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()))
    throw input_error("mod_inverse: " + x.get_str() + " not invertible mod " + m.get_str());
  return r;
}

inline Int mod_pow(Int base, Int e, const Int& m) {
  if (e < 0) {
    base = mod_inverse(base, m);
    e = -e;
  }
  Int r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline bool is_prime(long p) {
  if (p < 2) return false;
  for (long q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

// Reduce a rational into [0,1); pairing values live in Q/Z.
inline Rat mod_one(const Rat& x) {
  Rat r = x;
  r.canonicalize();
  Int num = r.get_num(), den = r.get_den();
  Int q = mod_reduce(num, den);
  Rat out(q, den);
  out.canonicalize();
  return out;
}

// Global configuration: the prime, the rank of the group, and the working
// precision exponent for coefficients reduced mod p^M.
struct Config {
  long p = 3;
  int d = 1;
  int precision = 9;

  void check() const {
    if (!is_prime(p)) throw input_error("config: p = " + std::to_string(p) + " is not prime");
    if (d < 1) throw input_error("config: d must be >= 1");
    if (precision < 1) throw input_error("config: precision must be >= 1");
  }
  Int p_precision() const { return p_pow(p, static_cast<unsigned long>(precision)); }
};

using ExpVec = std::vector<long>;  // exponent vector in Z^d (negative entries allowed)

inline long euler_phi_p_power(long p, unsigned l) {
  // phi(p^l); phi(1) = 1.
  if (l == 0) return 1;
  long r = p - 1;
  for (unsigned i = 1; i < l; ++i) r *= p;
  return r;
}

}  // namespace iwalab
