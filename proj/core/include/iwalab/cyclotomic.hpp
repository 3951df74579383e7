#pragma once

#include <vector>

#include "iwalab/numeric.hpp"

namespace iwalab {

// Exact element of Z[x]/Phi_{p^l}(x), the ring generated by a root of unity
// of order p^l. Order exponent l = 0 degenerates to plain integers, so this
// is the one carrier for all character values. Coefficients are never
// reduced, so zero testing is exact.
class Cyclotomic {
 public:
  Cyclotomic() : p_(2), l_(0), c_(1, Int(0)) {}
  Cyclotomic(long p, unsigned l) : p_(p), l_(l), c_(degree(p, l), Int(0)) {}
  Cyclotomic(long p, unsigned l, std::vector<Int> coords);
  static Cyclotomic integer(long p, const Int& n);
  // zeta^k where zeta has order p^l
  static Cyclotomic root_power(long p, unsigned l, const Int& k);

  long p() const { return p_; }
  unsigned order_exponent() const { return l_; }
  const std::vector<Int>& coords() const { return c_; }
  static long degree(long p, unsigned l) { return euler_phi_p_power(p, l); }

  bool is_zero() const;
  bool is_integer() const;          // lies in Z
  Int integer_value() const;        // requires is_integer()

  Cyclotomic operator+(const Cyclotomic& o) const;
  Cyclotomic operator-(const Cyclotomic& o) const;
  Cyclotomic operator-() const;
  Cyclotomic operator*(const Cyclotomic& o) const;
  Cyclotomic scaled(const Int& n) const;
  bool operator==(const Cyclotomic& o) const;

  // Re-express in Z[x]/Phi_{p^m} for m >= l (zeta_{p^l} = zeta_{p^m}^{p^{m-l}}).
  Cyclotomic embedded(unsigned m) const;
  // Canonical form: descend to the smallest order exponent containing the value.
  Cyclotomic reduced_order() const;

  // Galois action zeta -> zeta^u for u prime to p.
  Cyclotomic galois(const Int& u) const;

  // Norm down to Z: determinant of the multiplication-by-this matrix.
  Int norm() const;
  // Normalized p-adic valuation v_p (v_p(p) = 1); requires nonzero value.
  Rat valuation() const;

  void reduce_coords_mod(const Int& m);  // coefficients mod m (for mod-p^M work)

 private:
  long p_;
  unsigned l_;
  std::vector<Int> c_;  // length phi(p^l)
  void reduce_from(std::vector<Int>& raw) const;  // degree-lowering mod Phi_{p^l}
};

}  // namespace iwalab
