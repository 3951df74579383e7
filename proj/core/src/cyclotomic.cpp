#include "iwalab/cyclotomic.hpp"

#include <algorithm>

#include "iwalab/matrix.hpp"

namespace iwalab {

Cyclotomic::Cyclotomic(long p, unsigned l, std::vector<Int> coords) : p_(p), l_(l) {
  std::size_t deg = static_cast<std::size_t>(degree(p, l));
  if (coords.size() <= deg) {
    coords.resize(deg, Int(0));
    c_ = std::move(coords);
  } else {
    c_.assign(deg, Int(0));
    reduce_from(coords);
    for (std::size_t i = 0; i < deg; ++i) c_[i] = coords[i];
  }
}

Cyclotomic Cyclotomic::integer(long p, const Int& n) {
  Cyclotomic z(p, 0);
  z.c_[0] = n;
  return z;
}

Cyclotomic Cyclotomic::root_power(long p, unsigned l, const Int& k) {
  Int order = p_pow(p, l);
  Int kk = mod_reduce(k, order);
  std::vector<Int> raw(mpz_get_ui(order.get_mpz_t()), Int(0));
  raw[mpz_get_ui(kk.get_mpz_t())] = 1;
  return Cyclotomic(p, l, std::move(raw));
}

// In-place degree lowering of a raw coefficient vector modulo Phi_{p^l}.
// For l >= 1: x^phi = -sum_{j=0}^{p-2} x^{j p^{l-1}}; for l = 0: x = 1.
void Cyclotomic::reduce_from(std::vector<Int>& raw) const {
  if (l_ == 0) {
    for (std::size_t i = 1; i < raw.size(); ++i) raw[0] += raw[i];
    return;
  }
  const std::size_t phi = static_cast<std::size_t>(degree(p_, l_));
  const std::size_t step = phi / (p_ - 1);  // p^{l-1}
  for (std::size_t k = raw.size(); k-- > phi;) {
    if (raw[k] == 0) continue;
    Int c = raw[k];
    raw[k] = 0;
    for (long j = 0; j <= p_ - 2; ++j) raw[k - phi + j * step] -= c;
  }
}

bool Cyclotomic::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Int& x) { return x == 0; });
}

bool Cyclotomic::is_integer() const { return reduced_order().order_exponent() == 0; }

Int Cyclotomic::integer_value() const {
  Cyclotomic r = reduced_order();
  if (r.order_exponent() != 0) throw input_error("cyclotomic: value is not a rational integer");
  return r.c_[0];
}

Cyclotomic Cyclotomic::operator+(const Cyclotomic& o) const {
  if (p_ != o.p_) throw input_error("cyclotomic: prime mismatch");
  unsigned m = std::max(l_, o.l_);
  Cyclotomic a = embedded(m), b = o.embedded(m);
  for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
  return a;
}

Cyclotomic Cyclotomic::operator-(const Cyclotomic& o) const { return *this + (-o); }

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

Cyclotomic Cyclotomic::operator*(const Cyclotomic& o) const {
  if (p_ != o.p_) throw input_error("cyclotomic: prime mismatch");
  unsigned m = std::max(l_, o.l_);
  Cyclotomic a = embedded(m), b = o.embedded(m);
  std::vector<Int> raw(2 * a.c_.size(), Int(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j)
      if (b.c_[j] != 0) raw[i + j] += a.c_[i] * b.c_[j];
  }
  return Cyclotomic(p_, m, std::move(raw));
}

Cyclotomic Cyclotomic::scaled(const Int& n) const {
  Cyclotomic r = *this;
  for (auto& x : r.c_) x *= n;
  return r;
}

bool Cyclotomic::operator==(const Cyclotomic& o) const {
  if (p_ != o.p_) return false;
  unsigned m = std::max(l_, o.l_);
  Cyclotomic a = embedded(m), b = o.embedded(m);
  return a.c_ == b.c_;
}

Cyclotomic Cyclotomic::embedded(unsigned m) const {
  if (m < l_) throw input_error("cyclotomic: cannot embed into smaller order");
  if (m == l_) return *this;
  Int stride = p_pow(p_, m - l_);
  std::size_t st = mpz_get_ui(stride.get_mpz_t());
  std::vector<Int> raw(c_.size() * st, Int(0));
  for (std::size_t i = 0; i < c_.size(); ++i) raw[i * st] = c_[i];
  return Cyclotomic(p_, m, std::move(raw));
}

Cyclotomic Cyclotomic::reduced_order() const {
  Cyclotomic r = *this;
  while (r.l_ > 0) {
    bool can = true;
    if (r.l_ == 1) {
      // descend to Z if only the constant coordinate is present
      for (std::size_t i = 1; i < r.c_.size(); ++i)
        if (r.c_[i] != 0) { can = false; break; }
      if (!can) break;
      Cyclotomic down(r.p_, 0);
      down.c_[0] = r.c_[0];
      r = down;
    } else {
      std::size_t pp = static_cast<std::size_t>(r.p_);
      for (std::size_t i = 0; i < r.c_.size(); ++i)
        if (i % pp != 0 && r.c_[i] != 0) { can = false; break; }
      if (!can) break;
      Cyclotomic down(r.p_, r.l_ - 1);
      for (std::size_t i = 0; i < r.c_.size(); i += pp) down.c_[i / pp] = r.c_[i];
      r = down;
    }
  }
  return r;
}

Cyclotomic Cyclotomic::galois(const Int& u) const {
  if (l_ == 0) return *this;
  Int order = p_pow(p_, l_);
  if (mod_reduce(u, Int(p_)) == 0) throw input_error("cyclotomic: galois exponent not a unit");
  std::vector<Int> raw(mpz_get_ui(order.get_mpz_t()), Int(0));
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    Int k = mod_reduce(Int(static_cast<unsigned long>(i)) * u, order);
    raw[mpz_get_ui(k.get_mpz_t())] += c_[i];
  }
  return Cyclotomic(p_, l_, std::move(raw));
}

Int Cyclotomic::norm() const {
  const std::size_t deg = c_.size();
  IntMat M(deg, deg);
  Cyclotomic pw = Cyclotomic::root_power(p_, l_, 0);  // 1
  for (std::size_t j = 0; j < deg; ++j) {
    Cyclotomic col = *this * pw;
    for (std::size_t i = 0; i < deg; ++i) M.at(i, j) = col.coords()[i];
    pw = pw * Cyclotomic::root_power(p_, l_, 1);
  }
  return determinant(M);
}

Rat Cyclotomic::valuation() const {
  if (is_zero()) throw input_error("cyclotomic: valuation of zero");
  Int n = norm();
  Rat v(Int(static_cast<long>(vp(n, p_))), Int(static_cast<long>(c_.size())));
  v.canonicalize();
  return v;
}

void Cyclotomic::reduce_coords_mod(const Int& m) {
  for (auto& x : c_) x = mod_reduce(x, m);
}

}  // namespace iwalab
