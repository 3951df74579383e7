#pragma once

#include <map>
#include <optional>
#include <vector>

#include "iwalab/cyclotomic.hpp"
#include "iwalab/numeric.hpp"

namespace iwalab {

enum class CoeffRing { ExactInt, ModPM, Cyclotomic };

// Character of Gamma_n = (Z/p^n)^d: omega(gamma_i) = zeta_{p^n}^{exps[i]}.
struct Character {
  int level = 0;
  std::vector<long> exps;  // length d, reduced mod p^level

  bool operator==(const Character& o) const = default;
  bool operator<(const Character& o) const {
    if (level != o.level) return level < o.level;
    return exps < o.exps;
  }
};

// Continuous homomorphism phi: Gamma -> Z_p^* at working precision,
// phi(gamma_i) = units[i] with units[i] = 1 mod p (mod 4 when p = 2).
struct UnitCharacter {
  std::vector<Int> units;  // length d, values mod p^M

  static UnitCharacter trivial(int d) { return UnitCharacter{std::vector<Int>(d, Int(1))}; }
};

// Finite-support element of the group algebra: a Laurent polynomial in the
// group generators. The one carrier for Lambda, Lambda_n and Q_n elements.
// `denom` is a positive p-power scaling the whole element (Q_n support);
// it stays 1 for Lambda/Lambda_n work.
struct AlgebraElement {
  CoeffRing ring = CoeffRing::ExactInt;
  Int denom = Int(1);
  std::map<ExpVec, Cyclotomic> terms;  // exponent vector -> nonzero coefficient

  static AlgebraElement zero(const Config& cfg);
  static AlgebraElement one(const Config& cfg);
  static AlgebraElement monomial(const Config& cfg, const ExpVec& v, const Int& coeff = Int(1));

  bool is_zero() const { return terms.empty(); }
  std::size_t term_count() const { return terms.size(); }
  // largest order exponent appearing among the coefficients
  unsigned coeff_order() const;
};

// Canonical form: zero coefficients dropped, mod-p^M coefficients reduced into
// [0, p^M), cyclotomic coefficients at their minimal order, denominator freed
// of common p factors.
AlgebraElement normalized(const Config& cfg, AlgebraElement x);

bool equal(const Config& cfg, const AlgebraElement& x, const AlgebraElement& y);

AlgebraElement add(const Config& cfg, const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement negate(const Config& cfg, const AlgebraElement& x);
AlgebraElement subtract(const Config& cfg, const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement scale(const Config& cfg, const AlgebraElement& x, const Int& c);

// Formal Laurent product; with `level` the exponents are further reduced
// mod p^level (multiplication in Lambda_n).
AlgebraElement multiply(const Config& cfg, const AlgebraElement& x, const AlgebraElement& y,
                        std::optional<int> level = std::nullopt);

// Exponent reduction into [0, p^level)^d, collecting coefficients.
AlgebraElement reduce_level(const Config& cfg, const AlgebraElement& x, int level);

// gamma^v -> gamma^{-v} on every term; an involutive ring automorphism.
AlgebraElement sharp(const Config& cfg, const AlgebraElement& x);

// f_{gamma,zeta} for gamma the monomial with exponent vector `gamma_exps`
// (required outside Gamma^p) and zeta of order p^l: the p^l-th cyclotomic
// polynomial evaluated at the monomial.
AlgebraElement simple_element(const Config& cfg, const ExpVec& gamma_exps, unsigned l);

// The twist endomorphism phi^*: c gamma^v -> c phi(gamma^v)^{-1} gamma^v
// (exponent +1 with `inverse` set, giving (1/phi)^*). Exact-integer input is
// implicitly reduced mod p^M; the ModPM tag of the result records this.
AlgebraElement twist_endo(const Config& cfg, const UnitCharacter& phi, const AlgebraElement& x,
                          bool inverse = false);

// Nm_{Gamma_n/Gamma_m} = sum of the kernel of Gamma_n -> Gamma_m, in Lambda_n.
AlgebraElement norm_element(const Config& cfg, int n, int m);

// phi evaluated on a group element.
Int unit_character_value(const Config& cfg, const UnitCharacter& phi, const ExpVec& v);
UnitCharacter unit_character_inverse(const Config& cfg, const UnitCharacter& phi);
void check_unit_character(const Config& cfg, const UnitCharacter& phi);

struct CharValue {
  Cyclotomic value;
  bool exact = true;  // false when computed from mod-p^M coefficients
};

// Exact order exponent l of omega (image is mu_{p^l}).
unsigned character_order_exponent(const Config& cfg, const Character& omega);
// omega(gamma^v) as an exact cyclotomic value.
Cyclotomic character_value(const Config& cfg, const Character& omega, const ExpVec& v);
// Substitute omega(gamma_i) into x; exact iff x has exact coefficients.
CharValue evaluate_character(const Config& cfg, const Character& omega, const AlgebraElement& x);
// Exact zero test; refuses inexact values.
bool character_value_is_zero(const CharValue& v);

// The Galois orbit {sigma . omega}, sorted by exponent tuple.
std::vector<Character> galois_orbit(const Config& cfg, const Character& omega);

// e_omega = |Gamma_n|^{-1} sum_{gamma} omega(gamma^{-1}) gamma, with exact
// p-power-denominator cyclotomic coefficients.
AlgebraElement idempotent(const Config& cfg, const Character& omega);

// All characters of Gamma_n in canonical (lexicographic) order.
std::vector<Character> all_characters(const Config& cfg, int level);

// All group vectors [0, p^level)^d in lexicographic order.
std::vector<ExpVec> group_vectors(const Config& cfg, int level);

void check_character(const Config& cfg, const Character& omega);

// Canonical form of an element recognized as unit * gamma^shift * f_{gamma,zeta}:
// the base gamma as an exponent vector outside Gamma^p and the order exponent
// of zeta. The gamma-line determines the ideal together with the order.
struct SimpleForm {
  ExpVec direction;        // detected base exponent vector (not in p Z^d)
  unsigned order_exponent; // zeta has order p^l
  ExpVec shift;            // monomial prefactor
  Int unit;                // +-1
  // primitive direction with canonical sign; equal canonical lines mean equal
  // Z_p-lines
  ExpVec canonical_line() const;
};

// Recognize elements that are exactly a cyclotomic polynomial in a single
// monomial, up to a sign and a monomial shift. Everything else is declined.
std::optional<SimpleForm> detect_simple(const Config& cfg, const AlgebraElement& x);

// Ideal equality for two recognized simple elements: equal gamma-lines and
// equal zeta-orders.
bool simple_same_ideal(const Config& cfg, const SimpleForm& f, const SimpleForm& g);

AlgebraElement element_pow(const Config& cfg, const AlgebraElement& x, int e,
                           std::optional<int> level = std::nullopt);

}  // namespace iwalab
