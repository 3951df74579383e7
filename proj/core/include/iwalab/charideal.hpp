#pragma once

#include <string>
#include <vector>

#include "iwalab/algebra.hpp"
#include "iwalab/monsky.hpp"

namespace iwalab {

// Formal direct sum of Lambda/(xi_i^{r_i}); the carrier of characteristic
// ideal bookkeeping. Irreducibility of the factors is the caller's business.
struct ElementaryModule {
  std::vector<std::pair<AlgebraElement, int>> factors;  // (xi, multiplicity)

  bool is_zero_module() const { return factors.empty(); }
};

void check_elementary(const Config& cfg, const ElementaryModule& m);

// A principal ideal kept in factored form; the empty list is the unit ideal.
struct IdealDescriptor {
  std::vector<std::pair<AlgebraElement, int>> factors;

  bool is_unit() const { return factors.empty(); }
};

// chi(M) = prod (xi_i^{r_i}); the unit ideal exactly for the zero module.
IdealDescriptor chi(const Config& cfg, const ElementaryModule& m);

IdealDescriptor sharp_ideal(const Config& cfg, const IdealDescriptor& ideal);
IdealDescriptor twist_ideal(const Config& cfg, const IdealDescriptor& ideal,
                            const UnitCharacter& phi, bool inverse = false);

// x = unit * gamma^shift * y for a sign unit and monomial shift.
bool equal_up_to_unit_monomial(const Config& cfg, const AlgebraElement& x,
                               const AlgebraElement& y);
bool ideals_equal_up_to_unit(const Config& cfg, const IdealDescriptor& a,
                             const IdealDescriptor& b);

struct SplitResult {
  ElementaryModule first;   // simple part / p part
  ElementaryModule second;  // complement
  std::vector<std::string> warnings;  // factors routed by default ("unknown")
};

// Partition into simple and non-simple factors; auto-detection covers factors
// that are exactly cyclotomic polynomials in a single monomial.
SplitResult split_simple(const Config& cfg, const ElementaryModule& m);
// Partition into the (p)-power part and the rest.
SplitResult split_p(const Config& cfg, const ElementaryModule& m);

// Equality of the simple ideals (f) and (g): same gamma-line and zeta-order.
// Inputs must be recognizable simple elements.
bool coprime_simple(const Config& cfg, const AlgebraElement& f, const AlgebraElement& g);

enum class PsnVerdict { Certified, Unknown };

struct PsnResult {
  PsnVerdict verdict = PsnVerdict::Unknown;
  std::string detail;
};

// Certificate that >= 2 pairwise coprime annihilators exist, in the checkable
// fragment: distinct simple forms, p-power against a unit coefficient, or
// distinct one-variable polynomials with unit resultant. Everything else is
// honestly "unknown".
PsnResult pseudo_null_certificate(const Config& cfg, const std::vector<AlgebraElement>& anns);

// |M / I_n M| via the valuation identity p^{sum_i r_i sum_omega v_p(omega(xi_i))}.
// A character zero of any factor is a precondition error.
Int finite_level_size(const Config& cfg, const ElementaryModule& m, int level,
                      const EnumerationOptions& opts = {});

struct GrowthProfile {
  std::vector<long> ranks;     // free rank of Lambda/(I_n + (xi)) for n = 0..N
  std::vector<double> ratios;  // rank_n / p^{n(d-1)}
  double fitted_constant = 0;  // max ratio
  bool bound_holds = true;     // ranks <= fitted_constant * p^{n(d-1)}
  bool eventually_constant = false;  // last two ranks agree
};

// Exact free-rank sequence of Lambda/(I_n + (xi)) by Smith normal form of the
// multiplication matrix on p^{dn} monomials.
GrowthProfile growth_profile(const Config& cfg, const AlgebraElement& xi, int max_level,
                             const EnumerationOptions& opts = {});

// Multiplication-by-eta matrix on the monomial basis of Lambda_n.
IntMat multiplication_matrix(const Config& cfg, const AlgebraElement& eta, int level);

}  // namespace iwalab
