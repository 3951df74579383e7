#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iwalab/algebra.hpp"
#include "iwalab/matrix.hpp"

namespace iwalab {

enum class TorsionPolicy { RequireFinite, TakeTorsion };

// Finite abelian p-group with a commuting action of the level-n group
// generators. Always kept in Smith-normal coordinates: the relation matrix is
// diag(divisors) with divisors a chain of p-powers > 1, and the i-th
// coordinate lives in Z/divisors[i].
//
// `coords` and `section` record the passage from the presentation the module
// was constructed from (ambient Z^g) to the normalized coordinates; they let
// callers transport maps that were written down on the presentation.
struct FiniteModule {
  Config cfg;
  int level = 0;
  std::vector<Int> divisors;         // p-powers > 1, d1 | d2 | ...
  std::vector<IntMat> actions;       // one rank x rank matrix per generator
  std::vector<IntMat> action_invs;   // inverses mod relations (empty if absent)
  std::size_t ambient_rank = 0;
  IntMat coords;   // ambient -> normalized (rank x ambient)
  IntMat section;  // normalized -> ambient (ambient x rank), coords*section = I

  std::size_t rank() const { return divisors.size(); }
  bool is_zero() const { return divisors.empty(); }
  Int order() const;
  Int exponent() const;  // 1 for the zero module
  std::vector<Int> reduce_element(std::vector<Int> x) const;
  bool element_is_zero(const std::vector<Int>& x) const;
};

// Build the module Z^g / columns(relations), normalized to SNF coordinates,
// restricted to its p-primary part. `actions` are g x g matrices on the
// ambient presentation. With RequireFinite a free quotient is an input error;
// with TakeTorsion free coordinates are dropped. With `strict` the (Gamma-1)
// module invariants are enforced at construction; otherwise they are left to
// module_invariant_violations.
FiniteModule presented_module(const Config& cfg, int level, std::size_t ambient_rank,
                              const IntMat& relations, const std::vector<IntMat>& actions,
                              TorsionPolicy policy, bool strict = true);

// Convenience: direct sum of cyclic groups with given action matrices already
// in diagonal coordinates.
FiniteModule module_from_divisors(const Config& cfg, int level, std::vector<Int> divisors,
                                  std::vector<IntMat> actions, bool strict = true);

FiniteModule zero_module(const Config& cfg, int level);

// (Gamma-1)-style invariants: actions well defined, pairwise commuting,
// invertible, trivial at level p^n. Returns human-readable violations.
std::vector<std::string> module_invariant_violations(const FiniteModule& m);

bool same_presentation(const FiniteModule& a, const FiniteModule& b);

// Matrix of the action of gamma^v (negative exponents via cached inverses).
IntMat monomial_action(const FiniteModule& m, const ExpVec& v);
// Matrix of the action of an exact or mod-p^M group-algebra element.
// `declared_level`, when given, must match the module level.
IntMat element_action(const FiniteModule& m, const AlgebraElement& lambda,
                      std::optional<int> declared_level = std::nullopt);
std::vector<Int> act(const FiniteModule& m, const AlgebraElement& lambda,
                     const std::vector<Int>& x,
                     std::optional<int> declared_level = std::nullopt);

// A homomorphism between normalized modules; columns are the images of the
// source coordinates. Well-definedness is verified eagerly at construction.
struct ModuleMap {
  FiniteModule src, tgt;
  IntMat mat;  // tgt.rank x src.rank

  static ModuleMap make(FiniteModule src, FiniteModule tgt, IntMat mat,
                        const std::string& what = "module map");
  static ModuleMap identity(const FiniteModule& m);
  static ModuleMap zero(const FiniteModule& src, const FiniteModule& tgt);

  std::vector<Int> apply(const std::vector<Int>& x) const;
  bool is_equivariant() const;
  bool is_injective() const;
  bool is_surjective() const;
  bool is_zero_map() const;
};

bool maps_equal(const ModuleMap& a, const ModuleMap& b);
ModuleMap compose(const ModuleMap& g, const ModuleMap& f);  // g  after f
ModuleMap scale_map(const ModuleMap& f, const Int& c);

FiniteModule dual_module(const FiniteModule& m);
ModuleMap dual_map(const ModuleMap& f);  // dual(tgt) -> dual(src)
// Same group, action of gamma replaced by gamma^{-1}.
FiniteModule sharp_module(const FiniteModule& m);
// Action matrices scaled by the unit values of phi (phi^{-1} with `inverse`).
FiniteModule twist_module(const FiniteModule& m, const UnitCharacter& phi, bool inverse,
                          bool strict = true);

struct Submodule {
  FiniteModule module;
  ModuleMap inclusion;   // module -> parent
  IntMat generators;     // the generating columns inside the parent (as given)
};

struct Quotient {
  FiniteModule module;
  ModuleMap projection;  // parent -> module
  IntMat lift;           // parent-coordinates section of the projection
};

// Subgroup generated by the given columns; it must be stable under the
// action (otherwise input_error naming the witness).
Submodule submodule(const FiniteModule& m, const IntMat& generator_cols,
                    const std::string& what = "submodule");
Quotient quotient(const FiniteModule& m, const IntMat& generator_cols);

Submodule kernel_of_map(const ModuleMap& f);
Submodule image_of_map(const ModuleMap& f);

// Coordinates of x in the subgroup generated by gens (+ relations), if any.
std::optional<std::vector<Int>> express_in_span(const FiniteModule& m, const IntMat& gens,
                                                const std::vector<Int>& x);

struct DirectSum {
  FiniteModule module;
  ModuleMap incl_left, incl_right, proj_left, proj_right;
};
DirectSum direct_sum(const FiniteModule& a, const FiniteModule& b);

// {x : gamma x = psi(gamma) x} as a submodule; `extend_scalars` computes the
// eigenspace after tensoring with Z[zeta] when the eigenvalue does not exist
// in Z/p^e (the returned module then underlies the extended one).
Submodule eigenspace(const FiniteModule& m, const Character& psi, bool extend_scalars = false);
Submodule invariants(const FiniteModule& m, int sublevel);
Quotient coinvariants(const FiniteModule& m, int sublevel);

// Gamma-invariant Q/Z-valued pairing between two modules, as its value
// matrix on coordinates. Values are exact rationals reduced into [0,1).
struct PairingMatrix {
  FiniteModule left, right;
  std::vector<std::vector<Rat>> vals;

  Rat pair(const std::vector<Int>& x, const std::vector<Int>& y) const;
};

PairingMatrix make_pairing(FiniteModule left, FiniteModule right,
                           std::vector<std::vector<Rat>> vals,
                           const std::string& what = "pairing");
// Canonical evaluation pairing dual(m) x m.
PairingMatrix evaluation_pairing(const FiniteModule& m);

std::vector<std::string> pairing_violations(const PairingMatrix& P);  // bilinearity, invariance
bool pairing_gamma_invariant(const PairingMatrix& P);
bool is_perfect(const PairingMatrix& P);
// Induced maps left -> dual(right) and right -> dual(left).
ModuleMap pairing_left_map(const PairingMatrix& P);
ModuleMap pairing_right_map(const PairingMatrix& P);
// {y in right : <S, y> = 0} for the subgroup generated by the given columns.
Submodule pairing_annihilator_right(const PairingMatrix& P, const IntMat& left_gens);
Submodule pairing_annihilator_left(const PairingMatrix& P, const IntMat& right_gens);

// Element enumeration for desk-scale oracles; guarded by max_order.
std::vector<std::vector<Int>> enumerate_elements(const FiniteModule& m,
                                                 unsigned long max_order = 1u << 16);
std::vector<Int> random_element(const FiniteModule& m, std::mt19937& rng);

enum class IsoVerdict { Yes, No, Undetermined };

struct IsoResult {
  IsoVerdict verdict;
  std::optional<IntMat> map;  // witness when verdict == Yes
  std::string note;
};

// Search for a group isomorphism commuting with the actions. Bounded: when
// the search space exceeds the budget the verdict is Undetermined, never No.
IsoResult equivariant_isomorphism(const FiniteModule& a, const FiniteModule& b,
                                  unsigned long node_budget = 1u << 20);

}  // namespace iwalab
