#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iwalab/algebra.hpp"
#include "iwalab/matrix.hpp"

namespace iwalab {

// Enumeration controls shared by the character sweeps. The budget bounds the
// number of characters (p^{dn}) a single call may enumerate.
struct EnumerationOptions {
  long budget = 729;  // default 3^6
  int jobs = 1;
};

// A Z_p-flat truncated at a finite level: {omega : omega(gamma^{B_i}) =
// zeta_{p^n}^{t_i}}, with the rows of B expandable to a basis mod p^n.
struct FlatLevel {
  int level = 0;
  IntMat basis;               // k x d
  std::vector<long> targets;  // length k
  std::size_t codim() const { return basis.rows(); }
};

// rows of B are part of a basis of (Z/p^n)^d: all SNF divisors prime to p
bool flat_is_expandable(const Config& cfg, const FlatLevel& flat);
// all characters of the flat at its level (enumerates Gamma_n^vee)
std::vector<Character> flat_characters(const Config& cfg, const FlatLevel& flat,
                                       const EnumerationOptions& opts = {});

struct ZeroSetReport {
  int level = 0;
  std::vector<Character> zeros;      // canonical order
  std::vector<FlatLevel> cover;      // greedy maximal cover, largest flats first
  std::vector<Character> residual;   // zeros not covered by the flats
  bool cover_exact = true;           // residual empty
  bool full_codim_scan = true;       // false when intermediate codimensions were skipped
};

// {omega in Gamma_n^vee : omega(xi) = 0}, exact.
std::vector<Character> zero_set_level(const Config& cfg, const AlgebraElement& xi, int level,
                                      const EnumerationOptions& opts = {});

// Greedy flat cover of a zero set (largest subgroups first, lexicographic
// tie-breaking).
ZeroSetReport detect_flats(const Config& cfg, const std::vector<Character>& zeros, int level,
                           const EnumerationOptions& opts = {});

enum class NsVerdict { Holds, Violated, Undetermined };

struct NsReport {
  NsVerdict verdict = NsVerdict::Undetermined;
  int level = 0;
  std::optional<FlatLevel> witness;  // full codim-1 flat when violated
  std::string note;
  ZeroSetReport zero_report;
};

// Finite-level shadow of the no-simple-divisor hypothesis: violated when a
// full codimension-one coset of characters vanishes; holds when the zero set
// is covered by flats of codimension >= 2. A violation at level n is
// necessary, not sufficient, for a simple divisor.
NsReport ns_hypothesis_level(const Config& cfg, const AlgebraElement& xi, int level,
                             const EnumerationOptions& opts = {});

struct PhiPair {
  AlgebraElement phi1, phi2;
  std::vector<SimpleForm> factors1, factors2;
};

// From flats of codimension >= 2, pick Z_p-independent directions inside each
// flat's direction subgroup and form the two products of simple elements
// vanishing on every flat.
PhiPair construct_phi_pair(const Config& cfg, const std::vector<FlatLevel>& flats,
                           const EnumerationOptions& opts = {});

struct TwistSearchOptions {
  unsigned order_bound = 1;     // k: phi(Gamma) inside 1 + p^k Z_p
  int exponent_bound_exp = -1;  // test roots of unity of order up to p^j; -1 = M/2
  long search_budget = 512;     // candidate unit tuples tried before giving up
};

// A unit character phi with phi(Gamma) in 1 + p^k Z_p making every detected
// simploid factor of xi * xi^sharp stay off the roots of unity after the
// twist; factors that cannot be recognized are an error ("unknown").
UnitCharacter find_nonsimple_twist(const Config& cfg, const AlgebraElement& xi,
                                   const TwistSearchOptions& opts = {});

}  // namespace iwalab
