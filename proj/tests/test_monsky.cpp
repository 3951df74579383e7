#include <doctest.h>

#include "iwalab/monsky.hpp"

using namespace iwalab;

namespace {

const Config cfg31{3, 1, 9};
const Config cfg32{3, 2, 6};

AlgebraElement gamma_minus(const Config& cfg, const Int& c, int i = 0) {
  ExpVec v(cfg.d, 0);
  v[i] = 1;
  return subtract(cfg, AlgebraElement::monomial(cfg, v),
                  AlgebraElement::monomial(cfg, ExpVec(cfg.d, 0), c));
}

// the two-variable element (g1-1) + p (g2-1) + p^2 (g1-1)(g2-1)
AlgebraElement remark_element(const Config& cfg) {
  auto g1m1 = gamma_minus(cfg, 1, 0);
  auto g2m1 = gamma_minus(cfg, 1, 1);
  return add(cfg, add(cfg, g1m1, scale(cfg, g2m1, Int(cfg.p))),
             scale(cfg, multiply(cfg, g1m1, g2m1), Int(cfg.p) * Int(cfg.p)));
}

}  // namespace

TEST_CASE("zero sets at finite level") {
  // xi = gamma - 1, d = 1: only the trivial character
  for (int n = 1; n <= 2; ++n) {
    auto z = zero_set_level(cfg31, gamma_minus(cfg31, 1), n);
    REQUIRE(z.size() == 1);
    CHECK(z[0].exps == std::vector<long>(1, 0));
  }

  // d = 2, xi = gamma_1 - 1: all p^n characters with omega(gamma_1) = 1
  auto z2 = zero_set_level(cfg32, simple_element(cfg32, {1, 0}, 0), 1);
  CHECK(z2.size() == 3);
  for (const auto& w : z2) CHECK(w.exps[0] == 0);

  // a unit has no zeros
  CHECK(zero_set_level(cfg31, AlgebraElement::one(cfg31), 2).empty());

  // gamma - 1 - p never vanishes
  CHECK(zero_set_level(cfg31, gamma_minus(cfg31, 4), 2).empty());

  // product = union
  auto xi = multiply(cfg31, simple_element(cfg31, {1}, 1), gamma_minus(cfg31, 4));
  auto zp = zero_set_level(cfg31, xi, 2);
  auto zf = zero_set_level(cfg31, simple_element(cfg31, {1}, 1), 2);
  CHECK(zp == zf);

  // sharp inverts the zero set
  auto zs = zero_set_level(cfg31, sharp(cfg31, simple_element(cfg31, {1}, 1)), 2);
  REQUIRE(zs.size() == zf.size());
  for (const auto& w : zf) {
    std::vector<long> inv{(9 - w.exps[0]) % 9};
    bool found = false;
    for (const auto& u : zs)
      if (u.exps == inv) found = true;
    CHECK(found);
  }

  // budget errors name the requirement
  EnumerationOptions tight;
  tight.budget = 8;
  CHECK_THROWS_AS(zero_set_level(cfg31, gamma_minus(cfg31, 1), 2, tight), budget_error);
}

TEST_CASE("zero sets are unions of galois orbits (d = 1)") {
  auto zf = zero_set_level(cfg31, simple_element(cfg31, {1}, 2), 2);
  REQUIRE(!zf.empty());
  for (const auto& w : zf)
    for (const auto& conj : galois_orbit(cfg31, w)) {
      bool found = false;
      for (const auto& u : zf)
        if (u == conj) found = true;
      CHECK(found);
    }
}

TEST_CASE("the valuation-balancing example has only the trivial zero") {
  AlgebraElement xi = remark_element(cfg32);
  for (int n = 1; n <= 2; ++n) {
    EnumerationOptions opts;
    opts.budget = 729;
    auto z = zero_set_level(cfg32, xi, n, opts);
    REQUIRE(z.size() == 1);
    CHECK(z[0].exps == std::vector<long>(2, 0));

    ZeroSetReport rep = detect_flats(cfg32, z, n, opts);
    REQUIRE(rep.cover.size() == 1);
    CHECK(rep.cover[0].codim() == 2);
    CHECK(rep.residual.empty());
    CHECK(rep.cover_exact);

    NsReport ns = ns_hypothesis_level(cfg32, xi, n, opts);
    CHECK(ns.verdict == NsVerdict::Holds);
  }
}

TEST_CASE("codimension-one flats are detected and flagged") {
  // d = 2, gamma_1 - 1: the full coset {omega(gamma_1) = 1}
  AlgebraElement xi = simple_element(cfg32, {1, 0}, 0);
  for (int n = 1; n <= 2; ++n) {
    EnumerationOptions opts;
    opts.budget = 729;
    auto z = zero_set_level(cfg32, xi, n, opts);
    ZeroSetReport rep = detect_flats(cfg32, z, n, opts);
    REQUIRE(rep.cover.size() == 1);
    CHECK(rep.cover[0].codim() == 1);
    CHECK(rep.residual.empty());
    CHECK(flat_is_expandable(cfg32, rep.cover[0]));

    NsReport ns = ns_hypothesis_level(cfg32, xi, n, opts);
    CHECK(ns.verdict == NsVerdict::Violated);
    REQUIRE(ns.witness.has_value());
    CHECK(ns.witness->codim() == 1);
  }

  // the product of two coordinate hyperplane cuts: two codim-1 flats
  AlgebraElement prod = multiply(cfg32, simple_element(cfg32, {1, 0}, 0),
                                 simple_element(cfg32, {0, 1}, 0));
  auto z = zero_set_level(cfg32, prod, 1);
  ZeroSetReport rep = detect_flats(cfg32, z, 1);
  int codim1 = 0;
  for (const auto& f : rep.cover)
    if (f.codim() == 1) ++codim1;
  CHECK(codim1 == 2);
  CHECK(rep.cover_exact);
}

TEST_CASE("ns hypothesis for d = 1") {
  // no zeros at all: holds
  CHECK(ns_hypothesis_level(cfg31, gamma_minus(cfg31, 4), 2).verdict == NsVerdict::Holds);
  // order-3 characters vanish: for d = 1 any zero is a codim-1 flat
  auto xi = multiply(cfg31, simple_element(cfg31, {1}, 1), gamma_minus(cfg31, 4));
  CHECK(ns_hypothesis_level(cfg31, xi, 1).verdict == NsVerdict::Violated);
}

TEST_CASE("phi pair construction") {
  // empty flat list: (1, 1)
  PhiPair none = construct_phi_pair(cfg32, {});
  CHECK(equal(cfg32, none.phi1, AlgebraElement::one(cfg32)));
  CHECK(equal(cfg32, none.phi2, AlgebraElement::one(cfg32)));

  // single point flat at the trivial character, d = 2: gamma_1 - 1 and gamma_2 - 1
  FlatLevel point;
  point.level = 1;
  point.basis = IntMat::identity(2);
  point.targets = {0, 0};
  PhiPair pp = construct_phi_pair(cfg32, {point});
  CHECK(equal(cfg32, pp.phi1, simple_element(cfg32, {1, 0}, 0)));
  CHECK(equal(cfg32, pp.phi2, simple_element(cfg32, {0, 1}, 0)));
  REQUIRE(pp.factors1.size() == 1);
  REQUIRE(pp.factors2.size() == 1);
  CHECK_FALSE(simple_same_ideal(cfg32, pp.factors1[0], pp.factors2[0]));

  // a codim-1 flat is rejected
  FlatLevel line;
  line.level = 1;
  line.basis = IntMat(1, 2);
  line.basis.at(0, 0) = 1;
  line.targets = {0};
  CHECK_THROWS_AS(construct_phi_pair(cfg32, {line}), input_error);

  // the flat of the valuation-balancing element: the pair vanishes on it
  AlgebraElement xi = remark_element(cfg32);
  auto z = zero_set_level(cfg32, xi, 1);
  ZeroSetReport rep = detect_flats(cfg32, z, 1);
  PhiPair pr = construct_phi_pair(cfg32, rep.cover);
  for (const auto& omega : z) {
    CHECK(character_value_is_zero(evaluate_character(cfg32, omega, pr.phi1)));
    CHECK(character_value_is_zero(evaluate_character(cfg32, omega, pr.phi2)));
  }
}

TEST_CASE("nonsimple twist search") {
  // xi = gamma - 1 at k = 1: phi(gamma) = 1 + 3 works
  TwistSearchOptions opts;
  opts.order_bound = 1;
  UnitCharacter phi = find_nonsimple_twist(cfg31, gamma_minus(cfg31, 1), opts);
  CHECK(phi.units[0] == 4);

  // no simploid factors: the trivial character
  UnitCharacter triv =
      find_nonsimple_twist(cfg31, AlgebraElement::monomial(cfg31, {2}, Int(9)), opts);
  CHECK(triv.units[0] == 1);

  // the product (gamma-1)(gamma-1-p): the twisted element has no zeros
  AlgebraElement xi = multiply(cfg31, gamma_minus(cfg31, 1), gamma_minus(cfg31, 4));
  UnitCharacter phi2 = find_nonsimple_twist(cfg31, xi, opts);
  // build the exact twisted element (gamma - u)(gamma - 4u), a unit multiple
  // of phi2^*(xi)
  Int u = phi2.units[0];
  AlgebraElement twisted = multiply(cfg31, gamma_minus(cfg31, u),
                                    gamma_minus(cfg31, mod_reduce(4 * u, cfg31.p_precision())));
  for (int n = 0; n <= 2; ++n) CHECK(zero_set_level(cfg31, twisted, n).empty());
  // and the mod-p^M twist of xi itself matches the unit-cleared form
  AlgebraElement direct = twist_endo(cfg31, phi2, xi);
  AlgebraElement cleared = scale(cfg31, direct, mod_reduce(u * u, cfg31.p_precision()));
  cleared.ring = CoeffRing::ModPM;
  AlgebraElement expect = twisted;
  expect.ring = CoeffRing::ModPM;
  CHECK(equal(cfg31, normalized(cfg31, cleared), normalized(cfg31, expect)));

  // unknown factors are rejected
  AlgebraElement nonline = remark_element(cfg32);
  CHECK_THROWS_AS(find_nonsimple_twist(cfg32, nonline, opts), input_error);
}
