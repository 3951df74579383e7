#include <doctest.h>

#include <random>

#include "iwalab/system.hpp"

using namespace iwalab;

namespace {

const Config cfg21{2, 1, 9};
const Config cfg31{3, 1, 9};
const Config cfg32{3, 2, 6};

AlgebraElement gamma_minus(const Config& cfg, const Int& c, int i = 0) {
  ExpVec v(cfg.d, 0);
  v[i] = 1;
  return subtract(cfg, AlgebraElement::monomial(cfg, v),
                  AlgebraElement::monomial(cfg, ExpVec(cfg.d, 0), c));
}

ElementaryModule single(const AlgebraElement& xi, int r = 1) {
  ElementaryModule m;
  m.factors.emplace_back(xi, r);
  return m;
}

AlgebraElement const_elt(const Config& cfg, const Int& c) {
  return AlgebraElement::monomial(cfg, ExpVec(cfg.d, 0), c);
}

}  // namespace

TEST_CASE("trivial system validates") {
  GammaSystem sys = trivial_system(cfg31, 1);
  SystemReport rep = validate(sys);
  CHECK(rep.all_pass());
}

TEST_CASE("synthetic system Lambda/(p): sizes and axioms") {
  // p = 2, d = 1: b_n = F_2[Gamma_n], |b_n| = 2^{2^n}
  GammaSystem sys = from_torsion_module(cfg21, single(const_elt(cfg21, 2)), 2, SynthMode::Full);
  for (int n = 0; n <= 2; ++n) {
    Int expect = p_pow(2, 1u << n);
    CHECK(sys.level(n).b.order() == expect);
    CHECK(sys.level(n).a.order() == expect);
  }
  SystemReport rep = validate(sys);
  CHECK(rep.all_pass());
}

TEST_CASE("synthetic system Lambda/(gamma - 1 - p): cyclic levels") {
  GammaSystem sys = from_torsion_module(cfg31, single(gamma_minus(cfg31, 4)), 2, SynthMode::Full);
  for (int n = 0; n <= 2; ++n) {
    CHECK(sys.level(n).b.divisors == std::vector<Int>{p_pow(3, n + 1)});
  }
  CHECK(validate(sys).all_pass());
}

TEST_CASE("corrupting a transition map produces a (G-3) failure with witness") {
  GammaSystem sys = from_torsion_module(cfg21, single(const_elt(cfg21, 2)), 1, SynthMode::Full);
  REQUIRE(validate(sys).all_pass());
  GammaSystem bad = sys;
  auto& t = bad.maps.at({0, 1});
  IntMat m = t.r_b.mat;
  m.at(0, 0) = m.at(0, 0) + 1;
  t.r_b = ModuleMap::make(t.r_b.src, t.r_b.tgt, m, "mutated r_b");
  SystemReport rep = validate(bad);
  CHECK_FALSE(rep.all_pass());
  bool g3_failed = false;
  for (const auto* f : rep.failures())
    if (f->axiom == "G3") g3_failed = true;
  CHECK(g3_failed);
}

TEST_CASE("axiom suite across the synthesis instances") {
  std::vector<Config> cfgs{{2, 1, 9}, {3, 1, 9}, {3, 2, 6}};
  std::vector<int> Ns{2, 2, 1};
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    const Config& cfg = cfgs[i];
    int N = Ns[i];
    std::vector<ElementaryModule> mods;
    mods.push_back(single(const_elt(cfg, cfg.p)));        // Lambda/(p)
    mods.push_back(single(gamma_minus(cfg, 1 + cfg.p)));  // Lambda/(gamma-1-p)
    mods.push_back(single(const_elt(cfg, cfg.p), 2));     // Lambda/(p^2)
    for (const auto& m : mods) {
      GammaSystem sys = from_torsion_module(cfg, m, N, SynthMode::Full);
      CHECK(validate(sys).all_pass());
    }
    // Phi_3 in the first generator, torsion mode
    ExpVec g1(cfg.d, 0);
    g1[0] = 1;
    GammaSystem tor = from_torsion_module(
        cfg, single(simple_element(cfg, g1, cfg.p == 3 ? 1u : 0u)), N, SynthMode::Torsion);
    CHECK(validate(tor).all_pass());
  }
}

TEST_CASE("torsion-mode Phi_3 system: levels and kernels") {
  GammaSystem sys =
      from_torsion_module(cfg31, single(simple_element(cfg31, {1}, 1)), 2, SynthMode::Torsion);
  // level 0: Lambda/(I_0 + Phi_3) = Z/3; higher levels lose the free part
  CHECK(sys.level(0).b.order() == 3);
  CHECK(sys.level(1).b.is_zero());
  CHECK(sys.level(2).b.is_zero());
  CHECK(validate(sys).all_pass());

  KernelSystem ker = kernel_system(sys);
  CHECK(ker.b0[0].module.order() == 3);  // everything dies going up
  CHECK(ker.a0[0].module.order() == 3);
  CHECK(ker.b0[2].module.is_zero());  // top level by convention

  ControlReport ctl = is_strongly_controlled(sys);
  CHECK_FALSE(ctl.strongly_controlled);
  CHECK(ctl.characterizations_agree);
  CHECK_FALSE(ctl.witness.empty());
}

TEST_CASE("mode full rejects factors with character zeros") {
  CHECK_THROWS_AS(
      from_torsion_module(cfg31, single(simple_element(cfg31, {1}, 1)), 1, SynthMode::Full),
      input_error);
}

TEST_CASE("strong control on full-mode systems") {
  GammaSystem sys = from_torsion_module(cfg31, single(gamma_minus(cfg31, 4)), 2, SynthMode::Full);
  ControlReport ctl = is_strongly_controlled(sys);
  CHECK(ctl.strongly_controlled);
  CHECK(ctl.r_all_injective);
  CHECK(ctl.k_all_surjective);
  CHECK(ctl.characterizations_agree);
}

TEST_CASE("the two control characterizations agree under random mutations") {
  // mutate r_b by composing with a random algebra action and rebuild the
  // adjoints; "all r injective" and "all k surjective" must be decided the
  // same way on every mutation, including joint failures
  GammaSystem base = from_torsion_module(cfg21, single(const_elt(cfg21, 2)), 2, SynthMode::Full);
  std::mt19937 rng(31);
  int agreements = 0;
  for (int trial = 0; trial < 50; ++trial) {
    GammaSystem sys = base;
    for (auto& [key, t] : sys.maps) {
      AlgebraElement lam;
      std::uniform_int_distribution<long> co(0, 2), expo(0, 3);
      for (int k = 0; k < 2; ++k)
        lam = add(cfg21, lam, AlgebraElement::monomial(cfg21, {expo(rng)}, Int(co(rng))));
      IntMat m = element_action(t.r_b.tgt, lam) * t.r_b.mat;
      t.r_b = ModuleMap::make(t.r_b.src, t.r_b.tgt, m, "mutated r_b");
      t.k_a = dual_map(t.r_b);
      t.r_a = dual_map(t.k_b);
    }
    ControlReport ctl = is_strongly_controlled(sys);
    CHECK(ctl.characterizations_agree);
    if (ctl.characterizations_agree) ++agreements;
  }
  CHECK(agreements == 50);
}

TEST_CASE("kernel system on a strongly controlled system is zero") {
  GammaSystem sys = from_torsion_module(cfg31, single(const_elt(cfg31, 3)), 2, SynthMode::Full);
  KernelSystem ker = kernel_system(sys);
  for (int n = 0; n <= 2; ++n) {
    CHECK(ker.a0[n].module.is_zero());
    CHECK(ker.b0[n].module.is_zero());
    CHECK(ker.stabilized[n]);
  }
}

TEST_CASE("derived pair: trivial families") {
  GammaSystem sys = from_torsion_module(cfg31, single(const_elt(cfg31, 3), 2), 1, SynthMode::Full);
  std::vector<IntMat> zero_gens;
  for (int n = 0; n <= 1; ++n) zero_gens.push_back(IntMat(sys.level(n).a.rank(), 0));
  DerivedPair dp = derived_pair(sys, zero_gens);
  for (int n = 0; n <= 1; ++n) {
    CHECK(dp.c_system.level(n).a.is_zero());
    CHECK(dp.e_system.level(n).a.order() == sys.level(n).a.order());
  }
  CHECK(validate(dp.c_system).all_pass());
  CHECK(validate(dp.e_system).all_pass());

  std::vector<IntMat> full_gens;
  for (int n = 0; n <= 1; ++n) full_gens.push_back(IntMat::identity(sys.level(n).a.rank()));
  DerivedPair dp2 = derived_pair(sys, full_gens);
  for (int n = 0; n <= 1; ++n) {
    CHECK(dp2.c_system.level(n).a.order() == sys.level(n).a.order());
    CHECK(dp2.e_system.level(n).a.is_zero());
  }
  CHECK(validate(dp2.c_system).all_pass());
  CHECK(validate(dp2.e_system).all_pass());
}

TEST_CASE("derived pair: c = p a on the Lambda/(p^2) system") {
  GammaSystem sys = from_torsion_module(cfg31, single(const_elt(cfg31, 3), 2), 1, SynthMode::Full);
  std::vector<IntMat> gens;
  for (int n = 0; n <= 1; ++n) gens.push_back(IntMat::identity(sys.level(n).a.rank()).scaled(3));
  DerivedPair dp = derived_pair(sys, gens);
  for (int n = 0; n <= 1; ++n) {
    Int ca = dp.c_system.level(n).a.order();
    Int ea = dp.e_system.level(n).a.order();
    CHECK(ca * ea == sys.level(n).a.order());
    // f_n is the annihilator of c_n: |f_n| |c_n| = |b_n| under perfection
    CHECK(dp.e_system.level(n).b.order() * ca == sys.level(n).b.order());
  }
  CHECK(validate(dp.c_system).all_pass());
  CHECK(validate(dp.e_system).all_pass());
}

TEST_CASE("derived prime system") {
  GammaSystem sc = from_torsion_module(cfg31, single(gamma_minus(cfg31, 4)), 2, SynthMode::Full);
  GammaSystem scp = derived_prime(sc);
  for (int n = 0; n <= 2; ++n) {
    CHECK(scp.level(n).a.divisors == sc.level(n).a.divisors);
    CHECK(scp.level(n).b.divisors == sc.level(n).b.divisors);
  }
  CHECK(validate(scp).all_pass());
  CHECK(is_strongly_controlled(scp).strongly_controlled);

  GammaSystem tor =
      from_torsion_module(cfg31, single(simple_element(cfg31, {1}, 1)), 2, SynthMode::Torsion);
  GammaSystem torp = derived_prime(tor);
  CHECK(validate(torp).all_pass());
  CHECK(is_strongly_controlled(torp).strongly_controlled);
  for (int n = 0; n <= 2; ++n) {
    Int q = tor.level(n).a.order();
    Int r = torp.level(n).a.order();
    CHECK(mpz_divisible_p(q.get_mpz_t(), r.get_mpz_t()));
  }
}

TEST_CASE("exactness bookkeeping |a0| |a'| <= |a|, equality when stabilized") {
  GammaSystem tor =
      from_torsion_module(cfg31, single(simple_element(cfg31, {1}, 1)), 2, SynthMode::Torsion);
  KernelSystem ker = kernel_system(tor);
  GammaSystem prime = derived_prime(tor);
  for (int n = 0; n <= 2; ++n) {
    Int lhs = ker.a0[n].module.order() * prime.level(n).a.order();
    CHECK(lhs <= tor.level(n).a.order());
    if (ker.stabilized[n]) CHECK(lhs == tor.level(n).a.order());
  }
}

TEST_CASE("scalar and torsion systems") {
  GammaSystem sys = from_torsion_module(cfg31, single(const_elt(cfg31, 3), 2), 1, SynthMode::Full);
  GammaSystem s1 = scalar_system(sys, AlgebraElement::one(cfg31));
  for (int n = 0; n <= 1; ++n) CHECK(s1.level(n).a.order() == sys.level(n).a.order());
  CHECK(validate(s1).all_pass());
  GammaSystem t1 = torsion_system(sys, AlgebraElement::one(cfg31));
  for (int n = 0; n <= 1; ++n) CHECK(t1.level(n).a.is_zero());
  CHECK(validate(t1).all_pass());

  // lambda = p on the Lambda/(p^2) system: |p a_n| = |a_n|^{1/2}
  GammaSystem sp = scalar_system(sys, const_elt(cfg31, 3));
  for (int n = 0; n <= 1; ++n)
    CHECK(sp.level(n).a.order() * sp.level(n).a.order() == sys.level(n).a.order());
  CHECK(validate(sp).all_pass());
  GammaSystem tp = torsion_system(sys, const_elt(cfg31, 3));
  CHECK(validate(tp).all_pass());
}

TEST_CASE("twistable order") {
  GammaSystem triv = trivial_system(cfg31, 1);
  CHECK(twistable_order(triv) == 0);
  GammaSystem sp = from_torsion_module(cfg31, single(const_elt(cfg31, 3)), 1, SynthMode::Full);
  CHECK(twistable_order(sp) == 1);
  GammaSystem sg = from_torsion_module(cfg31, single(gamma_minus(cfg31, 4)), 2, SynthMode::Full);
  CHECK(twistable_order(sg) == 1);
}

TEST_CASE("twist system") {
  GammaSystem sys = from_torsion_module(cfg31, single(const_elt(cfg31, 3)), 1, SynthMode::Full);
  GammaSystem t0 = twist_system(sys, UnitCharacter::trivial(1));
  for (int n = 0; n <= 1; ++n) CHECK(t0.level(n).b.actions == sys.level(n).b.actions);

  UnitCharacter phi{{Int(4)}};
  GammaSystem tw = twist_system(sys, phi);
  CHECK(validate(tw).all_pass());

  GammaSystem back = twist_system(tw, unit_character_inverse(cfg31, phi));
  for (int n = 0; n <= 1; ++n) {
    CHECK(back.level(n).a.actions == sys.level(n).a.actions);
    CHECK(back.level(n).b.actions == sys.level(n).b.actions);
    CHECK(equivariant_isomorphism(back.level(n).b, sys.level(n).b).verdict == IsoVerdict::Yes);
  }

  GammaSystem big = from_torsion_module(cfg31, single(const_elt(cfg31, 9)), 1, SynthMode::Full);
  CHECK(twistable_order(big) == 2);
  CHECK_THROWS_WITH_AS(twist_system(big, phi), doctest::Contains("k = 2"), input_error);
}

TEST_CASE("idempotent split: identity projector") {
  GammaSystem A = from_torsion_module(cfg31, single(const_elt(cfg31, 3)), 1, SynthMode::Full);
  std::vector<IntMat> id_a, id_b;
  for (int n = 0; n <= 1; ++n) {
    id_a.push_back(IntMat::identity(A.level(n).a.rank()));
    id_b.push_back(IntMat::identity(A.level(n).b.rank()));
  }
  SplitSystems sp = idempotent_split(A, id_a, id_b);
  for (int n = 0; n <= 1; ++n) {
    CHECK(sp.part1.level(n).a.order() == A.level(n).a.order());
    CHECK(sp.part2.level(n).a.is_zero());
  }
  CHECK(validate(sp.part1).all_pass());
  CHECK(validate(sp.part2).all_pass());
}

TEST_CASE("fourier: hat and round trip basics") {
  GammaSystem sys = from_torsion_module(cfg21, single(const_elt(cfg21, 2)), 1, SynthMode::Full);
  const FiniteModule& b0 = sys.level(0).b;
  DualHom zero{std::vector<Rat>(b0.rank(), Rat(0))};
  FourierHat h0 = fourier_hat(b0, zero);
  for (const auto& img : h0.images) CHECK(img.is_zero());
  // level 0 has the trivial group: hat(f) = f
  DualHom f{std::vector<Rat>(b0.rank(), Rat(1, 2))};
  FourierHat h = fourier_hat(b0, f);
  DualHom back = delta_e(cfg21, b0, h);
  CHECK(back.values == f.values);

  FourierCheck chk = fourier_check(sys, 100, 20240902u);
  CHECK(chk.round_trip_ok);
  CHECK(chk.compatibility_ok);
  CHECK(chk.samples > 0);
}

TEST_CASE("fourier compatibility on a 3-level system") {
  GammaSystem sys = from_torsion_module(cfg31, single(gamma_minus(cfg31, 4)), 2, SynthMode::Full);
  FourierCheck chk = fourier_check(sys, 60, 7u);
  CHECK(chk.round_trip_ok);
  CHECK(chk.compatibility_ok);
}

TEST_CASE("limit invariants") {
  GammaSystem sys = from_torsion_module(cfg31, single(gamma_minus(cfg31, 4)), 2, SynthMode::Full);
  LimitInvariants inv = limit_invariants(sys);
  for (int n = 0; n <= 2; ++n)
    CHECK(inv.profiles_a[n] == std::vector<Int>{p_pow(3, n + 1)});
  CHECK(inv.all_stabilized);

  GammaSystem triv = trivial_system(cfg31, 2);
  LimitInvariants it = limit_invariants(triv);
  for (int n = 0; n <= 2; ++n) CHECK(it.profiles_a[n].empty());

  GammaSystem s2 = from_torsion_module(cfg21, single(const_elt(cfg21, 2)), 2, SynthMode::Full);
  LimitInvariants i2 = limit_invariants(s2);
  for (int n = 0; n <= 2; ++n) {
    CHECK(i2.profiles_b[n].size() == (1u << n));
    for (const Int& q : i2.profiles_b[n]) CHECK(q == 2);
  }
}

TEST_CASE("functional equation shadow") {
  GammaSystem s2 = from_torsion_module(cfg21, single(const_elt(cfg21, 2)), 2, SynthMode::Full);
  FuneqReport r2 = funeq_check(s2);
  CHECK(r2.verdict == FuneqVerdict::Pass);

  GammaSystem s3 = from_torsion_module(cfg31, single(gamma_minus(cfg31, 4)), 2, SynthMode::Full);
  FuneqReport r3 = funeq_check(s3);
  CHECK(r3.verdict == FuneqVerdict::Pass);
  for (const auto& lv : r3.levels) {
    CHECK(lv.orders_equal);
    CHECK(lv.divisors_equal);
    CHECK(lv.iso == IsoVerdict::Yes);
  }

  GammaSystem tor =
      from_torsion_module(cfg31, single(simple_element(cfg31, {1}, 1)), 2, SynthMode::Torsion);
  for (int n = 0; n <= 2; ++n) CHECK(tor.level(n).a.order() == tor.level(n).b.order());
  GammaSystem tw = twist_system(
      from_torsion_module(cfg31, single(const_elt(cfg31, 3)), 1, SynthMode::Full),
      UnitCharacter{{Int(4)}});
  for (int n = 0; n <= 1; ++n) CHECK(tw.level(n).a.order() == tw.level(n).b.order());
}

TEST_CASE("annihilator transfer on strongly controlled systems") {
  GammaSystem sys = from_torsion_module(cfg31, single(gamma_minus(cfg31, 4)), 2, SynthMode::Full);
  AlgebraElement xi = gamma_minus(cfg31, 4);
  AlgebraElement xis = sharp(cfg31, xi);
  for (int n = 0; n <= 2; ++n) {
    IntMat zb = element_action(sys.level(n).b, xi);
    IntMat za = element_action(sys.level(n).a, xis);
    bool b_killed = true, a_killed = true;
    for (std::size_t i = 0; i < zb.rows(); ++i)
      for (std::size_t j = 0; j < zb.cols(); ++j)
        if (mod_reduce(zb.at(i, j), sys.level(n).b.divisors[i]) != 0) b_killed = false;
    for (std::size_t i = 0; i < za.rows(); ++i)
      for (std::size_t j = 0; j < za.cols(); ++j)
        if (mod_reduce(za.at(i, j), sys.level(n).a.divisors[i]) != 0) a_killed = false;
    CHECK(b_killed);
    CHECK(a_killed);
  }
}

TEST_CASE("product system split by the canonical projector recovers the factors") {
  GammaSystem A = from_torsion_module(cfg31, single(const_elt(cfg31, 3)), 1, SynthMode::Full);
  GammaSystem B = from_torsion_module(cfg31, single(gamma_minus(cfg31, 4)), 1, SynthMode::Full);

  GammaSystem prod;
  prod.cfg = cfg31;
  prod.max_level = 1;
  std::vector<DirectSum> sums_a, sums_b;
  for (int n = 0; n <= 1; ++n) {
    DirectSum da = direct_sum(A.level(n).a, B.level(n).a);
    DirectSum db = direct_sum(A.level(n).b, B.level(n).b);
    std::vector<std::vector<Rat>> vals(da.module.rank(),
                                       std::vector<Rat>(db.module.rank(), Rat(0)));
    for (std::size_t i = 0; i < da.module.rank(); ++i)
      for (std::size_t j = 0; j < db.module.rank(); ++j) {
        std::vector<Int> ei(da.module.rank(), Int(0)), ej(db.module.rank(), Int(0));
        ei[i] = 1;
        ej[j] = 1;
        vals[i][j] = A.level(n).pairing.pair(da.proj_left.apply(ei), db.proj_left.apply(ej)) +
                     B.level(n).pairing.pair(da.proj_right.apply(ei), db.proj_right.apply(ej));
        vals[i][j] = mod_one(vals[i][j]);
      }
    prod.levels.push_back(
        {da.module, db.module, make_pairing(da.module, db.module, vals, "product pairing")});
    sums_a.push_back(da);
    sums_b.push_back(db);
  }
  {
    auto block = [&](const ModuleMap& fa, const ModuleMap& fb, const DirectSum& s_src,
                     const DirectSum& s_tgt, const std::string& what) {
      IntMat mat = s_tgt.incl_left.mat * fa.mat * s_src.proj_left.mat +
                   s_tgt.incl_right.mat * fb.mat * s_src.proj_right.mat;
      return ModuleMap::make(s_src.module, s_tgt.module, mat, what);
    };
    const TransitionPair& ta = A.trans(0, 1);
    const TransitionPair& tb = B.trans(0, 1);
    prod.maps[{0, 1}] =
        TransitionPair{block(ta.r_a, tb.r_a, sums_a[0], sums_a[1], "prod r_a"),
                       block(ta.r_b, tb.r_b, sums_b[0], sums_b[1], "prod r_b"),
                       block(ta.k_a, tb.k_a, sums_a[1], sums_a[0], "prod k_a"),
                       block(ta.k_b, tb.k_b, sums_b[1], sums_b[0], "prod k_b")};
  }
  REQUIRE(validate(prod).all_pass());

  std::vector<IntMat> ea, eb;
  for (int n = 0; n <= 1; ++n) {
    ea.push_back(sums_a[n].incl_left.mat * sums_a[n].proj_left.mat);
    eb.push_back(sums_b[n].incl_left.mat * sums_b[n].proj_left.mat);
  }
  SplitSystems sp = idempotent_split(prod, ea, eb);
  CHECK(validate(sp.part1).all_pass());
  CHECK(validate(sp.part2).all_pass());
  for (int n = 0; n <= 1; ++n) {
    CHECK(sp.part1.level(n).a.divisors == A.level(n).a.divisors);
    CHECK(sp.part2.level(n).a.divisors == B.level(n).a.divisors);
    CHECK(equivariant_isomorphism(sp.part1.level(n).b, A.level(n).b).verdict == IsoVerdict::Yes);
    CHECK(equivariant_isomorphism(sp.part2.level(n).b, B.level(n).b).verdict == IsoVerdict::Yes);
  }
}
