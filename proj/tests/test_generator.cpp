#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iasim/generator.hpp"

using namespace iasim;

namespace {

AlgebraParams alg(Real a1, Real a2) {
    AlgebraParams al;
    al.a1 = a1;
    al.a2 = a2;
    return al;
}

Grid small4() { return make_grid_4axis(16, 12); }

// Residual-grade test states: sigma 1.0 with small center offsets and no
// momentum phase keeps both position- and wavenumber-side containment at the
// 1e-10 level on the 32^4, L=20 grid.
State test_state4(const Grid& g, const AlgebraParams& al) {
    return gaussian_state(g, al, GaussianTargets{0.15, 0, -0.1, 0, 1.0, 1.0},
                          GaussianTargets{-0.15, 0, 0.1, 0, 1.0, 1.0});
}

OpApply mult_op(RealField f) {
    return [field = std::move(f)](const State& s) { return apply_position_diagonal(s, field); };
}

OpApply zero_op() {
    return [](const State& s) {
        State z{s.grid, ComplexField::Zero(s.size())};
        return z;
    };
}

}  // namespace

TEST_CASE("delta-choice interaction tables") {
    Grid g = small4();

    SUBCASE("equal parameters: bare bilinear phase, no chi dependence") {
        GeneralIas spec{alg(1, 1), VZero{}, VZero{}, WBilinear{0.7}, 1.0, FSpec{}};
        SplitPlan plan = build_plan(spec, g);
        RealField want = field_from_coords(g, [](Real x1, Real, Real x2, Real) { return 0.7 * x1 * x2; });
        CHECK((plan.v_phase - want).abs().maxCoeff() == 0.0);
    }
    SUBCASE("hybrid at alpha = 0.5: shifted arguments with prefactor 2") {
        HybridFiniteA spec{alg(0, 1), VZero{}, VZero{}, WBilinear{1.0}, 0.5, FSpec{}};
        SplitPlan plan = build_plan(spec, g);
        RealField want = field_from_coords(g, [](Real x1, Real c1, Real x2, Real c2) {
            return 2.0 * (x1 + 0.5 * c1) * (x2 - 0.5 * c2);
        });
        CHECK((plan.v_phase - want).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("special decoupled hybrid phase table") {
    Grid g = small4();
    const Real lam = 0.6;
    SpecialDecoupledHybrid spec{alg(0, 1), VZero{}, VZero{}, WBilinear{lam}};
    SplitPlan plan = build_plan(spec, g);
    RealField want = field_from_coords(g, [&](Real x1, Real c1, Real x2, Real c2) {
        return lam * (x2 - c2) * c1 + lam * x1 * c2;
    });
    CHECK((plan.v_phase - want).abs().maxCoeff() < 1e-12);
}

TEST_CASE("kinetic symbol tables") {
    Grid g = small4();
    SUBCASE("interpolated form") {
        GeneralIas spec{alg(0.5, 1), VZero{}, VZero{}, WBilinear{0}, 1.0, FSpec{}};
        SplitPlan plan = build_plan(spec, g);
        RealField want = field_from_wavenumbers(g, [](Real kx1, Real kc1, Real kx2, Real kc2) {
            const Real s1 = 0.5 * kx1 + kc1;
            const Real s2 = kx2 + kc2;
            return s1 * s1 / (2 * 0.5) + s2 * s2 / 2;
        });
        CHECK((plan.t_symbol - want).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("classical form") {
        ClassicalClassical spec{alg(0, 0), VZero{}, VZero{}, WBilinear{0}};
        SplitPlan plan = build_plan(spec, g);
        RealField want = field_from_wavenumbers(g, [](Real kx1, Real kc1, Real kx2, Real kc2) {
            return kx1 * kc1 + kx2 * kc2;
        });
        CHECK((plan.t_symbol - want).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("singular parameter regimes are rejected") {
    Grid g = small4();
    CHECK_THROWS_WITH_AS(
        build_plan(GeneralIas{alg(0, 1), VZero{}, VZero{}, WBilinear{1}, 1.0, FSpec{}}, g),
        doctest::Contains("singular"), ConfigError);
    CHECK_THROWS_WITH_AS(
        build_plan(GeneralIas{alg(1, 1), VZero{}, VZero{}, WBilinear{1}, 0.0, FSpec{}}, g),
        doctest::Contains("singular"), ConfigError);
    CHECK_THROWS_WITH_AS(
        build_plan(HybridFiniteA{alg(0, 1), VZero{}, VZero{}, WBilinear{1}, 0.0, FSpec{}}, g),
        doctest::Contains("singular"), ConfigError);
    CHECK_THROWS_AS(
        build_plan(HybridFiniteA{alg(0.5, 1), VZero{}, VZero{}, WBilinear{1}, 0.5, FSpec{}}, g),
        ConfigError);
    CHECK_THROWS_AS(build_plan(ClassicalClassical{alg(0, 1), VZero{}, VZero{}, WBilinear{1}}, g),
                    ConfigError);
    CHECK_THROWS_AS(
        build_plan(SpecialDecoupledHybrid{alg(1, 1), VZero{}, VZero{}, WBilinear{1}}, g),
        ConfigError);
}

TEST_CASE("gauge terms") {
    Grid g = small4();
    AlgebraParams al = alg(1, 1);

    SUBCASE("zero F gives zero tables") {
        auto [pos, sym] = f_gauge_terms(FSpec{}, g, al);
        CHECK(pos.abs().maxCoeff() == 0.0);
        CHECK(sym.abs().maxCoeff() == 0.0);
    }
    SUBCASE("momentum part u^2 becomes (hbar k_chi1)^2") {
        FSpec f;
        f.momentum = {Monomial{2, 0, 1.0}};
        auto [pos, sym] = f_gauge_terms(f, g, al);
        RealField want = field_from_wavenumbers(g, [&](Real, Real kc1, Real, Real) {
            return al.hbar * al.hbar * kc1 * kc1;
        });
        CHECK((sym - want).abs().maxCoeff() < 1e-12);
        CHECK(pos.abs().maxCoeff() == 0.0);
    }
    SUBCASE("gauge terms commute with every observable") {
        Grid gc = make_grid_4axis(32, 20);
        FSpec f;
        f.position = WGaussianWell{0.5, 3.0, 0.2, -0.1};
        f.momentum = {Monomial{2, 0, 0.3}, Monomial{0, 2, 0.2}, Monomial{1, 1, 0.1}};
        auto [pos, sym] = f_gauge_terms(f, gc, al);
        State s = test_state4(gc, al);
        OpApply pos_op = mult_op(pos);
        OpApply sym_op = [symf = sym](const State& st) { return apply_derivative_operator(st, symf); };
        for (Observable obs : {Observable::X1, Observable::P1, Observable::X2, Observable::P2}) {
            CHECK(commutator_residual(s, pos_op, obs, zero_op(), al).value < 1e-8);
            CHECK(commutator_residual(s, sym_op, obs, zero_op(), al).value < 1e-8);
        }
    }
}

TEST_CASE("defining commutator relations hold for representative variants") {
    Grid g = make_grid_4axis(32, 20);

    SUBCASE("non-interacting, quantum-quantum") {
        NonInteracting spec{alg(1, 1), VHarmonic{1}, VHarmonic{1}, FSpec{}};
        State s = test_state4(g, spec.algebra);
        auto r = pde_residuals(spec, g, {s});
        CHECK(r.max_present() < 1e-8);
        for (int i = 0; i < 4; ++i) CHECK(r.present[i]);
    }
    SUBCASE("special decoupled hybrid with bilinear coupling") {
        SpecialDecoupledHybrid spec{alg(0, 1), VHarmonic{1}, VHarmonic{1}, WBilinear{0.5}};
        State s = test_state4(g, spec.algebra);
        auto r = pde_residuals(spec, g, {s});
        CHECK(r.max_present() < 1e-8);
    }
    SUBCASE("gradient-coupled mixed regime") {
        GradientCoupledIas spec{alg(0, 0.5), VHarmonic{1}, VHarmonic{1}, WGaussianWell{0.4, 3.0, 0, 0},
                                FSpec{}};
        State s = test_state4(g, spec.algebra);
        auto r = pde_residuals(spec, g, {s});
        CHECK(r.max_present() < 1e-8);
    }
}

TEST_CASE("force-injected inadmissible interaction breaks the relations") {
    Grid g = make_grid_4axis(32, 20);
    const Real lam = 0.5;
    HybridFiniteA spec{alg(0, 1), VHarmonic{1}, VHarmonic{1}, WBilinear{lam}, 0.5, FSpec{}};
    SplitPlan plan = build_plan(spec, g);

    // Replace the lawful shifted-argument term with naive lam*x1*x2 and claim
    // its naive gradients as the forces.
    RealField lawful = field_from_coords(g, [&](Real x1, Real c1, Real x2, Real c2) {
        return 2.0 * lam * (x1 + 0.5 * c1) * (x2 - 0.5 * c2);
    });
    RealField naive = field_from_coords(g, [&](Real x1, Real, Real x2, Real) { return lam * x1 * x2; });
    plan.v_phase += naive - lawful;
    plan.force1 = field_from_coords(g, [&](Real x1, Real, Real x2, Real) { return x1 + lam * x2; });
    plan.force2 = field_from_coords(g, [&](Real x1, Real, Real x2, Real) { return x2 + lam * x1; });

    State s = test_state4(g, plan.algebra);
    auto r = pde_residuals(plan, {s});
    CHECK(r.max_present() > 1e-2);
}

TEST_CASE("hermiticity: <psi|H|psi> is real") {
    Grid g = small4();
    GeneralIas spec{alg(0.5, 0.75), VHarmonic{1.2}, VQuartic{0.8, 0.02}, WBilinear{0.3}, 0.6, FSpec{}};
    SplitPlan plan = build_plan(spec, g);
    State s = test_state4(g, spec.algebra);
    const Complex e = inner_product(s, plan.apply(s));
    CHECK(std::abs(e.imag()) < 1e-12 * std::max(Real(1), std::abs(e.real())));
    CHECK(energy_expectation(plan, s) == doctest::Approx(e.real()).epsilon(1e-10));
}

TEST_CASE("observable-sector closure: equal parameters give chi-independent forces") {
    Grid g = small4();
    auto chi_variation = [&](const RealField& f) {
        Real worst = 0;
        const auto& sh = g.shape();
        for (int i0 = 0; i0 < sh.n[0]; ++i0)
            for (int i2 = 0; i2 < sh.n[2]; ++i2) {
                const Real ref = f[g.index(i0, 0, i2, 0)];
                for (int i1 = 0; i1 < sh.n[1]; ++i1)
                    for (int i3 = 0; i3 < sh.n[3]; ++i3)
                        worst = std::max(worst, std::abs(f[g.index(i0, i1, i2, i3)] - ref));
            }
        return worst;
    };

    ClassicalClassical cc{alg(0, 0), VHarmonic{1}, VHarmonic{1}, WBilinear{0.5}};
    SplitPlan pcc = build_plan(cc, g);
    CHECK(chi_variation(pcc.force1) == 0.0);
    CHECK(chi_variation(pcc.force2) == 0.0);

    GeneralIas qq{alg(0.5, 0.5), VHarmonic{1}, VHarmonic{1}, WBilinear{0.5}, 0.5, FSpec{}};
    SplitPlan pqq = build_plan(qq, g);
    CHECK(chi_variation(pqq.force1) == 0.0);
    CHECK(chi_variation(pqq.force2) == 0.0);

    // contrast: hybrid forces do depend on the unobservables
    HybridFiniteA hy{alg(0, 1), VHarmonic{1}, VHarmonic{1}, WBilinear{0.5}, 0.5, FSpec{}};
    SplitPlan phy = build_plan(hy, g);
    CHECK(chi_variation(phy.force1) + chi_variation(phy.force2) > 0.1);
}

TEST_CASE("integrity: special-hybrid interaction gradients commute with the momenta") {
    Grid g = make_grid_4axis(32, 20);
    AlgebraParams al = alg(0, 1);

    SpecialDecoupledHybrid special{al, VHarmonic{1}, VHarmonic{1}, WBilinear{0.5}};
    State s = test_state4(g, al);
    for (int j : {1, 2}) {
        OpApply term = mult_op(interaction_gradient_field(GeneratorSpec{special}, g, j));
        CHECK(commutator_residual(s, term, Observable::P1, zero_op(), al).value < 1e-8);
        CHECK(commutator_residual(s, term, Observable::P2, zero_op(), al).value < 1e-8);
    }

    HybridFiniteA hybrid{al, VHarmonic{1}, VHarmonic{1}, WBilinear{0.5}, 0.5, FSpec{}};
    Real worst = 0;
    for (int j : {1, 2}) {
        OpApply term = mult_op(interaction_gradient_field(GeneratorSpec{hybrid}, g, j));
        worst = std::max(worst, commutator_residual(s, term, Observable::P1, zero_op(), al).value);
        worst = std::max(worst, commutator_residual(s, term, Observable::P2, zero_op(), al).value);
    }
    CHECK(worst > 1e-3);
}

TEST_CASE("reduced grids demand a subsystem-1-only generator") {
    Grid g = make_grid_2axis(64, 16);
    CHECK_NOTHROW(build_plan(NonInteracting{alg(1, 1), VHarmonic{1}, VZero{}, FSpec{}}, g));
    CHECK_THROWS_AS(build_plan(NonInteracting{alg(1, 1), VHarmonic{1}, VHarmonic{1}, FSpec{}}, g),
                    ConfigError);
    CHECK_NOTHROW(
        build_plan(ClassicalClassical{alg(0, 0), VCosine{1, 1}, VZero{}, WBilinear{0}}, g));
    CHECK_THROWS_AS(
        build_plan(ClassicalClassical{alg(0, 0), VCosine{1, 1}, VZero{}, WBilinear{0.5}}, g),
        ConfigError);
}
