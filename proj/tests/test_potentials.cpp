#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "iasim/potentials.hpp"

using namespace iasim;

namespace {

AlgebraParams alg(Real a1, Real a2) {
    AlgebraParams al;
    al.a1 = a1;
    al.a2 = a2;
    return al;
}

RawW raw_bilinear_x1x2() {
    return RawW{[](const Point4& q) { return q.x1 * q.x2; },
                [](const Point4& q) { return q.x2; },
                [](const Point4& q) { return q.x1; }};
}

}  // namespace

TEST_CASE("eval_W: chi drops out when alpha equals the parameters") {
    WSpec w{{WTerm{1.0, WBilinear{1.0}}}};
    CHECK(eval_W(w, alg(1, 1), Point4{2, 7, 3, 9}) == doctest::Approx(6.0));
}

TEST_CASE("eval_W: shifted arguments in the hybrid regime") {
    WSpec w{{WTerm{1.0, WBilinear{1.0}}}};
    CHECK(eval_W(w, alg(0, 1), Point4{1, 2, 5, 4}) == doctest::Approx(15.0));
}

TEST_CASE("eval_W is linear in the terms") {
    WSpec one{{WTerm{1.0, WBilinear{1.0}}}};
    WSpec two{{WTerm{1.0, WBilinear{1.0}}, WTerm{1.0, WBilinear{1.0}}}};
    const Point4 q{0.3, -1.2, 2.4, 0.9};
    CHECK(eval_W(two, alg(0.5, 0.25), q) == doctest::Approx(2 * eval_W(one, alg(0.5, 0.25), q)));
}

TEST_CASE("grad_W_x: bilinear partial derivatives") {
    WSpec w{{WTerm{1.0, WBilinear{1.0}}}};
    auto [g1, g2] = grad_W_x(w, alg(1, 1), Point4{2, 7, 3, 9});
    CHECK(g1 == doctest::Approx(3.0));
    CHECK(g2 == doctest::Approx(2.0));
    auto [h1, h2] = grad_W_x(w, alg(0, 1), Point4{1, 2, 5, 4});
    CHECK(h1 == doctest::Approx(5.0));
    CHECK(h2 == doctest::Approx(3.0));
}

TEST_CASE("grad_W_x matches a centered finite difference on random points") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<Real> coord(-2.0, 2.0);
    WSpec w{{WTerm{0.5, WBilinear{0.8}},
             WTerm{-0.25, WGaussianWell{1.3, 1.1, 0.2, -0.4}},
             WTerm{1.0, WPolynomialSum{{Monomial{2, 1, 0.3}, Monomial{1, 2, -0.2}}}}}};
    AlgebraParams al = alg(0.25, 0.75);
    const Real h = 1e-4;
    for (int i = 0; i < 100; ++i) {
        Point4 q{coord(rng), coord(rng), coord(rng), coord(rng)};
        auto [g1, g2] = grad_W_x(w, al, q);
        Point4 qa = q, qb = q;
        qa.x1 += h;
        qb.x1 -= h;
        const Real fd1 = (eval_W(w, al, qa) - eval_W(w, al, qb)) / (2 * h);
        qa = qb = q;
        qa.x2 += h;
        qb.x2 -= h;
        const Real fd2 = (eval_W(w, al, qa) - eval_W(w, al, qb)) / (2 * h);
        CHECK(std::abs(g1 - fd1) < 1e-6 * std::max(Real(1), std::abs(g1)));
        CHECK(std::abs(g2 - fd2) < 1e-6 * std::max(Real(1), std::abs(g2)));
    }
}

TEST_CASE("subsystem potential derivatives match finite differences") {
    std::vector<VSpec> vs = {VZero{}, VHarmonic{1.3}, VQuartic{0.8, 0.05}, VCosine{0.7, 1.2}};
    const Real h = 1e-4;
    for (const auto& v : vs) {
        for (Real x = -6; x <= 6; x += 0.37) {
            const Real fd = (v_value(v, x + h) - v_value(v, x - h)) / (2 * h);
            const Real an = v_derivative(v, x);
            CHECK(std::abs(an - fd) < 1e-6 * std::max(Real(1), std::abs(an)));
        }
    }
}

TEST_CASE("consistency residual is |a1 - a2| for W = x1 x2") {
    auto points = halton_points(Box4{}, 64);
    SUBCASE("hybrid parameters give exactly 1") {
        const Real r = consistency_residual(raw_bilinear_x1x2(), alg(0, 1), points);
        CHECK(std::abs(r - 1.0) < 1e-9);
    }
    SUBCASE("equal parameters give zero") {
        const Real r = consistency_residual(raw_bilinear_x1x2(), alg(1, 1), points);
        CHECK(r < 1e-9);
    }
    SUBCASE("lattice values") {
        for (Real a1 : {0.0, 0.25, 0.5, 1.0})
            for (Real a2 : {0.0, 0.25, 0.5, 1.0}) {
                const Real r = consistency_residual(raw_bilinear_x1x2(), alg(a1, a2), points);
                CHECK(std::abs(r - std::abs(a1 - a2)) < 1e-9);
            }
    }
    SUBCASE("value-only fallback carries only double-difference noise") {
        RawW w{[](const Point4& q) { return q.x1 * q.x2; }, nullptr, nullptr};
        const Real r = consistency_residual(w, alg(0, 1), points);
        CHECK(std::abs(r - 1.0) < 1e-6);
    }
}

TEST_CASE("every admissible-family member passes the checker") {
    auto points = halton_points(Box4{{-2, -2, -2, -2}, {2, 2, 2, 2}}, 64);
    std::mt19937 rng(99);
    std::uniform_real_distribution<Real> coeff(-1.0, 1.0);
    std::uniform_real_distribution<Real> alpha(-0.5, 1.5);

    for (Real a1 : {0.0, 0.25, 0.5, 1.0}) {
        for (Real a2 : {0.0, 0.25, 0.5, 1.0}) {
            for (int rep = 0; rep < 3; ++rep) {
                WSpec w{{WTerm{alpha(rng), WBilinear{coeff(rng)}},
                         WTerm{alpha(rng), WGaussianWell{coeff(rng), 1.2, coeff(rng), coeff(rng)}},
                         WTerm{alpha(rng),
                               WPolynomialSum{{Monomial{3, 1, 0.5 * coeff(rng)},
                                               Monomial{1, 1, coeff(rng)},
                                               Monomial{2, 2, 0.5 * coeff(rng)}}}}}};
                CHECK(consistency_residual(w, alg(a1, a2), points) < 1e-7);
            }
        }
    }
}

TEST_CASE("chi-independent W with equal parameters is consistent") {
    RawW w{[](const Point4& q) { return std::cos(q.x1) * q.x2 * q.x2; },
           [](const Point4& q) { return -std::sin(q.x1) * q.x2 * q.x2; },
           [](const Point4& q) { return 2 * std::cos(q.x1) * q.x2; }};
    auto points = halton_points(Box4{{-3, -3, -3, -3}, {3, 3, 3, 3}}, 64);
    CHECK(consistency_residual(w, alg(1, 1), points) < 1e-7);
}

TEST_CASE("checker residual is subadditive over terms") {
    auto points = halton_points(Box4{}, 64);
    AlgebraParams al = alg(0, 1);
    RawW w1 = raw_bilinear_x1x2();
    RawW w2{[](const Point4& q) { return q.x1 * q.x1 * q.x2; }, nullptr, nullptr};
    RawW sum{[](const Point4& q) { return q.x1 * q.x2 + q.x1 * q.x1 * q.x2; }, nullptr, nullptr};
    const Real r1 = consistency_residual(w1, al, points);
    const Real r2 = consistency_residual(w2, al, points);
    const Real rs = consistency_residual(sum, al, points);
    CHECK(rs <= r1 + r2 + 1e-9);
}

TEST_CASE("admissibility verdicts") {
    SUBCASE("x1 x2 with hybrid parameters is inadmissible with residual 1") {
        auto v = admissible_projection_exists(raw_bilinear_x1x2(), alg(0, 1));
        CHECK(!v.admissible);
        CHECK(v.max_residual == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("a shifted-argument member is admissible") {
        const Real a = 0.5;
        RawW w{[a](const Point4& q) { return (q.x1 + a * q.chi1) * (q.x2 + (a - 1) * q.chi2); },
               [a](const Point4& q) { return q.x2 + (a - 1) * q.chi2; },
               [a](const Point4& q) { return q.x1 + a * q.chi1; }};
        auto v = admissible_projection_exists(w, alg(0, 1));
        CHECK(v.admissible);
    }
    SUBCASE("zero W is admissible") {
        RawW w{[](const Point4&) { return 0.0; }, nullptr, nullptr};
        auto v = admissible_projection_exists(w, alg(0, 1));
        CHECK(v.admissible);
        CHECK(v.max_residual < 1e-12);
    }
}

TEST_CASE("nonconstant coupling with distinct parameters depends on a chi variable") {
    auto points = halton_points(Box4{{-2, -2, -2, -2}, {2, 2, 2, 2}}, 64);
    for (Real alpha : {0.0, 0.3, 1.0}) {
        WSpec w{{WTerm{alpha, WBilinear{0.7}}}};
        AlgebraParams al = alg(0, 1);  // alpha cannot equal both
        Real max_chi_grad = 0;
        for (const auto& q : points) {
            auto [g1, g2] = grad_W_chi(w, al, q);
            max_chi_grad = std::max({max_chi_grad, std::abs(g1), std::abs(g2)});
        }
        CHECK(max_chi_grad > 0.1);
    }
}

TEST_CASE("polynomial degree cap is enforced") {
    WPolynomialSum p{{Monomial{3, 2, 1.0}}};
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
