#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iasim/grid.hpp"

using namespace iasim;

TEST_CASE("coordinates follow c - L/2 + m*delta") {
    Grid g = make_grid({AxisSpec{4, 4, 0}, AxisSpec{4, 4, 0}, std::nullopt, std::nullopt});
    const RealField& x = g.coords(Axis::X1);
    REQUIRE(x.size() == 4);
    CHECK(x[0] == doctest::Approx(-2.0));
    CHECK(x[1] == doctest::Approx(-1.0));
    CHECK(x[2] == doctest::Approx(0.0));
    CHECK(x[3] == doctest::Approx(1.0));
}

TEST_CASE("wavenumbers are 2 pi q / L in DFT order") {
    Grid g = make_grid({AxisSpec{4, 4, 0}, AxisSpec{4, 4, 0}, std::nullopt, std::nullopt});
    const RealField& k = g.wavenumbers(Axis::X1);
    REQUIRE(k.size() == 4);
    CHECK(k[0] == doctest::Approx(0.0));
    CHECK(k[1] == doctest::Approx(kPi / 2));
    CHECK(std::abs(k[2]) == doctest::Approx(kPi));  // Nyquist bin, folded negative
    CHECK(k[3] == doctest::Approx(-kPi / 2));
}

TEST_CASE("full 4-axis grid bookkeeping") {
    Grid g = make_grid_4axis(32, 20);
    CHECK(g.total() == 32L * 32 * 32 * 32);
    CHECK(g.delta(Axis::X1) == doctest::Approx(0.625));
    CHECK(g.delta(Axis::Chi2) == doctest::Approx(0.625));
    CHECK(g.has_subsystem2());
    CHECK(g.cell_volume() == doctest::Approx(0.625 * 0.625 * 0.625 * 0.625));
}

TEST_CASE("reduced grid deactivates subsystem-2 axes") {
    Grid g = make_grid_2axis(256, 20);
    CHECK(!g.has_subsystem2());
    CHECK(g.total() == 256L * 256);
    CHECK(g.n(Axis::X2) == 1);
    CHECK(g.cell_volume() == doctest::Approx((20.0 / 256) * (20.0 / 256)));
}

TEST_CASE("invalid axis specs are rejected with the axis named") {
    CHECK_THROWS_WITH_AS(
        make_grid({AxisSpec{48, 4, 0}, AxisSpec{4, 4, 0}, std::nullopt, std::nullopt}),
        doctest::Contains("x1"), ConfigError);
    CHECK_THROWS_WITH_AS(
        make_grid({AxisSpec{4, 4, 0}, AxisSpec{4, -1.0, 0}, std::nullopt, std::nullopt}),
        doctest::Contains("chi1"), ConfigError);
    CHECK_THROWS_AS(
        make_grid({AxisSpec{4, 4, 0}, AxisSpec{4, 4, 0}, AxisSpec{4, 4, 0}, std::nullopt}),
        ConfigError);
}

TEST_CASE("index layout: chi2 fastest, x1 slowest") {
    Grid g = make_grid({AxisSpec{2, 2, 0}, AxisSpec{4, 4, 0}, AxisSpec{8, 8, 0}, AxisSpec{16, 16, 0}});
    CHECK(g.index(0, 0, 0, 1) == 1);
    CHECK(g.index(0, 0, 1, 0) == 16);
    CHECK(g.index(0, 1, 0, 0) == 8 * 16);
    CHECK(g.index(1, 0, 0, 0) == 4 * 8 * 16);
    CHECK(g.stride(Axis::X1) == 4 * 8 * 16);
}
