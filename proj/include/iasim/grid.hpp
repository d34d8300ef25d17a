#ifndef IASIM_GRID_HPP
#define IASIM_GRID_HPP

// Discretized extended configuration space over (x1, chi1, x2, chi2).
// Periodic uniform grid per axis; index layout is row-major with chi2
// fastest. A reduced grid deactivates the subsystem-2 axes (n == 1) for
// single-system runs.

#include <array>
#include <optional>
#include <string>

#include "iasim/fft.hpp"
#include "iasim/types.hpp"

namespace iasim {

enum class Axis : int { X1 = 0, Chi1 = 1, X2 = 2, Chi2 = 3 };

inline constexpr std::array<Axis, 4> kAllAxes{Axis::X1, Axis::Chi1, Axis::X2, Axis::Chi2};

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::X1: return "x1";
        case Axis::Chi1: return "chi1";
        case Axis::X2: return "x2";
        case Axis::Chi2: return "chi2";
    }
    return "?";
}

struct AxisSpec {
    int n = 2;
    Real length = 1;
    Real center = 0;
};

struct GridSpec {
    AxisSpec x1;
    AxisSpec chi1;
    std::optional<AxisSpec> x2;
    std::optional<AxisSpec> chi2;
};

using AxisMask = std::array<bool, 4>;

inline constexpr AxisMask kNoAxes{false, false, false, false};

class Grid {
  public:
    Grid() = default;  // empty placeholder; populate via make_grid

    bool active(Axis a) const { return shape_.n[static_cast<int>(a)] > 1; }
    bool has_subsystem2() const { return active(Axis::X2); }

    int n(Axis a) const { return shape_.n[static_cast<int>(a)]; }
    Real length(Axis a) const { return length_[static_cast<int>(a)]; }
    Real center(Axis a) const { return center_[static_cast<int>(a)]; }
    Real delta(Axis a) const { return delta_[static_cast<int>(a)]; }

    /// Coordinate samples c - L/2 + m*delta, m = 0..n-1.
    const RealField& coords(Axis a) const { return coords_[static_cast<int>(a)]; }
    /// Wavenumbers 2*pi*q/L over the symmetric DFT range, in DFT bin order.
    const RealField& wavenumbers(Axis a) const { return wavenumbers_[static_cast<int>(a)]; }

    long total() const { return shape_.total(); }
    long stride(Axis a) const { return shape_.stride(static_cast<int>(a)); }
    const fft::Shape4& shape() const { return shape_; }

    /// Quadrature weight per grid point: product of deltas over active axes.
    Real cell_volume() const { return cell_volume_; }

    long index(int i0, int i1, int i2, int i3) const {
        return ((static_cast<long>(i0) * shape_.n[1] + i1) * shape_.n[2] + i2) * shape_.n[3] + i3;
    }

    void transform(ComplexField& field, const AxisMask& which, fft::Direction dir) const {
        fft::transform_axes(field.data(), shape_, tables_, which, dir);
    }
    void transform_all(ComplexField& field, fft::Direction dir) const {
        transform(field, AxisMask{true, true, true, true}, dir);
    }

    AxisMask active_mask() const {
        return {active(Axis::X1), active(Axis::Chi1), active(Axis::X2), active(Axis::Chi2)};
    }

    bool operator==(const Grid& o) const {
        return shape_.n == o.shape_.n && length_ == o.length_ && center_ == o.center_;
    }

    friend Grid make_grid(const GridSpec&);

  private:
    fft::Shape4 shape_;
    std::array<Real, 4> length_{0, 0, 0, 0};
    std::array<Real, 4> center_{0, 0, 0, 0};
    std::array<Real, 4> delta_{1, 1, 1, 1};
    std::array<RealField, 4> coords_;
    std::array<RealField, 4> wavenumbers_;
    fft::TableSet tables_;
    Real cell_volume_ = 1;
};

inline Grid make_grid(const GridSpec& spec) {
    if (spec.x2.has_value() != spec.chi2.has_value())
        throw ConfigError("grid: axes x2 and chi2 must be both present or both absent");

    Grid g;
    std::array<std::optional<AxisSpec>, 4> in{spec.x1, spec.chi1, spec.x2, spec.chi2};
    for (int a = 0; a < 4; ++a) {
        if (!in[a].has_value()) {
            g.shape_.n[a] = 1;
            g.coords_[a] = RealField::Zero(1);
            g.wavenumbers_[a] = RealField::Zero(1);
            continue;
        }
        const AxisSpec& ax = *in[a];
        const std::string name = axis_name(static_cast<Axis>(a));
        if (ax.n < 2 || (ax.n & (ax.n - 1)) != 0)
            throw ConfigError("grid axis " + name + ": n=" + std::to_string(ax.n) +
                              " must be a power of two and >= 2");
        if (!(ax.length > 0))
            throw ConfigError("grid axis " + name + ": length must be positive");
        g.shape_.n[a] = ax.n;
        g.length_[a] = ax.length;
        g.center_[a] = ax.center;
        g.delta_[a] = ax.length / ax.n;
        g.coords_[a].resize(ax.n);
        for (int m = 0; m < ax.n; ++m)
            g.coords_[a][m] = ax.center - ax.length / 2 + m * g.delta_[a];
        g.wavenumbers_[a].resize(ax.n);
        for (int q = 0; q < ax.n; ++q) {
            const int folded = (q < ax.n / 2) ? q : q - ax.n;
            g.wavenumbers_[a][q] = 2 * kPi * folded / ax.length;
        }
        g.tables_[a] = fft::make_tables(ax.n);
        g.cell_volume_ *= g.delta_[a];
    }
    return g;
}

/// Uniform two-axis grid over (x1, chi1).
inline Grid make_grid_2axis(int n, Real length, Real cx = 0, Real cchi = 0) {
    return make_grid({AxisSpec{n, length, cx}, AxisSpec{n, length, cchi}, std::nullopt, std::nullopt});
}

/// Uniform four-axis grid, same n and length on every axis.
inline Grid make_grid_4axis(int n, Real length) {
    AxisSpec ax{n, length, 0};
    return make_grid({ax, ax, ax, ax});
}

}  // namespace iasim

#endif
