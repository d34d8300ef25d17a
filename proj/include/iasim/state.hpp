#ifndef IASIM_STATE_HPP
#define IASIM_STATE_HPP

// States on the extended configuration grid: construction of normalized
// Gaussian wavepackets with prescribed first moments, expectation values,
// and the operator-application primitives used by every residual check.

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "iasim/algebra.hpp"
#include "iasim/fields.hpp"
#include "iasim/grid.hpp"

namespace iasim {

struct State {
    Grid grid;
    ComplexField amps;

    long size() const { return amps.size(); }
};

inline Real norm_squared(const State& s) {
    const Complex* a = s.amps.data();
    const Real sum = deterministic_sum(s.size(), [&](long b, long e, Real& acc) {
        for (long i = b; i < e; ++i) acc += std::norm(a[i]);
    });
    return sum * s.grid.cell_volume();
}

inline Real state_norm(const State& s) { return std::sqrt(norm_squared(s)); }

inline Complex inner_product(const State& lhs, const State& rhs) {
    const Complex* a = lhs.amps.data();
    const Complex* b = rhs.amps.data();
    auto re_im = deterministic_sums<2>(lhs.size(), [&](long lo, long hi, Real* acc) {
        for (long i = lo; i < hi; ++i) {
            const Complex v = std::conj(a[i]) * b[i];
            acc[0] += v.real();
            acc[1] += v.imag();
        }
    });
    return Complex(re_im[0], re_im[1]) * lhs.grid.cell_volume();
}

/// Largest |amplitude| on the outermost layer of each active axis.
inline Real boundary_amplitude(const State& s) {
    const auto& sh = s.grid.shape();
    const Complex* a = s.amps.data();
    Real worst = 0;
    for (int axis = 0; axis < 4; ++axis) {
        if (sh.n[axis] <= 1) continue;
        const long stride = sh.stride(axis);
        const long naxis = sh.n[axis];
        const long outer = s.size() / (stride * naxis);
        for (long edge : {0L, naxis - 1}) {
            for (long o = 0; o < outer; ++o)
                for (long i = 0; i < stride; ++i)
                    worst = std::max(worst, std::abs(a[o * stride * naxis + edge * stride + i]));
        }
    }
    return worst;
}

struct GaussianTargets {
    Real x = 0;
    Real p = 0;
    Real chi = 0;
    Real pi = 0;
    Real sigma_x = 1;
    Real sigma_chi = 1;
};

namespace detail {

inline void check_margin(const Grid& g, Axis axis, Real center, Real sigma) {
    const Real lo = g.center(axis) - g.length(axis) / 2;
    const Real hi = g.center(axis) + g.length(axis) / 2;
    const Real margin = std::min(center - lo, hi - center);
    if (!(sigma > 0))
        throw ConfigError(std::string("gaussian_state: width on axis ") + axis_name(axis) +
                          " must be positive");
    if (margin < 4 * sigma) {
        std::ostringstream msg;
        msg << "gaussian_state: center " << center << " on axis " << axis_name(axis)
            << " is " << margin << " from the domain boundary; required margin is 4*sigma = "
            << 4 * sigma;
        throw ConfigError(msg.str());
    }
}

inline ComplexField gaussian_profile(const RealField& coords, Real center, Real sigma, Real beta) {
    ComplexField out(coords.size());
    for (long i = 0; i < coords.size(); ++i) {
        const Real d = coords[i] - center;
        out[i] = std::polar(std::exp(-d * d / (4 * sigma * sigma)), beta * coords[i]);
    }
    return out;
}

}  // namespace detail

/// Normalized product Gaussian with phase exp(i(beta_x x + beta_chi chi))
/// per subsystem, beta_x = <pi>/hbar and beta_chi = (<p> - a*<pi>)/hbar,
/// so all four first-moment targets are met.
inline State gaussian_state(const Grid& grid, const AlgebraParams& algebra,
                            const GaussianTargets& s1,
                            const std::optional<GaussianTargets>& s2 = std::nullopt) {
    algebra.validate();
    if (grid.has_subsystem2() != s2.has_value())
        throw ConfigError("gaussian_state: subsystem-2 targets must be given exactly when the "
                          "grid has active subsystem-2 axes");

    detail::check_margin(grid, Axis::X1, s1.x, s1.sigma_x);
    detail::check_margin(grid, Axis::Chi1, s1.chi, s1.sigma_chi);
    if (s2) {
        detail::check_margin(grid, Axis::X2, s2->x, s2->sigma_x);
        detail::check_margin(grid, Axis::Chi2, s2->chi, s2->sigma_chi);
    }

    std::array<ComplexField, 4> prof;
    prof[0] = detail::gaussian_profile(grid.coords(Axis::X1), s1.x, s1.sigma_x, s1.pi / algebra.hbar);
    prof[1] = detail::gaussian_profile(grid.coords(Axis::Chi1), s1.chi, s1.sigma_chi,
                                       (s1.p - algebra.a1 * s1.pi) / algebra.hbar);
    if (s2) {
        prof[2] = detail::gaussian_profile(grid.coords(Axis::X2), s2->x, s2->sigma_x, s2->pi / algebra.hbar);
        prof[3] = detail::gaussian_profile(grid.coords(Axis::Chi2), s2->chi, s2->sigma_chi,
                                           (s2->p - algebra.a2 * s2->pi) / algebra.hbar);
    } else {
        prof[2] = ComplexField::Ones(1);
        prof[3] = ComplexField::Ones(1);
    }

    State st{grid, ComplexField(grid.total())};
    const auto& sh = grid.shape();
#pragma omp parallel for schedule(static)
    for (int i0 = 0; i0 < sh.n[0]; ++i0) {
        long idx = static_cast<long>(i0) * sh.n[1] * sh.n[2] * sh.n[3];
        for (int i1 = 0; i1 < sh.n[1]; ++i1) {
            const Complex p01 = prof[0][i0] * prof[1][i1];
            for (int i2 = 0; i2 < sh.n[2]; ++i2) {
                const Complex p012 = p01 * prof[2][i2];
                for (int i3 = 0; i3 < sh.n[3]; ++i3, ++idx) st.amps[idx] = p012 * prof[3][i3];
            }
        }
    }
    st.amps /= state_norm(st);
    return st;
}

namespace detail {
inline void require_normalized(const State& s, const char* who) {
    const Real n = state_norm(s);
    if (std::abs(n - 1) > 1e-6)
        throw StaleStateError(std::string(who) + ": state norm " + std::to_string(n) +
                              " deviates from 1 by more than 1e-6");
}
}  // namespace detail

/// <psi|O|psi> for a basic observable. Multiplication operators are
/// quadratures over |psi|^2; derivative operators are quadratures of the
/// Fourier symbol over the partially transformed amplitudes.
inline Real expectation(const State& s, Observable obs, const AlgebraParams& algebra) {
    detail::require_normalized(s, "expectation");
    const Grid& g = s.grid;
    if (subsystem_of(obs) == 2 && !g.has_subsystem2())
        throw ConfigError(std::string("expectation: observable ") + observable_name(obs) +
                          " needs active subsystem-2 axes");
    const auto& sh = g.shape();
    if (is_position_type(obs)) {
        const RealField& x1 = g.coords(Axis::X1);
        const RealField& c1 = g.coords(Axis::Chi1);
        const RealField& x2 = g.coords(Axis::X2);
        const RealField& c2 = g.coords(Axis::Chi2);
        const Complex* a = s.amps.data();
        const Real sum = deterministic_sum(s.size(), [&](long b, long e, Real& acc) {
            IndexWalker w(sh, b);
            for (long i = b; i < e; ++i, w.next())
                acc += position_value(obs, x1[w.i0], c1[w.i1], x2[w.i2], c2[w.i3]) * std::norm(a[i]);
        });
        return sum * g.cell_volume();
    }
    ComplexField hat = s.amps;
    const AxisMask axes = derivative_axes(obs);
    g.transform(hat, axes, fft::Direction::Forward);
    Real nfactor = 1;
    for (int a = 0; a < 4; ++a)
        if (axes[a]) nfactor *= sh.n[a];
    const RealField& k0 = g.wavenumbers(Axis::X1);
    const RealField& k1 = g.wavenumbers(Axis::Chi1);
    const RealField& k2 = g.wavenumbers(Axis::X2);
    const RealField& k3 = g.wavenumbers(Axis::Chi2);
    const Complex* h = hat.data();
    const Real sum = deterministic_sum(s.size(), [&](long b, long e, Real& acc) {
        IndexWalker w(sh, b);
        for (long i = b; i < e; ++i, w.next())
            acc += symbol_value(obs, algebra, k0[w.i0], k1[w.i1], k2[w.i2], k3[w.i3]) * std::norm(h[i]);
    });
    return sum * g.cell_volume() / nfactor;
}

/// psi'(q) = f(q) psi(q). Norm is not necessarily preserved; intended for
/// residual checks, not evolution.
inline State apply_position_diagonal(const State& s, const RealField& f) {
    if (f.size() != s.size())
        throw NumericalDomainError("apply_position_diagonal: field size mismatch");
    if (!f.isFinite().all()) {
        for (long i = 0; i < f.size(); ++i) {
            if (!std::isfinite(f[i])) {
                IndexWalker w(s.grid.shape(), i);
                std::ostringstream msg;
                msg << "apply_position_diagonal: non-finite value at (x1="
                    << s.grid.coords(Axis::X1)[w.i0] << ", chi1=" << s.grid.coords(Axis::Chi1)[w.i1]
                    << ", x2=" << s.grid.coords(Axis::X2)[w.i2]
                    << ", chi2=" << s.grid.coords(Axis::Chi2)[w.i3] << ")";
                throw NumericalDomainError(msg.str());
            }
        }
    }
    State out{s.grid, ComplexField(s.size())};
    const Complex* a = s.amps.data();
    const Real* fp = f.data();
    Complex* o = out.amps.data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < s.size(); ++i) o[i] = fp[i] * a[i];
    return out;
}

/// psi' = IDFT(symbol * DFT(psi)) over all active axes; exact for
/// band-limited fields.
inline State apply_derivative_operator(const State& s, const RealField& symbol) {
    if (symbol.size() != s.size())
        throw NumericalDomainError("apply_derivative_operator: symbol size mismatch");
    if (!symbol.isFinite().all())
        throw NumericalDomainError("apply_derivative_operator: non-finite symbol");
    State out{s.grid, s.amps};
    const AxisMask mask = s.grid.active_mask();
    s.grid.transform(out.amps, mask, fft::Direction::Forward);
    const Real* sp = symbol.data();
    Complex* o = out.amps.data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < s.size(); ++i) o[i] *= sp[i];
    s.grid.transform(out.amps, mask, fft::Direction::Inverse);
    return out;
}

/// Apply one basic observable (or x2 - chi2) as an operator.
inline State observable_apply(const State& s, Observable obs, const AlgebraParams& algebra) {
    const Grid& g = s.grid;
    const auto& sh = g.shape();
    State out{g, ComplexField(s.size())};
    if (is_position_type(obs)) {
        const RealField& x1 = g.coords(Axis::X1);
        const RealField& c1 = g.coords(Axis::Chi1);
        const RealField& x2 = g.coords(Axis::X2);
        const RealField& c2 = g.coords(Axis::Chi2);
        const Complex* a = s.amps.data();
        Complex* o = out.amps.data();
#pragma omp parallel for schedule(static)
        for (int i0 = 0; i0 < sh.n[0]; ++i0) {
            long idx = static_cast<long>(i0) * sh.n[1] * sh.n[2] * sh.n[3];
            for (int i1 = 0; i1 < sh.n[1]; ++i1)
                for (int i2 = 0; i2 < sh.n[2]; ++i2)
                    for (int i3 = 0; i3 < sh.n[3]; ++i3, ++idx)
                        o[idx] = position_value(obs, x1[i0], c1[i1], x2[i2], c2[i3]) * a[idx];
        }
        return out;
    }
    out.amps = s.amps;
    const AxisMask axes = derivative_axes(obs);
    g.transform(out.amps, axes, fft::Direction::Forward);
    const RealField& k0 = g.wavenumbers(Axis::X1);
    const RealField& k1 = g.wavenumbers(Axis::Chi1);
    const RealField& k2 = g.wavenumbers(Axis::X2);
    const RealField& k3 = g.wavenumbers(Axis::Chi2);
    Complex* o = out.amps.data();
#pragma omp parallel for schedule(static)
    for (int i0 = 0; i0 < sh.n[0]; ++i0) {
        long idx = static_cast<long>(i0) * sh.n[1] * sh.n[2] * sh.n[3];
        for (int i1 = 0; i1 < sh.n[1]; ++i1)
            for (int i2 = 0; i2 < sh.n[2]; ++i2)
                for (int i3 = 0; i3 < sh.n[3]; ++i3, ++idx)
                    o[idx] *= symbol_value(obs, algebra, k0[i0], k1[i1], k2[i2], k3[i3]);
    }
    g.transform(out.amps, axes, fft::Direction::Inverse);
    return out;
}

/// Expectation through explicit operator application, <psi|O psi>; the
/// imaginary residue is asserted small. Cross-checks the quadrature route.
inline Real expectation_via_operator(const State& s, Observable obs, const AlgebraParams& algebra) {
    detail::require_normalized(s, "expectation_via_operator");
    const Complex v = inner_product(s, observable_apply(s, obs, algebra));
    if (std::abs(v.imag()) > 1e-10)
        throw NumericalDomainError("expectation_via_operator: imaginary residue " +
                                   std::to_string(v.imag()) + " exceeds 1e-10");
    return v.real();
}

using OpApply = std::function<State(const State&)>;

struct ResidualReport {
    Real value = 0;
    bool relative = true;
    bool boundary_warning = false;
};

/// || (1/(i hbar)) (O(H psi) - H(O psi)) - RHS psi || / || RHS psi ||,
/// absolute norm when ||RHS psi|| < 1e-12. A boundary flag is attached when
/// the state is not well contained.
inline ResidualReport commutator_residual(const State& s, const OpApply& h_apply, Observable obs,
                                          const OpApply& rhs_apply, const AlgebraParams& algebra) {
    ResidualReport rep;
    rep.boundary_warning = boundary_amplitude(s) >= 1e-12;

    const State h_psi = h_apply(s);
    const State o_h_psi = observable_apply(h_psi, obs, algebra);
    const State o_psi = observable_apply(s, obs, algebra);
    const State h_o_psi = h_apply(o_psi);
    const State rhs_psi = rhs_apply(s);

    const Complex inv_ihbar = Complex(0, -1.0 / algebra.hbar);
    State diff{s.grid, ComplexField(s.size())};
    const Complex* oh = o_h_psi.amps.data();
    const Complex* ho = h_o_psi.amps.data();
    const Complex* r = rhs_psi.amps.data();
    Complex* d = diff.amps.data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < s.size(); ++i) d[i] = inv_ihbar * (oh[i] - ho[i]) - r[i];

    const Real rhs_norm = state_norm(rhs_psi);
    const Real diff_norm = state_norm(diff);
    if (rhs_norm < 1e-12) {
        rep.value = diff_norm;
        rep.relative = false;
    } else {
        rep.value = diff_norm / rhs_norm;
        rep.relative = true;
    }
    return rep;
}

/// Residual of [A, B] psi against the algebra's commutation constant,
/// relative to the natural scale max(hbar*|c|, ||A psi|| * ||B psi||).
inline Real pair_commutator_residual(const State& s, Observable a, Observable b,
                                     const AlgebraParams& algebra) {
    const State a_psi = observable_apply(s, a, algebra);
    const State b_psi = observable_apply(s, b, algebra);
    const State ab = observable_apply(b_psi, a, algebra);
    const State ba = observable_apply(a_psi, b, algebra);
    const Complex ihc = Complex(0, algebra.hbar * commutation_constant(a, b, algebra));

    State diff{s.grid, ComplexField(s.size())};
    const Complex* pab = ab.amps.data();
    const Complex* pba = ba.amps.data();
    const Complex* ps = s.amps.data();
    Complex* d = diff.amps.data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < s.size(); ++i) d[i] = pab[i] - pba[i] - ihc * ps[i];

    const Real scale = std::max({std::abs(ihc), state_norm(a_psi) * state_norm(b_psi), 1e-300});
    return state_norm(diff) / scale;
}

}  // namespace iasim

#endif
