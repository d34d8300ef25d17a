#ifndef IASIM_ALGEBRA_HPP
#define IASIM_ALGEBRA_HPP

// Interpolation-parameter algebra and the concrete operator realization
// used throughout:
//   x_j, chi_j  : multiplication by the coordinate,
//   pi_j        = -i*hbar * d/dx_j,
//   p_j         = -i*hbar * (a_j * d/dx_j + d/dchi_j).
// This satisfies [x_j, p_j] = i*hbar*a_j, [x_j, pi_j] = [chi_j, p_j] = i*hbar
// on one fixed space for every (a1, a2), makes every potential term
// position-diagonal and every kinetic term Fourier-diagonal.

#include <string>

#include "iasim/grid.hpp"
#include "iasim/types.hpp"

namespace iasim {

struct AlgebraParams {
    Real a1 = 1;
    Real a2 = 1;
    Real hbar = 1;
    Real m1 = 1;
    Real m2 = 1;

    void validate() const {
        if (!(hbar > 0)) throw ConfigError("algebra: hbar must be positive");
        if (!(m1 > 0) || !(m2 > 0)) throw ConfigError("algebra: masses must be positive");
        if (!std::isfinite(a1) || !std::isfinite(a2))
            throw ConfigError("algebra: interpolation parameters must be finite");
    }

    Real a(int subsystem) const { return subsystem == 1 ? a1 : a2; }
    Real mass(int subsystem) const { return subsystem == 1 ? m1 : m2; }
};

enum class Observable { X1, P1, Chi1, Pi1, X2, P2, Chi2, Pi2, X2MinusChi2 };

inline const char* observable_name(Observable o) {
    switch (o) {
        case Observable::X1: return "x1";
        case Observable::P1: return "p1";
        case Observable::Chi1: return "chi1";
        case Observable::Pi1: return "pi1";
        case Observable::X2: return "x2";
        case Observable::P2: return "p2";
        case Observable::Chi2: return "chi2";
        case Observable::Pi2: return "pi2";
        case Observable::X2MinusChi2: return "x2_minus_chi2";
    }
    return "?";
}

inline Observable observable_from_name(const std::string& s) {
    for (Observable o : {Observable::X1, Observable::P1, Observable::Chi1, Observable::Pi1,
                         Observable::X2, Observable::P2, Observable::Chi2, Observable::Pi2,
                         Observable::X2MinusChi2}) {
        if (s == observable_name(o)) return o;
    }
    throw ConfigError("unknown observable '" + s + "'");
}

inline bool is_position_type(Observable o) {
    switch (o) {
        case Observable::X1:
        case Observable::Chi1:
        case Observable::X2:
        case Observable::Chi2:
        case Observable::X2MinusChi2: return true;
        default: return false;
    }
}

inline int subsystem_of(Observable o) {
    switch (o) {
        case Observable::X1:
        case Observable::P1:
        case Observable::Chi1:
        case Observable::Pi1: return 1;
        default: return 2;
    }
}

/// FFT axes a derivative-type observable acts through.
inline AxisMask derivative_axes(Observable o) {
    switch (o) {
        case Observable::P1: return {true, true, false, false};
        case Observable::Pi1: return {true, false, false, false};
        case Observable::P2: return {false, false, true, true};
        case Observable::Pi2: return {false, false, true, false};
        default: return kNoAxes;
    }
}

/// Value of a position-type observable at a grid point.
inline Real position_value(Observable o, Real x1, Real c1, Real x2, Real c2) {
    switch (o) {
        case Observable::X1: return x1;
        case Observable::Chi1: return c1;
        case Observable::X2: return x2;
        case Observable::Chi2: return c2;
        case Observable::X2MinusChi2: return x2 - c2;
        default: throw NumericalDomainError("position_value: not a position-type observable");
    }
}

/// Fourier symbol of a derivative-type observable at a wavenumber point.
inline Real symbol_value(Observable o, const AlgebraParams& al, Real kx1, Real kc1, Real kx2, Real kc2) {
    switch (o) {
        case Observable::P1: return al.hbar * (al.a1 * kx1 + kc1);
        case Observable::Pi1: return al.hbar * kx1;
        case Observable::P2: return al.hbar * (al.a2 * kx2 + kc2);
        case Observable::Pi2: return al.hbar * kx2;
        default: throw NumericalDomainError("symbol_value: not a derivative-type observable");
    }
}

/// Commutator constant (1/(i*hbar)) [A, B] for basic variables A, B; the
/// antisymmetric matrix of the algebra in the order
/// (x1, p1, chi1, pi1, x2, p2, chi2, pi2).
inline Real commutation_constant(Observable a, Observable b, const AlgebraParams& al) {
    auto signed_pair = [&](Observable u, Observable v) -> Real {
        if (subsystem_of(u) != subsystem_of(v)) return 0;
        const Real aj = al.a(subsystem_of(u));
        auto base = [&](Observable p, Observable q) -> Real {
            if ((p == Observable::X1 && q == Observable::P1) ||
                (p == Observable::X2 && q == Observable::P2))
                return aj;
            if ((p == Observable::X1 && q == Observable::Pi1) ||
                (p == Observable::X2 && q == Observable::Pi2))
                return 1;
            if ((p == Observable::Chi1 && q == Observable::P1) ||
                (p == Observable::Chi2 && q == Observable::P2))
                return 1;
            return 0;
        };
        return base(u, v) - base(v, u);
    };
    return signed_pair(a, b);
}

}  // namespace iasim

#endif
