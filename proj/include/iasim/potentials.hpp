#ifndef IASIM_POTENTIALS_HPP
#define IASIM_POTENTIALS_HPP

// Per-subsystem potentials V_j, interaction potentials W, the consistency
// checker for candidate interactions, and the constructor of the admissible
// family as finite sums of base functions evaluated on shifted arguments
//   W(q) = sum_k  B_k(x1 + (alpha_k - a1) chi1,  x2 + (alpha_k - a2) chi2),
// which satisfies the consistency requirement identically for any terms.

#include <cmath>
#include <functional>
#include <sstream>
#include <variant>
#include <vector>

#include "iasim/algebra.hpp"
#include "iasim/types.hpp"

namespace iasim {

struct Point4 {
    Real x1 = 0;
    Real chi1 = 0;
    Real x2 = 0;
    Real chi2 = 0;
};

// ---------------------------------------------------------------------------
// Subsystem potentials

struct VZero {};
struct VHarmonic {
    Real k = 1;
};
struct VQuartic {
    Real k = 1;
    Real lambda = 0.1;
};
struct VCosine {
    Real amplitude = 1;
    Real wavenumber = 1;
};

using VSpec = std::variant<VZero, VHarmonic, VQuartic, VCosine>;

inline Real v_value(const VSpec& v, Real x) {
    return std::visit(
        [&](const auto& s) -> Real {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, VZero>) return 0;
            if constexpr (std::is_same_v<T, VHarmonic>) return 0.5 * s.k * x * x;
            if constexpr (std::is_same_v<T, VQuartic>) return 0.5 * s.k * x * x + s.lambda * x * x * x * x;
            if constexpr (std::is_same_v<T, VCosine>)
                return s.amplitude * (1 - std::cos(s.wavenumber * x));
        },
        v);
}

inline Real v_derivative(const VSpec& v, Real x) {
    return std::visit(
        [&](const auto& s) -> Real {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, VZero>) return 0;
            if constexpr (std::is_same_v<T, VHarmonic>) return s.k * x;
            if constexpr (std::is_same_v<T, VQuartic>) return s.k * x + 4 * s.lambda * x * x * x;
            if constexpr (std::is_same_v<T, VCosine>)
                return s.amplitude * s.wavenumber * std::sin(s.wavenumber * x);
        },
        v);
}

inline bool v_is_zero(const VSpec& v) { return std::holds_alternative<VZero>(v); }

// ---------------------------------------------------------------------------
// Interaction base functions of two arguments

struct WBilinear {
    Real lambda = 1;
};

struct WGaussianWell {
    Real lambda = 1;
    Real sigma = 1;
    Real c1 = 0;
    Real c2 = 0;
};

struct Monomial {
    int m = 0;  // power of the first argument
    int n = 0;  // power of the second argument
    Real coeff = 0;
};

struct WPolynomialSum {
    std::vector<Monomial> terms;

    void validate() const {
        for (const auto& t : terms) {
            if (t.m < 0 || t.n < 0 || t.m + t.n > 4)
                throw ConfigError("polynomial interaction: monomial degree m+n must be <= 4");
        }
    }
};

using BaseW = std::variant<WBilinear, WGaussianWell, WPolynomialSum>;

inline Real base_w_value(const BaseW& w, Real u1, Real u2) {
    return std::visit(
        [&](const auto& s) -> Real {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, WBilinear>) return s.lambda * u1 * u2;
            if constexpr (std::is_same_v<T, WGaussianWell>) {
                const Real d1 = u1 - s.c1, d2 = u2 - s.c2;
                return s.lambda * std::exp(-(d1 * d1 + d2 * d2) / (2 * s.sigma * s.sigma));
            }
            if constexpr (std::is_same_v<T, WPolynomialSum>) {
                Real sum = 0;
                for (const auto& t : s.terms) sum += t.coeff * std::pow(u1, t.m) * std::pow(u2, t.n);
                return sum;
            }
        },
        w);
}

/// Analytic partials (d/du1, d/du2).
inline std::pair<Real, Real> base_w_grad(const BaseW& w, Real u1, Real u2) {
    return std::visit(
        [&](const auto& s) -> std::pair<Real, Real> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, WBilinear>) return {s.lambda * u2, s.lambda * u1};
            if constexpr (std::is_same_v<T, WGaussianWell>) {
                const Real d1 = u1 - s.c1, d2 = u2 - s.c2;
                const Real val =
                    s.lambda * std::exp(-(d1 * d1 + d2 * d2) / (2 * s.sigma * s.sigma));
                const Real inv = 1 / (s.sigma * s.sigma);
                return {-d1 * inv * val, -d2 * inv * val};
            }
            if constexpr (std::is_same_v<T, WPolynomialSum>) {
                Real g1 = 0, g2 = 0;
                for (const auto& t : s.terms) {
                    if (t.m > 0) g1 += t.coeff * t.m * std::pow(u1, t.m - 1) * std::pow(u2, t.n);
                    if (t.n > 0) g2 += t.coeff * t.n * std::pow(u1, t.m) * std::pow(u2, t.n - 1);
                }
                return {g1, g2};
            }
        },
        w);
}

// ---------------------------------------------------------------------------
// Admissible interactions: discrete sums over alpha

struct WTerm {
    Real alpha = 0;
    BaseW base;
};

struct WSpec {
    std::vector<WTerm> terms;
};

inline Real eval_W(const WSpec& w, const AlgebraParams& al, const Point4& q) {
    Real sum = 0;
    for (const auto& t : w.terms)
        sum += base_w_value(t.base, q.x1 + (t.alpha - al.a1) * q.chi1,
                            q.x2 + (t.alpha - al.a2) * q.chi2);
    return sum;
}

/// (dW/dx1, dW/dx2) at the shifted arguments.
inline std::pair<Real, Real> grad_W_x(const WSpec& w, const AlgebraParams& al, const Point4& q) {
    Real g1 = 0, g2 = 0;
    for (const auto& t : w.terms) {
        auto [d1, d2] = base_w_grad(t.base, q.x1 + (t.alpha - al.a1) * q.chi1,
                                    q.x2 + (t.alpha - al.a2) * q.chi2);
        g1 += d1;
        g2 += d2;
    }
    return {g1, g2};
}

/// (dW/dchi1, dW/dchi2); chain rule pulls in the alpha shifts.
inline std::pair<Real, Real> grad_W_chi(const WSpec& w, const AlgebraParams& al, const Point4& q) {
    Real g1 = 0, g2 = 0;
    for (const auto& t : w.terms) {
        auto [d1, d2] = base_w_grad(t.base, q.x1 + (t.alpha - al.a1) * q.chi1,
                                    q.x2 + (t.alpha - al.a2) * q.chi2);
        g1 += (t.alpha - al.a1) * d1;
        g2 += (t.alpha - al.a2) * d2;
    }
    return {g1, g2};
}

// ---------------------------------------------------------------------------
// Candidate interactions supplied as plain functions

struct RawW {
    std::function<Real(const Point4&)> value;
    // Analytic x-partials; when absent the checker falls back to centered
    // finite differences of `value`.
    std::function<Real(const Point4&)> grad_x1;
    std::function<Real(const Point4&)> grad_x2;
};

namespace detail {

// Scale-aware steps. The outer derivative differentiates an analytic
// gradient, so a small step keeps truncation at the 1e-10 level; the
// value-fallback gradient uses a coarser step to balance rounding against
// truncation before the outer difference amplifies it.
inline Real fd_step(Real coord) { return 1e-5 * (1 + std::abs(coord)); }
inline Real fd_step_value(Real coord) { return 1e-4 * (1 + std::abs(coord)); }

template <class F>
Real fd_x1(const F& f, Point4 q, Real h) {
    Point4 a = q, b = q;
    a.x1 += h;
    b.x1 -= h;
    return (f(a) - f(b)) / (2 * h);
}
template <class F>
Real fd_x2(const F& f, Point4 q, Real h) {
    Point4 a = q, b = q;
    a.x2 += h;
    b.x2 -= h;
    return (f(a) - f(b)) / (2 * h);
}
template <class F>
Real fd_chi1(const F& f, Point4 q, Real h) {
    Point4 a = q, b = q;
    a.chi1 += h;
    b.chi1 -= h;
    return (f(a) - f(b)) / (2 * h);
}
template <class F>
Real fd_chi2(const F& f, Point4 q, Real h) {
    Point4 a = q, b = q;
    a.chi2 += h;
    b.chi2 -= h;
    return (f(a) - f(b)) / (2 * h);
}

}  // namespace detail

/// Uniform view of an interaction candidate: value plus x-gradient.
struct WView {
    std::function<Real(const Point4&)> value;
    std::function<Real(const Point4&)> grad_x1;
    std::function<Real(const Point4&)> grad_x2;
};

inline WView as_wview(const WSpec& w, const AlgebraParams& al) {
    return WView{
        [w, al](const Point4& q) { return eval_W(w, al, q); },
        [w, al](const Point4& q) { return grad_W_x(w, al, q).first; },
        [w, al](const Point4& q) { return grad_W_x(w, al, q).second; },
    };
}

inline WView as_wview(const RawW& w) {
    WView v;
    v.value = w.value;
    if (w.grad_x1)
        v.grad_x1 = w.grad_x1;
    else
        v.grad_x1 = [value = w.value](const Point4& q) {
            return detail::fd_x1(value, q, detail::fd_step_value(q.x1));
        };
    if (w.grad_x2)
        v.grad_x2 = w.grad_x2;
    else
        v.grad_x2 = [value = w.value](const Point4& q) {
            return detail::fd_x2(value, q, detail::fd_step_value(q.x2));
        };
    return v;
}

/// Residual of the solvability condition on the interaction:
///   (a1 d/dx1 + d/dchi1) dW/dx2 - (a2 d/dx2 + d/dchi2) dW/dx1
/// evaluated pointwise; returns the maximum absolute value over the sample.
/// The outer derivatives are always taken by centered differences, so a
/// member of the admissible family scores only finite-difference noise.
inline Real consistency_residual(const WView& w, const AlgebraParams& al,
                                 const std::vector<Point4>& points) {
    Real worst = 0;
    for (const Point4& q : points) {
        const Real d1_of_g2 = al.a1 * detail::fd_x1(w.grad_x2, q, detail::fd_step(q.x1)) +
                              detail::fd_chi1(w.grad_x2, q, detail::fd_step(q.chi1));
        const Real d2_of_g1 = al.a2 * detail::fd_x2(w.grad_x1, q, detail::fd_step(q.x2)) +
                              detail::fd_chi2(w.grad_x1, q, detail::fd_step(q.chi2));
        const Real r = d1_of_g2 - d2_of_g1;
        if (!std::isfinite(r)) {
            std::ostringstream msg;
            msg << "consistency_residual: non-finite derivative at (x1=" << q.x1
                << ", chi1=" << q.chi1 << ", x2=" << q.x2 << ", chi2=" << q.chi2 << ")";
            throw NumericalDomainError(msg.str());
        }
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

inline Real consistency_residual(const WSpec& w, const AlgebraParams& al,
                                 const std::vector<Point4>& points) {
    return consistency_residual(as_wview(w, al), al, points);
}

inline Real consistency_residual(const RawW& w, const AlgebraParams& al,
                                 const std::vector<Point4>& points) {
    return consistency_residual(as_wview(w), al, points);
}

// ---------------------------------------------------------------------------
// Admissibility decision

inline Real halton(long index, int base) {
    Real f = 1, r = 0;
    long i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

struct Box4 {
    std::array<Real, 4> lo{-8, -8, -8, -8};
    std::array<Real, 4> hi{8, 8, 8, 8};
};

/// Deterministic low-discrepancy sample of the domain box.
inline std::vector<Point4> halton_points(const Box4& box, int count) {
    static constexpr int bases[4] = {2, 3, 5, 7};
    std::vector<Point4> pts;
    pts.reserve(count);
    for (int i = 1; i <= count; ++i) {
        std::array<Real, 4> u{};
        for (int d = 0; d < 4; ++d)
            u[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * halton(i, bases[d]);
        pts.push_back(Point4{u[0], u[1], u[2], u[3]});
    }
    return pts;
}

struct AdmissibilityVerdict {
    bool admissible = false;
    Real max_residual = 0;
    Point4 witness;  // meaningful when inadmissible
};

inline AdmissibilityVerdict admissible_projection_exists(const WView& w, const AlgebraParams& al,
                                                         const Box4& box = Box4{}) {
    const auto points = halton_points(box, 128);
    AdmissibilityVerdict verdict;
    for (const Point4& q : points) {
        const Real r = consistency_residual(w, al, std::vector<Point4>{q});
        if (r > verdict.max_residual) {
            verdict.max_residual = r;
            verdict.witness = q;
        }
    }
    verdict.admissible = verdict.max_residual < 1e-6;
    return verdict;
}

inline AdmissibilityVerdict admissible_projection_exists(const RawW& w, const AlgebraParams& al,
                                                         const Box4& box = Box4{}) {
    return admissible_projection_exists(as_wview(w), al, box);
}

}  // namespace iasim

#endif
