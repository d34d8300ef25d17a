#ifndef IASIM_GENERATOR_HPP
#define IASIM_GENERATOR_HPP

// Evolution generators for every regime of (a1, a2), compiled into one
// position-diagonal phase table and one Fourier-diagonal symbol table.
//
// Kinetic/potential parts per subsystem:
//   a_j != 0 :  hbar^2 (a_j kx + kc)^2 / (2 m_j a_j)   and   V_j(x)/a_j
//   a_j == 0 :  hbar^2 kx kc / m_j                     and   V_j'(x) chi
// a_j == 0 selects the exact limit form; it is a structural flag, never a
// numerical limit.
//
// Interaction forms:
//   delta-choice      (1/alpha) W(x1 + (alpha-a1) chi1, x2 + (alpha-a2) chi2)
//   gradient-coupled  d1W(x1 - a1 chi1, x2 - a2 chi2) chi1 + d2W(.) chi2
// Both realize the Ehrenfest force  dW/dx_j  at the respective arguments.

#include <string>
#include <variant>

#include "iasim/fields.hpp"
#include "iasim/potentials.hpp"
#include "iasim/state.hpp"

namespace iasim {

// ---------------------------------------------------------------------------
// Gauge freedom: functions commuting with all observables

struct FSpec {
    /// G1 evaluated at (x1 - a1 chi1, x2 - a2 chi2); position-diagonal.
    std::optional<BaseW> position;
    /// G2, polynomial of degree <= 2 in (p1 - a1 pi1, p2 - a2 pi2);
    /// Fourier-diagonal with symbol G2(hbar k_chi1, hbar k_chi2).
    std::vector<Monomial> momentum;

    bool is_zero() const { return !position.has_value() && momentum.empty(); }

    void validate() const {
        for (const auto& t : momentum)
            if (t.m < 0 || t.n < 0 || t.m + t.n > 2)
                throw ConfigError("f.momentum: polynomial degree must be <= 2");
        if (position && std::holds_alternative<WPolynomialSum>(*position))
            std::get<WPolynomialSum>(*position).validate();
    }

    bool uses_subsystem2() const {
        for (const auto& t : momentum)
            if (t.n > 0 && t.coeff != 0) return true;
        if (!position) return false;
        if (const auto* b = std::get_if<WBilinear>(&*position)) return b->lambda != 0;
        if (std::get_if<WGaussianWell>(&*position)) return true;
        if (const auto* p = std::get_if<WPolynomialSum>(&*position)) {
            for (const auto& t : p->terms)
                if (t.n > 0 && t.coeff != 0) return true;
        }
        return false;
    }
};

inline Real momentum_symbol_value(const FSpec& f, const AlgebraParams& al, Real kc1, Real kc2) {
    Real sum = 0;
    const Real u = al.hbar * kc1;
    const Real v = al.hbar * kc2;
    for (const auto& t : f.momentum) sum += t.coeff * std::pow(u, t.m) * std::pow(v, t.n);
    return sum;
}

// ---------------------------------------------------------------------------
// Generator variants

struct NonInteracting {
    AlgebraParams algebra;
    VSpec v1;
    VSpec v2;
    FSpec f;
};

struct GeneralIas {
    AlgebraParams algebra;  // a1 != 0 and a2 != 0
    VSpec v1;
    VSpec v2;
    BaseW w_base;
    Real alpha = 1;  // delta-choice parameter; != 0
    FSpec f;
};

struct GradientCoupledIas {
    AlgebraParams algebra;  // any a1, a2
    VSpec v1;
    VSpec v2;
    BaseW w_base;
    FSpec f;
};

struct HybridFiniteA {
    AlgebraParams algebra;  // a1 == 0, a2 == 1
    VSpec v1;
    VSpec v2;
    BaseW w_base;
    Real alpha = 0.5;  // != 0
    FSpec f;
};

struct ClassicalClassical {
    AlgebraParams algebra;  // a1 == a2 == 0
    VSpec v1;
    VSpec v2;
    BaseW w_base;
};

struct SpecialDecoupledHybrid {
    AlgebraParams algebra;  // a1 == 0, a2 == 1
    VSpec v1;
    VSpec v2;
    BaseW w_base;
};

using GeneratorSpec = std::variant<NonInteracting, GeneralIas, GradientCoupledIas, HybridFiniteA,
                                   ClassicalClassical, SpecialDecoupledHybrid>;

namespace detail {

enum class WKind { None, DeltaChoice, GradientCoupled };

struct LoweredGenerator {
    AlgebraParams algebra;
    VSpec v1;
    VSpec v2;
    WKind w_kind = WKind::None;
    BaseW w_base;
    Real alpha = 1;
    FSpec f;
    std::string name;
};

inline bool base_w_is_zero(const BaseW& w) {
    if (const auto* b = std::get_if<WBilinear>(&w)) return b->lambda == 0;
    if (const auto* g = std::get_if<WGaussianWell>(&w)) return g->lambda == 0;
    if (const auto* p = std::get_if<WPolynomialSum>(&w)) {
        for (const auto& t : p->terms)
            if (t.coeff != 0) return false;
        return true;
    }
    return false;
}

inline LoweredGenerator lower(const GeneratorSpec& spec) {
    LoweredGenerator lg;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            s.algebra.validate();
            lg.algebra = s.algebra;
            lg.v1 = s.v1;
            lg.v2 = s.v2;
            if constexpr (std::is_same_v<T, NonInteracting>) {
                lg.name = "non_interacting";
                lg.f = s.f;
            } else if constexpr (std::is_same_v<T, GeneralIas>) {
                lg.name = "general_ias";
                if (s.algebra.a1 == 0 || s.algebra.a2 == 0)
                    throw ConfigError("general_ias: a_j = 0 makes the 1/a_j kinetic and potential "
                                      "terms singular; use a limit-form variant");
                if (s.alpha == 0)
                    throw ConfigError("general_ias: alpha = 0 makes the 1/alpha interaction "
                                      "prefactor singular");
                lg.w_kind = WKind::DeltaChoice;
                lg.w_base = s.w_base;
                lg.alpha = s.alpha;
                lg.f = s.f;
            } else if constexpr (std::is_same_v<T, GradientCoupledIas>) {
                lg.name = "gradient_coupled_ias";
                lg.w_kind = WKind::GradientCoupled;
                lg.w_base = s.w_base;
                lg.f = s.f;
            } else if constexpr (std::is_same_v<T, HybridFiniteA>) {
                lg.name = "hybrid_finite_a";
                if (s.algebra.a1 != 0 || s.algebra.a2 != 1)
                    throw ConfigError("hybrid_finite_a: requires a1 = 0 and a2 = 1");
                if (s.alpha == 0)
                    throw ConfigError("hybrid_finite_a: alpha = 0 makes the 1/alpha interaction "
                                      "prefactor singular");
                lg.w_kind = WKind::DeltaChoice;
                lg.w_base = s.w_base;
                lg.alpha = s.alpha;
                lg.f = s.f;
            } else if constexpr (std::is_same_v<T, ClassicalClassical>) {
                lg.name = "classical_classical";
                if (s.algebra.a1 != 0 || s.algebra.a2 != 0)
                    throw ConfigError("classical_classical: requires a1 = a2 = 0");
                lg.w_kind = WKind::GradientCoupled;
                lg.w_base = s.w_base;
            } else if constexpr (std::is_same_v<T, SpecialDecoupledHybrid>) {
                lg.name = "special_decoupled_hybrid";
                if (s.algebra.a1 != 0 || s.algebra.a2 != 1)
                    throw ConfigError("special_decoupled_hybrid: requires a1 = 0 and a2 = 1");
                lg.w_kind = WKind::GradientCoupled;
                lg.w_base = s.w_base;
            }
            lg.f.validate();
            if (std::holds_alternative<WPolynomialSum>(lg.w_base))
                std::get<WPolynomialSum>(lg.w_base).validate();
        },
        spec);
    return lg;
}

inline Real kinetic_symbol(Real a, Real m, Real hbar, Real kx, Real kc) {
    if (a == 0) return hbar * hbar * kx * kc / m;
    const Real s = a * kx + kc;
    return hbar * hbar * s * s / (2 * m * a);
}

inline Real potential_phase(const VSpec& v, Real a, Real x, Real chi) {
    return (a == 0) ? v_derivative(v, x) * chi : v_value(v, x) / a;
}

// Arguments the interaction (and its claimed force) is evaluated at.
inline std::pair<Real, Real> w_args(const LoweredGenerator& lg, Real x1, Real c1, Real x2, Real c2) {
    if (lg.w_kind == WKind::DeltaChoice)
        return {x1 + (lg.alpha - lg.algebra.a1) * c1, x2 + (lg.alpha - lg.algebra.a2) * c2};
    return {x1 - lg.algebra.a1 * c1, x2 - lg.algebra.a2 * c2};
}

inline Real interaction_phase(const LoweredGenerator& lg, Real x1, Real c1, Real x2, Real c2) {
    if (lg.w_kind == WKind::None) return 0;
    auto [u1, u2] = w_args(lg, x1, c1, x2, c2);
    if (lg.w_kind == WKind::DeltaChoice) return base_w_value(lg.w_base, u1, u2) / lg.alpha;
    auto [g1, g2] = base_w_grad(lg.w_base, u1, u2);
    return g1 * c1 + g2 * c2;
}

inline std::pair<Real, Real> interaction_force(const LoweredGenerator& lg, Real x1, Real c1,
                                               Real x2, Real c2) {
    if (lg.w_kind == WKind::None) return {0, 0};
    auto [u1, u2] = w_args(lg, x1, c1, x2, c2);
    return base_w_grad(lg.w_base, u1, u2);
}

}  // namespace detail

inline std::string variant_name(const GeneratorSpec& spec) { return detail::lower(spec).name; }

/// Position field and Fourier symbol realizing the gauge function F.
inline std::pair<RealField, RealField> f_gauge_terms(const FSpec& f, const Grid& grid,
                                                     const AlgebraParams& al) {
    f.validate();
    RealField pos = f.position
                        ? field_from_coords(grid,
                                            [&](Real x1, Real c1, Real x2, Real c2) {
                                                return base_w_value(*f.position, x1 - al.a1 * c1,
                                                                    x2 - al.a2 * c2);
                                            })
                        : RealField::Zero(grid.total()).eval();
    RealField sym = field_from_wavenumbers(grid, [&](Real, Real kc1, Real, Real kc2) {
        return momentum_symbol_value(f, al, kc1, kc2);
    });
    return {std::move(pos), std::move(sym)};
}

/// Compiled generator: one position-diagonal and one Fourier-diagonal table,
/// plus the per-subsystem Ehrenfest force fields V_j' + dW/dx_j.
struct SplitPlan {
    Grid grid;
    AlgebraParams algebra;
    std::string variant;
    RealField v_phase;   // position-diagonal part of H
    RealField t_symbol;  // Fourier-diagonal part of H
    RealField force1;    // d<p_j>/dt = -<force_j>
    RealField force2;

    /// H psi: position part plus Fourier-diagonal part.
    State apply(const State& s) const {
        State pos = apply_position_diagonal(s, v_phase);
        State kin = apply_derivative_operator(s, t_symbol);
        pos.amps += kin.amps;
        return pos;
    }
};

inline SplitPlan build_plan(const GeneratorSpec& spec, const Grid& grid) {
    detail::LoweredGenerator lg = detail::lower(spec);
    const AlgebraParams& al = lg.algebra;

    if (!grid.has_subsystem2()) {
        if (!v_is_zero(lg.v2))
            throw ConfigError(lg.name + ": reduced grid (no subsystem-2 axes) requires v2 = zero");
        if (lg.w_kind != detail::WKind::None && !detail::base_w_is_zero(lg.w_base))
            throw ConfigError(lg.name + ": reduced grid requires a vanishing interaction");
        if (lg.f.uses_subsystem2())
            throw ConfigError(lg.name + ": reduced grid requires F independent of subsystem 2");
    }

    SplitPlan plan;
    plan.grid = grid;
    plan.algebra = al;
    plan.variant = lg.name;

    plan.t_symbol = field_from_wavenumbers(grid, [&](Real kx1, Real kc1, Real kx2, Real kc2) {
        Real t = detail::kinetic_symbol(al.a1, al.m1, al.hbar, kx1, kc1) +
                 detail::kinetic_symbol(al.a2, al.m2, al.hbar, kx2, kc2);
        t += momentum_symbol_value(lg.f, al, kc1, kc2);
        return t;
    });

    plan.v_phase = field_from_coords(grid, [&](Real x1, Real c1, Real x2, Real c2) {
        Real v = detail::potential_phase(lg.v1, al.a1, x1, c1) +
                 detail::potential_phase(lg.v2, al.a2, x2, c2);
        v += detail::interaction_phase(lg, x1, c1, x2, c2);
        if (lg.f.position)
            v += base_w_value(*lg.f.position, x1 - al.a1 * c1, x2 - al.a2 * c2);
        return v;
    });

    plan.force1 = field_from_coords(grid, [&](Real x1, Real c1, Real x2, Real c2) {
        return v_derivative(lg.v1, x1) + detail::interaction_force(lg, x1, c1, x2, c2).first;
    });
    plan.force2 = field_from_coords(grid, [&](Real x1, Real c1, Real x2, Real c2) {
        return v_derivative(lg.v2, x2) + detail::interaction_force(lg, x1, c1, x2, c2).second;
    });

    if (!plan.v_phase.isFinite().all() || !plan.t_symbol.isFinite().all() ||
        !plan.force1.isFinite().all() || !plan.force2.isFinite().all())
        throw NumericalDomainError(lg.name + ": generator tables contain non-finite values");
    return plan;
}

/// dW/dx_j as realized by the variant (without the V_j' part).
inline RealField interaction_gradient_field(const GeneratorSpec& spec, const Grid& grid, int j) {
    detail::LoweredGenerator lg = detail::lower(spec);
    return field_from_coords(grid, [&](Real x1, Real c1, Real x2, Real c2) {
        auto f = detail::interaction_force(lg, x1, c1, x2, c2);
        return j == 1 ? f.first : f.second;
    });
}

/// <psi|H|psi> via the two diagonal quadratures.
inline Real energy_expectation(const SplitPlan& plan, const State& s) {
    const Grid& g = s.grid;
    const Complex* a = s.amps.data();
    const Real* v = plan.v_phase.data();
    Real e = deterministic_sum(s.size(), [&](long b, long en, Real& acc) {
                 for (long i = b; i < en; ++i) acc += v[i] * std::norm(a[i]);
             }) *
             g.cell_volume();
    ComplexField hat = s.amps;
    g.transform(hat, g.active_mask(), fft::Direction::Forward);
    const Complex* h = hat.data();
    const Real* t = plan.t_symbol.data();
    Real nfactor = 1;
    for (int ax = 0; ax < 4; ++ax)
        if (g.active_mask()[ax]) nfactor *= g.shape().n[ax];
    e += deterministic_sum(s.size(), [&](long b, long en, Real& acc) {
             for (long i = b; i < en; ++i) acc += t[i] * std::norm(h[i]);
         }) *
         g.cell_volume() / nfactor;
    return e;
}

struct PdeResiduals {
    // Relation order: d<x1>, d<p1>, d<x2>, d<p2>.
    std::array<Real, 4> value{0, 0, 0, 0};
    std::array<bool, 4> present{false, false, false, false};
    bool boundary_warning = false;

    Real max_present() const {
        Real m = 0;
        for (int i = 0; i < 4; ++i)
            if (present[i]) m = std::max(m, value[i]);
        return m;
    }
};

/// Commutator form of the defining relations, checked on test states:
/// (1/i hbar)[x_j, H] = p_j/m_j and -(1/i hbar)[p_j, H] = V_j' + dW/dx_j.
inline PdeResiduals pde_residuals(const SplitPlan& plan, const std::vector<State>& test_states) {
    PdeResiduals out;
    const AlgebraParams& al = plan.algebra;
    const bool two = plan.grid.has_subsystem2();
    OpApply h_apply = [&plan](const State& s) { return plan.apply(s); };

    struct Relation {
        Observable obs;
        OpApply rhs;
    };
    std::vector<std::pair<int, Relation>> relations;
    relations.push_back({0, {Observable::X1, [&al](const State& s) {
                                 State r = observable_apply(s, Observable::P1, al);
                                 r.amps *= 1 / al.m1;
                                 return r;
                             }}});
    relations.push_back({1, {Observable::P1, [&plan](const State& s) {
                                 return apply_position_diagonal(s, (-plan.force1).eval());
                             }}});
    if (two) {
        relations.push_back({2, {Observable::X2, [&al](const State& s) {
                                     State r = observable_apply(s, Observable::P2, al);
                                     r.amps *= 1 / al.m2;
                                     return r;
                                 }}});
        relations.push_back({3, {Observable::P2, [&plan](const State& s) {
                                     return apply_position_diagonal(s, (-plan.force2).eval());
                                 }}});
    }

    for (const auto& [slot, rel] : relations) {
        out.present[slot] = true;
        for (const State& st : test_states) {
            const ResidualReport r = commutator_residual(st, h_apply, rel.obs, rel.rhs, al);
            out.value[slot] = std::max(out.value[slot], r.value);
            out.boundary_warning = out.boundary_warning || r.boundary_warning;
        }
    }
    return out;
}

inline PdeResiduals pde_residuals(const GeneratorSpec& spec, const Grid& grid,
                                  const std::vector<State>& test_states) {
    return pde_residuals(build_plan(spec, grid), test_states);
}

}  // namespace iasim

#endif
