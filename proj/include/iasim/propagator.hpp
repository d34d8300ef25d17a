#ifndef IASIM_PROPAGATOR_HPP
#define IASIM_PROPAGATOR_HPP

// Unitary evolution by second-order Strang splitting:
//   psi <- exp(-i V dt / 2 hbar) . IDFT exp(-i T dt / hbar) DFT . exp(-i V dt / 2 hbar) psi
// with V the position-diagonal table and T the Fourier-diagonal table of a
// SplitPlan. Adjacent half-kicks are fused between record points.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iasim/generator.hpp"

namespace iasim {

struct EvolveExtras {
    bool norm = true;
    bool forces = false;
    bool energy = false;
    bool x2_minus_chi2_moments = false;
};

struct EvolveConfig {
    Real dt = 0.005;
    long n_steps = 1;
    long record_every = 1;
    std::vector<Observable> observables;
    EvolveExtras extras;

    void validate() const {
        if (!(dt > 0)) throw ConfigError("evolve: dt must be positive");
        if (n_steps < 1) throw ConfigError("evolve: n_steps must be >= 1");
        if (record_every < 1) throw ConfigError("evolve: record_every must be >= 1");
    }
};

struct TimeSeriesMeta {
    std::string variant;
    std::uint64_t spec_hash = 0;
    std::vector<std::string> warnings;
};

struct TimeSeries {
    std::vector<Real> times;
    std::vector<std::string> names;             // column order, after the time column
    std::vector<std::vector<Real>> columns;     // one vector per name
    TimeSeriesMeta meta;

    const std::vector<Real>& column(const std::string& name) const {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return columns[i];
        throw DiagnosticError("time series has no column '" + name + "'");
    }
    bool has_column(const std::string& name) const {
        for (const auto& n : names)
            if (n == name) return true;
        return false;
    }
    size_t rows() const { return times.size(); }
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline ComplexField phase_table(const RealField& v, Real scale) {
    ComplexField out(v.size());
    const Real* p = v.data();
    Complex* o = out.data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < v.size(); ++i) o[i] = std::polar(Real(1), scale * p[i]);
    return out;
}

inline void multiply_inplace(ComplexField& a, const ComplexField& b) {
    Complex* pa = a.data();
    const Complex* pb = b.data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < a.size(); ++i) pa[i] *= pb[i];
}

// One fused pass over position space and (when needed) one over Fourier
// space. Both passes accumulate per-axis weight marginals; every basic
// observable is then a small dot product against coordinate or wavenumber
// tables. Non-separable channels (forces, tables, x2-chi2 moments) ride in
// the same sweep.
struct Recorder {
    const SplitPlan* plan = nullptr;
    std::vector<Observable> position_obs;
    std::vector<Observable> momentum_obs;
    EvolveExtras extras;

    bool needs_k_pass() const { return !momentum_obs.empty() || extras.energy; }

    // marginal channel layout: per-axis bins, then 5 scalar channels
    struct Sweep {
        std::array<long, 4> offset{};
        int scalars_at = 0;
        int total = 0;
    };
    static Sweep sweep_layout(const fft::Shape4& sh) {
        Sweep sw;
        long off = 0;
        for (int a = 0; a < 4; ++a) {
            sw.offset[a] = off;
            off += sh.n[a];
        }
        sw.scalars_at = static_cast<int>(off);
        sw.total = static_cast<int>(off + 5);
        return sw;
    }

    std::vector<Real> marginal_sweep(const Grid& g, const Complex* a, const Real* ch0,
                                     const Real* ch1, const Real* ch2, bool with_moments) const {
        const auto& sh = g.shape();
        const Sweep sw = sweep_layout(sh);
        const RealField& x2 = g.coords(Axis::X2);
        const RealField& c2 = g.coords(Axis::Chi2);
        return deterministic_sums_dyn(g.total(), sw.total, [&](long b, long e, Real* acc) {
            IndexWalker w(sh, b);
            Real* scal = acc + sw.scalars_at;
            for (long i = b; i < e; ++i, w.next()) {
                const Real d = std::norm(a[i]);
                acc[sw.offset[0] + w.i0] += d;
                acc[sw.offset[1] + w.i1] += d;
                acc[sw.offset[2] + w.i2] += d;
                acc[sw.offset[3] + w.i3] += d;
                if (ch0) scal[0] += ch0[i] * d;
                if (ch1) scal[1] += ch1[i] * d;
                if (ch2) scal[2] += ch2[i] * d;
                if (with_moments) {
                    const Real q = x2[w.i2] - c2[w.i3];
                    scal[3] += q * d;
                    scal[4] += q * q * d;
                }
            }
        });
    }

    static Real dot_marginal(const RealField& table, const std::vector<Real>& sums, long offset) {
        Real acc = 0;
        for (long i = 0; i < table.size(); ++i) acc += table[i] * sums[offset + i];
        return acc;
    }

    std::map<std::string, Real> measure(const State& s) const {
        const Grid& g = s.grid;
        const auto& sh = g.shape();
        const Sweep sw = sweep_layout(sh);
        std::map<std::string, Real> out;
        const Real w = g.cell_volume();

        auto sums = marginal_sweep(g, s.amps.data(), extras.forces ? plan->force1.data() : nullptr,
                                   extras.forces ? plan->force2.data() : nullptr,
                                   extras.energy ? plan->v_phase.data() : nullptr,
                                   extras.x2_minus_chi2_moments);

        auto coord_mean = [&](Axis ax) {
            return dot_marginal(g.coords(ax), sums, sw.offset[static_cast<int>(ax)]) * w;
        };
        for (Observable o : position_obs) {
            switch (o) {
                case Observable::X1: out["x1"] = coord_mean(Axis::X1); break;
                case Observable::Chi1: out["chi1"] = coord_mean(Axis::Chi1); break;
                case Observable::X2: out["x2"] = coord_mean(Axis::X2); break;
                case Observable::Chi2: out["chi2"] = coord_mean(Axis::Chi2); break;
                case Observable::X2MinusChi2:
                    out["x2_minus_chi2"] = coord_mean(Axis::X2) - coord_mean(Axis::Chi2);
                    break;
                default: break;
            }
        }
        if (extras.norm) {
            Real mass = 0;
            for (int i = 0; i < sh.n[0]; ++i) mass += sums[sw.offset[0] + i];
            out["norm"] = std::sqrt(mass * w);
        }
        if (extras.forces) {
            out["force1"] = sums[sw.scalars_at + 0] * w;
            out["force2"] = sums[sw.scalars_at + 1] * w;
        }
        if (extras.x2_minus_chi2_moments) {
            out["x2_minus_chi2_m1"] = sums[sw.scalars_at + 3] * w;
            out["x2_minus_chi2_m2"] = sums[sw.scalars_at + 4] * w;
        }
        Real energy = extras.energy ? sums[sw.scalars_at + 2] * w : 0;

        if (needs_k_pass()) {
            ComplexField hat = s.amps;
            g.transform(hat, g.active_mask(), fft::Direction::Forward);
            auto ksums = marginal_sweep(g, hat.data(), extras.energy ? plan->t_symbol.data() : nullptr,
                                        nullptr, nullptr, false);
            Real nfactor = 1;
            for (int ax = 0; ax < 4; ++ax)
                if (g.active_mask()[ax]) nfactor *= sh.n[ax];
            const AlgebraParams& al = plan->algebra;
            auto k_mean = [&](Axis ax) {
                return dot_marginal(g.wavenumbers(ax), ksums, sw.offset[static_cast<int>(ax)]) * w /
                       nfactor;
            };
            for (Observable o : momentum_obs) {
                switch (o) {
                    case Observable::P1:
                        out["p1"] = al.hbar * (al.a1 * k_mean(Axis::X1) + k_mean(Axis::Chi1));
                        break;
                    case Observable::Pi1: out["pi1"] = al.hbar * k_mean(Axis::X1); break;
                    case Observable::P2:
                        out["p2"] = al.hbar * (al.a2 * k_mean(Axis::X2) + k_mean(Axis::Chi2));
                        break;
                    case Observable::Pi2: out["pi2"] = al.hbar * k_mean(Axis::X2); break;
                    default: break;
                }
            }
            if (extras.energy) energy += ksums[sw.scalars_at + 0] * w / nfactor;
        }
        if (extras.energy) out["energy"] = energy;
        return out;
    }
};

}  // namespace detail

/// n_steps Strang steps with fused half-kicks, no recording; dt may be
/// negative.
inline State propagate(const State& s, const SplitPlan& plan, Real dt, long n_steps) {
    if (n_steps < 1) return s;
    const Real hbar = plan.algebra.hbar;
    const ComplexField half = detail::phase_table(plan.v_phase, -dt / (2 * hbar));
    const ComplexField vfull = detail::phase_table(plan.v_phase, -dt / hbar);
    const ComplexField kin = detail::phase_table(plan.t_symbol, -dt / hbar);
    const AxisMask mask = s.grid.active_mask();
    State out{s.grid, s.amps};
    detail::multiply_inplace(out.amps, half);
    for (long i = 1; i <= n_steps; ++i) {
        s.grid.transform(out.amps, mask, fft::Direction::Forward);
        detail::multiply_inplace(out.amps, kin);
        s.grid.transform(out.amps, mask, fft::Direction::Inverse);
        detail::multiply_inplace(out.amps, i == n_steps ? half : vfull);
    }
    return out;
}

/// One Strang step; dt may be negative (exact reversal of a forward step).
inline State step(const State& s, const SplitPlan& plan, Real dt) {
    const Real hbar = plan.algebra.hbar;
    const ComplexField half = detail::phase_table(plan.v_phase, -dt / (2 * hbar));
    const ComplexField kin = detail::phase_table(plan.t_symbol, -dt / hbar);
    State out{s.grid, s.amps};
    detail::multiply_inplace(out.amps, half);
    const AxisMask mask = s.grid.active_mask();
    s.grid.transform(out.amps, mask, fft::Direction::Forward);
    detail::multiply_inplace(out.amps, kin);
    s.grid.transform(out.amps, mask, fft::Direction::Inverse);
    detail::multiply_inplace(out.amps, half);
    return out;
}

/// Strang evolution with periodic recording. Record rows are laid down at
/// t = 0 and every `record_every` steps; recording does not perturb the
/// split chain. A boundary-contact warning is attached to the metadata when
/// edge amplitude exceeds 1e-8 at any record point.
inline TimeSeries evolve(const State& initial, const SplitPlan& plan, const EvolveConfig& cfg) {
    cfg.validate();
    const Grid& g = initial.grid;
    const Real hbar = plan.algebra.hbar;

    detail::Recorder rec;
    rec.plan = &plan;
    rec.extras = cfg.extras;
    for (size_t i = 0; i < cfg.observables.size(); ++i) {
        const Observable o = cfg.observables[i];
        if (subsystem_of(o) == 2 && !g.has_subsystem2())
            throw ConfigError(std::string("evolve: observable ") + observable_name(o) +
                              " needs active subsystem-2 axes");
        for (size_t j = 0; j < i; ++j)
            if (cfg.observables[j] == o)
                throw ConfigError(std::string("evolve: observable ") + observable_name(o) +
                                  " listed twice");
        (is_position_type(o) ? rec.position_obs : rec.momentum_obs).push_back(o);
    }
    if ((cfg.extras.x2_minus_chi2_moments) && !g.has_subsystem2())
        throw ConfigError("evolve: x2_minus_chi2 moments need active subsystem-2 axes");
    if (rec.position_obs.size() > 12)
        throw ConfigError("evolve: too many position observables requested");

    TimeSeries ts;
    {
        std::string desc = plan.variant;
        char buf[256];
        std::snprintf(buf, sizeof buf, "|a1=%.17g|a2=%.17g|hbar=%.17g|m1=%.17g|m2=%.17g|dt=%.17g|n=%ld|rec=%ld",
                      plan.algebra.a1, plan.algebra.a2, plan.algebra.hbar, plan.algebra.m1,
                      plan.algebra.m2, cfg.dt, cfg.n_steps, cfg.record_every);
        desc += buf;
        for (int ax = 0; ax < 4; ++ax) desc += "|" + std::to_string(g.shape().n[ax]);
        ts.meta.variant = plan.variant;
        ts.meta.spec_hash = detail::fnv1a(desc);
    }

    bool boundary_warned = false;
    auto record = [&](const State& s, long step_index) {
        const Real t = static_cast<Real>(step_index) * cfg.dt;
        auto values = rec.measure(s);
        if (ts.names.empty()) {
            // requested observable order first, then extras
            for (Observable o : cfg.observables) ts.names.push_back(observable_name(o));
            for (const char* extra : {"norm", "force1", "force2", "x2_minus_chi2_m1",
                                      "x2_minus_chi2_m2", "energy"})
                if (values.count(extra)) ts.names.push_back(extra);
            ts.columns.assign(ts.names.size(), {});
        }
        ts.times.push_back(t);
        for (size_t c = 0; c < ts.names.size(); ++c) ts.columns[c].push_back(values.at(ts.names[c]));
        if (!boundary_warned) {
            const Real edge = boundary_amplitude(s);
            if (edge > 1e-8) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "boundary contact: edge amplitude %.3e exceeds 1e-8 at t=%.6g", edge, t);
                ts.meta.warnings.emplace_back(buf);
                boundary_warned = true;
            }
        }
    };

    record(initial, 0);

    const ComplexField half = detail::phase_table(plan.v_phase, -cfg.dt / (2 * hbar));
    const ComplexField vfull = detail::phase_table(plan.v_phase, -cfg.dt / hbar);
    const ComplexField kin = detail::phase_table(plan.t_symbol, -cfg.dt / hbar);
    const AxisMask mask = g.active_mask();

    State work{g, initial.amps};
    detail::multiply_inplace(work.amps, half);
    for (long s = 1; s <= cfg.n_steps; ++s) {
        g.transform(work.amps, mask, fft::Direction::Forward);
        detail::multiply_inplace(work.amps, kin);
        g.transform(work.amps, mask, fft::Direction::Inverse);
        const bool at_record = (s % cfg.record_every == 0);
        if (s == cfg.n_steps) {
            detail::multiply_inplace(work.amps, half);
            if (at_record) record(work, s);
        } else if (at_record) {
            detail::multiply_inplace(work.amps, half);
            record(work, s);
            detail::multiply_inplace(work.amps, half);
        } else {
            detail::multiply_inplace(work.amps, vfull);
        }
    }
    return ts;
}

struct EhrenfestResiduals {
    std::array<Real, 4> value{0, 0, 0, 0};  // x1, p1, x2, p2 relations
    std::array<bool, 4> present{false, false, false, false};

    Real max_present() const {
        Real m = 0;
        for (int i = 0; i < 4; ++i)
            if (present[i]) m = std::max(m, value[i]);
        return m;
    }
};

/// Central-difference check of d<x_j>/dt = <p_j>/m_j and
/// d<p_j>/dt = -<force_j> on a recorded series.
inline EhrenfestResiduals ehrenfest_residuals(const TimeSeries& ts, const AlgebraParams& al) {
    if (ts.rows() < 3)
        throw DiagnosticError("ehrenfest_residuals: need at least 3 recorded points");
    if (!ts.has_column("force1"))
        throw DiagnosticError("ehrenfest_residuals: series lacks force expectations");
    const Real dt = ts.times[1] - ts.times[0];

    EhrenfestResiduals out;
    auto relation = [&](int slot, const std::vector<Real>& q, const std::vector<Real>& rhs) {
        out.present[slot] = true;
        for (size_t i = 1; i + 1 < q.size(); ++i) {
            const Real deriv = (q[i + 1] - q[i - 1]) / (2 * dt);
            out.value[slot] = std::max(out.value[slot], std::abs(deriv - rhs[i]));
        }
    };

    {
        const auto& p1 = ts.column("p1");
        std::vector<Real> rhs(p1.size());
        for (size_t i = 0; i < p1.size(); ++i) rhs[i] = p1[i] / al.m1;
        relation(0, ts.column("x1"), rhs);
        const auto& f1 = ts.column("force1");
        std::vector<Real> rhsp(f1.size());
        for (size_t i = 0; i < f1.size(); ++i) rhsp[i] = -f1[i];
        relation(1, p1, rhsp);
    }
    if (ts.has_column("x2")) {
        const auto& p2 = ts.column("p2");
        std::vector<Real> rhs(p2.size());
        for (size_t i = 0; i < p2.size(); ++i) rhs[i] = p2[i] / al.m2;
        relation(2, ts.column("x2"), rhs);
        const auto& f2 = ts.column("force2");
        std::vector<Real> rhsp(f2.size());
        for (size_t i = 0; i < f2.size(); ++i) rhsp[i] = -f2[i];
        relation(3, p2, rhsp);
    }
    return out;
}

struct ConservedDrift {
    std::optional<Real> m1;
    std::optional<Real> m2;
    std::optional<Real> energy;
};

/// Maximum excursion of <(x2-chi2)^k>, k = 1, 2, and of <H> from their
/// initial values.
inline ConservedDrift conserved_moments(const TimeSeries& ts) {
    ConservedDrift out;
    auto drift = [&](const std::string& name) -> std::optional<Real> {
        if (!ts.has_column(name)) return std::nullopt;
        const auto& col = ts.column(name);
        Real worst = 0;
        for (Real v : col) worst = std::max(worst, std::abs(v - col.front()));
        return worst;
    };
    out.m1 = drift("x2_minus_chi2_m1");
    out.m2 = drift("x2_minus_chi2_m2");
    out.energy = drift("energy");
    return out;
}

}  // namespace iasim

#endif
