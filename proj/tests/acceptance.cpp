// Acceptance suite: one pass/fail line per criterion, wall-clock budgets
// included. Run through ctest (target `acceptance`) or directly; exits
// nonzero when any criterion fails. `--cli <path>` points at the command
// line binary for the byte-determinism criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "iasim/io.hpp"

using namespace iasim;
namespace fs = std::filesystem;

namespace {

struct CriterionResult {
    int number = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    double budget = 0;
};

std::vector<CriterionResult> g_results;

template <class Fn>
void criterion(int number, const std::string& title, double budget_s, Fn&& body) {
    CriterionResult r;
    r.number = number;
    r.title = title;
    r.budget = budget_s;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::ostringstream detail;
        r.pass = body(detail);
        r.detail = detail.str();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.budget) {
        r.pass = false;
        r.detail += (r.detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("[%s] criterion %d: %s (%s) [%.1f s < %.0f s]\n", r.pass ? "PASS" : "FAIL",
                r.number, r.title.c_str(), r.detail.c_str(), r.seconds, r.budget);
    std::fflush(stdout);
    g_results.push_back(std::move(r));
}

bool scenario_criterion(std::ostringstream& detail, const ScenarioReport& rep) {
    bool pass = rep.pass;
    bool first = true;
    for (const auto& m : rep.metrics) {
        if (!first) detail << ", ";
        first = false;
        detail << m.name << "=" << format_real(m.value);
        if (!m.pass) detail << " VIOLATES " << (m.require_less ? "< " : "> ") << m.threshold;
    }
    return pass;
}

// --------------------------------------------------------------------------
// criterion 1: algebra fidelity

const std::array<Observable, 8> kBasicOps{Observable::X1,  Observable::P1, Observable::Chi1,
                                          Observable::Pi1, Observable::X2, Observable::P2,
                                          Observable::Chi2, Observable::Pi2};

bool algebra_fidelity(std::ostringstream& detail) {
    std::mt19937 rng(20260808);
    std::uniform_real_distribution<Real> center(-1.5, 1.5);
    std::uniform_real_distribution<Real> width(0.75, 1.2);
    std::uniform_real_distribution<Real> mom(-1.5, 1.5);

    // wide, cheap grids: the live subsystem gets the resolution, the idle
    // one collapses to two points; cross pairs run on a joint grid
    Grid sub1 = make_grid({AxisSpec{128, 27, 0}, AxisSpec{128, 27, 0}, AxisSpec{2, 20, 0},
                           AxisSpec{2, 20, 0}});
    Grid sub2 = make_grid({AxisSpec{2, 20, 0}, AxisSpec{2, 20, 0}, AxisSpec{128, 27, 0},
                           AxisSpec{128, 27, 0}});
    Grid joint = make_grid_4axis(16, 12);

    const std::array<Real, 3> lattice{0.0, 0.5, 1.0};
    Real worst = 0;
    int state_count = 0;
    for (int rep = 0; rep < 20; ++rep) {
        AlgebraParams al;
        al.a1 = lattice[rep % 3];
        al.a2 = lattice[(rep / 3) % 3];
        ++state_count;

        GaussianTargets wild{center(rng), mom(rng), center(rng), mom(rng), width(rng), width(rng)};
        GaussianTargets tame{0.2 * center(rng), 0.2 * mom(rng), 0.2 * center(rng), 0.2 * mom(rng),
                             1.0, 1.0};

        // subsystem-1 pairs
        {
            State s = gaussian_state(sub1, al, wild, GaussianTargets{0, 0, 0, 0, 1, 1});
            for (size_t i = 0; i < 4; ++i)
                for (size_t j = i + 1; j < 4; ++j)
                    worst = std::max(worst,
                                     pair_commutator_residual(s, kBasicOps[i], kBasicOps[j], al));
        }
        // subsystem-2 pairs
        {
            State s = gaussian_state(sub2, al, GaussianTargets{0, 0, 0, 0, 1, 1}, wild);
            for (size_t i = 4; i < 8; ++i)
                for (size_t j = i + 1; j < 8; ++j)
                    worst = std::max(worst,
                                     pair_commutator_residual(s, kBasicOps[i], kBasicOps[j], al));
        }
        // cross-subsystem pairs (measured containment-insensitive)
        {
            State s = gaussian_state(joint, al, tame, tame);
            for (size_t i = 0; i < 4; ++i)
                for (size_t j = 4; j < 8; ++j)
                    worst = std::max(worst,
                                     pair_commutator_residual(s, kBasicOps[i], kBasicOps[j], al));
        }
    }
    detail << "28 pairs x " << state_count << " random states over the (a1,a2) lattice, worst rel "
           << format_real(worst);
    return worst < 1e-8;
}

// --------------------------------------------------------------------------
// criterion 3: consistency requirement

bool consistency_checker(std::ostringstream& detail) {
    RawW bilinear{[](const Point4& q) { return q.x1 * q.x2; },
                  [](const Point4& q) { return q.x2; },
                  [](const Point4& q) { return q.x1; }};
    auto points = halton_points(Box4{}, 64);
    Real worst_exact = 0;
    for (Real a1 : {0.0, 0.5, 1.0})
        for (Real a2 : {0.0, 0.5, 1.0}) {
            AlgebraParams al;
            al.a1 = a1;
            al.a2 = a2;
            const Real r = consistency_residual(bilinear, al, points);
            worst_exact = std::max(worst_exact, std::abs(r - std::abs(a1 - a2)));
        }

    std::mt19937 rng(7321);
    std::uniform_real_distribution<Real> coeff(-1.0, 1.0);
    std::uniform_real_distribution<Real> alpha(-0.5, 1.5);
    auto inner = halton_points(Box4{{-2, -2, -2, -2}, {2, 2, 2, 2}}, 64);
    const std::array<Real, 4> lattice{0.0, 0.25, 0.5, 1.0};
    Real worst_family = 0;
    for (int i = 0; i < 50; ++i) {
        AlgebraParams al;
        al.a1 = lattice[i % 4];
        al.a2 = lattice[(i / 4) % 4];
        WSpec w{{WTerm{alpha(rng), WBilinear{coeff(rng)}},
                 WTerm{alpha(rng), WGaussianWell{coeff(rng), 1.3, coeff(rng), coeff(rng)}},
                 WTerm{alpha(rng), WPolynomialSum{{Monomial{3, 1, 0.5 * coeff(rng)},
                                                   Monomial{1, 1, coeff(rng)},
                                                   Monomial{2, 2, 0.5 * coeff(rng)}}}}}};
        worst_family = std::max(worst_family, consistency_residual(w, al, inner));
    }
    detail << "|r - |a1-a2|| max " << format_real(worst_exact) << " on x1*x2; family max "
           << format_real(worst_family) << " over 50 randomized admissible instances";
    return worst_exact < 1e-9 && worst_family < 1e-7;
}

// --------------------------------------------------------------------------
// criterion 4: Ehrenfest relations with second-order reduction

bool ehrenfest_relations(std::ostringstream& detail) {
    Grid g = make_grid_4axis(32, 20);
    GaussianTargets t1{0.4, 0.15, -0.2, 0, 1.0, 1.0};
    GaussianTargets t2{-0.4, -0.1, 0.2, 0, 1.0, 1.0};
    const VSpec vh{VHarmonic{0.25}};
    const Real lam = 0.2;

    auto residual_for = [&](const GeneratorSpec& spec, Real dt, Real horizon) {
        AlgebraParams al = std::visit([](const auto& s) { return s.algebra; }, spec);
        State s = gaussian_state(g, al, t1, t2);
        SplitPlan plan = build_plan(spec, g);
        EvolveConfig cfg;
        cfg.dt = dt;
        cfg.n_steps = std::llround(horizon / dt);
        cfg.record_every = 1;
        cfg.observables = {Observable::X1, Observable::P1, Observable::X2, Observable::P2};
        cfg.extras.forces = true;
        TimeSeries ts = evolve(s, plan, cfg);
        return ehrenfest_residuals(ts, al).max_present();
    };

    AlgebraParams qq, mx, gc, hy, cc;
    qq.a1 = qq.a2 = 1;
    mx.a1 = 0.5;
    mx.a2 = 1;
    gc.a1 = 0;
    gc.a2 = 0.5;
    hy.a1 = 0;
    hy.a2 = 1;
    cc.a1 = cc.a2 = 0;
    const std::vector<std::pair<std::string, GeneratorSpec>> variants{
        {"general_ias", GeneralIas{qq, vh, vh, WBilinear{lam}, 1.0, FSpec{}}},
        {"non_interacting", NonInteracting{mx, vh, vh, FSpec{}}},
        {"gradient_coupled_ias", GradientCoupledIas{gc, vh, vh, WBilinear{lam}, FSpec{}}},
        {"hybrid_finite_a", HybridFiniteA{hy, vh, vh, WBilinear{lam}, 0.5, FSpec{}}},
        {"classical_classical", ClassicalClassical{cc, vh, vh, WBilinear{lam}}},
        {"special_decoupled_hybrid", SpecialDecoupledHybrid{hy, vh, vh, WBilinear{lam}}},
    };

    Real worst = 0;
    for (const auto& [name, spec] : variants) {
        const Real r = residual_for(spec, 0.005, 1.0);
        worst = std::max(worst, r);
        if (r >= 5e-4) {
            detail << name << " residual " << format_real(r) << " VIOLATES < 5e-4";
            return false;
        }
    }

    // O(dt^2) reduction on the coupled quantum-quantum configuration
    const GeneratorSpec qspec{GeneralIas{qq, vh, vh, WBilinear{lam}, 1.0, FSpec{}}};
    const Real r1 = residual_for(qspec, 0.02, 1.0);
    const Real r3 = residual_for(qspec, 0.005, 1.0);
    const Real slope = std::log(r1 / r3) / std::log(0.02 / 0.005);
    detail << "worst residual " << format_real(worst) << " at dt=0.005; slope " << format_real(slope);
    return worst < 5e-4 && slope > 1.8 && slope < 2.2;
}

// --------------------------------------------------------------------------
// criterion 10: byte-identical repeated simulate runs

bool determinism(std::ostringstream& detail, const std::string& cli_path) {
    const fs::path work = fs::temp_directory_path() / "iasim_determinism";
    fs::create_directories(work);
    const fs::path cfg_path = work / "run.json";
    {
        Json j;
        j["algebra"] = Json{{"a1", 1}, {"a2", 1}};
        j["grid"] = Json{{"x1", {{"n", 128}, {"length", 20}}}, {"chi1", {{"n", 128}, {"length", 20}}}};
        j["generator"] = Json{{"variant", "non_interacting"},
                              {"v1", {{"type", "harmonic"}, {"k", 1}}},
                              {"v2", {{"type", "zero"}}}};
        j["initial_state"] = Json{{"s1", {{"x", 1.0}, {"p", 0.3}, {"sigma_x", 1}, {"sigma_chi", 1}}}};
        j["evolve"] = Json{{"dt", 0.01},
                           {"n_steps", 400},
                           {"record_every", 1},
                           {"observables", Json::array({"x1", "p1", "pi1", "chi1"})}};
        std::ofstream f(cfg_path);
        f << j.dump(2);
    }
    auto run_once = [&](const std::string& out) {
        const std::string cmd = cli_path + " simulate " + cfg_path.string() + " --out " +
                                (work / out).string() + " > /dev/null";
        return std::system(cmd.c_str());
    };
    if (run_once("a") != 0 || run_once("b") != 0) {
        detail << "cli invocation failed";
        return false;
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(work / "a" / "series.csv");
    const std::string b = slurp(work / "b" / "series.csv");
    detail << "two runs, " << a.size() << " bytes each, "
           << (a == b ? "byte-identical" : "DIFFER");
    return !a.empty() && a == b;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli_path = argv[i + 1];

    std::printf("acceptance suite (threads: %s)\n",
                std::getenv("OMP_NUM_THREADS") ? std::getenv("OMP_NUM_THREADS") : "default");

    criterion(1, "algebra fidelity", 10, [](std::ostringstream& d) { return algebra_fidelity(d); });

    criterion(2, "commutation identities for every generator variant", 30,
              [](std::ostringstream& d) { return scenario_criterion(d, run_pde_residual_suite({})); });

    criterion(3, "consistency requirement checker", 5,
              [](std::ostringstream& d) { return consistency_checker(d); });

    criterion(4, "Ehrenfest relations with O(dt^2) reduction", 120,
              [](std::ostringstream& d) { return ehrenfest_relations(d); });

    criterion(5, "first-moment oracle agreement (Q-Q, C-C, C-Q)", 120,
              [](std::ostringstream& d) { return scenario_criterion(d, run_qq_cc_limit_suite({})); });

    criterion(6, "decoupling iff equal interpolation parameters", 300,
              [](std::ostringstream& d) {
                  ScenarioReport equal = run_decoupling_probe({});
                  ScenarioReport hybrid = run_hybrid_coupling_probe({});
                  const bool a = scenario_criterion(d, equal);
                  d << "; ";
                  const bool b = scenario_criterion(d, hybrid);
                  return a && b;
              });

    criterion(7, "special decoupled hybrid: conservation, coarse-grained response, integrity", 180,
              [](std::ostringstream& d) { return scenario_criterion(d, run_special_hybrid_suite({})); });

    criterion(8, "classical-sector Liouville transport vs characteristics ensemble", 180,
              [](std::ostringstream& d) { return scenario_criterion(d, run_liouville_check({})); });

    criterion(9, "gauge-term invariance of observable trajectories", 60,
              [](std::ostringstream& d) { return scenario_criterion(d, run_f_gauge_probe({})); });

    criterion(10, "byte-identical repeated simulate runs", 60, [&](std::ostringstream& d) {
        if (cli_path.empty()) {
            d << "no --cli path given";
            return false;
        }
        return determinism(d, cli_path);
    });

    int failed = 0;
    for (const auto& r : g_results)
        if (!r.pass) ++failed;
    std::printf("%zu/%zu criteria passed\n", g_results.size() - failed, g_results.size());
    return failed == 0 ? 0 : 1;
}
