// Command-line front end: config ingestion, scenario dispatch, and
// serialization of time series (CSV) and reports (JSON).
//
// Exit codes: 0 success/pass, 1 scenario or admissibility failure,
// 2 configuration error, 3 numerical-domain error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "iasim/io.hpp"

namespace fs = std::filesystem;
using namespace iasim;

namespace {

Json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    try {
        return Json::parse(f);
    } catch (const std::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

void apply_thread_cap(int jobs) {
#ifdef _OPENMP
    int cap = 0;
    if (const char* env = std::getenv("HYBRID_SIM_THREADS")) {
        cap = std::atoi(env);
        if (cap < 1) throw ConfigError("HYBRID_SIM_THREADS must be a positive integer");
    }
    int threads = cap > 0 ? cap : omp_get_max_threads();
    if (jobs > 0) threads = std::min(threads, jobs);
    omp_set_num_threads(threads);
#else
    (void)jobs;
#endif
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const RunConfig rc = parse_run_config(load_json(config_path));
    const Grid grid = make_grid(rc.grid);
    const SplitPlan plan = build_plan(rc.generator, grid);
    const State initial = gaussian_state(grid, rc.algebra, rc.s1, rc.s2);
    const TimeSeries ts = evolve(initial, plan, rc.evolve);

    fs::create_directories(out_dir);
    write_file_atomic(fs::path(out_dir) / rc.series_path, time_series_csv(ts));

    Json summary;
    summary["variant"] = ts.meta.variant;
    summary["spec_hash"] = ts.meta.spec_hash;
    summary["rows"] = ts.rows();
    Json finals = Json::object();
    for (size_t c = 0; c < ts.names.size(); ++c) finals[ts.names[c]] = ts.columns[c].back();
    summary["final"] = finals;
    if (ts.has_column("norm")) {
        Real drift = 0;
        for (Real v : ts.column("norm")) drift = std::max(drift, std::abs(v - 1));
        summary["norm_drift"] = drift;
    }
    if (ts.has_column("force1") && ts.rows() >= 3) {
        auto r = ehrenfest_residuals(ts, plan.algebra);
        Json res = Json::object();
        const char* names[4] = {"x1", "p1", "x2", "p2"};
        for (int i = 0; i < 4; ++i)
            if (r.present[i]) res[names[i]] = r.value[i];
        summary["ehrenfest_residuals"] = res;
    }
    Json warnings = Json::array();
    for (const auto& w : ts.meta.warnings) warnings.push_back(w);
    summary["warnings"] = warnings;
    summary["config"] = run_config_to_json(rc);
    write_file_atomic(fs::path(out_dir) / rc.summary_path, summary.dump(2) + "\n");

    std::cout << "wrote " << (fs::path(out_dir) / rc.series_path).string() << " ("
              << ts.rows() << " rows) and " << (fs::path(out_dir) / rc.summary_path).string()
              << "\n";
    return 0;
}

int cmd_check_w(const std::string& config_path) {
    const CheckWConfig cw = parse_check_w_config(load_json(config_path));
    AdmissibilityVerdict verdict;
    if (cw.wspec)
        verdict = admissible_projection_exists(as_wview(*cw.wspec, cw.algebra), cw.algebra, cw.box);
    else
        verdict = admissible_projection_exists(*cw.raw, cw.algebra, cw.box);
    std::cout << (verdict.admissible ? "admissible" : "inadmissible")
              << ": max consistency residual " << format_real(verdict.max_residual) << "\n";
    if (!verdict.admissible) {
        std::cout << "witness point: (x1=" << format_real(verdict.witness.x1)
                  << ", chi1=" << format_real(verdict.witness.chi1)
                  << ", x2=" << format_real(verdict.witness.x2)
                  << ", chi2=" << format_real(verdict.witness.chi2) << ")\n";
    }
    return verdict.admissible ? 0 : 1;
}

int cmd_scenario(const std::string& name, const std::vector<std::string>& sets, int jobs,
                 const std::string& out_dir) {
    std::map<std::string, Real> overrides;
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        try {
            overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("--set value in '" + kv + "' is not a number");
        }
    }
    apply_thread_cap(jobs);
    const ScenarioReport rep = run_scenario(name, ScenarioTuning(overrides));

    fs::create_directories(out_dir);
    write_file_atomic(fs::path(out_dir) / ("scenario_" + name + ".json"),
                      report_to_json(rep).dump(2) + "\n");
    for (const auto& [label, ts] : rep.series)
        write_file_atomic(fs::path(out_dir) / ("scenario_" + name + "_" + label + ".csv"),
                          time_series_csv(ts));

    std::cout << "scenario " << name << " (" << rep.id << "): " << (rep.pass ? "PASS" : "FAIL")
              << "\n";
    for (const auto& m : rep.metrics)
        std::cout << "  " << m.name << " = " << format_real(m.value)
                  << (m.require_less ? " < " : " > ") << format_real(m.threshold) << "  "
                  << (m.pass ? "ok" : "FAIL") << "\n";
    for (const auto& w : rep.warnings) std::cout << "  warning: " << w << "\n";
    return rep.pass ? 0 : 1;
}

void cmd_list_scenarios() {
    for (const auto& [key, entry] : scenario_registry())
        std::cout << key << " (" << entry.id << "): " << entry.description << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unitary dynamics of parameter-interpolated classical/quantum systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string scenario_name;
    std::vector<std::string> sets;
    int jobs = 0;

    auto* simulate = app.add_subcommand("simulate", "evolve a configured system, write CSV + summary");
    simulate->add_option("config", config_path, "JSON run configuration")->required();
    simulate->add_option("--out", out_dir, "output directory (default .)");

    auto* checkw = app.add_subcommand("check-w", "admissibility verdict for an interaction potential");
    checkw->add_option("config", config_path, "JSON with algebra and w blocks")->required();

    auto* scenario = app.add_subcommand("scenario", "run a named experiment scenario");
    scenario->add_option("name", scenario_name, "scenario name (see list-scenarios)")->required();
    scenario->add_option("--set", sets, "override a scenario setting, key=value");
    scenario->add_option("--jobs", jobs, "cap worker threads for this scenario");
    scenario->add_option("--out", out_dir, "output directory (default .)");

    auto* list = app.add_subcommand("list-scenarios", "print the scenario registry");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            apply_thread_cap(0);
            return cmd_simulate(config_path, out_dir);
        }
        if (checkw->parsed()) return cmd_check_w(config_path);
        if (scenario->parsed()) return cmd_scenario(scenario_name, sets, jobs, out_dir);
        if (list->parsed()) {
            cmd_list_scenarios();
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalDomainError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const StaleStateError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const DiagnosticError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
