#ifndef IASIM_CONFIG_HPP
#define IASIM_CONFIG_HPP

// JSON run-configuration parsing with strict key checking: unknown keys are
// rejected with the offending path named, defaults are materialized on
// parse, and serialize(parse(x)) is idempotent.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iasim/experiments.hpp"

namespace iasim {

using Json = nlohmann::ordered_json;

namespace cfg {

inline void require_object(const Json& j, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError("config: '" + ctx + "' must be an object");
}

inline void check_keys(const Json& j, const std::vector<std::string>& allowed,
                       const std::string& ctx) {
    require_object(j, ctx);
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("config: unknown key '" + ctx + "." + key + "'");
    }
}

inline Real number(const Json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key))
        throw ConfigError("config: missing key '" + ctx + "." + key + "'");
    if (!j[key].is_number())
        throw ConfigError("config: '" + ctx + "." + key + "' must be a number");
    return j[key].get<Real>();
}

inline Real number_or(const Json& j, const std::string& key, Real fallback,
                      const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw ConfigError("config: '" + ctx + "." + key + "' must be a number");
    return j[key].get<Real>();
}

inline std::string text(const Json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError("config: missing key '" + ctx + "." + key + "'");
    if (!j[key].is_string()) throw ConfigError("config: '" + ctx + "." + key + "' must be a string");
    return j[key].get<std::string>();
}

}  // namespace cfg

// ---------------------------------------------------------------------------
// Blocks

inline AlgebraParams parse_algebra(const Json& j) {
    cfg::check_keys(j, {"a1", "a2", "hbar", "m1", "m2"}, "algebra");
    AlgebraParams al;
    al.a1 = cfg::number(j, "a1", "algebra");
    al.a2 = cfg::number(j, "a2", "algebra");
    al.hbar = cfg::number_or(j, "hbar", 1, "algebra");
    al.m1 = cfg::number_or(j, "m1", 1, "algebra");
    al.m2 = cfg::number_or(j, "m2", 1, "algebra");
    al.validate();
    return al;
}

inline Json algebra_to_json(const AlgebraParams& al) {
    return Json{{"a1", al.a1}, {"a2", al.a2}, {"hbar", al.hbar}, {"m1", al.m1}, {"m2", al.m2}};
}

inline AxisSpec parse_axis(const Json& j, const std::string& ctx) {
    cfg::check_keys(j, {"n", "length", "center"}, ctx);
    AxisSpec ax;
    ax.n = static_cast<int>(cfg::number(j, "n", ctx));
    ax.length = cfg::number(j, "length", ctx);
    ax.center = cfg::number_or(j, "center", 0, ctx);
    return ax;
}

inline GridSpec parse_grid(const Json& j) {
    cfg::check_keys(j, {"x1", "chi1", "x2", "chi2"}, "grid");
    GridSpec gs;
    if (!j.contains("x1") || !j.contains("chi1"))
        throw ConfigError("config: grid.x1 and grid.chi1 are required");
    gs.x1 = parse_axis(j["x1"], "grid.x1");
    gs.chi1 = parse_axis(j["chi1"], "grid.chi1");
    if (j.contains("x2")) gs.x2 = parse_axis(j["x2"], "grid.x2");
    if (j.contains("chi2")) gs.chi2 = parse_axis(j["chi2"], "grid.chi2");
    return gs;
}

inline Json axis_to_json(const AxisSpec& ax) {
    return Json{{"n", ax.n}, {"length", ax.length}, {"center", ax.center}};
}

inline VSpec parse_v(const Json& j, const std::string& ctx) {
    const std::string type = cfg::text(j, "type", ctx);
    if (type == "zero") {
        cfg::check_keys(j, {"type"}, ctx);
        return VZero{};
    }
    if (type == "harmonic") {
        cfg::check_keys(j, {"type", "k"}, ctx);
        return VHarmonic{cfg::number(j, "k", ctx)};
    }
    if (type == "quartic") {
        cfg::check_keys(j, {"type", "k", "lambda"}, ctx);
        return VQuartic{cfg::number(j, "k", ctx), cfg::number(j, "lambda", ctx)};
    }
    if (type == "cosine") {
        cfg::check_keys(j, {"type", "amplitude", "wavenumber"}, ctx);
        return VCosine{cfg::number(j, "amplitude", ctx), cfg::number(j, "wavenumber", ctx)};
    }
    throw ConfigError("config: '" + ctx + ".type' must be zero|harmonic|quartic|cosine");
}

inline Json v_to_json(const VSpec& v) {
    return std::visit(
        [](const auto& s) -> Json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, VZero>) return Json{{"type", "zero"}};
            if constexpr (std::is_same_v<T, VHarmonic>)
                return Json{{"type", "harmonic"}, {"k", s.k}};
            if constexpr (std::is_same_v<T, VQuartic>)
                return Json{{"type", "quartic"}, {"k", s.k}, {"lambda", s.lambda}};
            if constexpr (std::is_same_v<T, VCosine>)
                return Json{{"type", "cosine"}, {"amplitude", s.amplitude},
                            {"wavenumber", s.wavenumber}};
        },
        v);
}

inline std::vector<Monomial> parse_monomials(const Json& j, const std::string& ctx, int max_degree) {
    if (!j.is_array()) throw ConfigError("config: '" + ctx + "' must be an array");
    std::vector<Monomial> terms;
    for (size_t i = 0; i < j.size(); ++i) {
        const std::string tctx = ctx + "[" + std::to_string(i) + "]";
        cfg::check_keys(j[i], {"m", "n", "coeff"}, tctx);
        Monomial t;
        t.m = static_cast<int>(cfg::number(j[i], "m", tctx));
        t.n = static_cast<int>(cfg::number(j[i], "n", tctx));
        t.coeff = cfg::number(j[i], "coeff", tctx);
        if (t.m < 0 || t.n < 0 || t.m + t.n > max_degree)
            throw ConfigError("config: '" + tctx + "' degree exceeds " + std::to_string(max_degree));
        terms.push_back(t);
    }
    return terms;
}

inline BaseW parse_base_w(const Json& j, const std::string& ctx) {
    const std::string type = cfg::text(j, "type", ctx);
    if (type == "bilinear") {
        cfg::check_keys(j, {"type", "lambda"}, ctx);
        return WBilinear{cfg::number(j, "lambda", ctx)};
    }
    if (type == "gaussian_well") {
        cfg::check_keys(j, {"type", "lambda", "sigma", "c1", "c2"}, ctx);
        return WGaussianWell{cfg::number(j, "lambda", ctx), cfg::number(j, "sigma", ctx),
                             cfg::number_or(j, "c1", 0, ctx), cfg::number_or(j, "c2", 0, ctx)};
    }
    if (type == "polynomial") {
        cfg::check_keys(j, {"type", "terms"}, ctx);
        WPolynomialSum p{parse_monomials(j["terms"], ctx + ".terms", 4)};
        p.validate();
        return p;
    }
    throw ConfigError("config: '" + ctx + ".type' must be bilinear|gaussian_well|polynomial");
}

inline Json monomials_to_json(const std::vector<Monomial>& terms) {
    Json arr = Json::array();
    for (const auto& t : terms) arr.push_back(Json{{"m", t.m}, {"n", t.n}, {"coeff", t.coeff}});
    return arr;
}

inline Json base_w_to_json(const BaseW& w) {
    return std::visit(
        [](const auto& s) -> Json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, WBilinear>)
                return Json{{"type", "bilinear"}, {"lambda", s.lambda}};
            if constexpr (std::is_same_v<T, WGaussianWell>)
                return Json{{"type", "gaussian_well"}, {"lambda", s.lambda}, {"sigma", s.sigma},
                            {"c1", s.c1}, {"c2", s.c2}};
            if constexpr (std::is_same_v<T, WPolynomialSum>)
                return Json{{"type", "polynomial"}, {"terms", monomials_to_json(s.terms)}};
        },
        w);
}

inline FSpec parse_f(const Json& j) {
    cfg::check_keys(j, {"position", "momentum"}, "generator.f");
    FSpec f;
    if (j.contains("position")) f.position = parse_base_w(j["position"], "generator.f.position");
    if (j.contains("momentum")) f.momentum = parse_monomials(j["momentum"], "generator.f.momentum", 2);
    f.validate();
    return f;
}

inline Json f_to_json(const FSpec& f) {
    Json j = Json::object();
    if (f.position) j["position"] = base_w_to_json(*f.position);
    if (!f.momentum.empty()) j["momentum"] = monomials_to_json(f.momentum);
    return j;
}

inline GeneratorSpec parse_generator(const Json& j, const AlgebraParams& al) {
    const std::string variant = cfg::text(j, "variant", "generator");
    const bool wants_w = variant != "non_interacting";
    const bool wants_alpha = variant == "general_ias" || variant == "hybrid_finite_a";
    const bool wants_f = variant != "classical_classical" && variant != "special_decoupled_hybrid";

    std::vector<std::string> allowed{"variant", "v1", "v2"};
    if (wants_w) allowed.push_back("w");
    if (wants_f) allowed.push_back("f");
    cfg::check_keys(j, allowed, "generator");

    VSpec v1 = j.contains("v1") ? parse_v(j["v1"], "generator.v1") : VSpec{VZero{}};
    VSpec v2 = j.contains("v2") ? parse_v(j["v2"], "generator.v2") : VSpec{VZero{}};
    FSpec f = (wants_f && j.contains("f")) ? parse_f(j["f"]) : FSpec{};

    BaseW base{WBilinear{0}};
    Real alpha = 1;
    if (wants_w) {
        if (!j.contains("w")) throw ConfigError("config: generator." + variant + " requires 'w'");
        const Json& wj = j["w"];
        if (wants_alpha) {
            cfg::check_keys(wj, {"base", "alpha"}, "generator.w");
            alpha = cfg::number(wj, "alpha", "generator.w");
        } else {
            cfg::check_keys(wj, {"base"}, "generator.w");
        }
        if (!wj.contains("base")) throw ConfigError("config: generator.w.base is required");
        base = parse_base_w(wj["base"], "generator.w.base");
    }

    if (variant == "non_interacting") return NonInteracting{al, v1, v2, f};
    if (variant == "general_ias") return GeneralIas{al, v1, v2, base, alpha, f};
    if (variant == "gradient_coupled_ias") return GradientCoupledIas{al, v1, v2, base, f};
    if (variant == "hybrid_finite_a") return HybridFiniteA{al, v1, v2, base, alpha, f};
    if (variant == "classical_classical") return ClassicalClassical{al, v1, v2, base};
    if (variant == "special_decoupled_hybrid") return SpecialDecoupledHybrid{al, v1, v2, base};
    throw ConfigError("config: generator.variant '" + variant + "' is not recognized");
}

inline Json generator_to_json(const GeneratorSpec& spec) {
    Json j = Json::object();
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            j["variant"] = variant_name(spec);
            j["v1"] = v_to_json(s.v1);
            j["v2"] = v_to_json(s.v2);
            if constexpr (std::is_same_v<T, GeneralIas> || std::is_same_v<T, HybridFiniteA>) {
                j["w"] = Json{{"base", base_w_to_json(s.w_base)}, {"alpha", s.alpha}};
            } else if constexpr (std::is_same_v<T, GradientCoupledIas> ||
                                 std::is_same_v<T, ClassicalClassical> ||
                                 std::is_same_v<T, SpecialDecoupledHybrid>) {
                j["w"] = Json{{"base", base_w_to_json(s.w_base)}};
            }
            if constexpr (std::is_same_v<T, NonInteracting> || std::is_same_v<T, GeneralIas> ||
                          std::is_same_v<T, GradientCoupledIas> || std::is_same_v<T, HybridFiniteA>) {
                if (!s.f.is_zero()) j["f"] = f_to_json(s.f);
            }
        },
        spec);
    return j;
}

inline GaussianTargets parse_targets(const Json& j, const std::string& ctx) {
    cfg::check_keys(j, {"x", "p", "chi", "pi", "sigma_x", "sigma_chi"}, ctx);
    GaussianTargets t;
    t.x = cfg::number_or(j, "x", 0, ctx);
    t.p = cfg::number_or(j, "p", 0, ctx);
    t.chi = cfg::number_or(j, "chi", 0, ctx);
    t.pi = cfg::number_or(j, "pi", 0, ctx);
    t.sigma_x = cfg::number_or(j, "sigma_x", 1, ctx);
    t.sigma_chi = cfg::number_or(j, "sigma_chi", 1, ctx);
    return t;
}

inline Json targets_to_json(const GaussianTargets& t) {
    return Json{{"x", t.x},         {"p", t.p},
                {"chi", t.chi},     {"pi", t.pi},
                {"sigma_x", t.sigma_x}, {"sigma_chi", t.sigma_chi}};
}

inline EvolveConfig parse_evolve(const Json& j) {
    cfg::check_keys(j, {"dt", "n_steps", "record_every", "observables", "extras"}, "evolve");
    EvolveConfig cfg_out;
    cfg_out.dt = cfg::number(j, "dt", "evolve");
    cfg_out.n_steps = static_cast<long>(cfg::number(j, "n_steps", "evolve"));
    cfg_out.record_every = static_cast<long>(cfg::number_or(j, "record_every", 1, "evolve"));
    if (j.contains("observables")) {
        if (!j["observables"].is_array())
            throw ConfigError("config: 'evolve.observables' must be an array of names");
        for (const auto& o : j["observables"]) {
            if (!o.is_string()) throw ConfigError("config: 'evolve.observables' entries are names");
            cfg_out.observables.push_back(observable_from_name(o.get<std::string>()));
        }
    }
    if (j.contains("extras")) {
        const Json& e = j["extras"];
        cfg::check_keys(e, {"norm", "forces", "energy", "x2_minus_chi2_moments"}, "evolve.extras");
        auto flag = [&](const char* key, bool fallback) {
            if (!e.contains(key)) return fallback;
            if (!e[key].is_boolean())
                throw ConfigError(std::string("config: 'evolve.extras.") + key + "' must be a bool");
            return e[key].get<bool>();
        };
        cfg_out.extras.norm = flag("norm", true);
        cfg_out.extras.forces = flag("forces", true);
        cfg_out.extras.energy = flag("energy", false);
        cfg_out.extras.x2_minus_chi2_moments = flag("x2_minus_chi2_moments", false);
    } else {
        cfg_out.extras.forces = true;
    }
    cfg_out.validate();
    return cfg_out;
}

inline Json evolve_to_json(const EvolveConfig& c) {
    Json obs = Json::array();
    for (Observable o : c.observables) obs.push_back(observable_name(o));
    return Json{{"dt", c.dt},
                {"n_steps", c.n_steps},
                {"record_every", c.record_every},
                {"observables", obs},
                {"extras",
                 Json{{"norm", c.extras.norm},
                      {"forces", c.extras.forces},
                      {"energy", c.extras.energy},
                      {"x2_minus_chi2_moments", c.extras.x2_minus_chi2_moments}}}};
}

// ---------------------------------------------------------------------------
// Whole run configuration

struct RunConfig {
    AlgebraParams algebra;
    GridSpec grid;
    GeneratorSpec generator{NonInteracting{}};
    GaussianTargets s1;
    std::optional<GaussianTargets> s2;
    EvolveConfig evolve;
    std::string series_path = "series.csv";
    std::string summary_path = "summary.json";
};

inline RunConfig parse_run_config(const Json& j) {
    cfg::check_keys(j, {"algebra", "grid", "generator", "initial_state", "evolve", "output"},
                    "(top level)");
    for (const char* key : {"algebra", "grid", "generator", "initial_state", "evolve"})
        if (!j.contains(key)) throw ConfigError(std::string("config: missing block '") + key + "'");

    RunConfig rc;
    rc.algebra = parse_algebra(j["algebra"]);
    rc.grid = parse_grid(j["grid"]);
    rc.generator = parse_generator(j["generator"], rc.algebra);

    cfg::check_keys(j["initial_state"], {"s1", "s2"}, "initial_state");
    if (!j["initial_state"].contains("s1"))
        throw ConfigError("config: initial_state.s1 is required");
    rc.s1 = parse_targets(j["initial_state"]["s1"], "initial_state.s1");
    if (j["initial_state"].contains("s2"))
        rc.s2 = parse_targets(j["initial_state"]["s2"], "initial_state.s2");

    rc.evolve = parse_evolve(j["evolve"]);

    if (j.contains("output")) {
        cfg::check_keys(j["output"], {"series", "summary"}, "output");
        if (j["output"].contains("series")) rc.series_path = j["output"]["series"].get<std::string>();
        if (j["output"].contains("summary"))
            rc.summary_path = j["output"]["summary"].get<std::string>();
    }

    const bool sub2 = rc.grid.x2.has_value();
    if (sub2 != rc.s2.has_value())
        throw ConfigError("config: initial_state.s2 must be given exactly when grid.x2/chi2 exist");
    return rc;
}

inline Json run_config_to_json(const RunConfig& rc) {
    Json j;
    j["algebra"] = algebra_to_json(rc.algebra);
    Json grid;
    grid["x1"] = axis_to_json(rc.grid.x1);
    grid["chi1"] = axis_to_json(rc.grid.chi1);
    if (rc.grid.x2) grid["x2"] = axis_to_json(*rc.grid.x2);
    if (rc.grid.chi2) grid["chi2"] = axis_to_json(*rc.grid.chi2);
    j["grid"] = grid;
    j["generator"] = generator_to_json(rc.generator);
    Json init;
    init["s1"] = targets_to_json(rc.s1);
    if (rc.s2) init["s2"] = targets_to_json(*rc.s2);
    j["initial_state"] = init;
    j["evolve"] = evolve_to_json(rc.evolve);
    j["output"] = Json{{"series", rc.series_path}, {"summary", rc.summary_path}};
    return j;
}

// ---------------------------------------------------------------------------
// check-w configuration

struct CheckWConfig {
    AlgebraParams algebra;
    std::optional<WSpec> wspec;
    std::optional<RawW> raw;
    Box4 box;
};

inline CheckWConfig parse_check_w_config(const Json& j) {
    cfg::check_keys(j, {"algebra", "w", "domain"}, "(top level)");
    if (!j.contains("algebra") || !j.contains("w"))
        throw ConfigError("config: check-w needs 'algebra' and 'w' blocks");
    CheckWConfig out;
    out.algebra = parse_algebra(j["algebra"]);

    if (j.contains("domain")) {
        cfg::check_keys(j["domain"], {"lo", "hi"}, "domain");
        auto read4 = [&](const char* key) {
            const Json& a = j["domain"][key];
            if (!a.is_array() || a.size() != 4)
                throw ConfigError(std::string("config: domain.") + key + " must be 4 numbers");
            std::array<Real, 4> v;
            for (int i = 0; i < 4; ++i) v[i] = a[i].get<Real>();
            return v;
        };
        if (j["domain"].contains("lo")) out.box.lo = read4("lo");
        if (j["domain"].contains("hi")) out.box.hi = read4("hi");
    }

    const Json& wj = j["w"];
    cfg::check_keys(wj, {"terms", "raw_polynomial"}, "w");
    if (wj.contains("terms") == wj.contains("raw_polynomial"))
        throw ConfigError("config: w needs exactly one of 'terms' (admissible family) or "
                          "'raw_polynomial' (candidate)");
    if (wj.contains("terms")) {
        if (!wj["terms"].is_array()) throw ConfigError("config: w.terms must be an array");
        WSpec w;
        for (size_t i = 0; i < wj["terms"].size(); ++i) {
            const std::string ctx = "w.terms[" + std::to_string(i) + "]";
            cfg::check_keys(wj["terms"][i], {"alpha", "base"}, ctx);
            WTerm term;
            term.alpha = cfg::number(wj["terms"][i], "alpha", ctx);
            if (!wj["terms"][i].contains("base"))
                throw ConfigError("config: " + ctx + ".base is required");
            term.base = parse_base_w(wj["terms"][i]["base"], ctx + ".base");
            w.terms.push_back(term);
        }
        out.wspec = w;
        return out;
    }

    // candidate polynomial over (x1, x2, chi1, chi2), degree <= 4
    struct PolyTerm {
        std::array<int, 4> powers;
        Real coeff;
    };
    std::vector<PolyTerm> terms;
    const Json& arr = wj["raw_polynomial"];
    if (!arr.is_array()) throw ConfigError("config: w.raw_polynomial must be an array");
    for (size_t i = 0; i < arr.size(); ++i) {
        const std::string ctx = "w.raw_polynomial[" + std::to_string(i) + "]";
        cfg::check_keys(arr[i], {"powers", "coeff"}, ctx);
        if (!arr[i].contains("powers") || !arr[i]["powers"].is_array() ||
            arr[i]["powers"].size() != 4)
            throw ConfigError("config: " + ctx + ".powers must be [e_x1, e_x2, e_chi1, e_chi2]");
        PolyTerm t;
        int degree = 0;
        for (int d = 0; d < 4; ++d) {
            t.powers[d] = arr[i]["powers"][d].get<int>();
            if (t.powers[d] < 0) throw ConfigError("config: " + ctx + " has a negative power");
            degree += t.powers[d];
        }
        if (degree > 4) throw ConfigError("config: " + ctx + " exceeds total degree 4");
        t.coeff = cfg::number(arr[i], "coeff", ctx);
        terms.push_back(t);
    }
    auto poly_value = [terms](const Point4& q) {
        Real sum = 0;
        for (const auto& t : terms)
            sum += t.coeff * std::pow(q.x1, t.powers[0]) * std::pow(q.x2, t.powers[1]) *
                   std::pow(q.chi1, t.powers[2]) * std::pow(q.chi2, t.powers[3]);
        return sum;
    };
    auto poly_grad = [terms](const Point4& q, int which) {
        Real sum = 0;
        for (const auto& t : terms) {
            if (t.powers[which] == 0) continue;
            std::array<Real, 4> vals{q.x1, q.x2, q.chi1, q.chi2};
            Real prod = t.coeff * t.powers[which];
            for (int d = 0; d < 4; ++d) {
                const int p = (d == which) ? t.powers[d] - 1 : t.powers[d];
                prod *= std::pow(vals[d], p);
            }
            sum += prod;
        }
        return sum;
    };
    RawW raw;
    raw.value = poly_value;
    raw.grad_x1 = [poly_grad](const Point4& q) { return poly_grad(q, 0); };
    raw.grad_x2 = [poly_grad](const Point4& q) { return poly_grad(q, 1); };
    out.raw = raw;
    return out;
}

}  // namespace iasim

#endif
