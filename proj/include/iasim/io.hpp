#ifndef IASIM_IO_HPP
#define IASIM_IO_HPP

// Output serialization: CSV time series (17 significant digits, UNIX
// newlines) and JSON reports with stable key order; files land atomically
// via a temp-and-rename.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "iasim/config.hpp"

namespace iasim {

inline std::string format_real(Real v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string time_series_csv(const TimeSeries& ts) {
    std::string out = "t";
    for (const auto& name : ts.names) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (size_t row = 0; row < ts.rows(); ++row) {
        out += format_real(ts.times[row]);
        for (const auto& col : ts.columns) {
            out += ',';
            out += format_real(col[row]);
        }
        out += '\n';
    }
    return out;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw NumericalDomainError("cannot open '" + tmp.string() + "' for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw NumericalDomainError("short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline Json metric_to_json(const Metric& m) {
    return Json{{"name", m.name},
                {"value", m.value},
                {"threshold", m.threshold},
                {"comparison", m.require_less ? "less" : "greater"},
                {"pass", m.pass}};
}

inline Json report_to_json(const ScenarioReport& rep) {
    Json metrics = Json::array();
    for (const auto& m : rep.metrics) metrics.push_back(metric_to_json(m));
    Json warnings = Json::array();
    for (const auto& w : rep.warnings) warnings.push_back(w);
    Json artifacts = Json::array();
    for (const auto& [label, ts] : rep.series) artifacts.push_back(label);
    return Json{{"id", rep.id},          {"name", rep.name},       {"pass", rep.pass},
                {"oracle", rep.oracle},  {"metrics", metrics},     {"warnings", warnings},
                {"series", artifacts}};
}

}  // namespace iasim

#endif
