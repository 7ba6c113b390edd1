#pragma once

// Verification reports: per-check results, suite configuration echo, and the
// versioned JSON / plain-text serializations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermogeo/errors.hpp"
#include "thermogeo/numerics.hpp"

namespace thermogeo {

inline constexpr int kReportSchemaVersion = 1;

enum class OutputFormat { json, text };

inline std::string to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "text"; }

inline OutputFormat output_format_from_string(const std::string& s) {
    if (s == "json") return OutputFormat::json;
    if (s == "text") return OutputFormat::text;
    throw ConfigError("unknown output format '" + s + "' (json, text)");
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"geometry", "connections", "statmech", "heisenberg", "all"};
    return names;
}

struct SuiteConfig {
    std::string suite = "all";
    std::vector<int> n{1, 2, 3};
    int points = 100;
    std::uint64_t seed = 42;
    double tol_closed = 1e-8;
    double tol_fd = 1e-6;
    std::vector<std::string> models{"two_level", "gaussian_quadratic", "gaussian_two_param"};
    OutputFormat format = OutputFormat::json;
    ChartSampling sampling{};

    void validate() const {
        bool known = false;
        for (const auto& s : suite_names()) known = known || s == suite;
        if (!known) throw ConfigError("unknown suite '" + suite + "'");
        if (n.empty()) throw ConfigError("at least one n is required");
        for (const int k : n)
            if (k < 1) throw ConfigError("every n must be >= 1");
        if (points < 1) throw ConfigError("points must be >= 1");
        if (!(tol_closed > 0.0) || !(tol_fd > 0.0)) throw ConfigError("tolerances must be positive");
        if (!(sampling.p_range.lo > 0.0)) throw ConfigError("p_range lower bound must be positive");
        for (const auto& r : {sampling.p_range, sampling.q_range, sampling.w_range})
            if (!(r.hi >= r.lo)) throw ConfigError("empty sampling range");
    }

    [[nodiscard]] bool runs(const std::string& name) const { return suite == "all" || suite == name; }

    friend bool operator==(const SuiteConfig&, const SuiteConfig&) = default;
};

struct CheckResult {
    std::string id;
    std::string suite;
    /// The identity being checked, written out so report lines are traceable.
    std::string anchor;
    std::string subject;
    int n = 0;
    int points = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::map<std::string, double> constants;
    std::string note;

    friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct ReportSummary {
    int total = 0;
    int passed = 0;
    int failed = 0;
    friend bool operator==(const ReportSummary&, const ReportSummary&) = default;
};

struct Report {
    int schema_version = kReportSchemaVersion;
    SuiteConfig config;
    std::vector<CheckResult> checks;
    ReportSummary summary;
    double duration_seconds = 0.0;

    void add(CheckResult c) { checks.push_back(std::move(c)); }

    void tally() {
        summary = {};
        for (const auto& c : checks) {
            ++summary.total;
            if (c.pass)
                ++summary.passed;
            else
                ++summary.failed;
        }
    }

    [[nodiscard]] bool all_passed() const { return summary.failed == 0; }

    friend bool operator==(const Report&, const Report&) = default;

    [[nodiscard]] bool ids_unique() const {
        std::set<std::string> seen;
        for (const auto& c : checks)
            if (!seen.insert(c.id).second) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {

/// JSON has no infinities; a non-finite residual is written as null and read back as +inf.
inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline double from_finite_or_null(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline nlohmann::json range_json(const Range& r) { return nlohmann::json::array({r.lo, r.hi}); }

inline Range range_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

} // namespace detail

inline nlohmann::json to_json(const SuiteConfig& c) {
    return {{"suite", c.suite},
            {"n", c.n},
            {"points", c.points},
            {"seed", c.seed},
            {"tol_closed", c.tol_closed},
            {"tol_fd", c.tol_fd},
            {"models", c.models},
            {"format", to_string(c.format)},
            {"p_range", detail::range_json(c.sampling.p_range)},
            {"q_range", detail::range_json(c.sampling.q_range)},
            {"w_range", detail::range_json(c.sampling.w_range)}};
}

inline SuiteConfig suite_config_from_json(const nlohmann::json& j) {
    SuiteConfig c;
    c.suite = j.at("suite").get<std::string>();
    c.n = j.at("n").get<std::vector<int>>();
    c.points = j.at("points").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.tol_closed = j.at("tol_closed").get<double>();
    c.tol_fd = j.at("tol_fd").get<double>();
    c.models = j.at("models").get<std::vector<std::string>>();
    c.format = output_format_from_string(j.at("format").get<std::string>());
    c.sampling.p_range = detail::range_from(j.at("p_range"));
    c.sampling.q_range = detail::range_from(j.at("q_range"));
    c.sampling.w_range = detail::range_from(j.at("w_range"));
    return c;
}

inline nlohmann::json to_json(const CheckResult& c) {
    nlohmann::json constants = nlohmann::json::object();
    for (const auto& [k, v] : c.constants) constants[k] = detail::finite_or_null(v);
    nlohmann::json j{{"id", c.id},
                     {"suite", c.suite},
                     {"anchor", c.anchor},
                     {"subject", c.subject},
                     {"n", c.n},
                     {"points", c.points},
                     {"max_residual", detail::finite_or_null(c.max_residual)},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass},
                     {"constants", constants}};
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline CheckResult check_result_from_json(const nlohmann::json& j) {
    CheckResult c;
    c.id = j.at("id").get<std::string>();
    c.suite = j.at("suite").get<std::string>();
    c.anchor = j.at("anchor").get<std::string>();
    c.subject = j.at("subject").get<std::string>();
    c.n = j.at("n").get<int>();
    c.points = j.at("points").get<int>();
    c.max_residual = detail::from_finite_or_null(j.at("max_residual"));
    c.tolerance = j.at("tolerance").get<double>();
    c.pass = j.at("pass").get<bool>();
    for (const auto& [k, v] : j.at("constants").items()) c.constants[k] = detail::from_finite_or_null(v);
    if (j.contains("note")) c.note = j.at("note").get<std::string>();
    return c;
}

inline nlohmann::json to_json(const Report& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"schema_version", r.schema_version},
            {"config", to_json(r.config)},
            {"checks", checks},
            {"summary", {{"total", r.summary.total}, {"passed", r.summary.passed}, {"failed", r.summary.failed}}},
            {"duration_seconds", r.duration_seconds}};
}

inline Report report_from_json(const nlohmann::json& j) {
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version < 1 || r.schema_version > kReportSchemaVersion)
        throw ConfigError("unsupported report schema_version " + std::to_string(r.schema_version));
    r.config = suite_config_from_json(j.at("config"));
    for (const auto& c : j.at("checks")) r.checks.push_back(check_result_from_json(c));
    const auto& s = j.at("summary");
    r.summary = {s.at("total").get<int>(), s.at("passed").get<int>(), s.at("failed").get<int>()};
    r.duration_seconds = j.at("duration_seconds").get<double>();
    return r;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline std::string sci(double v) {
    if (!std::isfinite(v)) return "inf";
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

inline std::string render_text(const Report& r) {
    std::ostringstream os;
    os << "thermogeo verification report (schema " << r.schema_version << ")\n";
    os << "suite=" << r.config.suite << " n=";
    for (std::size_t k = 0; k < r.config.n.size(); ++k) os << (k ? "," : "") << r.config.n[k];
    os << " points=" << r.config.points << " seed=" << r.config.seed << " tol_closed=" << sci(r.config.tol_closed)
       << " tol_fd=" << sci(r.config.tol_fd) << "\n\n";

    std::size_t width = 8;
    for (const auto& c : r.checks) width = std::max(width, c.id.size());
    os << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::setw(8) << "result"
       << std::setw(11) << "residual" << std::setw(11) << "tolerance" << "identity\n";
    for (const auto& c : r.checks) {
        os << std::left << std::setw(static_cast<int>(width)) << c.id << "  " << std::setw(8) << (c.pass ? "PASS" : "FAIL")
           << std::setw(11) << sci(c.max_residual) << std::setw(11) << sci(c.tolerance) << c.anchor;
        if (!c.constants.empty()) {
            os << "  [";
            bool first = true;
            for (const auto& [k, v] : c.constants) {
                os << (first ? "" : ", ") << k << "=" << std::setprecision(10) << v;
                first = false;
            }
            os << "]";
        }
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << "\n";
    }
    os << "\n"
       << r.summary.passed << "/" << r.summary.total << " checks passed, " << r.summary.failed << " failed, "
       << std::fixed << std::setprecision(2) << r.duration_seconds << " s\n";
    return os.str();
}

} // namespace detail

inline std::string serialize_report(const Report& r, OutputFormat format) {
    if (format == OutputFormat::json) return to_json(r).dump(2) + "\n";
    return detail::render_text(r);
}

inline Report parse_report(const std::string& text) {
    try {
        return report_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

} // namespace thermogeo
