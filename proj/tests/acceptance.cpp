// Acceptance run: the default configuration (all suites, n = 1, 2, 3, 100
// points, seed 42), judged criterion by criterion against fixed bounds that
// do not depend on the tolerances configured in the report.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "thermogeo/suites.hpp"

namespace {

using thermogeo::CheckResult;
using thermogeo::Report;

std::string name_of(const CheckResult& c) { return c.id.substr(c.id.rfind('.') + 1); }

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

/// Checks of one suite (and subject, unless empty) whose name is listed; a
/// trailing '*' matches by prefix.
struct Clause {
    std::string suite;
    std::string subject;
    std::vector<std::string> names;
    double bound = 0.0;
    bool inclusive = false;
    /// Every configured n must be covered.
    bool per_n = true;
};

struct Outcome {
    bool ok = true;
    int checks = 0;
    double worst_ratio = 0.0;
    std::string worst;
    std::string problem;
};

bool matches(const Clause& cl, const CheckResult& c) {
    if (c.suite != cl.suite || (!cl.subject.empty() && c.subject != cl.subject)) return false;
    const std::string n = name_of(c);
    return std::any_of(cl.names.begin(), cl.names.end(), [&](const std::string& p) {
        return p.back() == '*' ? starts_with(n, p.substr(0, p.size() - 1)) : n == p;
    });
}

void judge(const Report& r, const Clause& cl, Outcome& out) {
    std::set<int> seen;
    int found = 0;
    for (const auto& c : r.checks) {
        if (!matches(cl, c)) continue;
        ++found;
        seen.insert(c.n);
        const bool within = cl.inclusive ? c.max_residual <= cl.bound : c.max_residual < cl.bound;
        const double ratio = cl.bound > 0.0 ? c.max_residual / cl.bound : (c.max_residual == 0.0 ? 0.0 : INFINITY);
        if (!within) {
            out.ok = false;
            if (out.problem.empty()) out.problem = c.id + " residual " + std::to_string(c.max_residual);
        }
        if (ratio >= out.worst_ratio) {
            out.worst_ratio = ratio;
            out.worst = c.id;
        }
    }
    out.checks += found;
    if (found == 0) {
        out.ok = false;
        out.problem = "no checks matched in " + cl.suite + " for " + cl.names.front();
    }
    if (cl.per_n)
        for (const int n : r.config.n)
            if (!seen.count(n)) {
                out.ok = false;
                out.problem = cl.suite + " " + cl.names.front() + " missing for n = " + std::to_string(n);
            }
}

struct Criterion {
    int number;
    std::string title;
    std::vector<Clause> clauses;
    /// Extra condition evaluated on the whole report; empty string means satisfied.
    std::function<std::string(const Report&)> extra;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

/// Every negative control in the connections suite must report detection.
std::string controls_detect(const Report& r) {
    int count = 0;
    for (const auto& c : r.checks) {
        if (c.suite != "connections" || !starts_with(name_of(c), "control_")) continue;
        ++count;
        if (!c.pass) return c.id + " did not detect its perturbation";
    }
    return count >= 7 * static_cast<int>(r.config.n.size()) ? "" : "too few negative controls";
}

std::string statmech_models_present(const Report& r) {
    for (const auto& m : thermogeo::statmech::builtin_model_names()) {
        const bool present = std::any_of(r.checks.begin(), r.checks.end(),
                                         [&](const CheckResult& c) { return c.suite == "statmech" && c.subject == m; });
        if (!present) return "model " + m + " missing";
    }
    return "";
}

} // namespace

int main() {
    const thermogeo::SuiteConfig config; // defaults: all suites, n {1, 2, 3}, 100 points, seed 42
    const Report report = thermogeo::suites::run_suite(config);
    std::cout << "acceptance run: " << report.summary.passed << "/" << report.summary.total << " checks passed in "
              << sci(report.duration_seconds) << " s\n";

    const std::string C = "connections", G = "geometry", S = "statmech", H = "heisenberg";
    const std::vector<Criterion> criteria{
        {1, "canonical connection is flat", {{C, "tps", {"canonical_flatness"}, 1e-6}}, nullptr},
        {2, "Ricci tensor is eta-Einstein with (-(2n+2), 2)",
         {{C, "tps", {"eta_einstein", "ricci_pattern"}, 1e-6}}, nullptr},
        {3, "scalar curvature 2n with spread < 1e-6", {{C, "tps", {"scalar_curvature"}, 1e-6}}, nullptr},
        {4, "golden connection tables", {{C, "tps", {"lc_golden", "canonical_golden"}, 1e-8}}, nullptr},
        {5, "para-contact axioms",
         {{G, "tps",
           {"phi_squared", "compatibility", "association", "association_sign", "heisenberg_algebra",
            "metric_signature"},
           1e-7}},
         nullptr},
        {6, "normality", {{C, "tps", {"normality"}, 1e-7}, {C, "tps", {"nijenhuis_horizontal"}, 1e-8}}, nullptr},
        {7, "canonical parallelism and torsion",
         {{C, "tps", {"canonical_parallel_*"}, 1e-6},
          {C, "tps", {"canonical_torsion_law"}, 1e-7},
          {C, "tps", {"canonical_torsion_reeb"}, 1e-12, true}},
         nullptr},
        {8, "statistical layer",
         {{S, "", {"gradient", "hessian"}, 1e-6, false, false},
          {S, "", {"kl_bregman"}, 1e-8, false, false},
          {S, "", {"kl_order"}, 0.3, true, false},
          {S, "two_level", {"spot_values"}, 1e-9, false, false}},
         statmech_models_present},
        {9, "pullback chain",
         {{S, "", {"control_pullback_metric", "legendre_pullback_metric"}, 1e-8, false, false},
          {S, "", {"control_pullback_contact"}, 0.0, true, false},
          {S, "", {"legendre_pullback_contact"}, 1e-7, false, false}},
         statmech_models_present},
        {10, "hyperbolic Heisenberg group",
         {{H, "hh", {"group_identity", "group_inverse", "group_associativity"}, 1e-12, true},
          {H, "hh", {"left_invariance"}, 1e-9},
          {H, "hh", {"normality", "nijenhuis_horizontal", "canonical_flatness"}, 1e-8}},
         nullptr},
        {11, "negative controls detect 1e-3 perturbations", {}, controls_detect},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        Outcome out;
        for (const auto& cl : cr.clauses) judge(report, cl, out);
        if (cr.extra) {
            const std::string msg = cr.extra(report);
            if (!msg.empty()) {
                out.ok = false;
                out.problem = msg;
            }
        }
        std::cout << (out.ok ? "[PASS] " : "[FAIL] ") << cr.number << " " << cr.title;
        if (!cr.clauses.empty())
            std::cout << ": " << out.checks << " checks, worst " << out.worst << " at " << sci(out.worst_ratio)
                      << " of its bound";
        if (!out.ok) std::cout << " -- " << out.problem;
        std::cout << "\n";
        if (!out.ok) ++failed;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria met\n";
    return failed == 0 ? 0 : 1;
}
