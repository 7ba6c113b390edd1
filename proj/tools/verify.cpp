// verify: run the identity suites and write a JSON or text report.
//
// Exit codes: 0 all checks pass, 1 at least one check failed, 2 configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermogeo/model_config.hpp"
#include "thermogeo/report.hpp"
#include "thermogeo/suites.hpp"

namespace {

using namespace thermogeo;

struct Options {
    SuiteConfig config;
    std::string format = "json";
    std::string out;
    std::string models_file;
    unsigned workers = suites::default_workers();
    std::vector<double> p_range;
    std::vector<double> q_range;
    std::vector<double> w_range;
};

Range range_from(const std::vector<double>& v, Range fallback) {
    if (v.empty()) return fallback;
    return {v[0], v[1]};
}

int run(const Options& opt, const CLI::App& app) {
    SuiteConfig config = opt.config;
    config.format = output_format_from_string(opt.format);
    config.sampling.p_range = range_from(opt.p_range, config.sampling.p_range);
    config.sampling.q_range = range_from(opt.q_range, config.sampling.q_range);
    config.sampling.w_range = range_from(opt.w_range, config.sampling.w_range);

    suites::RunOptions run_options;
    run_options.workers = opt.workers;
    if (!opt.models_file.empty()) {
        run_options.extra_models = statmech::load_models(opt.models_file);
        if (app.count("--model") == 0)
            for (const auto& m : run_options.extra_models) config.models.push_back(m.name);
    }

    const Report report = suites::run_suite(config, run_options);
    const std::string text = serialize_report(report, config.format);
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(opt.out, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + opt.out + "'");
        f << text;
    }
    std::cerr << report.summary.passed << "/" << report.summary.total << " checks passed\n";
    return suites::exit_code(report);
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"Verify the contact, para-contact and statistical identities of the thermodynamic phase space"};
    app.set_config("--config", "", "TOML or INI file with the same keys as the long flags");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.add_option("--suite", opt.config.suite, "geometry, connections, statmech, heisenberg or all")
        ->capture_default_str();
    app.add_option("--n", opt.config.n, "dimension parameters (comma separated)")->delimiter(',')->capture_default_str();
    app.add_option("--points", opt.config.points, "sampled points per dimension")->capture_default_str();
    app.add_option("--seed", opt.config.seed, "sampling seed")->capture_default_str();
    app.add_option("--tol-closed", opt.config.tol_closed, "tolerance for closed-form comparisons")
        ->capture_default_str();
    app.add_option("--tol-fd", opt.config.tol_fd, "tolerance for finite-difference identities")->capture_default_str();
    app.add_option("--model", opt.config.models, "statistical models to check (repeatable)")->capture_default_str();
    app.add_option("--models-file", opt.models_file, "JSON file with additional model definitions");
    app.add_option("--format", opt.format, "json or text")->capture_default_str();
    app.add_option("--out", opt.out, "write the report here instead of stdout");
    app.add_option("--workers", opt.workers, "worker threads")->envname("THERMOGEO_WORKERS")->capture_default_str();
    app.add_option("--p-range", opt.p_range, "sampling interval for p_a")->expected(2);
    app.add_option("--q-range", opt.q_range, "sampling interval for q^a")->expected(2);
    app.add_option("--w-range", opt.w_range, "sampling interval for w")->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return suites::kExitConfigError;
    }

    try {
        return run(opt, app);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return suites::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return suites::kExitChecksFailed;
    }
}
