// Command-line driver. Talks to the library exclusively through the C API.
#include <mfreg.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
    void operator()(mfreg_config* cfg) const { mfreg_config_free(cfg); }
};
using ConfigHandle = std::unique_ptr<mfreg_config, ConfigDeleter>;

char g_err[1024];

int fail(int rc) {
    std::fprintf(stderr, "mfreg: %s\n", g_err[0] ? g_err : "unknown error");
    return rc;
}

// Common configuration options; collected as (key, value) overrides applied
// on top of --config.
struct ConfigOpts {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    void add_to(CLI::App* cmd, bool with_mode = true) {
        cmd->add_option("--config", config_path, "JSON experiment configuration");
        auto track = [this](const std::string& key) {
            return [this, key](const std::string& value) {
                overrides.emplace_back(key, value);
            };
        };
        cmd->add_option_function<std::string>("--seed", track("seed"), "master RNG seed");
        cmd->add_option_function<std::string>(
               "--scenario", track("scenario"), "dpbs|ipbs (experiment also: both)");
        if (with_mode)
            cmd->add_option_function<std::string>("--mode", track("mode"),
                                                  "oracle|plugin|both");
        cmd->add_option_function<std::string>("--out", track("out"),
                                              "output directory");
        cmd->add_flag_function(
            "--paper-scale",
            [this](std::int64_t) { overrides.emplace_back("paper_scale", "true"); },
            "full R=100, N up to 500 study");
        cmd->add_option_function<std::string>("--threads", track("threads"),
                                              "worker threads (0 = auto)");
        cmd->add_option_function<std::string>("--N", track("N"),
                                              "sample size for single-sample commands");
        cmd->add_option_function<std::string>("--R", track("R"), "repetitions");
        cmd->add_option_function<std::string>("--M", track("M"), "truncation degree");
    }

    ConfigHandle make(int& rc) {
        ConfigHandle cfg;
        if (!config_path.empty()) {
            cfg.reset(mfreg_config_load(config_path.c_str(), g_err, sizeof g_err));
            if (!cfg) {
                rc = MFREG_ERR_IO;
                return cfg;
            }
        } else {
            cfg.reset(mfreg_config_new());
        }
        for (const auto& [key, value] : overrides) {
            const int set_rc =
                mfreg_config_set(cfg.get(), key.c_str(), value.c_str(), g_err,
                                 sizeof g_err);
            if (set_rc != MFREG_OK) {
                rc = set_rc;
                cfg.reset();
                return cfg;
            }
        }
        rc = MFREG_OK;
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical functional regression with long-range dependent errors"};
    app.set_version_flag("--version", mfreg_version());
    app.require_subcommand(1);
    g_err[0] = '\0';

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate an error coefficient sample");
    ConfigOpts sim_opts;
    sim_opts.add_to(sim, /*with_mode=*/false);
    std::string sim_out = "sample";
    std::string sim_format = "both";
    sim->add_option("--sample-out", sim_out, "output base path (default: sample)");
    sim->add_option("--format", sim_format, "text|binary|both");

    // fit
    auto* fit = app.add_subcommand("fit", "GLS fit of stored data");
    ConfigOpts fit_opts;
    fit_opts.add_to(fit, /*with_mode=*/false);
    std::string fit_design, fit_data, fit_cov, fit_out = "fit.txt";
    fit->add_option("--design", fit_design, "design matrix file")->required();
    fit->add_option("--data", fit_data, "coefficient sample (.txt or .bin)")
        ->required();
    fit->add_option("--cov", fit_cov, "per-degree covariance file (n lag value)");
    fit->add_option("--fit-out", fit_out, "output table (default: fit.txt)");

    // estimate-spectrum
    auto* est = app.add_subcommand("estimate-spectrum",
                                   "Whittle minimum-contrast estimation");
    ConfigOpts est_opts;
    est_opts.add_to(est, /*with_mode=*/false);
    std::string est_data, est_out = "theta.txt", est_pgram;
    est->add_option("--data", est_data, "coefficient sample (.txt or .bin)")
        ->required();
    est->add_option("--theta-out", est_out, "estimate table (default: theta.txt)");
    est->add_option("--periodogram", est_pgram, "optional periodogram dump");

    // experiment
    auto* exp = app.add_subcommand("experiment", "full simulation study pipeline");
    ConfigOpts exp_opts;
    exp_opts.add_to(exp);
    bool pin_theta = false;
    exp->add_flag("--debug-pin-theta", pin_theta,
                  "pin the contrast estimate to theta_0 (exact-path checks)");

    // report
    auto* rep = app.add_subcommand("report", "emit plot data from a bundle");
    std::string rep_bundle, rep_which = "all", rep_out = "report";
    rep->add_option("--bundle", rep_bundle, "result bundle directory")->required();
    rep->add_option("--which", rep_which, "figure-1..figure-12 or all");
    rep->add_option("--report-out", rep_out, "output directory (default: report)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help, --version
            return app.exit(e);
        }
        app.exit(e);
        return MFREG_ERR_USAGE;
    }

    int rc = MFREG_OK;
    if (sim->parsed()) {
        ConfigHandle cfg = sim_opts.make(rc);
        if (!cfg) return fail(rc);
        rc = mfreg_simulate(cfg.get(), sim_out.c_str(), sim_format.c_str(), g_err,
                            sizeof g_err);
    } else if (fit->parsed()) {
        ConfigHandle cfg = fit_opts.make(rc);
        if (!cfg) return fail(rc);
        rc = mfreg_fit(fit_design.c_str(), fit_data.c_str(),
                       fit_cov.empty() ? nullptr : fit_cov.c_str(), cfg.get(),
                       fit_out.c_str(), g_err, sizeof g_err);
    } else if (est->parsed()) {
        ConfigHandle cfg = est_opts.make(rc);
        if (!cfg) return fail(rc);
        rc = mfreg_estimate_spectrum(cfg.get(), est_data.c_str(), est_out.c_str(),
                                     est_pgram.empty() ? nullptr : est_pgram.c_str(),
                                     g_err, sizeof g_err);
    } else if (exp->parsed()) {
        if (pin_theta)
            exp_opts.overrides.emplace_back("debug_pin_theta", "true");
        ConfigHandle cfg = exp_opts.make(rc);
        if (!cfg) return fail(rc);
        rc = mfreg_run_experiment(cfg.get(), g_err, sizeof g_err);
    } else if (rep->parsed()) {
        rc = mfreg_report(rep_bundle.c_str(), rep_which.c_str(), rep_out.c_str(),
                          g_err, sizeof g_err);
    }

    if (rc != MFREG_OK) return fail(rc);
    return MFREG_OK;
}
