#include "mfreg.h"

#include "mfreg/errors.hpp"
#include "mfreg/experiment.hpp"
#include "mfreg/io.hpp"
#include "mfreg/regression.hpp"
#include "mfreg/rng.hpp"
#include "mfreg/spectral.hpp"

#include <cstring>
#include <string>

using namespace mfreg;

struct mfreg_config {
    ExperimentConfig cfg;
};

namespace {

void set_error(char* err, size_t err_len, const std::string& message) {
    if (!err || err_len == 0) return;
    const size_t n = std::min(message.size(), err_len - 1);
    std::memcpy(err, message.data(), n);
    err[n] = '\0';
}

template <typename Fn>
int guarded(char* err, size_t err_len, Fn&& fn) {
    try {
        fn();
        return MFREG_OK;
    } catch (const UsageError& e) {
        set_error(err, err_len, e.what());
        return MFREG_ERR_USAGE;
    } catch (const IoError& e) {
        set_error(err, err_len, e.what());
        return MFREG_ERR_IO;
    } catch (const NumericError& e) {
        set_error(err, err_len, e.what());
        return MFREG_ERR_NUMERIC;
    } catch (const std::exception& e) {
        set_error(err, err_len, e.what());
        return MFREG_ERR_NUMERIC;
    }
}

const ExperimentConfig& need_config(const mfreg_config* cfg) {
    if (!cfg)
        throw UsageError("null configuration handle");
    return cfg->cfg;
}

std::string need_str(const char* s, const char* what) {
    if (!s)
        throw UsageError(std::string("null ") + what);
    return s;
}

} // namespace

extern "C" {

const char* mfreg_version(void) { return "0.1.0"; }

mfreg_config* mfreg_config_new(void) { return new mfreg_config{}; }

mfreg_config* mfreg_config_load(const char* path, char* err, size_t err_len) {
    mfreg_config* handle = nullptr;
    const int rc = guarded(err, err_len, [&] {
        handle = new mfreg_config{
            ExperimentConfig::from_file(need_str(path, "config path"))};
    });
    if (rc != MFREG_OK) return nullptr;
    return handle;
}

int mfreg_config_set(mfreg_config* cfg, const char* key, const char* value,
                     char* err, size_t err_len) {
    return guarded(err, err_len, [&] {
        if (!cfg)
            throw UsageError("null configuration handle");
        cfg->cfg.set_key(need_str(key, "key"), need_str(value, "value"));
    });
}

void mfreg_config_free(mfreg_config* cfg) { delete cfg; }

int mfreg_run_experiment(const mfreg_config* cfg, char* err, size_t err_len) {
    return guarded(err, err_len, [&] { run_experiment(need_config(cfg)); });
}

int mfreg_simulate(const mfreg_config* cfg, const char* out_base,
                   const char* format, char* err, size_t err_len) {
    return guarded(err, err_len, [&] {
        const ExperimentConfig& config = need_config(cfg);
        const std::string base = need_str(out_base, "output path");
        const std::string fmt = format ? format : "both";
        if (fmt != "text" && fmt != "binary" && fmt != "both")
            throw UsageError("format must be text, binary or both");
        if (config.scenario == "both")
            throw UsageError("simulate needs a single scenario (dpbs or ipbs)");

        const SpharmaSpec spec = config.make_spec(config.scenario);
        const CoefficientSample sample =
            simulate(spec, config.single_N(), config.burn_in, config.seed,
                     config.filter_len);
        if (fmt != "binary")
            io::write_sample_text(sample, base + ".txt");
        if (fmt != "text")
            io::write_sample_binary(sample, base + ".bin");
    });
}

int mfreg_fit(const char* design_path, const char* sample_path,
              const char* cov_path, const mfreg_config* model_cfg,
              const char* out_path, char* err, size_t err_len) {
    return guarded(err, err_len, [&] {
        const DesignMatrix X = io::read_design(need_str(design_path, "design path"));
        const CoefficientSample sample =
            io::read_sample(need_str(sample_path, "sample path"));

        std::vector<DegreeCov> covs;
        if (cov_path) {
            covs = io::read_covariances(cov_path);
        } else {
            const ExperimentConfig& config = need_config(model_cfg);
            if (config.scenario == "both")
                throw UsageError("model-based fit needs a single scenario");
            const SpharmaSpec spec = config.make_spec(config.scenario);
            if (spec.n_min != sample.spec.n_min || spec.M != sample.spec.M)
                throw UsageError("model degrees do not match the sample");
            covs = degree_covariances(spec, sample.N, /*aggregate_scale=*/true);
        }
        const GlsFit fit = gls_fit(X, sample, covs);
        io::write_gls_fit(fit, need_str(out_path, "output path"));
    });
}

int mfreg_estimate_spectrum(const mfreg_config* cfg, const char* sample_path,
                            const char* out_path, const char* periodogram_path,
                            char* err, size_t err_len) {
    return guarded(err, err_len, [&] {
        const ExperimentConfig& config = need_config(cfg);
        if (config.scenario == "both")
            throw UsageError("estimate-spectrum needs a single scenario");
        const CoefficientSample sample =
            io::read_sample(need_str(sample_path, "sample path"));
        const SpharmaSpec spec = config.make_spec(config.scenario);
        if (spec.n_min != sample.spec.n_min || spec.M != sample.spec.M)
            throw UsageError("model degrees do not match the sample");

        const PeriodogramSet pgram = periodogram(sample);
        if (periodogram_path)
            io::write_periodogram(pgram, periodogram_path);

        const SpectralModel model = SpectralModel::from_spec(spec);
        std::vector<double> lo, hi;
        default_theta_box(spec.exponents.kind, model.theta_dim(), lo, hi);
        const ContrastProblem prob(model, pgram, lo, hi);
        const MinContrastResult res =
            minimum_contrast(prob, default_theta_init(lo, hi),
                             mix_seed({config.seed, 0x0E57ULL}));

        io::Table table;
        table.columns = {};
        for (int d = 0; d < model.theta_dim(); ++d)
            table.columns.push_back("theta" + std::to_string(d + 1));
        table.columns.insert(table.columns.end(),
                             {"contrast", "converged", "iterations"});
        std::vector<double> row(res.theta.begin(), res.theta.end());
        row.push_back(res.value);
        row.push_back(res.converged ? 1.0 : 0.0);
        row.push_back(static_cast<double>(res.iterations));
        table.rows.push_back(std::move(row));
        io::write_table(need_str(out_path, "output path"), table);
    });
}

int mfreg_report(const char* bundle_dir, const char* selector,
                 const char* out_dir, char* err, size_t err_len) {
    return guarded(err, err_len, [&] {
        report(need_str(bundle_dir, "bundle directory"),
               need_str(selector, "selector"), need_str(out_dir, "output directory"));
    });
}

} // extern "C"
