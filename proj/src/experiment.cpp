#include "mfreg/experiment.hpp"
#include "mfreg/errors.hpp"
#include "mfreg/io.hpp"
#include "mfreg/regression.hpp"
#include "mfreg/residuals.hpp"
#include "mfreg/rng.hpp"
#include "mfreg/spectral.hpp"
#include "mfreg/sphere_basis.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace mfreg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t scenario_tag(const std::string& name) {
    return name == "dpbs" ? 0xD9B5ULL : 0x19B5ULL;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty())
        throw UsageError("expected a comma-separated integer list, got '" + text + "'");
    return out;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw UsageError("expected a boolean, got '" + text + "'");
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.preset = j.value("preset", cfg.preset);
    if (cfg.preset != "paper-sim")
        throw UsageError("unknown preset '" + cfg.preset + "'");
    cfg.scenario = j.value("scenario", cfg.scenario);
    if (j.contains("N_list")) cfg.N_list = j.at("N_list").get<std::vector<int>>();
    cfg.R = j.value("R", cfg.R);
    cfg.M = j.value("M", cfg.M);
    cfg.p = j.value("p", cfg.p);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out = j.value("out", cfg.out);
    cfg.mode = j.value("mode", cfg.mode);
    cfg.paper_scale = j.value("paper_scale", cfg.paper_scale);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.burn_in = j.value("burn_in", cfg.burn_in);
    cfg.filter_len = j.value("filter_len", cfg.filter_len);
    cfg.bins = j.value("bins", cfg.bins);
    cfg.surface_times = j.value("surface_times", cfg.surface_times);
    cfg.debug_pin_theta = j.value("debug_pin_theta", cfg.debug_pin_theta);
    cfg.sample_N = j.value("N", cfg.sample_N);
    if (j.contains("model")) {
        const json& m = j.at("model");
        if (m.contains("dpbs_theta")) {
            const auto v = m.at("dpbs_theta").get<std::vector<double>>();
            if (v.size() != 3) throw UsageError("model.dpbs_theta needs 3 entries");
            std::copy(v.begin(), v.end(), cfg.dpbs_theta.begin());
        }
        if (m.contains("ipbs_upsilon")) {
            const auto v = m.at("ipbs_upsilon").get<std::vector<double>>();
            if (v.size() != 2) throw UsageError("model.ipbs_upsilon needs 2 entries");
            std::copy(v.begin(), v.end(), cfg.ipbs_upsilon.begin());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("config parse error in " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

json ExperimentConfig::to_json() const {
    json j;
    j["preset"] = preset;
    j["scenario"] = scenario;
    j["N_list"] = N_list;
    j["R"] = R;
    j["M"] = M;
    j["p"] = p;
    j["seed"] = seed;
    j["out"] = out;
    j["mode"] = mode;
    j["paper_scale"] = paper_scale;
    j["threads"] = threads;
    j["burn_in"] = burn_in;
    j["filter_len"] = filter_len;
    j["bins"] = bins;
    j["surface_times"] = surface_times;
    j["debug_pin_theta"] = debug_pin_theta;
    j["N"] = sample_N;
    j["model"] = {{"sigma2", "(n+1)^{-3/2}"},
                  {"phi", "[0.7(n+1/n)]^{-3/2}"},
                  {"psi", "0.4(n+1/n)^{-3/2}"},
                  {"dpbs_theta", dpbs_theta},
                  {"ipbs_upsilon", ipbs_upsilon}};
    return j;
}

void ExperimentConfig::set_key(const std::string& key, const std::string& value) {
    if (key == "scenario") scenario = value;
    else if (key == "mode") mode = value;
    else if (key == "out") out = value;
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "R") R = std::stoi(value);
    else if (key == "M") M = std::stoi(value);
    else if (key == "p") p = std::stoi(value);
    else if (key == "N") sample_N = std::stoi(value);
    else if (key == "N_list") N_list = parse_int_list(value);
    else if (key == "threads") threads = std::stoi(value);
    else if (key == "burn_in") burn_in = std::stoi(value);
    else if (key == "filter_len") filter_len = std::stoi(value);
    else if (key == "bins") bins = std::stoi(value);
    else if (key == "surface_times") surface_times = value;
    else if (key == "paper_scale") paper_scale = parse_bool(value);
    else if (key == "debug_pin_theta") debug_pin_theta = parse_bool(value);
    else throw UsageError("unknown config key '" + key + "'");
    validate();
}

void ExperimentConfig::validate() const {
    if (scenario != "dpbs" && scenario != "ipbs" && scenario != "both")
        throw UsageError("scenario must be dpbs, ipbs or both");
    if (mode != "oracle" && mode != "plugin" && mode != "both")
        throw UsageError("mode must be oracle, plugin or both");
    if (N_list.empty())
        throw UsageError("N_list must not be empty");
    for (int n : N_list)
        if (n < 2) throw UsageError("sample sizes must be >= 2");
    if (R < 1 || p < 1)
        throw UsageError("R and p must be positive");
    if (M < 2 || M > 30)
        throw UsageError("M must lie in 2..30 (the scenario grids have 30 points)");
    if (burn_in < 0 || filter_len < 0 || threads < 0 || bins < 1)
        throw UsageError("negative size parameter");
    if (surface_times != "auto" && surface_times != "paper-times-500")
        throw UsageError("surface_times must be auto or paper-times-500");
}

std::vector<std::string> ExperimentConfig::scenario_list() const {
    if (scenario == "both") return {"dpbs", "ipbs"};
    return {scenario};
}

std::vector<int> ExperimentConfig::effective_N_list() const {
    if (paper_scale) return {50, 100, 500};
    return N_list;
}

int ExperimentConfig::effective_R() const { return paper_scale ? 100 : R; }

int ExperimentConfig::effective_threads() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int ExperimentConfig::single_N() const {
    return sample_N > 0 ? sample_N : effective_N_list().front();
}

SpharmaSpec ExperimentConfig::make_spec(const std::string& scenario_name) const {
    SpharmaSpec spec;
    spec.n_min = 1;
    spec.M = M;
    spec.sigma2.resize(M);
    spec.phi.resize(M);
    spec.psi.resize(M);
    spec.deltas.resize(M);
    for (int n = 1; n <= M; ++n) {
        spec.sigma2[n - 1] = std::pow(n + 1.0, -1.5);
        spec.phi[n - 1] = std::pow(0.7 * (n + 1.0 / n), -1.5);
        spec.psi[n - 1] = 0.4 * std::pow(n + 1.0 / n, -1.5);
        spec.deltas[n - 1] = 2 * n + 1;
    }
    if (scenario_name == "dpbs")
        spec.exponents = LrdExponentFamily::dpbs(M, dpbs_theta);
    else if (scenario_name == "ipbs")
        spec.exponents = LrdExponentFamily::ipbs(M, ipbs_upsilon);
    else
        throw UsageError("unknown scenario '" + scenario_name + "'");
    spec.validate();
    return spec;
}

std::vector<int> ExperimentConfig::surface_time_indices(int N) const {
    if (surface_times == "paper-times-500") {
        const std::vector<int> preset = {0, 62, 124, 187, 249, 311, 374, 436, 499};
        for (int t : preset)
            if (t >= N)
                throw UsageError("paper-times-500 requires N >= 500");
        return preset;
    }
    std::vector<int> times;
    for (int k = 0; k < 9; ++k) {
        const int t = static_cast<int>(std::llround(k * (N - 1) / 8.0));
        if (times.empty() || times.back() != t) times.push_back(t);
    }
    return times;
}

namespace {

struct RepOutcome {
    bool ok = false;
    std::string error;
    RepetitionRecord oracle;
    RepetitionRecord plugin;
    MinContrastResult contrast;
};

Eigen::MatrixXd coef_slices(const CoefficientSample& y, const std::vector<int>& times) {
    Eigen::MatrixXd slices(y.C, static_cast<int>(times.size()));
    for (std::size_t q = 0; q < times.size(); ++q) {
        const double* row = &y.data[static_cast<size_t>(times[q]) * y.C];
        for (int c = 0; c < y.C; ++c) slices(c, q) = row[c];
    }
    return slices;
}

void write_histograms(const fs::path& path, const Eigen::MatrixXd& per_degree_rep,
                      const std::vector<int>& degrees,
                      const std::vector<int>& displayed, int bins,
                      const std::string& statistic) {
    json out = json::array();
    for (int n : displayed) {
        const auto it = std::find(degrees.begin(), degrees.end(), n);
        if (it == degrees.end()) continue;
        const int i = static_cast<int>(it - degrees.begin());
        std::vector<double> values(per_degree_rep.cols());
        for (int r = 0; r < per_degree_rep.cols(); ++r)
            values[r] = per_degree_rep(i, r);
        HistogramSummary h = histogram(values, bins, statistic);
        json entry = io::histogram_to_json(h);
        entry["n"] = n;
        out.push_back(entry);
    }
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f << out.dump(2) << "\n";
}

void write_nj_table(const fs::path& path, const std::vector<int>& degrees,
                    const Eigen::MatrixXd& values) {
    io::Table table;
    table.columns = {"n", "j", "value"};
    for (std::size_t i = 0; i < degrees.size(); ++i)
        for (int j = 0; j < values.cols(); ++j)
            table.rows.push_back({static_cast<double>(degrees[i]),
                                  static_cast<double>(j + 1), values(i, j)});
    io::write_table(path, table);
}

void write_nt_table(const fs::path& path, const std::vector<int>& degrees,
                    const Eigen::MatrixXd& values) {
    io::Table table;
    table.columns = {"n", "t", "value"};
    for (std::size_t i = 0; i < degrees.size(); ++i)
        for (int t = 0; t < values.cols(); ++t)
            table.rows.push_back({static_cast<double>(degrees[i]),
                                  static_cast<double>(t + 1), values(i, t)});
    io::write_table(path, table);
}

void write_nr_table(const fs::path& path, const std::vector<int>& degrees,
                    const Eigen::MatrixXd& values) {
    io::Table table;
    table.columns = {"n", "r", "value"};
    for (std::size_t i = 0; i < degrees.size(); ++i)
        for (int r = 0; r < values.cols(); ++r)
            table.rows.push_back({static_cast<double>(degrees[i]),
                                  static_cast<double>(r + 1), values(i, r)});
    io::write_table(path, table);
}

void write_surfaces(const fs::path& path, const QuadratureGrid& grid,
                    const std::vector<int>& times,
                    const std::vector<std::vector<double>>& fields) {
    io::Table table;
    table.columns = {"time", "colat", "lon", "value"};
    for (std::size_t q = 0; q < times.size(); ++q)
        for (std::size_t i = 0; i < grid.nodes.size(); ++i)
            table.rows.push_back({static_cast<double>(times[q]), grid.nodes[i].colat,
                                  grid.nodes[i].lon, fields[q][i]});
    io::write_table(path, table);
}

std::vector<int> displayed_degrees(int n_min, int M) {
    std::vector<int> out;
    for (int n : {1, 5, 10, 15, 20, 25, 30})
        if (n >= n_min && n <= M) out.push_back(n);
    return out;
}

} // namespace

RunResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const fs::path dir(config.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string());

    const int R = config.effective_R();
    const std::vector<int> n_list = config.effective_N_list();
    const bool run_oracle = config.mode != "plugin";
    const bool run_plugin = config.mode != "oracle";

    const BetaCoefficients beta = true_beta(config.M, config.p);
    const QuadratureGrid grid = QuadratureGrid::gauss_legendre(config.M);
    const SphericalBasisTable table(grid, 1, config.M);

    // truth tables shared by every scenario
    write_nj_table(dir / "true_beta.txt", [&] {
        std::vector<int> degrees(config.M);
        for (int n = 1; n <= config.M; ++n) degrees[n - 1] = n;
        return degrees;
    }(), beta.b);
    {
        const std::vector<std::vector<double>> fields = reconstruct_beta(beta, table);
        io::Table t;
        t.columns = {"j", "colat", "lon", "value"};
        for (std::size_t j = 0; j < fields.size(); ++j)
            for (std::size_t i = 0; i < grid.nodes.size(); ++i)
                t.rows.push_back({static_cast<double>(j + 1), grid.nodes[i].colat,
                                  grid.nodes[i].lon, fields[j][i]});
        io::write_table(dir / "beta_surfaces.txt", t);
    }
    {
        std::ofstream f(dir / "config.json");
        if (!f) throw IoError("cannot write config snapshot");
        f << config.to_json().dump(2) << "\n";
    }

    json trace_meta;
    int total_reps = 0, failed_reps = 0;

    for (const std::string& scen : config.scenario_list()) {
        const SpharmaSpec spec = config.make_spec(scen);
        trace_meta[scen] = trace_surrogate(spec);
        const SpectralModel model = SpectralModel::from_spec(spec);
        std::vector<double> theta0;
        if (scen == "dpbs")
            theta0.assign(config.dpbs_theta.begin(), config.dpbs_theta.end());
        else
            theta0.assign(config.ipbs_upsilon.begin(), config.ipbs_upsilon.end());
        std::vector<double> lo, hi;
        default_theta_box(spec.exponents.kind, model.theta_dim(), lo, hi);
        const std::vector<double> init = default_theta_init(lo, hi);

        std::vector<int> degrees(spec.ndeg());
        for (int i = 0; i < spec.ndeg(); ++i) degrees[i] = spec.n_min + i;

        for (int N : n_list) {
            const DesignMatrix X = anova_design(N, config.p);
            const std::vector<int> times = config.surface_time_indices(N);

            // factorize the oracle weights once per (scenario, N)
            std::vector<CovFactor> oracle_factors;
            std::vector<const CovFactor*> oracle_ptrs;
            if (run_oracle || config.debug_pin_theta) {
                for (const DegreeCov& cov : degree_covariances(spec, N, true))
                    oracle_factors.emplace_back(cov);
                for (const CovFactor& f : oracle_factors) oracle_ptrs.push_back(&f);
            }
            DegreeCov eye;
            eye.n = spec.n_min;
            eye.first_row.assign(N, 0.0);
            eye.first_row[0] = 1.0;
            const CovFactor identity_factor(eye);
            std::vector<const CovFactor*> identity_ptrs(spec.ndeg(), &identity_factor);

            std::vector<RepOutcome> outcomes(R);
            parallel_for(R, config.effective_threads(), [&](int r) {
                RepOutcome& out = outcomes[r];
                try {
                    const std::uint64_t seed_r =
                        mix_seed({config.seed, scenario_tag(scen),
                                  static_cast<std::uint64_t>(N),
                                  static_cast<std::uint64_t>(r)});
                    const CoefficientSample eps =
                        simulate(spec, N, config.burn_in, seed_r, config.filter_len);
                    const CoefficientSample y = synthesize_response(X, beta, eps);
                    const Eigen::MatrixXd ydeg = aggregate_orders(y);
                    const Eigen::MatrixXd slices = coef_slices(y, times);

                    if (run_oracle) {
                        const GlsFit fit =
                            gls_fit_prefactored(X, ydeg, degrees, oracle_ptrs);
                        out.oracle = {fit.beta_hat, fit.predictor, fit.response, {},
                                      slices};
                    }
                    if (run_plugin) {
                        const GlsFit ols =
                            gls_fit_prefactored(X, ydeg, degrees, identity_ptrs);
                        const CoefficientSample resid =
                            residual_sample(y, X, ols.beta_hat);
                        const ContrastProblem prob(model, periodogram(resid), lo, hi);
                        if (config.debug_pin_theta) {
                            out.contrast.theta = theta0;
                            out.contrast.value = whittle_contrast(theta0, prob);
                            out.contrast.converged = true;
                        } else {
                            out.contrast = minimum_contrast(
                                prob, init, mix_seed({seed_r, 0x0E57ULL}));
                        }
                        const GlsFit fit = plugin_gls(X, y, out.contrast.theta, model);
                        out.plugin = {fit.beta_hat, fit.predictor, fit.response,
                                      out.contrast.theta, slices};
                    }
                    out.ok = true;
                } catch (const std::exception& e) {
                    out.ok = false;
                    out.error = e.what();
                }
            });

            const fs::path base = dir / scen / ("N" + std::to_string(N));
            fs::create_directories(base);

            RepetitionStack oracle_stack, plugin_stack;
            for (RepetitionStack* s : {&oracle_stack, &plugin_stack}) {
                s->N = N;
                s->p = config.p;
                s->degrees = degrees;
                s->times = times;
            }
            std::vector<const MinContrastResult*> contrasts;
            for (int r = 0; r < R; ++r) {
                ++total_reps;
                if (!outcomes[r].ok) {
                    ++failed_reps;
                    std::cerr << "[mfreg] repetition failed (" << scen << ", N=" << N
                              << ", r=" << r << "): " << outcomes[r].error << "\n";
                    continue;
                }
                if (run_oracle) oracle_stack.reps.push_back(std::move(outcomes[r].oracle));
                if (run_plugin) {
                    plugin_stack.reps.push_back(std::move(outcomes[r].plugin));
                    contrasts.push_back(&outcomes[r].contrast);
                }
            }

            const std::vector<int> shown = displayed_degrees(spec.n_min, spec.M);
            auto write_mode = [&](const fs::path& mdir, const RepetitionStack& stack) {
                fs::create_directories(mdir);
                write_nj_table(mdir / "emqe_beta.txt", degrees, emqe_beta(stack, beta));
                Eigen::MatrixXd mean_beta =
                    Eigen::MatrixXd::Zero(spec.ndeg(), config.p);
                for (const RepetitionRecord& rec : stack.reps)
                    mean_beta += rec.beta_hat;
                mean_beta /= stack.R();
                write_nj_table(mdir / "beta_mean.txt", degrees, mean_beta);
                write_nt_table(mdir / "emqe_predictor.txt", degrees,
                               emqe_predictor(stack));
                const Eigen::MatrixXd l1 = l1_prediction_norms(stack);
                write_nr_table(mdir / "l1_prediction.txt", degrees, l1);
                write_histograms(mdir / "l1_prediction_hist.json", l1, degrees, shown,
                                 config.bins, "l1_prediction");
            };

            if (run_oracle && oracle_stack.R() > 0)
                write_mode(base / "oracle", oracle_stack);
            if (run_plugin && plugin_stack.R() > 0) {
                write_mode(base / "plugin", plugin_stack);
                const Eigen::MatrixXd l1s =
                    l1_spectral_norms(plugin_stack, model, theta0);
                write_nr_table(base / "plugin" / "l1_spectral.txt", degrees, l1s);
                write_histograms(base / "plugin" / "l1_spectral_hist.json", l1s,
                                 degrees, shown, config.bins, "l1_spectral");
                io::Table ttab;
                ttab.columns = {"r"};
                for (int d = 0; d < model.theta_dim(); ++d)
                    ttab.columns.push_back("theta" + std::to_string(d + 1));
                ttab.columns.insert(ttab.columns.end(),
                                    {"contrast", "converged", "iterations"});
                for (std::size_t r = 0; r < contrasts.size(); ++r) {
                    std::vector<double> row = {static_cast<double>(r + 1)};
                    row.insert(row.end(), contrasts[r]->theta.begin(),
                               contrasts[r]->theta.end());
                    row.push_back(contrasts[r]->value);
                    row.push_back(contrasts[r]->converged ? 1.0 : 0.0);
                    row.push_back(static_cast<double>(contrasts[r]->iterations));
                    ttab.rows.push_back(std::move(row));
                }
                io::write_table(base / "plugin" / "theta.txt", ttab);
            }

            const RepetitionStack& surface_stack =
                (run_oracle && oracle_stack.R() > 0) ? oracle_stack : plugin_stack;
            if (surface_stack.R() > 0) {
                const MeanFields fields =
                    repetition_mean_fields(surface_stack, table, X);
                write_surfaces(base / "surfaces_rem.txt", grid, fields.times,
                               fields.rem);
                write_surfaces(base / "surfaces_rtpem.txt", grid, fields.times,
                               fields.rtpem);
            }
        }
    }

    // manifest: every file in the bundle with its content hash
    json manifest;
    manifest["config"] = config.to_json();
    manifest["rng"] = {
        {"master_seed", config.seed},
        {"scheme",
         "splitmix64 substreams keyed by (seed, scenario, N, repetition, degree, "
         "order); independent of scheduling order"}};
    manifest["trace_surrogate"] = trace_meta;
    manifest["repetitions"] = {{"total", total_reps}, {"failed", failed_reps}};
    json files = json::object();
    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const fs::path& p : paths)
        files[fs::relative(p, dir).generic_string()] = io::sha256_file(p);
    manifest["files"] = files;
    {
        std::ofstream f(dir / "manifest.json");
        if (!f) throw IoError("cannot write manifest");
        f << manifest.dump(2) << "\n";
    }

    if (failed_reps * 20 > total_reps) // > 5%
        throw NumericError("experiment: " + std::to_string(failed_reps) + " of " +
                           std::to_string(total_reps) + " repetitions failed");

    RunResult result;
    result.dir = dir;
    result.total_repetitions = total_reps;
    result.failed_repetitions = failed_reps;
    return result;
}

namespace {

struct BundleIndex {
    fs::path dir;
    json config;
    std::vector<std::string> scenarios;
    std::vector<int> n_list;
};

BundleIndex open_bundle(const fs::path& dir) {
    BundleIndex b;
    b.dir = dir;
    std::ifstream f(dir / "config.json");
    if (!f)
        throw UsageError("not a result bundle (missing config.json): " + dir.string());
    f >> b.config;
    const std::string scen = b.config.value("scenario", "dpbs");
    b.scenarios = scen == "both" ? std::vector<std::string>{"dpbs", "ipbs"}
                                 : std::vector<std::string>{scen};
    if (b.config.value("paper_scale", false))
        b.n_list = {50, 100, 500};
    else
        b.n_list = b.config.at("N_list").get<std::vector<int>>();
    return b;
}

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::exists(p))
        throw UsageError("statistic not computed in this bundle: " + what + " (" +
                         p.string() + ")");
}

fs::path copy_stat(const fs::path& src, const fs::path& out_dir,
                   const std::string& dest, const std::string& what) {
    require_file(src, what);
    const fs::path target = out_dir / dest;
    fs::copy_file(src, target, fs::copy_options::overwrite_existing);
    return target;
}

} // namespace

std::vector<fs::path> report(const fs::path& bundle_dir, const std::string& selector,
                             const fs::path& out_dir) {
    const BundleIndex bundle = open_bundle(bundle_dir);
    fs::create_directories(out_dir);
    std::vector<fs::path> written;

    auto for_each_case = [&](const std::string& mode,
                             const std::function<void(const std::string&, int,
                                                      const fs::path&)>& fn) {
        for (const std::string& scen : bundle.scenarios)
            for (int N : bundle.n_list)
                fn(scen, N,
                   bundle.dir / scen / ("N" + std::to_string(N)) / mode);
    };

    auto run_one = [&](const std::string& name) {
        if (name == "figure-1") {
            written.push_back(copy_stat(bundle.dir / "true_beta.txt", out_dir,
                                        "figure01_true_beta.txt",
                                        "true beta coefficients"));
        } else if (name == "figure-2") {
            written.push_back(copy_stat(bundle.dir / "beta_surfaces.txt", out_dir,
                                        "figure02_beta_surfaces.txt",
                                        "beta surfaces"));
        } else if (name == "figure-3" || name == "figure-4") {
            const std::string file =
                name == "figure-3" ? "surfaces_rem.txt" : "surfaces_rtpem.txt";
            const std::string stem = name == "figure-3" ? "figure03_rem_" : "figure04_rtpem_";
            for (const std::string& scen : bundle.scenarios)
                for (int N : bundle.n_list)
                    written.push_back(copy_stat(
                        bundle.dir / scen / ("N" + std::to_string(N)) / file, out_dir,
                        stem + scen + "_N" + std::to_string(N) + ".txt",
                        "repetition mean surfaces"));
        } else if (name == "figure-5") {
            // synthesize the empirical-mean parameter surfaces from beta_mean
            const int M = bundle.config.value("M", 30);
            const QuadratureGrid grid = QuadratureGrid::gauss_legendre(M);
            const SphericalBasisTable table(grid, 1, M);
            for_each_case("oracle", [&](const std::string& scen, int N,
                                        const fs::path& mdir) {
                const fs::path src = mdir / "beta_mean.txt";
                require_file(src, "mean estimated beta (oracle)");
                const io::Table t = io::read_table(src);
                int p = 0;
                for (const auto& row : t.rows)
                    p = std::max(p, static_cast<int>(row[1]));
                BetaCoefficients mean;
                mean.n_min = 1;
                mean.b = Eigen::MatrixXd::Zero(M, p);
                for (const auto& row : t.rows)
                    mean.b(static_cast<int>(row[0]) - 1,
                           static_cast<int>(row[1]) - 1) = row[2];
                const auto fields = reconstruct_beta(mean, table);
                io::Table outt;
                outt.columns = {"j", "colat", "lon", "value"};
                for (std::size_t j = 0; j < fields.size(); ++j)
                    for (std::size_t i = 0; i < grid.nodes.size(); ++i)
                        outt.rows.push_back({static_cast<double>(j + 1),
                                             grid.nodes[i].colat, grid.nodes[i].lon,
                                             fields[j][i]});
                const fs::path dest = out_dir / ("figure05_beta_mean_surfaces_" +
                                                 scen + "_N" + std::to_string(N) +
                                                 ".txt");
                io::write_table(dest, outt);
                written.push_back(dest);
            });
        } else if (name == "figure-6" || name == "figure-7") {
            const std::string scen = name == "figure-6" ? "dpbs" : "ipbs";
            if (std::find(bundle.scenarios.begin(), bundle.scenarios.end(), scen) ==
                bundle.scenarios.end())
                throw UsageError("statistic not computed in this bundle: scenario " +
                                 scen);
            const std::string stem =
                name == "figure-6" ? "figure06_emqe_beta_dpbs_N" : "figure07_emqe_beta_ipbs_N";
            for (int N : bundle.n_list)
                written.push_back(copy_stat(bundle.dir / scen /
                                                ("N" + std::to_string(N)) / "oracle" /
                                                "emqe_beta.txt",
                                            out_dir, stem + std::to_string(N) + ".txt",
                                            "oracle beta EMQE"));
        } else if (name == "figure-8") {
            for_each_case("oracle", [&](const std::string& scen, int N,
                                        const fs::path& mdir) {
                written.push_back(copy_stat(mdir / "emqe_predictor.txt", out_dir,
                                            "figure08_emqe_predictor_" + scen + "_N" +
                                                std::to_string(N) + ".txt",
                                            "oracle predictor EMQE"));
            });
        } else if (name == "figure-9") {
            for_each_case("oracle", [&](const std::string& scen, int N,
                                        const fs::path& mdir) {
                written.push_back(copy_stat(mdir / "l1_prediction_hist.json", out_dir,
                                            "figure09_l1_prediction_hist_" + scen +
                                                "_N" + std::to_string(N) + ".json",
                                            "L1 prediction histograms"));
            });
        } else if (name == "figure-10") {
            for_each_case("plugin", [&](const std::string& scen, int N,
                                        const fs::path& mdir) {
                written.push_back(copy_stat(mdir / "l1_spectral_hist.json", out_dir,
                                            "figure10_l1_spectral_hist_" + scen +
                                                "_N" + std::to_string(N) + ".json",
                                            "L1 spectral histograms"));
            });
        } else if (name == "figure-11") {
            for_each_case("plugin", [&](const std::string& scen, int N,
                                        const fs::path& mdir) {
                written.push_back(copy_stat(mdir / "emqe_beta.txt", out_dir,
                                            "figure11_emqe_beta_plugin_" + scen +
                                                "_N" + std::to_string(N) + ".txt",
                                            "plug-in beta EMQE"));
            });
        } else if (name == "figure-12") {
            for_each_case("plugin", [&](const std::string& scen, int N,
                                        const fs::path& mdir) {
                written.push_back(copy_stat(mdir / "emqe_predictor.txt", out_dir,
                                            "figure12_emqe_predictor_plugin_" + scen +
                                                "_N" + std::to_string(N) + ".txt",
                                            "plug-in predictor EMQE"));
            });
        } else {
            throw UsageError("unknown report selector '" + name + "'");
        }
    };

    if (selector == "all") {
        // emit every figure whose inputs exist in this bundle
        for (int f = 1; f <= 12; ++f) {
            try {
                run_one("figure-" + std::to_string(f));
            } catch (const UsageError&) {
            }
        }
        if (written.empty())
            throw UsageError("no reportable statistics in bundle " +
                             bundle_dir.string());
    } else {
        run_one(selector);
    }
    return written;
}

} // namespace mfreg
