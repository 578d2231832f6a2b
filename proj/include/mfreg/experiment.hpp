#ifndef MFREG_EXPERIMENT_HPP
#define MFREG_EXPERIMENT_HPP

#include "mfreg/lrd.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mfreg {

/// Declarative experiment description. Defaults are the desk-scale
/// "paper-sim" preset; --paper-scale switches to R=100 and N up to 500.
struct ExperimentConfig {
    std::string preset = "paper-sim";
    std::string scenario = "dpbs"; // dpbs | ipbs | both
    std::vector<int> N_list = {50, 100, 200};
    int R = 20;
    int M = 30;
    int p = 5;
    std::uint64_t seed = 20240807;
    std::string out = "results";
    std::string mode = "both"; // oracle | plugin | both
    bool paper_scale = false;
    int threads = 0; // 0 = hardware concurrency
    int burn_in = 500;
    int filter_len = 0; // 0 = max(2000, 4N)
    int bins = 12;
    std::string surface_times = "auto"; // auto | paper-times-500
    bool debug_pin_theta = false;       // plug-in path uses theta_0 (exact-path checks)
    int sample_N = 0;                   // single-sample subcommands; 0 = N_list front
    std::array<double, 3> dpbs_theta = {0.75, 0.76, 0.77};
    std::array<double, 2> ipbs_upsilon = {1.0, 1.0};

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    /// String override for one key (CLI flags); throws UsageError on unknown
    /// keys or unparsable values.
    void set_key(const std::string& key, const std::string& value);

    void validate() const;

    std::vector<std::string> scenario_list() const;
    std::vector<int> effective_N_list() const;
    int effective_R() const;
    int effective_threads() const;
    int single_N() const;

    /// SPHARMA error model of one scenario at this config's truncation.
    SpharmaSpec make_spec(const std::string& scenario_name) const;

    /// Surface time indices (0-based) for a sample of size N.
    std::vector<int> surface_time_indices(int N) const;
};

struct RunResult {
    std::filesystem::path dir;
    int total_repetitions = 0;
    int failed_repetitions = 0;
};

/// Runs the full pipeline described by the config and persists the result
/// bundle (statistics files, manifest with content hashes, config snapshot).
/// Reruns with the same config and seed are byte-identical at any thread
/// count. Throws NumericError when more than 5% of repetitions fail.
RunResult run_experiment(const ExperimentConfig& config);

/// Emits plot-data files for one figure analog ("figure-1".."figure-12") or
/// "all" from a completed bundle. Missing statistics raise UsageError.
std::vector<std::filesystem::path> report(const std::filesystem::path& bundle_dir,
                                          const std::string& selector,
                                          const std::filesystem::path& out_dir);

} // namespace mfreg

#endif
