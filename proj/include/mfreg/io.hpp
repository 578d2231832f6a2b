#ifndef MFREG_IO_HPP
#define MFREG_IO_HPP

#include "mfreg/lrd.hpp"
#include "mfreg/regression.hpp"
#include "mfreg/residuals.hpp"
#include "mfreg/spectral.hpp"

// single-header nlohmann/json from the vendor root
#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace mfreg::io {

/// Fixed "%.17g" rendering; every number in the text outputs goes through
/// this so reruns are byte-identical.
std::string format_g17(double v);

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_file(const std::filesystem::path& path);

/// Generic headered whitespace table.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

nlohmann::json spec_to_json(const SpharmaSpec& spec);
SpharmaSpec spec_from_json(const nlohmann::json& j);

/// Columnar text persistence, header "t n j value".
void write_sample_text(const CoefficientSample& sample,
                       const std::filesystem::path& path);
/// Reader reconstructs the degree layout from the data; model parameters are
/// not part of the text format.
CoefficientSample read_sample_text(const std::filesystem::path& path);

/// Little-endian float64 block, row-major (t, n, j), with a <path>.json
/// sidecar carrying dimensions, the generating spec and the seed.
void write_sample_binary(const CoefficientSample& sample,
                         const std::filesystem::path& path);
CoefficientSample read_sample_binary(const std::filesystem::path& path);

/// Reads either format, by extension (.bin uses the sidecar).
CoefficientSample read_sample(const std::filesystem::path& path);

/// Design matrix, header "t x1 ... xp".
void write_design(const DesignMatrix& X, const std::filesystem::path& path);
DesignMatrix read_design(const std::filesystem::path& path);

/// Per-degree Toeplitz rows, header "n lag value".
void write_covariances(const std::vector<DegreeCov>& covs,
                       const std::filesystem::path& path);
std::vector<DegreeCov> read_covariances(const std::filesystem::path& path);

/// Fit export, header "n j beta_hat var_diag".
void write_gls_fit(const GlsFit& fit, const std::filesystem::path& path);

/// Periodogram export, header "n omega value".
void write_periodogram(const PeriodogramSet& set, const std::filesystem::path& path);

nlohmann::json histogram_to_json(const HistogramSummary& h);

} // namespace mfreg::io

#endif
