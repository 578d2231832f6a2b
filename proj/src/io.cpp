#include "mfreg/io.hpp"
#include "mfreg/errors.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace mfreg::io {

namespace {

// Compact SHA-256 (FIPS 180-4).
struct Sha256 {
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::uint64_t total = 0;
    std::array<std::uint8_t, 64> block{};
    std::size_t fill = 0;

    static std::uint32_t rotr(std::uint32_t x, int n) {
        return (x >> n) | (x << (32 - n));
    }

    void compress(const std::uint8_t* p) {
        static const std::uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 =
                rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 =
                rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
        std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + s1 + ch + k[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            hh = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        total += len;
        while (len > 0) {
            const std::size_t take = std::min(len, block.size() - fill);
            std::memcpy(block.data() + fill, p, take);
            fill += take;
            p += take;
            len -= take;
            if (fill == block.size()) {
                compress(block.data());
                fill = 0;
            }
        }
    }

    std::string finish() {
        const std::uint64_t bits = total * 8;
        const std::uint8_t one = 0x80;
        update(&one, 1);
        const std::uint8_t zero = 0x00;
        while (fill != 56) update(&zero, 1);
        std::uint8_t len[8];
        for (int i = 0; i < 8; ++i) len[i] = std::uint8_t(bits >> (56 - 8 * i));
        update(len, 8);

        char hex[65];
        for (int i = 0; i < 8; ++i)
            std::snprintf(hex + 8 * i, 9, "%08x", h[i]);
        return std::string(hex, 64);
    }
};

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path.string());
    return in;
}

} // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sha256_hex(const void* data, std::size_t len) {
    Sha256 s;
    s.update(data, len);
    return s.finish();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    Sha256 s;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof buf);
        s.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return s.finish();
}

void write_table(const std::filesystem::path& path, const Table& table) {
    std::ofstream out = open_out(path);
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? " " : "") << table.columns[c];
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw UsageError("write_table: ragged row");
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? " " : "") << format_g17(row[c]);
        out << "\n";
    }
    if (!out)
        throw IoError("write failed: " + path.string());
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    Table table;
    std::string line;
    if (!std::getline(in, line))
        throw IoError("empty table file: " + path.string());
    std::istringstream header(line);
    std::string name;
    while (header >> name) table.columns.push_back(name);
    if (table.columns.empty())
        throw IoError("missing header: " + path.string());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::vector<double> values;
        double v;
        while (row >> v) values.push_back(v);
        if (values.size() != table.columns.size())
            throw IoError("ragged row in " + path.string());
        table.rows.push_back(std::move(values));
    }
    return table;
}

nlohmann::json spec_to_json(const SpharmaSpec& spec) {
    nlohmann::json j;
    j["n_min"] = spec.n_min;
    j["M"] = spec.M;
    j["sigma2"] = spec.sigma2;
    j["phi"] = spec.phi;
    j["psi"] = spec.psi;
    j["deltas"] = spec.deltas;
    j["exponents"] = {{"kind", exponent_kind_name(spec.exponents.kind)},
                      {"theta", spec.exponents.theta},
                      {"values", spec.exponents.values}};
    return j;
}

SpharmaSpec spec_from_json(const nlohmann::json& j) {
    SpharmaSpec spec;
    spec.n_min = j.at("n_min").get<int>();
    spec.M = j.at("M").get<int>();
    spec.sigma2 = j.at("sigma2").get<std::vector<double>>();
    spec.phi = j.at("phi").get<std::vector<double>>();
    spec.psi = j.at("psi").get<std::vector<double>>();
    spec.deltas = j.at("deltas").get<std::vector<int>>();
    const nlohmann::json& e = j.at("exponents");
    spec.exponents.kind = exponent_kind_from_name(e.at("kind").get<std::string>());
    spec.exponents.theta = e.at("theta").get<std::vector<double>>();
    spec.exponents.values = e.at("values").get<std::vector<double>>();
    spec.validate();
    return spec;
}

void write_sample_text(const CoefficientSample& sample,
                       const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "t n j value\n";
    for (int t = 1; t <= sample.N; ++t)
        for (int n = sample.spec.n_min; n <= sample.spec.M; ++n)
            for (int j = 1; j <= sample.spec.delta_at(n); ++j)
                out << t << " " << n << " " << j << " "
                    << format_g17(sample.at(t, n, j)) << "\n";
    if (!out)
        throw IoError("write failed: " + path.string());
}

CoefficientSample read_sample_text(const std::filesystem::path& path) {
    const Table table = read_table(path);
    if (table.columns != std::vector<std::string>{"t", "n", "j", "value"})
        throw IoError("unexpected sample header in " + path.string());

    int N = 0, n_min = INT32_MAX, M = 0;
    std::map<int, int> dims;
    for (const auto& row : table.rows) {
        const int t = static_cast<int>(row[0]);
        const int n = static_cast<int>(row[1]);
        const int j = static_cast<int>(row[2]);
        N = std::max(N, t);
        n_min = std::min(n_min, n);
        M = std::max(M, n);
        dims[n] = std::max(dims[n], j);
    }
    if (N == 0)
        throw IoError("no data rows in " + path.string());

    SpharmaSpec spec;
    spec.n_min = n_min;
    spec.M = M;
    const int ndeg = spec.ndeg();
    spec.sigma2.assign(ndeg, 1.0);
    spec.phi.assign(ndeg, 0.0);
    spec.psi.assign(ndeg, 0.0);
    spec.deltas.resize(ndeg);
    for (int n = n_min; n <= M; ++n) {
        auto it = dims.find(n);
        if (it == dims.end())
            throw IoError("degree gap in sample file " + path.string());
        spec.deltas[n - n_min] = it->second;
    }
    spec.exponents = LrdExponentFamily::custom(std::vector<double>(ndeg, 0.0));

    CoefficientSample sample = CoefficientSample::zeros(spec, N);
    for (const auto& row : table.rows)
        sample.at(static_cast<int>(row[0]), static_cast<int>(row[1]),
                  static_cast<int>(row[2])) = row[3];
    return sample;
}

void write_sample_binary(const CoefficientSample& sample,
                         const std::filesystem::path& path) {
    {
        std::ofstream out = open_out(path);
        out.write(reinterpret_cast<const char*>(sample.data.data()),
                  static_cast<std::streamsize>(sample.data.size() * sizeof(double)));
        if (!out)
            throw IoError("write failed: " + path.string());
    }
    nlohmann::json sidecar;
    sidecar["layout"] = "row-major (t, n, j), little-endian float64";
    sidecar["N"] = sample.N;
    sidecar["coeffs_per_time"] = sample.C;
    sidecar["seed"] = sample.seed;
    sidecar["spec"] = spec_to_json(sample.spec);
    std::ofstream out = open_out(path.string() + ".json");
    out << sidecar.dump(2) << "\n";
}

CoefficientSample read_sample_binary(const std::filesystem::path& path) {
    nlohmann::json sidecar;
    {
        std::ifstream in = open_in(path.string() + ".json");
        in >> sidecar;
    }
    const SpharmaSpec spec = spec_from_json(sidecar.at("spec"));
    const int N = sidecar.at("N").get<int>();
    CoefficientSample sample = CoefficientSample::zeros(spec, N);
    sample.seed = sidecar.at("seed").get<std::uint64_t>();

    std::ifstream in = open_in(path);
    in.read(reinterpret_cast<char*>(sample.data.data()),
            static_cast<std::streamsize>(sample.data.size() * sizeof(double)));
    if (in.gcount() !=
        static_cast<std::streamsize>(sample.data.size() * sizeof(double)))
        throw IoError("truncated sample block: " + path.string());
    return sample;
}

CoefficientSample read_sample(const std::filesystem::path& path) {
    if (path.extension() == ".bin")
        return read_sample_binary(path);
    return read_sample_text(path);
}

void write_design(const DesignMatrix& X, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "t";
    for (int j = 1; j <= X.p(); ++j) out << " x" << j;
    out << "\n";
    for (int t = 0; t < X.N(); ++t) {
        out << (t + 1);
        for (int j = 0; j < X.p(); ++j)
            out << " " << format_g17(X.X(t, j));
        out << "\n";
    }
}

DesignMatrix read_design(const std::filesystem::path& path) {
    const Table table = read_table(path);
    if (table.columns.size() < 2 || table.columns[0] != "t")
        throw IoError("unexpected design header in " + path.string());
    const int p = static_cast<int>(table.columns.size()) - 1;
    const int N = static_cast<int>(table.rows.size());
    DesignMatrix X;
    X.X.resize(N, p);
    for (const auto& row : table.rows) {
        const int t = static_cast<int>(row[0]);
        if (t < 1 || t > N)
            throw IoError("non-contiguous time index in " + path.string());
        for (int j = 0; j < p; ++j)
            X.X(t - 1, j) = row[j + 1];
    }
    X.validate();
    return X;
}

void write_covariances(const std::vector<DegreeCov>& covs,
                       const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "n lag value\n";
    for (const DegreeCov& cov : covs)
        for (std::size_t lag = 0; lag < cov.first_row.size(); ++lag)
            out << cov.n << " " << lag << " " << format_g17(cov.first_row[lag])
                << "\n";
}

std::vector<DegreeCov> read_covariances(const std::filesystem::path& path) {
    const Table table = read_table(path);
    if (table.columns != std::vector<std::string>{"n", "lag", "value"})
        throw IoError("unexpected covariance header in " + path.string());
    std::map<int, std::map<int, double>> rows;
    for (const auto& row : table.rows)
        rows[static_cast<int>(row[0])][static_cast<int>(row[1])] = row[2];
    std::vector<DegreeCov> covs;
    for (const auto& [n, lags] : rows) {
        DegreeCov cov;
        cov.n = n;
        cov.first_row.resize(lags.size());
        for (const auto& [lag, v] : lags) {
            if (lag < 0 || lag >= static_cast<int>(lags.size()))
                throw IoError("lag gap in covariance file " + path.string());
            cov.first_row[lag] = v;
        }
        covs.push_back(std::move(cov));
    }
    return covs;
}

void write_gls_fit(const GlsFit& fit, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "n j beta_hat var_diag\n";
    for (std::size_t i = 0; i < fit.degrees.size(); ++i)
        for (int j = 0; j < fit.beta_hat.cols(); ++j)
            out << fit.degrees[i] << " " << (j + 1) << " "
                << format_g17(fit.beta_hat(i, j)) << " "
                << format_g17(fit.variance[i](j, j)) << "\n";
}

void write_periodogram(const PeriodogramSet& set, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "n omega value\n";
    for (std::size_t i = 0; i < set.degrees.size(); ++i)
        for (std::size_t k = 0; k < set.freqs.size(); ++k)
            out << set.degrees[i] << " " << format_g17(set.freqs[k]) << " "
                << format_g17(set.I(i, k)) << "\n";
}

nlohmann::json histogram_to_json(const HistogramSummary& h) {
    return {{"statistic", h.statistic}, {"edges", h.edges}, {"counts", h.counts}};
}

} // namespace mfreg::io
