#include "ovfit/overlay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "ovfit/error.hpp"
#include "ovfit/io.hpp"
#include "ovfit/keyval.hpp"
#include "ovfit/rng.hpp"

namespace ovfit {

namespace {

constexpr double kCountLimit = 9223372036854775808.0;  // 2^63

std::uint64_t checked_ceil(double v, const char* what) {
    if (!(v >= 0.0)) throw Error(std::string(what) + ": negative model value");
    if (!(v < kCountLimit))
        throw Error(std::string(what) + " estimate exceeds 2^63; configuration is absurd");
    return static_cast<std::uint64_t>(std::ceil(v));
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

using CoeffField = std::pair<const char*, double CostCoefficients::*>;

constexpr std::array<CoeffField, 8> kCoeffFields = {{
    {"luts_per_ste", &CostCoefficients::luts_per_ste},
    {"ffs_per_ste", &CostCoefficients::ffs_per_ste},
    {"mem_bits_per_ste", &CostCoefficients::mem_bits_per_ste},
    {"luts_per_fanout", &CostCoefficients::luts_per_fanout},
    {"wires_per_fanout", &CostCoefficients::wires_per_fanout},
    {"base_luts", &CostCoefficients::base_luts},
    {"base_ffs", &CostCoefficients::base_ffs},
    {"base_mem_bits", &CostCoefficients::base_mem_bits},
}};

void validate_coefficients(const CostCoefficients& co) {
    for (const auto& [name, member] : kCoeffFields) {
        const double v = co.*member;
        if (!std::isfinite(v) || v < 0.0)
            throw Error(std::string("coefficient ") + name + " must be finite and non-negative");
    }
}

}  // namespace

void validate_config(const OverlayConfig& cfg) {
    if (cfg.num_ste < 1) throw Error("overlay config: num_ste must be >= 1");
    if (cfg.fanout_limit < 1) throw Error("overlay config: fanout_limit must be >= 1");
    if (cfg.bus_width < 1) throw Error("overlay config: bus_width must be >= 1");
}

CostCoefficients CostCoefficients::defaults() {
    CostCoefficients co;
    co.luts_per_ste = 60.0;
    co.ffs_per_ste = 80.0;
    co.mem_bits_per_ste = 1280.0;
    co.luts_per_fanout = 2.5;
    co.wires_per_fanout = 1.0;
    co.base_luts = 1200.0;
    co.base_ffs = 1500.0;
    co.base_mem_bits = 4096.0;
    return co;
}

CostCoefficients parse_coefficients(const std::string& text) {
    const auto kv = parse_keyval(text);
    CostCoefficients co;
    for (const auto& [key, value] : kv) {
        (void)value;
        const bool known = std::any_of(kCoeffFields.begin(), kCoeffFields.end(),
                                       [&](const CoeffField& f) { return key == f.first; });
        if (!known) throw Error("unknown coefficient '" + key + "'");
    }
    for (const auto& [name, member] : kCoeffFields)
        if (kv.count(name)) co.*member = keyval_number(kv, name);
    validate_coefficients(co);
    return co;
}

CostCoefficients load_coefficients(const std::string& path) {
    try {
        return parse_coefficients(read_text_file(path));
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

std::string serialize_coefficients(const CostCoefficients& co) {
    std::string out;
    for (const auto& [name, member] : kCoeffFields)
        out += std::string(name) + " " + to_decimal_string(co.*member) + "\n";
    return out;
}

ResourceEstimate estimate_resources(const OverlayConfig& cfg, const CostCoefficients& co) {
    validate_config(cfg);
    validate_coefficients(co);
    const double s = static_cast<double>(cfg.num_ste);
    const double sf = s * static_cast<double>(cfg.fanout_limit);
    ResourceEstimate est;
    est.luts = checked_ceil(co.base_luts + s * co.luts_per_ste + sf * co.luts_per_fanout, "luts");
    est.ffs = checked_ceil(co.base_ffs + s * co.ffs_per_ste, "ffs");
    est.mem_bits = checked_ceil(co.base_mem_bits + s * co.mem_bits_per_ste, "mem_bits");
    est.wires = checked_ceil(sf * co.wires_per_fanout, "wires");
    est.fanout = cfg.fanout_limit;
    est.bus_exceeded = est.wires > cfg.bus_width;
    return est;
}

MappingVerdict map_automaton(const Automaton& a, const OverlayConfig& cfg) {
    validate_config(cfg);
    const FeatureVector f = extract_features(a);
    MappingVerdict v;
    auto check = [&](const char* constraint, std::uint64_t required, std::uint64_t available) {
        if (required > available) v.failures.push_back({constraint, required, available});
    };
    check("states", f.num_states, cfg.num_ste);
    check("fanout", f.max_fan_out, cfg.fanout_limit);
    check("edges", f.num_edges, std::min(sat_mul(cfg.num_ste, cfg.fanout_limit), cfg.bus_width));
    v.fits = v.failures.empty();
    return v;
}

std::vector<Record> generate_synthetic_dataset(const std::vector<OverlayConfig>& configs,
                                               const CostCoefficients& co, double noise_fraction,
                                               std::uint64_t seed) {
    if (configs.empty()) throw Error("synthetic dataset: config list is empty");
    if (!(noise_fraction >= 0.0 && noise_fraction < 1.0))
        throw Error("synthetic dataset: noise_fraction must be in [0, 1)");
    std::vector<Record> records;
    records.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const ResourceEstimate est = estimate_resources(configs[i], co);
        SplitMix64 rng(derive_seed(seed, i));
        // Draw order is fixed: luts, ffs, mem_bits, fanout.
        auto perturb = [&](std::uint64_t v, const char* what) -> std::uint64_t {
            if (noise_fraction == 0.0) return v;
            const double u = 1.0 + noise_fraction * (2.0 * rng.next_unit() - 1.0);
            const double scaled = std::round(static_cast<double>(v) * u);
            if (!(scaled < kCountLimit))
                throw Error(std::string(what) + ": perturbed value exceeds 2^63");
            return static_cast<std::uint64_t>(scaled);
        };
        Record r;
        r.num_ste = configs[i].num_ste;
        r.fanout_limit = configs[i].fanout_limit;
        r.luts = perturb(est.luts, "luts");
        r.ffs = perturb(est.ffs, "ffs");
        r.mem_bits = perturb(est.mem_bits, "mem_bits");
        r.max_fanout = perturb(est.fanout, "max_fanout");
        r.source_tag = "synthetic";
        records.push_back(std::move(r));
    }
    return records;
}

namespace {

// Gaussian elimination with partial pivoting on the normal equations.
// Small k (2 or 3); returns nothing when the system is rank-deficient.
std::optional<std::vector<double>> solve_normal(std::vector<std::vector<double>> A,
                                                std::vector<double> b) {
    const std::size_t k = b.size();
    double scale = 0.0;
    for (const auto& row : A)
        for (const double v : row) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return std::nullopt;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        if (std::fabs(A[piv][col]) < 1e-9 * scale) return std::nullopt;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < k; ++r) {
            const double factor = A[r][col] / A[col][col];
            for (std::size_t c = col; c < k; ++c) A[r][c] -= factor * A[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < k; ++c) acc -= A[i][c] * x[c];
        x[i] = acc / A[i][i];
    }
    return x;
}

// Least squares of target against the given basis columns.
std::optional<std::vector<double>> fit_columns(const std::vector<std::vector<double>>& basis_rows,
                                               const std::vector<double>& target) {
    const std::size_t k = basis_rows.front().size();
    std::vector<std::vector<double>> ata(k, std::vector<double>(k, 0.0));
    std::vector<double> atb(k, 0.0);
    for (std::size_t r = 0; r < basis_rows.size(); ++r) {
        for (std::size_t i = 0; i < k; ++i) {
            atb[i] += basis_rows[r][i] * target[r];
            for (std::size_t j = 0; j < k; ++j) ata[i][j] += basis_rows[r][i] * basis_rows[r][j];
        }
    }
    return solve_normal(std::move(ata), std::move(atb));
}

}  // namespace

CalibrationResult calibrate_coefficients(const std::vector<Record>& records) {
    if (records.size() < 3) throw Error("calibration needs at least 3 records");
    std::set<std::uint64_t> sizes;
    for (const auto& r : records) sizes.insert(r.num_ste);
    if (sizes.size() < 2)
        throw Error("calibration needs records at >= 2 distinct num_ste values");

    const std::size_t n = records.size();
    std::vector<std::vector<double>> basis3(n), basis2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(records[i].num_ste);
        const double sf = s * static_cast<double>(records[i].fanout_limit);
        basis3[i] = {1.0, s, sf};
        basis2[i] = {1.0, s};
    }

    CalibrationResult result;
    auto clamp_coeff = [&](const char* name, double v) {
        if (v < 0.0) {
            result.warnings.push_back(std::string("fitted ") + name + " was negative (" +
                                      to_decimal_string(v) + "); clamped to 0");
            return 0.0;
        }
        return v;
    };

    auto target_column = [&](Target t) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = target_value(records[i], t);
        return col;
    };

    CostCoefficients co;

    // luts carries the fanout term; fall back to (1, num_ste) when the
    // design cannot separate it (for example a single fanout value).
    {
        const auto y = target_column(Target::luts);
        auto fit = fit_columns(basis3, y);
        if (fit) {
            co.base_luts = clamp_coeff("base_luts", (*fit)[0]);
            co.luts_per_ste = clamp_coeff("luts_per_ste", (*fit)[1]);
            co.luts_per_fanout = clamp_coeff("luts_per_fanout", (*fit)[2]);
        } else {
            auto reduced = fit_columns(basis2, y);
            if (!reduced)
                throw Error("calibration design is rank-deficient (configurations are too uniform)");
            result.warnings.push_back(
                "luts fanout term is not identifiable from these records; luts_per_fanout set to 0");
            co.base_luts = clamp_coeff("base_luts", (*reduced)[0]);
            co.luts_per_ste = clamp_coeff("luts_per_ste", (*reduced)[1]);
            co.luts_per_fanout = 0.0;
        }
    }
    {
        const auto y = target_column(Target::ffs);
        const auto fit = fit_columns(basis2, y);
        if (!fit)
            throw Error("calibration design is rank-deficient (configurations are too uniform)");
        co.base_ffs = clamp_coeff("base_ffs", (*fit)[0]);
        co.ffs_per_ste = clamp_coeff("ffs_per_ste", (*fit)[1]);
    }
    {
        const auto y = target_column(Target::mem_bits);
        const auto fit = fit_columns(basis2, y);
        if (!fit)
            throw Error("calibration design is rank-deficient (configurations are too uniform)");
        co.base_mem_bits = clamp_coeff("base_mem_bits", (*fit)[0]);
        co.mem_bits_per_ste = clamp_coeff("mem_bits_per_ste", (*fit)[1]);
    }

    co.wires_per_fanout = 1.0;  // records carry no wire counts
    result.coefficients = co;
    return result;
}

}  // namespace ovfit
