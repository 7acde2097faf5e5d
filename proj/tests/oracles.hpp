#pragma once

// Test-only oracles and data generators. The oracles are deliberately
// straight-line recomputations, independent of the library's internal
// search and accumulation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ovfit/capacity.hpp"
#include "ovfit/forest.hpp"
#include "ovfit/overlay.hpp"

namespace oracle {

// Exhaustive split search: every feature, every midpoint between consecutive
// distinct values, score recomputed by partition + two-pass variance.
inline std::optional<ovfit::Split> exhaustive_best_split(const ovfit::Matrix& X,
                                                         const std::vector<double>& y,
                                                         std::size_t min_samples_leaf) {
    const std::size_t n = y.size();
    bool constant = true;
    for (const double v : y)
        if (v != y.front()) {
            constant = false;
            break;
        }
    if (constant) return std::nullopt;

    const std::size_t width = X.front().size();
    std::optional<ovfit::Split> best;
    for (std::size_t f = 0; f < width; ++f) {
        std::vector<double> values;
        values.reserve(n);
        for (std::size_t i = 0; i < n; ++i) values.push_back(X[i][f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t k = 1; k < values.size(); ++k) {
            const double lo = values[k - 1];
            const double hi = values[k];
            const double thr = (lo + hi) * 0.5;
            if (!(thr < hi)) continue;
            std::vector<double> left, right;
            for (std::size_t i = 0; i < n; ++i)
                (X[i][f] <= thr ? left : right).push_back(y[i]);
            if (left.size() < min_samples_leaf || right.size() < min_samples_leaf) continue;
            if (left.empty() || right.empty()) continue;
            auto sse = [](const std::vector<double>& part) {
                double mean = 0.0;
                for (const double v : part) mean += v;
                mean /= static_cast<double>(part.size());
                double acc = 0.0;
                for (const double v : part) acc += (v - mean) * (v - mean);
                return acc;
            };
            const double score = sse(left) + sse(right);
            if (!best || score < best->score) best = ovfit::Split{f, thr, score};
        }
    }
    return best;
}

// Per-inequality capacity re-check, assembled without Verdict internals.
struct GateOracle {
    bool fits;
    std::string limiting;
    std::array<double, 3> utilization;
};

inline GateOracle gate_oracle(const ovfit::ResourceEstimate& est, const ovfit::DeviceProfile& p,
                              double ceiling) {
    const std::uint64_t req[3] = {est.luts, est.ffs, est.mem_bits};
    const std::uint64_t avail[3] = {p.logic_cells, p.flip_flops, p.dist_mem_bits};
    const char* names[3] = {"logic_cells", "flip_flops", "dist_mem_bits"};
    GateOracle g{true, names[0], {}};
    for (int i = 0; i < 3; ++i) {
        g.utilization[i] = 100.0 * static_cast<double>(req[i]) / static_cast<double>(avail[i]);
        if (!(100.0 * static_cast<double>(req[i]) <= ceiling * static_cast<double>(avail[i])))
            g.fits = false;
    }
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (g.utilization[i] > g.utilization[best]) best = i;
    g.limiting = names[best];
    return g;
}

// Deterministic generators for fuzzed inputs.
struct TestRng {
    std::mt19937_64 eng;

    explicit TestRng(std::uint64_t seed) : eng(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng);
    }
    /// Uniform multiple of 1/denominator in [lo, hi]. Records hold integral
    /// counts, so exact generate-then-fit round trips need coefficients whose
    /// products with the power-of-two size grid stay integral.
    double dyadic(double lo, double hi, std::uint64_t denominator) {
        const double raw = uniform(lo, hi);
        return std::round(raw * static_cast<double>(denominator)) /
               static_cast<double>(denominator);
    }
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng);
    }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng);
    }
};

struct Dataset {
    ovfit::Matrix X;
    std::vector<double> y;
};

inline Dataset random_dataset(TestRng& rng, std::size_t n, std::size_t n_features,
                              bool integer_targets = false) {
    Dataset d;
    d.X.resize(n, std::vector<double>(n_features));
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < n_features; ++f) d.X[i][f] = rng.uniform(-100.0, 100.0);
        d.y[i] = integer_targets ? static_cast<double>(rng.integer(0, 20))
                                 : rng.uniform(-1000.0, 1000.0);
    }
    return d;
}

}  // namespace oracle
