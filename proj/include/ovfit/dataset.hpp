#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ovfit {

/// One compile observation: an overlay configuration and the resources it
/// consumed, measured on hardware or synthesized by the cost model.
struct Record {
    std::uint64_t num_ste = 1;
    std::uint64_t fanout_limit = 1;
    std::uint64_t luts = 0;
    std::uint64_t ffs = 0;
    std::uint64_t mem_bits = 0;
    std::uint64_t max_fanout = 0;
    std::string source_tag;

    friend bool operator==(const Record&, const Record&) = default;
};

/// Resources a model can be trained to predict.
enum class Target { luts = 0, ffs = 1, mem_bits = 2, max_fanout = 3 };

inline constexpr std::array<Target, 4> kAllTargets = {Target::luts, Target::ffs,
                                                      Target::mem_bits, Target::max_fanout};

const std::string& target_name(Target t);
std::optional<Target> parse_target(const std::string& name);
double target_value(const Record& r, Target t);

/// Model features derivable from a record (and from an overlay config).
inline constexpr std::array<const char*, 2> kRecordFeatureNames = {"num_ste", "fanout_limit"};
std::array<double, 2> record_features(const Record& r);

inline constexpr char kRecordCsvHeader[] = "num_ste,fanout_limit,luts,ffs,mem_bits,max_fanout,source_tag";

std::vector<Record> parse_records_csv(const std::string& text);
std::vector<Record> load_records(const std::string& path);
std::string serialize_records_csv(const std::vector<Record>& records,
                                  const std::vector<std::string>& comments = {});
void save_records(const std::string& path, const std::vector<Record>& records,
                  const std::vector<std::string>& comments = {});

struct TrainTestSplit {
    std::vector<Record> train;
    std::vector<Record> test;
};

/// Seeded shuffle-then-cut split; |test| = floor(test_fraction * n).
TrainTestSplit split_train_test(const std::vector<Record>& records, double test_fraction,
                                std::uint64_t seed);

/// Prediction error summary. mape is absent when every actual value is zero;
/// zero-actual pairs are excluded from mape and counted in mape_excluded.
struct Metrics {
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> mape;
    std::size_t mape_excluded = 0;
    std::size_t n = 0;
};

Metrics compute_metrics(std::span<const double> predicted, std::span<const double> actual);

}  // namespace ovfit
