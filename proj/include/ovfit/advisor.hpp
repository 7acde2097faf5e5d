#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ovfit/capacity.hpp"
#include "ovfit/dataset.hpp"
#include "ovfit/forest.hpp"
#include "ovfit/manifest.hpp"
#include "ovfit/overlay.hpp"

namespace ovfit {

struct FeatureRange {
    double min = 0.0;
    double max = 0.0;
};

/// One forest per predicted resource plus the feature ranges seen in
/// training, which bound where predictions can be trusted.
struct ModelBundle {
    std::vector<std::string> feature_names;
    std::vector<FeatureRange> training_range;  ///< parallel to feature_names
    std::map<Target, RandomForest> forests;
};

/// Trains one forest per target on [num_ste, fanout_limit] features. The
/// forest for target index k uses stream seed derive_seed(cfg.seed, k).
ModelBundle train_bundle(const std::vector<Record>& records, const std::vector<Target>& targets,
                         const ForestConfig& cfg, unsigned n_threads = 0);

struct BundlePrediction {
    ResourceEstimate estimate;  ///< raw predictions rounded up; wires stay 0
    std::map<Target, double> raw;
    bool extrapolation_warning = false;  ///< some feature fell outside training_range
};

BundlePrediction predict_with_bundle(const ModelBundle& bundle, const OverlayConfig& cfg);

/// num_ste doubling sweep: start, start*2, ..., start*2^doublings.
std::vector<OverlayConfig> sweep_candidates(std::uint64_t start, unsigned doublings,
                                            std::uint64_t fanout_limit,
                                            std::uint64_t bus_width = kDefaultBusWidth);

struct RankedCandidate {
    OverlayConfig config;
    ResourceEstimate predicted;
    std::map<Target, double> raw;
    Verdict verdict;
    bool extrapolation_warning = false;
};

struct Recommendation {
    std::vector<RankedCandidate> entries;  ///< ascending (num_ste, fanout_limit)
    std::optional<std::size_t> best;       ///< largest feasible num_ste; lower fanout on ties
};

/// Predicts and gates every candidate; best points at the feasible entry
/// with maximal num_ste. Extrapolating candidates are warned, never blocked.
Recommendation recommend(std::vector<OverlayConfig> candidates, const ModelBundle& bundle,
                         const DeviceProfile& profile, double ceiling_percent = 100.0);

std::string serialize_bundle(const ModelBundle& bundle, const RunManifest& manifest);
ModelBundle parse_bundle(const std::string& text);
ModelBundle load_bundle(const std::string& path);
void save_bundle(const std::string& path, const ModelBundle& bundle, const RunManifest& manifest);

}  // namespace ovfit
