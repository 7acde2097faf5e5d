#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ovfit/forest.hpp"
#include "ovfit/overlay.hpp"

namespace ovfit::cli {

// Exit code contract: 0 success (gate: fits), 2 gate-negative, 1 any error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDoesNotFit = 2;

struct SynthOptions {
    std::string coeff_file;  ///< empty = built-in defaults
    std::vector<std::uint64_t> sizes;
    std::vector<std::uint64_t> fanouts = {16};
    std::uint64_t repeats = 1;
    std::uint64_t bus_width = kDefaultBusWidth;
    double noise = 0.0;
    std::uint64_t seed = 42;
    std::string out_csv;
};

/// Deterministic config order used by cmd_synth: sizes x fanouts x repeats.
std::vector<OverlayConfig> synth_configs(const SynthOptions& o);
int cmd_synth(const SynthOptions& o, std::ostream& out);

struct TrainOptions {
    std::string records_csv;
    std::vector<std::string> targets = {"luts", "ffs", "mem_bits", "max_fanout"};
    ForestConfig forest;
    unsigned threads = 0;
    std::string out_model;
};
int cmd_train(const TrainOptions& o, std::ostream& out);

struct PredictOptions {
    std::string model;
    std::uint64_t num_ste = 1;
    std::uint64_t fanout_limit = 1;
    std::uint64_t bus_width = kDefaultBusWidth;
    std::string out_json;
};
int cmd_predict(const PredictOptions& o, std::ostream& out);

struct EvaluateOptions {
    std::string model;
    std::string records_csv;
    std::string out_report;  ///< empty = print to out
    std::string out_csv;     ///< empty = skip plot data
};
int cmd_evaluate(const EvaluateOptions& o, std::ostream& out);

struct GateOptions {
    // Either a model plus a configuration...
    std::string model;
    std::optional<std::uint64_t> num_ste;
    std::optional<std::uint64_t> fanout_limit;
    std::uint64_t bus_width = kDefaultBusWidth;
    // ...or a direct resource estimate.
    std::optional<std::uint64_t> luts;
    std::optional<std::uint64_t> ffs;
    std::optional<std::uint64_t> mem_bits;
    std::string profile = "zcu104";
    double ceiling = 100.0;
    std::string out_json;
};
int cmd_gate(const GateOptions& o, std::ostream& out);

struct RecommendOptions {
    std::string model;
    std::string profile = "zcu104";
    double ceiling = 100.0;
    std::uint64_t start = 1024;
    unsigned doublings = 3;
    std::uint64_t fanout_limit = 16;
    std::uint64_t bus_width = kDefaultBusWidth;
    std::string out_json;
};
int cmd_recommend(const RecommendOptions& o, std::ostream& out);

}  // namespace ovfit::cli
