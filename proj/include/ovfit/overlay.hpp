#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovfit/automata.hpp"
#include "ovfit/dataset.hpp"

namespace ovfit {

/// Horizontal wiring ceiling of the target fabric's bus.
inline constexpr std::uint64_t kDefaultBusWidth = 1'000'000;

/// One candidate overlay instantiation.
struct OverlayConfig {
    std::uint64_t num_ste = 1;
    std::uint64_t fanout_limit = 1;
    std::uint64_t bus_width = kDefaultBusWidth;

    friend bool operator==(const OverlayConfig&, const OverlayConfig&) = default;
};

void validate_config(const OverlayConfig& cfg);

/// Linear cost model: every replicated element contributes a fixed amount of
/// each resource, interconnect logic scales with num_ste * fanout_limit, and
/// the controller adds a flat base.
struct CostCoefficients {
    double luts_per_ste = 0.0;
    double ffs_per_ste = 0.0;
    double mem_bits_per_ste = 0.0;
    double luts_per_fanout = 0.0;
    double wires_per_fanout = 0.0;
    double base_luts = 0.0;
    double base_ffs = 0.0;
    double base_mem_bits = 0.0;

    /// Shipped calibration; keeps a 4096-element, fanout-16 overlay inside
    /// the zcu104 profile. Mirrors data/default_coefficients.txt.
    static CostCoefficients defaults();

    friend bool operator==(const CostCoefficients&, const CostCoefficients&) = default;
};

CostCoefficients parse_coefficients(const std::string& text);
CostCoefficients load_coefficients(const std::string& path);
std::string serialize_coefficients(const CostCoefficients& co);

/// Per-configuration resource quantities. Fractional model values round up.
struct ResourceEstimate {
    std::uint64_t luts = 0;
    std::uint64_t ffs = 0;
    std::uint64_t mem_bits = 0;
    std::uint64_t wires = 0;    ///< uncapped demand; see bus_exceeded
    std::uint64_t fanout = 0;
    bool bus_exceeded = false;  ///< wires > bus_width; flagged, never clamped

    friend bool operator==(const ResourceEstimate&, const ResourceEstimate&) = default;
};

ResourceEstimate estimate_resources(const OverlayConfig& cfg, const CostCoefficients& co);

struct MappingFailure {
    std::string constraint;  ///< "states" | "fanout" | "edges"
    std::uint64_t required = 0;
    std::uint64_t available = 0;
};

/// fits holds exactly when failures is empty.
struct MappingVerdict {
    bool fits = true;
    std::vector<MappingFailure> failures;
};

/// Checks whether the automaton maps onto the overlay: states vs elements,
/// fan-out vs the fanout limit, edges vs wiring capacity.
MappingVerdict map_automaton(const Automaton& a, const OverlayConfig& cfg);

/// Emits one record per config with resources = analytic estimate times a
/// uniform factor in [1-noise_fraction, 1+noise_fraction). Record i draws
/// from SplitMix64(derive_seed(seed, i)), so output does not depend on
/// evaluation order; noise_fraction 0 reproduces the estimates exactly.
std::vector<Record> generate_synthetic_dataset(const std::vector<OverlayConfig>& configs,
                                               const CostCoefficients& co, double noise_fraction,
                                               std::uint64_t seed);

struct CalibrationResult {
    CostCoefficients coefficients;
    std::vector<std::string> warnings;  ///< clamped or dropped terms
};

/// Least-squares fit of the cost model to records. wires_per_fanout is not
/// recoverable (records carry no wire counts) and is left at 1.
CalibrationResult calibrate_coefficients(const std::vector<Record>& records);

}  // namespace ovfit
