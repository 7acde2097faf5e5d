#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ovfit {

/// One transition: source -> target with a signed score weight that ends up
/// in the target element's score register.
struct Edge {
    std::uint32_t source = 0;
    std::uint32_t target = 0;
    std::int32_t score = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed labeled state graph destined for the overlay. State ids are
/// dense 0..num_states-1. Immutable once built; safe to share across threads.
struct Automaton {
    std::uint32_t num_states = 0;
    std::vector<Edge> edges;
    std::vector<std::uint32_t> start_states;   ///< sorted, unique
    std::vector<std::uint32_t> accept_states;  ///< sorted, unique

    friend bool operator==(const Automaton&, const Automaton&) = default;
};

/// Graph-shape features that drive overlay resource consumption.
struct FeatureVector {
    std::uint64_t num_states = 0;
    std::uint64_t num_edges = 0;
    std::uint64_t max_fan_out = 0;
    std::uint64_t max_fan_in = 0;
    double avg_fan_out = 0.0;  ///< edges / states; 0 for the empty automaton
};

struct ParseOptions {
    /// Edge scores must satisfy |score| <= max_abs_score. Scores live in a
    /// per-element register, so the default is one signed 16-bit step.
    std::int64_t max_abs_score = 32768;
};

/// Parses the line-oriented edge-list format (see README). Errors carry the
/// offending line number.
Automaton parse_automaton(const std::string& text, const ParseOptions& opts = {});

/// Canonical edge-list text; parse_automaton(serialize_automaton(a)) == a.
std::string serialize_automaton(const Automaton& a);

FeatureVector extract_features(const Automaton& a);

/// Edge over arbitrary, possibly sparse state ids.
struct SparseEdge {
    std::uint64_t source = 0;
    std::uint64_t target = 0;
    std::int64_t score = 0;
};

struct SparseAutomaton {
    std::vector<SparseEdge> edges;
    std::vector<std::uint64_t> start_states;
    std::vector<std::uint64_t> accept_states;
};

struct DensifyResult {
    Automaton automaton;
    /// original_ids[new_id] == the id the caller used for that state.
    std::vector<std::uint64_t> original_ids;
};

/// Re-indexes sparse state ids into the dense form, ascending by original id.
DensifyResult densify(const SparseAutomaton& sparse, const ParseOptions& opts = {});

}  // namespace ovfit
