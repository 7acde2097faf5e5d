#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ovfit/rng.hpp"

namespace ovfit {

using Matrix = std::vector<std::vector<double>>;  ///< row-major samples

/// Forest training parameters. Defaults are conventional for regression
/// forests; feature_fraction stays 1.0 because the overlay feature space is
/// only two columns wide.
struct ForestConfig {
    std::size_t n_trees = 100;
    int max_depth = -1;  ///< -1 = unlimited; 0 forces a root leaf
    std::size_t min_samples_leaf = 1;
    std::size_t min_samples_split = 2;
    double feature_fraction = 1.0;  ///< fraction of features drawn per node, (0, 1]
    bool bootstrap = true;
    std::uint64_t seed = 42;

    friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

void validate_config(const ForestConfig& cfg);

/// Arena node; feature < 0 marks a leaf.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;  ///< leaf: mean of the training targets routed here
    std::uint64_t n_samples = 0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  ///< root at index 0, preorder

    /// Routes x down the tree: feature value <= threshold goes left.
    double predict(std::span<const double> x) const;

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct RandomForest {
    std::vector<RegressionTree> trees;
    ForestConfig config;
    std::vector<std::string> feature_names;
    std::string target_name;
};

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = 0.0;  ///< total child squared error at this split
};

/// Finds the split minimizing total child squared error (equivalently,
/// weighted child variance), scanning midpoints between consecutive distinct
/// values of each candidate feature. Splits leaving a child below
/// min_samples_leaf are ineligible. Returns nothing when no eligible cut
/// exists or the targets are constant. Ties break toward the lower feature
/// index, then the lower threshold.
std::optional<Split> best_split(const Matrix& X, std::span<const double> y,
                                std::span<const std::size_t> candidate_features,
                                std::size_t min_samples_leaf);

RegressionTree train_tree(const Matrix& X, std::span<const double> y, const ForestConfig& cfg,
                          SplitMix64& rng);

/// Trains cfg.n_trees trees; tree i consumes only the stream seeded with
/// derive_seed(cfg.seed, i), so the result is identical whether trees are
/// built sequentially or across n_threads workers.
RandomForest train_forest(const Matrix& X, std::span<const double> y, const ForestConfig& cfg,
                          std::vector<std::string> feature_names, std::string target_name,
                          unsigned n_threads = 0);

/// Arithmetic mean of the per-tree predictions.
double predict(const RandomForest& f, std::span<const double> x);
std::vector<double> predict_batch(const RandomForest& f, const Matrix& X);

std::string serialize_forest(const RandomForest& f);
RandomForest parse_forest(const std::string& text);

}  // namespace ovfit
