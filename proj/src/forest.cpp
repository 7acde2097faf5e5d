#include "ovfit/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>
#include <utility>

#include "json_detail.hpp"
#include "ovfit/error.hpp"

namespace ovfit {

void validate_config(const ForestConfig& cfg) {
    if (cfg.n_trees < 1) throw Error("forest config: n_trees must be >= 1");
    if (cfg.min_samples_leaf < 1) throw Error("forest config: min_samples_leaf must be >= 1");
    if (cfg.min_samples_split < 2) throw Error("forest config: min_samples_split must be >= 2");
    if (!(cfg.feature_fraction > 0.0 && cfg.feature_fraction <= 1.0))
        throw Error("forest config: feature_fraction must be in (0, 1]");
}

namespace {

void check_matrix(const Matrix& X, std::span<const double> y) {
    if (X.empty()) throw Error("training data must be non-empty");
    if (y.size() != X.size()) throw Error("X and y lengths differ");
    const std::size_t width = X.front().size();
    if (width == 0) throw Error("samples must have at least one feature");
    for (const auto& row : X)
        if (row.size() != width) throw Error("ragged sample matrix");
}

bool constant_targets(std::span<const double> y, std::span<const std::size_t> idx) {
    for (const std::size_t i : idx)
        if (y[i] != y[idx.front()]) return false;
    return true;
}

// Mean over a subset. Pure subsets return the shared value exactly; mixed
// subsets accumulate in sorted order so the result does not depend on how
// the caller ordered the samples.
double subset_mean(std::span<const double> y, std::span<const std::size_t> idx) {
    if (constant_targets(y, idx)) return y[idx.front()];
    std::vector<double> vals;
    vals.reserve(idx.size());
    for (const std::size_t i : idx) vals.push_back(y[i]);
    std::sort(vals.begin(), vals.end());
    double sum = 0.0;
    for (const double v : vals) sum += v;
    return sum / static_cast<double>(vals.size());
}

// Split search over an index subset. `features` must be ascending and
// unique; combined with ascending threshold enumeration and a strict
// improvement test this realizes the (feature, threshold) tie-break.
std::optional<Split> best_split_subset(const Matrix& X, std::span<const double> y,
                                       std::span<const std::size_t> idx,
                                       std::span<const std::size_t> features,
                                       std::size_t min_samples_leaf) {
    const std::size_t n = idx.size();
    if (n < 2) return std::nullopt;
    if (constant_targets(y, idx)) return std::nullopt;

    std::optional<Split> best;
    std::vector<std::pair<double, double>> vals(n);  // (feature value, target)
    for (const std::size_t f : features) {
        for (std::size_t i = 0; i < n; ++i) vals[i] = {X[idx[i]][f], y[idx[i]]};
        // Sorting by (value, target) fixes the accumulation order inside
        // runs of equal feature values, keeping scores permutation-invariant.
        std::sort(vals.begin(), vals.end());

        double total_sum = 0.0, total_sq = 0.0;
        for (const auto& [v, t] : vals) {
            (void)v;
            total_sum += t;
            total_sq += t * t;
        }
        double left_sum = 0.0, left_sq = 0.0;
        for (std::size_t cut = 1; cut < n; ++cut) {
            const double t = vals[cut - 1].second;
            left_sum += t;
            left_sq += t * t;
            const double lo = vals[cut - 1].first;
            const double hi = vals[cut].first;
            if (!(lo < hi)) continue;  // inside a run of equal values
            const double thr = (lo + hi) * 0.5;
            if (!(thr < hi)) continue;  // midpoint rounded onto hi; cut would not separate
            if (cut < min_samples_leaf || n - cut < min_samples_leaf) continue;
            const double nl = static_cast<double>(cut);
            const double nr = static_cast<double>(n - cut);
            const double right_sum = total_sum - left_sum;
            const double right_sq = total_sq - left_sq;
            const double score =
                (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
            if (!best || score < best->score) best = Split{f, thr, score};
        }
    }
    return best;
}

struct TreeBuilder {
    const Matrix& X;
    std::span<const double> y;
    const ForestConfig& cfg;
    SplitMix64& rng;
    std::size_t n_features;
    std::vector<std::size_t> all_features;
    std::vector<TreeNode> nodes;

    std::size_t features_per_node() const {
        if (cfg.feature_fraction >= 1.0) return n_features;
        const auto k = static_cast<std::size_t>(
            std::ceil(cfg.feature_fraction * static_cast<double>(n_features)));
        return std::clamp<std::size_t>(k, 1, n_features);
    }

    // Partial Fisher-Yates draw of k distinct features; skipped entirely at
    // feature_fraction 1, so full-feature training consumes no randomness.
    std::vector<std::size_t> draw_features() {
        const std::size_t k = features_per_node();
        if (k == n_features) return all_features;
        std::vector<std::size_t> pool = all_features;
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    std::int32_t build(std::vector<std::size_t> idx, int depth) {
        const auto id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        nodes[id].n_samples = idx.size();

        const bool depth_capped = cfg.max_depth >= 0 && depth >= cfg.max_depth;
        std::optional<Split> split;
        if (!depth_capped && idx.size() >= cfg.min_samples_split) {
            const auto features = draw_features();
            split = best_split_subset(X, y, idx, features, cfg.min_samples_leaf);
        }
        if (!split) {
            nodes[id].value = subset_mean(y, idx);
            return id;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (const std::size_t i : idx)
            (X[i][split->feature] <= split->threshold ? left_idx : right_idx).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        nodes[id].feature = static_cast<std::int32_t>(split->feature);
        nodes[id].threshold = split->threshold;
        nodes[id].left = build(std::move(left_idx), depth + 1);
        nodes[id].right = build(std::move(right_idx), depth + 1);
        return id;
    }
};

}  // namespace

std::optional<Split> best_split(const Matrix& X, std::span<const double> y,
                                std::span<const std::size_t> candidate_features,
                                std::size_t min_samples_leaf) {
    check_matrix(X, y);
    if (min_samples_leaf < 1) throw Error("min_samples_leaf must be >= 1");
    std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());
    if (features.empty()) throw Error("candidate feature set is empty");
    for (const std::size_t f : features)
        if (f >= X.front().size()) throw Error("candidate feature index out of range");
    std::vector<std::size_t> idx(X.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return best_split_subset(X, y, idx, features, min_samples_leaf);
}

RegressionTree train_tree(const Matrix& X, std::span<const double> y, const ForestConfig& cfg,
                          SplitMix64& rng) {
    validate_config(cfg);
    check_matrix(X, y);
    TreeBuilder builder{X, y, cfg, rng, X.front().size(), {}, {}};
    builder.all_features.resize(builder.n_features);
    std::iota(builder.all_features.begin(), builder.all_features.end(), std::size_t{0});
    std::vector<std::size_t> root(X.size());
    std::iota(root.begin(), root.end(), std::size_t{0});
    builder.build(std::move(root), 0);
    RegressionTree tree;
    tree.nodes = std::move(builder.nodes);
    return tree;
}

RandomForest train_forest(const Matrix& X, std::span<const double> y, const ForestConfig& cfg,
                          std::vector<std::string> feature_names, std::string target_name,
                          unsigned n_threads) {
    validate_config(cfg);
    check_matrix(X, y);
    if (feature_names.size() != X.front().size())
        throw Error("feature_names length does not match the sample width");

    RandomForest forest;
    forest.config = cfg;
    forest.feature_names = std::move(feature_names);
    forest.target_name = std::move(target_name);
    forest.trees.resize(cfg.n_trees);

    const std::size_t n = X.size();
    auto build_one = [&](std::size_t i) {
        SplitMix64 rng(derive_seed(cfg.seed, i));
        if (cfg.bootstrap) {
            Matrix xb;
            xb.reserve(n);
            std::vector<double> yb;
            yb.reserve(n);
            for (std::size_t s = 0; s < n; ++s) {
                const auto pick = static_cast<std::size_t>(rng.next_below(n));
                xb.push_back(X[pick]);
                yb.push_back(y[pick]);
            }
            forest.trees[i] = train_tree(xb, yb, cfg, rng);
        } else {
            forest.trees[i] = train_tree(X, y, cfg, rng);
        }
    };

    unsigned workers = n_threads != 0 ? n_threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, cfg.n_trees));

    if (workers <= 1) {
        for (std::size_t i = 0; i < cfg.n_trees; ++i) build_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cfg.n_trees) return;
                try {
                    build_one(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    return forest;
}

double RegressionTree::predict(std::span<const double> x) const {
    if (nodes.empty()) throw Error("cannot predict with an empty tree");
    const TreeNode* node = &nodes.front();
    while (node->feature >= 0) {
        const auto f = static_cast<std::size_t>(node->feature);
        if (f >= x.size()) throw Error("prediction input is narrower than the tree expects");
        node = x[f] <= node->threshold ? &nodes[node->left] : &nodes[node->right];
    }
    return node->value;
}

double predict(const RandomForest& f, std::span<const double> x) {
    if (x.size() != f.feature_names.size())
        throw Error("prediction input has " + std::to_string(x.size()) + " features; model expects " +
                    std::to_string(f.feature_names.size()));
    if (f.trees.empty()) throw Error("forest has no trees");
    double sum = 0.0;
    for (const auto& tree : f.trees) sum += tree.predict(x);
    return sum / static_cast<double>(f.trees.size());
}

std::vector<double> predict_batch(const RandomForest& f, const Matrix& X) {
    std::vector<double> out;
    out.reserve(X.size());
    for (const auto& row : X) out.push_back(predict(f, row));
    return out;
}

namespace detail {

namespace {

nlohmann::json node_to_json(const RegressionTree& t, std::int32_t i) {
    const TreeNode& n = t.nodes.at(static_cast<std::size_t>(i));
    nlohmann::json j;
    j["n"] = n.n_samples;
    if (n.feature < 0) {
        j["value"] = n.value;
        return j;
    }
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(t, n.left);
    j["right"] = node_to_json(t, n.right);
    return j;
}

std::int32_t node_from_json(const nlohmann::json& j, RegressionTree& t, std::size_t width) {
    const auto id = static_cast<std::int32_t>(t.nodes.size());
    t.nodes.emplace_back();
    t.nodes[id].n_samples = j.at("n").get<std::uint64_t>();
    if (j.contains("value")) {
        t.nodes[id].value = j.at("value").get<double>();
        return id;
    }
    const auto feature = j.at("feature").get<std::int32_t>();
    if (feature < 0 || static_cast<std::size_t>(feature) >= width)
        throw Error("model json: node feature index out of range");
    t.nodes[id].feature = feature;
    t.nodes[id].threshold = j.at("threshold").get<double>();
    t.nodes[id].left = node_from_json(j.at("left"), t, width);
    t.nodes[id].right = node_from_json(j.at("right"), t, width);
    return id;
}

}  // namespace

nlohmann::json forest_to_json(const RandomForest& f) {
    nlohmann::json config;
    config["n_trees"] = f.config.n_trees;
    config["max_depth"] = f.config.max_depth;
    config["min_samples_leaf"] = f.config.min_samples_leaf;
    config["min_samples_split"] = f.config.min_samples_split;
    config["feature_fraction"] = f.config.feature_fraction;
    config["bootstrap"] = f.config.bootstrap;
    config["seed"] = f.config.seed;

    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : f.trees) trees.push_back(node_to_json(t, 0));

    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["config"] = std::move(config);
    j["feature_names"] = f.feature_names;
    j["target_name"] = f.target_name;
    j["trees"] = std::move(trees);
    return j;
}

RandomForest forest_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != kFormatVersion)
            throw Error("model json: unsupported format_version");
        RandomForest f;
        const auto& config = j.at("config");
        f.config.n_trees = config.at("n_trees").get<std::size_t>();
        f.config.max_depth = config.at("max_depth").get<int>();
        f.config.min_samples_leaf = config.at("min_samples_leaf").get<std::size_t>();
        f.config.min_samples_split = config.at("min_samples_split").get<std::size_t>();
        f.config.feature_fraction = config.at("feature_fraction").get<double>();
        f.config.bootstrap = config.at("bootstrap").get<bool>();
        f.config.seed = config.at("seed").get<std::uint64_t>();
        f.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        if (f.feature_names.empty()) throw Error("model json: feature_names is empty");
        f.target_name = j.at("target_name").get<std::string>();
        for (const auto& jt : j.at("trees")) {
            RegressionTree tree;
            node_from_json(jt, tree, f.feature_names.size());
            f.trees.push_back(std::move(tree));
        }
        if (f.trees.size() != f.config.n_trees)
            throw Error("model json: tree count does not match config.n_trees");
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model json: ") + e.what());
    }
}

}  // namespace detail

std::string serialize_forest(const RandomForest& f) {
    return detail::forest_to_json(f).dump(2) + "\n";
}

RandomForest parse_forest(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model json: ") + e.what());
    }
    return detail::forest_from_json(j);
}

}  // namespace ovfit
