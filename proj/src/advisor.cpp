#include "ovfit/advisor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "json_detail.hpp"
#include "ovfit/error.hpp"
#include "ovfit/io.hpp"

namespace ovfit {

namespace {

constexpr double kCountLimit = 9223372036854775808.0;  // 2^63

double config_feature(const OverlayConfig& cfg, const std::string& name) {
    if (name == "num_ste") return static_cast<double>(cfg.num_ste);
    if (name == "fanout_limit") return static_cast<double>(cfg.fanout_limit);
    if (name == "bus_width") return static_cast<double>(cfg.bus_width);
    throw Error("feature mismatch: model feature '" + name +
                "' is not derivable from an overlay configuration");
}

std::uint64_t ceil_count(double v, const std::string& what) {
    if (!(v >= 0.0)) throw Error("predicted " + what + " is negative");
    if (!(v < kCountLimit)) throw Error("predicted " + what + " exceeds 2^63");
    return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace

ModelBundle train_bundle(const std::vector<Record>& records, const std::vector<Target>& targets,
                         const ForestConfig& cfg, unsigned n_threads) {
    if (records.empty()) throw Error("training dataset is empty");
    if (targets.empty()) throw Error("at least one training target is required");
    validate_config(cfg);

    Matrix x;
    x.reserve(records.size());
    for (const auto& r : records) {
        const auto row = record_features(r);
        x.push_back({row[0], row[1]});
    }

    ModelBundle bundle;
    bundle.feature_names.assign(kRecordFeatureNames.begin(), kRecordFeatureNames.end());
    bundle.training_range.resize(bundle.feature_names.size());
    for (std::size_t c = 0; c < bundle.feature_names.size(); ++c) {
        FeatureRange range{std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
        for (const auto& row : x) {
            range.min = std::min(range.min, row[c]);
            range.max = std::max(range.max, row[c]);
        }
        bundle.training_range[c] = range;
    }

    bool wanted[4] = {false, false, false, false};
    for (const Target t : targets) wanted[static_cast<std::size_t>(t)] = true;
    for (const Target t : kAllTargets) {
        if (!wanted[static_cast<std::size_t>(t)]) continue;
        std::vector<double> y;
        y.reserve(records.size());
        for (const auto& r : records) y.push_back(target_value(r, t));
        ForestConfig per_target = cfg;
        per_target.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
        bundle.forests.emplace(
            t, train_forest(x, y, per_target, bundle.feature_names, target_name(t), n_threads));
    }
    return bundle;
}

BundlePrediction predict_with_bundle(const ModelBundle& bundle, const OverlayConfig& cfg) {
    validate_config(cfg);
    if (bundle.feature_names.empty() ||
        bundle.feature_names.size() != bundle.training_range.size())
        throw Error("model bundle is malformed: feature metadata mismatch");
    if (bundle.forests.empty()) throw Error("model bundle has no forests");

    std::vector<double> x;
    x.reserve(bundle.feature_names.size());
    bool outside = false;
    for (std::size_t i = 0; i < bundle.feature_names.size(); ++i) {
        const double v = config_feature(cfg, bundle.feature_names[i]);
        const FeatureRange& range = bundle.training_range[i];
        if (v < range.min || v > range.max) outside = true;
        x.push_back(v);
    }

    BundlePrediction p;
    p.extrapolation_warning = outside;
    for (const auto& [t, forest] : bundle.forests) {
        const double raw = predict(forest, x);
        p.raw[t] = raw;
        switch (t) {
            case Target::luts: p.estimate.luts = ceil_count(raw, target_name(t)); break;
            case Target::ffs: p.estimate.ffs = ceil_count(raw, target_name(t)); break;
            case Target::mem_bits: p.estimate.mem_bits = ceil_count(raw, target_name(t)); break;
            case Target::max_fanout: p.estimate.fanout = ceil_count(raw, target_name(t)); break;
        }
    }
    return p;
}

std::vector<OverlayConfig> sweep_candidates(std::uint64_t start, unsigned doublings,
                                            std::uint64_t fanout_limit, std::uint64_t bus_width) {
    if (start < 1) throw Error("sweep start must be >= 1");
    std::vector<OverlayConfig> out;
    out.reserve(doublings + 1);
    for (unsigned i = 0; i <= doublings; ++i) {
        if (i >= 64 || start > (std::numeric_limits<std::uint64_t>::max() >> i))
            throw Error("sweep overflows a 64-bit num_ste");
        const OverlayConfig cfg{start << i, fanout_limit, bus_width};
        validate_config(cfg);
        out.push_back(cfg);
    }
    return out;
}

Recommendation recommend(std::vector<OverlayConfig> candidates, const ModelBundle& bundle,
                         const DeviceProfile& profile, double ceiling_percent) {
    if (candidates.empty()) throw Error("recommend: candidate list is empty");
    for (const Target t : {Target::luts, Target::ffs, Target::mem_bits}) {
        if (!bundle.forests.count(t))
            throw Error("model bundle lacks a forest for gated target '" + target_name(t) + "'");
    }
    std::sort(candidates.begin(), candidates.end(), [](const OverlayConfig& a, const OverlayConfig& b) {
        return std::tie(a.num_ste, a.fanout_limit, a.bus_width) <
               std::tie(b.num_ste, b.fanout_limit, b.bus_width);
    });

    Recommendation rec;
    rec.entries.reserve(candidates.size());
    for (const auto& cfg : candidates) {
        auto pred = predict_with_bundle(bundle, cfg);
        RankedCandidate entry;
        entry.config = cfg;
        entry.predicted = pred.estimate;
        entry.raw = std::move(pred.raw);
        entry.verdict = gate(pred.estimate, profile, ceiling_percent);
        entry.extrapolation_warning = pred.extrapolation_warning;
        rec.entries.push_back(std::move(entry));
    }
    // Entries are ascending (num_ste, fanout_limit): keeping the first entry
    // of the maximal feasible num_ste realizes the lower-fanout tie-break.
    for (std::size_t i = 0; i < rec.entries.size(); ++i) {
        if (!rec.entries[i].verdict.fits) continue;
        if (!rec.best || rec.entries[i].config.num_ste > rec.entries[*rec.best].config.num_ste)
            rec.best = i;
    }
    return rec;
}

std::string serialize_bundle(const ModelBundle& bundle, const RunManifest& manifest) {
    if (bundle.feature_names.empty() ||
        bundle.feature_names.size() != bundle.training_range.size())
        throw Error("model bundle is malformed: feature metadata mismatch");
    if (bundle.forests.empty()) throw Error("model bundle has no forests");

    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["manifest"] = detail::manifest_to_json(manifest);
    j["feature_names"] = bundle.feature_names;
    nlohmann::json ranges = nlohmann::json::object();
    for (std::size_t i = 0; i < bundle.feature_names.size(); ++i) {
        ranges[bundle.feature_names[i]] = {{"min", bundle.training_range[i].min},
                                           {"max", bundle.training_range[i].max}};
    }
    j["training_range"] = std::move(ranges);
    nlohmann::json forests = nlohmann::json::object();
    for (const auto& [t, forest] : bundle.forests)
        forests[target_name(t)] = detail::forest_to_json(forest);
    j["forests"] = std::move(forests);
    return j.dump(2) + "\n";
}

ModelBundle parse_bundle(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model bundle json: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != kFormatVersion)
            throw Error("model bundle json: unsupported format_version");
        ModelBundle bundle;
        bundle.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        if (bundle.feature_names.empty())
            throw Error("model bundle json: feature_names is empty");
        const auto& ranges = j.at("training_range");
        for (const auto& name : bundle.feature_names) {
            if (!ranges.contains(name))
                throw Error("model bundle json: training_range lacks feature '" + name + "'");
            FeatureRange range;
            range.min = ranges.at(name).at("min").get<double>();
            range.max = ranges.at(name).at("max").get<double>();
            if (!(range.min <= range.max))
                throw Error("model bundle json: empty training_range for '" + name + "'");
            bundle.training_range.push_back(range);
        }
        for (const auto& [key, jf] : j.at("forests").items()) {
            const auto t = parse_target(key);
            if (!t) throw Error("model bundle json: unknown target '" + key + "'");
            RandomForest forest = detail::forest_from_json(jf);
            if (forest.feature_names != bundle.feature_names)
                throw Error("model bundle json: forest '" + key +
                            "' disagrees with the bundle feature_names");
            bundle.forests.emplace(*t, std::move(forest));
        }
        if (bundle.forests.empty()) throw Error("model bundle json: no forests");
        return bundle;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model bundle json: ") + e.what());
    }
}

ModelBundle load_bundle(const std::string& path) {
    try {
        return parse_bundle(read_text_file(path));
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

void save_bundle(const std::string& path, const ModelBundle& bundle, const RunManifest& manifest) {
    write_text_file(path, serialize_bundle(bundle, manifest));
}

}  // namespace ovfit
