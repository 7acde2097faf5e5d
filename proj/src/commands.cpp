#include "ovfit/commands.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json_detail.hpp"
#include "ovfit/advisor.hpp"
#include "ovfit/capacity.hpp"
#include "ovfit/dataset.hpp"
#include "ovfit/error.hpp"
#include "ovfit/io.hpp"
#include "ovfit/manifest.hpp"

namespace ovfit::cli {

namespace {

std::string join_u64(const std::vector<std::uint64_t>& values) {
    std::string out;
    for (const auto v : values) {
        if (!out.empty()) out += ",";
        out += std::to_string(v);
    }
    return out;
}

std::string fmt_fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

nlohmann::json estimate_to_json(const ResourceEstimate& est) {
    return {{"luts", est.luts},       {"ffs", est.ffs},     {"mem_bits", est.mem_bits},
            {"wires", est.wires},     {"fanout", est.fanout}, {"bus_exceeded", est.bus_exceeded}};
}

nlohmann::json verdict_to_json(const Verdict& v) {
    nlohmann::json usage = nlohmann::json::array();
    for (const auto& u : v.usage) {
        usage.push_back({{"resource", u.resource},
                         {"required", u.required},
                         {"available", u.available},
                         {"utilization_percent", u.utilization_percent}});
    }
    return {{"fits", v.fits}, {"limiting_resource", v.limiting_resource}, {"usage", usage}};
}

nlohmann::json profile_to_json(const DeviceProfile& p) {
    return {{"name", p.name},
            {"logic_cells", p.logic_cells},
            {"flip_flops", p.flip_flops},
            {"dist_mem_bits", p.dist_mem_bits}};
}

void write_json_output(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

void print_verdict(std::ostream& out, const Verdict& v, const DeviceProfile& profile,
                   double ceiling) {
    out << "capacity check against " << profile.name << " (ceiling " << to_decimal_string(ceiling)
        << "%)\n";
    out << "  " << std::left << std::setw(15) << "resource" << std::right << std::setw(12)
        << "required" << std::setw(12) << "available" << std::setw(14) << "utilization"
        << "\n";
    for (const auto& u : v.usage) {
        out << "  " << std::left << std::setw(15) << u.resource << std::right << std::setw(12)
            << u.required << std::setw(12) << u.available << std::setw(13)
            << fmt_fixed(u.utilization_percent, 2) << "%\n";
    }
    out << "  limiting resource: " << v.limiting_resource << "\n";
    out << "  verdict: " << (v.fits ? "fits" : "does not fit") << "\n";
}

}  // namespace

std::vector<OverlayConfig> synth_configs(const SynthOptions& o) {
    if (o.sizes.empty()) throw Error("synth: at least one size is required");
    if (o.fanouts.empty()) throw Error("synth: at least one fanout is required");
    if (o.repeats < 1) throw Error("synth: repeats must be >= 1");
    std::vector<OverlayConfig> configs;
    configs.reserve(o.sizes.size() * o.fanouts.size() * o.repeats);
    for (const auto size : o.sizes)
        for (const auto fanout : o.fanouts)
            for (std::uint64_t r = 0; r < o.repeats; ++r)
                configs.push_back({size, fanout, o.bus_width});
    return configs;
}

int cmd_synth(const SynthOptions& o, std::ostream& out) {
    if (o.out_csv.empty()) throw Error("synth: --out is required");
    const CostCoefficients co =
        o.coeff_file.empty() ? CostCoefficients::defaults() : load_coefficients(o.coeff_file);
    const auto configs = synth_configs(o);
    const auto records = generate_synthetic_dataset(configs, co, o.noise, o.seed);

    RunManifest m;
    m.command = "synth";
    m.inputs = {{"coefficients", o.coeff_file.empty() ? "<builtin-defaults>" : o.coeff_file}};
    m.seed = o.seed;
    m.parameters = {
        {"sizes", join_u64(o.sizes)},         {"fanouts", join_u64(o.fanouts)},
        {"repeats", std::to_string(o.repeats)}, {"bus_width", std::to_string(o.bus_width)},
        {"noise", to_decimal_string(o.noise)},
    };
    save_records(o.out_csv, records, manifest_comment_lines(m));
    out << "wrote " << records.size() << " synthetic records to " << o.out_csv << "\n";
    return kExitOk;
}

int cmd_train(const TrainOptions& o, std::ostream& out) {
    if (o.records_csv.empty()) throw Error("train: --records is required");
    if (o.out_model.empty()) throw Error("train: --out is required");
    const auto records = load_records(o.records_csv);
    if (records.empty()) throw Error("train: dataset is empty: " + o.records_csv);

    std::vector<Target> targets;
    for (const auto& name : o.targets) {
        const auto t = parse_target(name);
        if (!t)
            throw Error("unknown target '" + name +
                        "' (valid targets: luts, ffs, mem_bits, max_fanout)");
        targets.push_back(*t);
    }
    const ModelBundle bundle = train_bundle(records, targets, o.forest, o.threads);

    std::string trained_names;
    for (const auto& [t, forest] : bundle.forests) {
        (void)forest;
        if (!trained_names.empty()) trained_names += ",";
        trained_names += target_name(t);
    }

    RunManifest m;
    m.command = "train";
    m.inputs = {{"records", o.records_csv}};
    m.seed = o.forest.seed;
    m.parameters = {
        {"targets", trained_names},
        {"n_trees", std::to_string(o.forest.n_trees)},
        {"max_depth", std::to_string(o.forest.max_depth)},
        {"min_samples_leaf", std::to_string(o.forest.min_samples_leaf)},
        {"min_samples_split", std::to_string(o.forest.min_samples_split)},
        {"feature_fraction", to_decimal_string(o.forest.feature_fraction)},
        {"bootstrap", o.forest.bootstrap ? "true" : "false"},
    };
    save_bundle(o.out_model, bundle, m);
    out << "trained " << bundle.forests.size() << " forests (" << trained_names << ") on "
        << records.size() << " records -> " << o.out_model << "\n";
    return kExitOk;
}

int cmd_predict(const PredictOptions& o, std::ostream& out) {
    if (o.model.empty()) throw Error("predict: --model is required");
    const ModelBundle bundle = load_bundle(o.model);
    const OverlayConfig cfg{o.num_ste, o.fanout_limit, o.bus_width};
    const BundlePrediction pred = predict_with_bundle(bundle, cfg);

    out << "prediction for num_ste=" << cfg.num_ste << " fanout_limit=" << cfg.fanout_limit
        << "\n";
    for (const Target t : kAllTargets) {
        const auto it = pred.raw.find(t);
        if (it == pred.raw.end()) continue;
        std::uint64_t rounded = 0;
        switch (t) {
            case Target::luts: rounded = pred.estimate.luts; break;
            case Target::ffs: rounded = pred.estimate.ffs; break;
            case Target::mem_bits: rounded = pred.estimate.mem_bits; break;
            case Target::max_fanout: rounded = pred.estimate.fanout; break;
        }
        out << "  " << std::left << std::setw(11) << target_name(t) << " "
            << to_decimal_string(it->second) << " (rounded up: " << rounded << ")\n";
    }
    if (pred.extrapolation_warning)
        out << "  warning: configuration is outside the training range; forests cannot"
               " extrapolate\n";

    if (!o.out_json.empty()) {
        RunManifest m;
        m.command = "predict";
        m.inputs = {{"model", o.model}};
        m.parameters = {{"num_ste", std::to_string(cfg.num_ste)},
                        {"fanout_limit", std::to_string(cfg.fanout_limit)},
                        {"bus_width", std::to_string(cfg.bus_width)}};
        nlohmann::json j;
        j["manifest"] = detail::manifest_to_json(m);
        j["config"] = {{"num_ste", cfg.num_ste},
                       {"fanout_limit", cfg.fanout_limit},
                       {"bus_width", cfg.bus_width}};
        nlohmann::json preds = nlohmann::json::object();
        for (const auto& [t, raw] : pred.raw) preds[target_name(t)] = raw;
        j["predictions"] = preds;
        j["estimate"] = estimate_to_json(pred.estimate);
        j["extrapolation_warning"] = pred.extrapolation_warning;
        write_json_output(o.out_json, j);
    }
    return kExitOk;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
    if (o.model.empty()) throw Error("evaluate: --model is required");
    if (o.records_csv.empty()) throw Error("evaluate: --records is required");
    const ModelBundle bundle = load_bundle(o.model);
    const auto records = load_records(o.records_csv);
    if (records.empty()) throw Error("evaluate: dataset is empty: " + o.records_csv);

    Matrix x;
    x.reserve(records.size());
    for (const auto& r : records) {
        const auto row = record_features(r);
        x.push_back({row[0], row[1]});
    }

    RunManifest m;
    m.command = "evaluate";
    m.inputs = {{"model", o.model}, {"records", o.records_csv}};

    std::ostringstream report;
    report << "resource prediction report\n" << manifest_text_block(m) << "\n";

    std::vector<std::string> csv_lines = manifest_comment_lines(m);
    csv_lines.push_back("target,num_ste,fanout_limit,actual,predicted,error,error_pct");

    for (const Target t : kAllTargets) {
        const auto it = bundle.forests.find(t);
        if (it == bundle.forests.end()) continue;
        const auto preds = predict_batch(it->second, x);
        std::vector<double> actual;
        actual.reserve(records.size());
        for (const auto& r : records) actual.push_back(target_value(r, t));
        const Metrics metrics = compute_metrics(preds, actual);

        report << "target: " << target_name(t) << "\n";
        report << "  " << std::right << std::setw(10) << "num_ste" << std::setw(14)
               << "fanout_limit" << std::setw(16) << "actual" << std::setw(18) << "predicted"
               << std::setw(16) << "error" << std::setw(12) << "error_pct"
               << "\n";
        for (std::size_t i = 0; i < records.size(); ++i) {
            const double error = preds[i] - actual[i];
            const std::string pct =
                actual[i] != 0.0 ? fmt_fixed(100.0 * error / actual[i], 2) : "n/a";
            report << "  " << std::right << std::setw(10) << records[i].num_ste << std::setw(14)
                   << records[i].fanout_limit << std::setw(16)
                   << static_cast<std::uint64_t>(actual[i]) << std::setw(18) << fmt_fixed(preds[i], 2)
                   << std::setw(16) << fmt_fixed(error, 2) << std::setw(12) << pct << "\n";

            std::string csv_row = target_name(t);
            csv_row += "," + std::to_string(records[i].num_ste);
            csv_row += "," + std::to_string(records[i].fanout_limit);
            csv_row += "," + std::to_string(static_cast<std::uint64_t>(actual[i]));
            csv_row += "," + to_decimal_string(preds[i]);
            csv_row += "," + to_decimal_string(error);
            csv_row += ",";
            if (actual[i] != 0.0) csv_row += to_decimal_string(100.0 * error / actual[i]);
            csv_lines.push_back(std::move(csv_row));
        }
        report << "  mae=" << to_decimal_string(metrics.mae)
               << " rmse=" << to_decimal_string(metrics.rmse) << " mape="
               << (metrics.mape ? fmt_fixed(*metrics.mape, 3) + "%" : std::string("n/a"))
               << " (n=" << metrics.n << ", mape_excluded=" << metrics.mape_excluded << ")\n\n";
    }

    if (o.out_report.empty()) {
        out << report.str();
    } else {
        write_text_file(o.out_report, report.str());
        out << "wrote report to " << o.out_report << "\n";
    }
    if (!o.out_csv.empty()) {
        std::string csv;
        for (const auto& line : csv_lines) csv += line + "\n";
        write_text_file(o.out_csv, csv);
        out << "wrote plot data to " << o.out_csv << "\n";
    }
    return kExitOk;
}

int cmd_gate(const GateOptions& o, std::ostream& out) {
    const bool has_direct = o.luts || o.ffs || o.mem_bits;
    const bool has_model = !o.model.empty();
    if (has_direct == has_model)
        throw Error(
            "gate: provide either --model with --num-ste/--fanout, or a direct estimate via "
            "--luts/--ffs/--mem-bits");

    RunManifest m;
    m.command = "gate";
    m.parameters = {{"profile", o.profile}, {"ceiling", to_decimal_string(o.ceiling)}};

    ResourceEstimate est;
    bool extrapolation = false;
    if (has_model) {
        if (!o.num_ste || !o.fanout_limit)
            throw Error("gate: --num-ste and --fanout are required with --model");
        const ModelBundle bundle = load_bundle(o.model);
        const OverlayConfig cfg{*o.num_ste, *o.fanout_limit, o.bus_width};
        const BundlePrediction pred = predict_with_bundle(bundle, cfg);
        est = pred.estimate;
        extrapolation = pred.extrapolation_warning;
        m.inputs = {{"model", o.model}};
        m.parameters.push_back({"num_ste", std::to_string(cfg.num_ste)});
        m.parameters.push_back({"fanout_limit", std::to_string(cfg.fanout_limit)});
    } else {
        est.luts = o.luts.value_or(0);
        est.ffs = o.ffs.value_or(0);
        est.mem_bits = o.mem_bits.value_or(0);
        m.parameters.push_back({"luts", std::to_string(est.luts)});
        m.parameters.push_back({"ffs", std::to_string(est.ffs)});
        m.parameters.push_back({"mem_bits", std::to_string(est.mem_bits)});
    }

    const DeviceProfile profile = resolve_profile(o.profile);
    const Verdict verdict = gate(est, profile, o.ceiling);
    print_verdict(out, verdict, profile, o.ceiling);
    if (extrapolation)
        out << "  warning: configuration is outside the training range; forests cannot"
               " extrapolate\n";

    if (!o.out_json.empty()) {
        nlohmann::json j;
        j["manifest"] = detail::manifest_to_json(m);
        j["estimate"] = estimate_to_json(est);
        j["profile"] = profile_to_json(profile);
        j["ceiling_percent"] = o.ceiling;
        j["verdict"] = verdict_to_json(verdict);
        if (has_model) j["extrapolation_warning"] = extrapolation;
        write_json_output(o.out_json, j);
    }
    return verdict.fits ? kExitOk : kExitDoesNotFit;
}

int cmd_recommend(const RecommendOptions& o, std::ostream& out) {
    if (o.model.empty()) throw Error("recommend: --model is required");
    const ModelBundle bundle = load_bundle(o.model);
    const DeviceProfile profile = resolve_profile(o.profile);
    const auto candidates = sweep_candidates(o.start, o.doublings, o.fanout_limit, o.bus_width);
    const Recommendation rec = recommend(candidates, bundle, profile, o.ceiling);

    out << "recommendation sweep against " << profile.name << " (ceiling "
        << to_decimal_string(o.ceiling) << "%)\n";
    out << "  " << std::right << std::setw(10) << "num_ste" << std::setw(8) << "fanout"
        << std::setw(12) << "luts" << std::setw(12) << "ffs" << std::setw(14) << "mem_bits"
        << std::setw(14) << "pred_fanout" << std::setw(11) << "max_util" << std::setw(6) << "fits"
        << std::setw(7) << "warn"
        << "\n";
    for (const auto& entry : rec.entries) {
        double max_util = 0.0;
        for (const auto& u : entry.verdict.usage)
            max_util = std::max(max_util, u.utilization_percent);
        out << "  " << std::right << std::setw(10) << entry.config.num_ste << std::setw(8)
            << entry.config.fanout_limit << std::setw(12) << entry.predicted.luts << std::setw(12)
            << entry.predicted.ffs << std::setw(14) << entry.predicted.mem_bits << std::setw(14)
            << entry.predicted.fanout << std::setw(10) << fmt_fixed(max_util, 2) << "%"
            << std::setw(6) << (entry.verdict.fits ? "yes" : "no") << std::setw(7)
            << (entry.extrapolation_warning ? "yes" : "no") << "\n";
    }
    if (rec.best) {
        const auto& best = rec.entries[*rec.best];
        out << "largest feasible configuration: num_ste=" << best.config.num_ste
            << " fanout_limit=" << best.config.fanout_limit << " (limiting resource "
            << best.verdict.limiting_resource << ")\n";
        if (best.extrapolation_warning)
            out << "  warning: best candidate is outside the training range\n";
    } else {
        out << "no candidate configuration fits within the ceiling\n";
    }

    if (!o.out_json.empty()) {
        RunManifest m;
        m.command = "recommend";
        m.inputs = {{"model", o.model}};
        m.parameters = {{"profile", o.profile},
                        {"ceiling", to_decimal_string(o.ceiling)},
                        {"start", std::to_string(o.start)},
                        {"doublings", std::to_string(o.doublings)},
                        {"fanout_limit", std::to_string(o.fanout_limit)},
                        {"bus_width", std::to_string(o.bus_width)}};
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& entry : rec.entries) {
            nlohmann::json raw = nlohmann::json::object();
            for (const auto& [t, v] : entry.raw) raw[target_name(t)] = v;
            entries.push_back({{"config",
                                {{"num_ste", entry.config.num_ste},
                                 {"fanout_limit", entry.config.fanout_limit},
                                 {"bus_width", entry.config.bus_width}}},
                               {"predicted", estimate_to_json(entry.predicted)},
                               {"raw", raw},
                               {"verdict", verdict_to_json(entry.verdict)},
                               {"extrapolation_warning", entry.extrapolation_warning}});
        }
        nlohmann::json j;
        j["manifest"] = detail::manifest_to_json(m);
        j["entries"] = std::move(entries);
        if (rec.best)
            j["best"] = *rec.best;
        else
            j["best"] = nullptr;
        write_json_output(o.out_json, j);
    }
    return kExitOk;
}

}  // namespace ovfit::cli
