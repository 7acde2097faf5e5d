#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "ovfit/advisor.hpp"
#include "ovfit/commands.hpp"
#include "ovfit/dataset.hpp"
#include "ovfit/error.hpp"
#include "ovfit/io.hpp"
#include "ovfit/overlay.hpp"

using namespace ovfit;

namespace {

const std::string kTmp = "cli_tmp";

std::string tmp_path(const std::string& name) { return kTmp + "/" + name; }

int run_cli(const std::string& args, const std::string& capture = "") {
    std::filesystem::create_directories(kTmp);
    std::string cmd = std::string(OVFIT_CLI_PATH) + " " + args;
    cmd += capture.empty() ? " >/dev/null 2>&1" : " >" + capture + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

double parse_double(const std::string& tok) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    REQUIRE(ec == std::errc());
    REQUIRE(ptr == tok.data() + tok.size());
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

}  // namespace

TEST_CASE("synth: zero noise rows equal the analytic estimates") {
    const auto csv = tmp_path("zero_noise.csv");
    CHECK(run_cli("synth --sizes 1024,2048,4096 --fanouts 8,16 --noise 0 --out " + csv) == 0);
    const auto records = load_records(csv);

    cli::SynthOptions o;
    o.sizes = {1024, 2048, 4096};
    o.fanouts = {8, 16};
    const auto configs = cli::synth_configs(o);
    REQUIRE(records.size() == configs.size());
    const auto co = CostCoefficients::defaults();
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto est = estimate_resources(configs[i], co);
        CHECK(records[i].luts == est.luts);
        CHECK(records[i].ffs == est.ffs);
        CHECK(records[i].mem_bits == est.mem_bits);
        CHECK(records[i].max_fanout == est.fanout);
    }
}

TEST_CASE("synth: identical invocations write identical files") {
    const auto a = tmp_path("synth_a.csv"), b = tmp_path("synth_b.csv");
    const std::string args = "synth --sizes 1024,2048 --fanouts 16 --noise 0.1 --seed 9 --out ";
    CHECK(run_cli(args + a) == 0);
    CHECK(run_cli(args + b) == 0);
    CHECK(read_text_file(a) == read_text_file(b));
}

TEST_CASE("synth: CLI output equals the library call") {
    const auto csv = tmp_path("synth_lib.csv");
    CHECK(run_cli("synth --sizes 1024,4096 --fanouts 4,32 --repeats 3 --noise 0.1 --seed 7 --out " +
                  csv) == 0);
    cli::SynthOptions o;
    o.sizes = {1024, 4096};
    o.fanouts = {4, 32};
    o.repeats = 3;
    o.noise = 0.1;
    o.seed = 7;
    const auto want =
        generate_synthetic_dataset(cli::synth_configs(o), CostCoefficients::defaults(), 0.1, 7);
    CHECK(load_records(csv) == want);
}

TEST_CASE("train: exact model reproduces its training rows") {
    const auto csv = tmp_path("train_exact.csv");
    const auto model = tmp_path("train_exact.json");
    CHECK(run_cli("synth --sizes 1024,2048,4096 --fanouts 16 --noise 0 --out " + csv) == 0);
    CHECK(run_cli("train --records " + csv + " --trees 1 --no-bootstrap --out " + model) == 0);
    const auto bundle = load_bundle(model);
    const auto records = load_records(csv);
    Matrix x;
    for (const auto& r : records) {
        const auto row = record_features(r);
        x.push_back({row[0], row[1]});
    }
    for (const Target t : kAllTargets) {
        const auto preds = predict_batch(bundle.forests.at(t), x);
        for (std::size_t i = 0; i < records.size(); ++i)
            CHECK(preds[i] == target_value(records[i], t));
    }
}

TEST_CASE("evaluate: exact-fit model on its own training set has zero error everywhere") {
    const auto csv = tmp_path("eval_exact.csv");
    const auto model = tmp_path("eval_exact.json");
    CHECK(run_cli("synth --sizes 1024,2048,4096 --fanouts 8,16 --noise 0 --out " + csv) == 0);
    CHECK(run_cli("train --records " + csv + " --trees 1 --no-bootstrap --out " + model) == 0);
    const auto plot = tmp_path("eval_exact_plot.csv");
    CHECK(run_cli("evaluate --model " + model + " --records " + csv + " --out " +
                  tmp_path("eval_exact_report.txt") + " --csv " + plot) == 0);
    std::size_t rows = 0;
    for (const auto& line : split(read_text_file(plot), '\n')) {
        if (line.empty() || line[0] == '#' || line.rfind("target,", 0) == 0) continue;
        const auto cells = split(line, ',');
        REQUIRE(cells.size() == 7);
        CHECK(parse_double(cells[5]) == 0.0);  // error column
        ++rows;
    }
    CHECK(rows == 4 * 6);  // four targets, six records
    const auto report = read_text_file(tmp_path("eval_exact_report.txt"));
    CHECK(report.find("mae=0 rmse=0 mape=0.000%") != std::string::npos);
}

TEST_CASE("train: unknown target exits 1 and lists the valid ones") {
    const auto csv = tmp_path("train_badtarget.csv");
    CHECK(run_cli("synth --sizes 1024,2048 --noise 0 --out " + csv) == 0);
    const auto err = tmp_path("train_badtarget.err");
    CHECK(run_cli("train --records " + csv + " --targets bram --out " +
                      tmp_path("never_written.json"),
                  err) == 1);
    const auto message = read_text_file(err);
    CHECK(message.find("bram") != std::string::npos);
    CHECK(message.find("luts") != std::string::npos);
    CHECK(message.find("max_fanout") != std::string::npos);
}

TEST_CASE("train: same seed twice writes byte-identical models") {
    const auto csv = tmp_path("train_det.csv");
    CHECK(run_cli("synth --sizes 1024,2048,4096 --fanouts 8,16 --repeats 3 --noise 0.05 "
                  "--seed 5 --out " +
                  csv) == 0);
    const auto m1 = tmp_path("det1.json"), m2 = tmp_path("det2.json");
    const std::string args = "train --records " + csv + " --trees 10 --seed 77 --out ";
    CHECK(run_cli(args + m1) == 0);
    CHECK(run_cli(args + m2) == 0);
    CHECK(read_text_file(m1) == read_text_file(m2));
}

TEST_CASE("gate: exit codes follow the fits/does-not-fit contract") {
    CHECK(run_cli("gate --luts 0 --ffs 0 --mem-bits 0") == 0);
    const auto out = tmp_path("gate600k.txt");
    CHECK(run_cli("gate --luts 600000 --ffs 0 --mem-bits 0", out) == 2);
    const auto text = read_text_file(out);
    CHECK(text.find("logic_cells") != std::string::npos);
    CHECK(text.find("does not fit") != std::string::npos);
    // boundary: exactly the capacities still fits
    CHECK(run_cli("gate --luts 504000 --ffs 461000 --mem-bits 6200000") == 0);
    CHECK(run_cli("gate --luts 504001 --ffs 0 --mem-bits 0") == 2);
    // errors are exit 1
    CHECK(run_cli("gate --luts 1 --profile bogus-board") == 1);
    CHECK(run_cli("gate") == 1);
}

TEST_CASE("evaluate: report sections in fixed target order; csv equals predict_batch") {
    const auto csv = tmp_path("eval_records.csv");
    const auto model = tmp_path("eval_model.json");
    CHECK(run_cli("synth --sizes 1024,2048,4096 --fanouts 8,16 --repeats 2 --noise 0.05 "
                  "--seed 3 --out " +
                  csv) == 0);
    CHECK(run_cli("train --records " + csv + " --trees 10 --seed 3 --out " + model) == 0);
    const auto report_path = tmp_path("eval_report.txt");
    const auto plot_path = tmp_path("eval_plot.csv");
    CHECK(run_cli("evaluate --model " + model + " --records " + csv + " --out " + report_path +
                  " --csv " + plot_path) == 0);

    const auto report = read_text_file(report_path);
    const auto p_luts = report.find("target: luts");
    const auto p_ffs = report.find("target: ffs");
    const auto p_mem = report.find("target: mem_bits");
    const auto p_fan = report.find("target: max_fanout");
    REQUIRE(p_luts != std::string::npos);
    REQUIRE(p_ffs != std::string::npos);
    REQUIRE(p_mem != std::string::npos);
    REQUIRE(p_fan != std::string::npos);
    CHECK(p_luts < p_ffs);
    CHECK(p_ffs < p_mem);
    CHECK(p_mem < p_fan);
    CHECK(report.find("run manifest:") != std::string::npos);
    CHECK(report.find("mae=") != std::string::npos);

    const auto bundle = load_bundle(model);
    const auto records = load_records(csv);
    Matrix x;
    for (const auto& r : records) {
        const auto row = record_features(r);
        x.push_back({row[0], row[1]});
    }
    std::map<std::string, std::vector<double>> csv_preds;
    for (const auto& line : split(read_text_file(plot_path), '\n')) {
        if (line.empty() || line[0] == '#' || line.rfind("target,", 0) == 0) continue;
        const auto cells = split(line, ',');
        REQUIRE(cells.size() == 7);
        csv_preds[cells[0]].push_back(parse_double(cells[4]));
    }
    for (const Target t : kAllTargets) {
        const auto want = predict_batch(bundle.forests.at(t), x);
        REQUIRE(csv_preds.count(target_name(t)));
        CHECK(csv_preds[target_name(t)] == want);
    }
}

TEST_CASE("evaluate: partial bundles report only their trained targets") {
    const auto csv = tmp_path("eval_partial.csv");
    const auto model = tmp_path("eval_partial.json");
    CHECK(run_cli("synth --sizes 1024,2048 --noise 0 --out " + csv) == 0);
    CHECK(run_cli("train --records " + csv + " --targets luts --trees 2 --out " + model) == 0);
    const auto report_path = tmp_path("eval_partial_report.txt");
    CHECK(run_cli("evaluate --model " + model + " --records " + csv + " --out " + report_path) == 0);
    const auto report = read_text_file(report_path);
    CHECK(report.find("target: luts") != std::string::npos);
    CHECK(report.find("target: ffs") == std::string::npos);
    CHECK(report.find("target: mem_bits") == std::string::npos);
    // a partial bundle cannot drive the gated recommendation
    CHECK(run_cli("recommend --model " + model + " --start 1024 --doublings 1") == 1);
}

TEST_CASE("recommend: CLI best equals the library-level recommendation") {
    const auto csv = tmp_path("rec_records.csv");
    const auto model = tmp_path("rec_model.json");
    CHECK(run_cli("synth --sizes 1024,2048,4096,8192 --fanouts 8,16 --repeats 3 --noise 0.05 "
                  "--seed 11 --out " +
                  csv) == 0);
    CHECK(run_cli("train --records " + csv + " --trees 20 --seed 11 --out " + model) == 0);
    const auto json_path = tmp_path("rec_out.json");
    CHECK(run_cli("recommend --model " + model + " --start 1024 --doublings 3 --fanout 16 --out " +
                  json_path) == 0);

    const auto j = nlohmann::json::parse(read_text_file(json_path));
    const auto bundle = load_bundle(model);
    const auto rec = recommend(sweep_candidates(1024, 3, 16), bundle,
                               builtin_profile("zcu104"), 100.0);
    REQUIRE(j.contains("best"));
    if (rec.best) {
        REQUIRE(!j["best"].is_null());
        const auto idx = j["best"].get<std::size_t>();
        CHECK(j["entries"][idx]["config"]["num_ste"].get<std::uint64_t>() ==
              rec.entries[*rec.best].config.num_ste);
    } else {
        CHECK(j["best"].is_null());
    }
    CHECK(j["entries"].size() == rec.entries.size());
    for (std::size_t i = 0; i < rec.entries.size(); ++i) {
        CHECK(j["entries"][i]["verdict"]["fits"].get<bool>() == rec.entries[i].verdict.fits);
        CHECK(j["entries"][i]["extrapolation_warning"].get<bool>() ==
              rec.entries[i].extrapolation_warning);
    }
}

TEST_CASE("predict: prints every target and honors --out json") {
    const auto csv = tmp_path("pred_records.csv");
    const auto model = tmp_path("pred_model.json");
    CHECK(run_cli("synth --sizes 1024,2048 --noise 0 --out " + csv) == 0);
    CHECK(run_cli("train --records " + csv + " --trees 2 --seed 1 --out " + model) == 0);
    const auto out = tmp_path("pred_stdout.txt");
    const auto json_path = tmp_path("pred_out.json");
    CHECK(run_cli("predict --model " + model + " --num-ste 2048 --fanout 16 --out " + json_path,
                  out) == 0);
    const auto text = read_text_file(out);
    for (const Target t : kAllTargets)
        CHECK(text.find(target_name(t)) != std::string::npos);
    const auto j = nlohmann::json::parse(read_text_file(json_path));
    CHECK(j.contains("predictions"));
    CHECK(j["manifest"]["command"] == "predict");
    // 16384 lies outside the trained range
    const auto warn_out = tmp_path("pred_warn.txt");
    CHECK(run_cli("predict --model " + model + " --num-ste 16384 --fanout 16", warn_out) == 0);
    CHECK(read_text_file(warn_out).find("outside the training range") != std::string::npos);
}

TEST_CASE("manifest comments are embedded in CSV outputs") {
    const auto csv = tmp_path("manifest.csv");
    CHECK(run_cli("synth --sizes 1024 --noise 0 --seed 12 --out " + csv) == 0);
    const auto text = read_text_file(csv);
    CHECK(text.find("# command: synth") != std::string::npos);
    CHECK(text.find("# seed: 12") != std::string::npos);
    CHECK(text.find("# format_version: 1") != std::string::npos);
}

TEST_CASE("bad usage exits 1") {
    CHECK(run_cli("synth") == 1);                       // missing required flags
    CHECK(run_cli("frobnicate") == 1);                  // unknown subcommand
    CHECK(run_cli("train --records missing.csv --out x.json") == 1);
    CHECK(run_cli("--help") == 0);
}
