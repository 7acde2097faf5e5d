#include <iostream>

#include "CLI11.hpp"
#include "ovfit/commands.hpp"
#include "ovfit/error.hpp"

int main(int argc, char** argv) {
    using namespace ovfit;

    CLI::App app{"ovfit: FPGA overlay resource prediction and feasibility advisor"};
    app.require_subcommand(1);

    int rc = cli::kExitOk;

    cli::SynthOptions synth;
    auto* synth_cmd =
        app.add_subcommand("synth", "Generate synthetic compile records from the cost model");
    synth_cmd->add_option("--coeffs", synth.coeff_file,
                          "coefficient file (defaults to the built-in calibration)");
    synth_cmd->add_option("--sizes", synth.sizes, "num_ste values, e.g. 1024,2048,4096")
        ->required()
        ->delimiter(',');
    synth_cmd->add_option("--fanouts", synth.fanouts, "fanout_limit values (default 16)")
        ->delimiter(',');
    synth_cmd->add_option("--repeats", synth.repeats, "records per (size, fanout) pair");
    synth_cmd->add_option("--bus", synth.bus_width, "bus width (horizontal wire ceiling)");
    synth_cmd->add_option("--noise", synth.noise, "multiplicative noise fraction in [0, 1)");
    synth_cmd->add_option("--seed", synth.seed, "random seed (default 42)");
    synth_cmd->add_option("--out", synth.out_csv, "output records CSV")->required();
    synth_cmd->callback([&] { rc = cli::cmd_synth(synth, std::cout); });

    cli::TrainOptions train;
    bool no_bootstrap = false;
    auto* train_cmd = app.add_subcommand("train", "Train one forest per target resource");
    train_cmd->add_option("--records", train.records_csv, "training records CSV")->required();
    train_cmd->add_option("--targets", train.targets,
                          "targets to train (default luts,ffs,mem_bits,max_fanout)")
        ->delimiter(',');
    train_cmd->add_option("--trees", train.forest.n_trees, "number of trees (default 100)");
    train_cmd->add_option("--max-depth", train.forest.max_depth,
                          "depth cap; -1 = unlimited (default)");
    train_cmd->add_option("--min-samples-leaf", train.forest.min_samples_leaf,
                          "minimum samples per leaf (default 1)");
    train_cmd->add_option("--min-samples-split", train.forest.min_samples_split,
                          "minimum samples to attempt a split (default 2)");
    train_cmd->add_option("--feature-fraction", train.forest.feature_fraction,
                          "fraction of features drawn per node (default 1.0)");
    train_cmd->add_flag("--no-bootstrap", no_bootstrap, "train every tree on the full dataset");
    train_cmd->add_option("--seed", train.forest.seed, "random seed (default 42)");
    train_cmd->add_option("--threads", train.threads, "worker threads; 0 = hardware default");
    train_cmd->add_option("--out", train.out_model, "output model bundle (JSON)")->required();
    train_cmd->callback([&] {
        train.forest.bootstrap = !no_bootstrap;
        rc = cli::cmd_train(train, std::cout);
    });

    cli::PredictOptions predict;
    auto* predict_cmd =
        app.add_subcommand("predict", "Predict resources for one overlay configuration");
    predict_cmd->add_option("--model", predict.model, "model bundle")->required();
    predict_cmd->add_option("--num-ste", predict.num_ste, "overlay size")->required();
    predict_cmd->add_option("--fanout", predict.fanout_limit, "fanout limit")->required();
    predict_cmd->add_option("--bus", predict.bus_width, "bus width");
    predict_cmd->add_option("--out", predict.out_json, "machine-readable JSON output path");
    predict_cmd->callback([&] { rc = cli::cmd_predict(predict, std::cout); });

    cli::EvaluateOptions evaluate;
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Compare predictions against measured records");
    evaluate_cmd->add_option("--model", evaluate.model, "model bundle")->required();
    evaluate_cmd->add_option("--records", evaluate.records_csv, "records CSV with actuals")
        ->required();
    evaluate_cmd->add_option("--out", evaluate.out_report,
                             "report path (prints to stdout when omitted)");
    evaluate_cmd->add_option("--csv", evaluate.out_csv, "machine-readable plot data CSV");
    evaluate_cmd->callback([&] { rc = cli::cmd_evaluate(evaluate, std::cout); });

    cli::GateOptions gate;
    auto* gate_cmd =
        app.add_subcommand("gate", "Check an estimate or predicted configuration against a device");
    gate_cmd->add_option("--model", gate.model, "model bundle (predicts the estimate)");
    gate_cmd->add_option("--num-ste", gate.num_ste, "overlay size (with --model)");
    gate_cmd->add_option("--fanout", gate.fanout_limit, "fanout limit (with --model)");
    gate_cmd->add_option("--bus", gate.bus_width, "bus width (with --model)");
    gate_cmd->add_option("--luts", gate.luts, "direct logic-cell estimate");
    gate_cmd->add_option("--ffs", gate.ffs, "direct flip-flop estimate");
    gate_cmd->add_option("--mem-bits", gate.mem_bits, "direct distributed-memory estimate (bits)");
    gate_cmd->add_option("--profile", gate.profile, "device profile name or file (default zcu104)");
    gate_cmd->add_option("--ceiling", gate.ceiling, "utilization ceiling percent (default 100)");
    gate_cmd->add_option("--out", gate.out_json, "machine-readable JSON output path");
    gate_cmd->callback([&] { rc = cli::cmd_gate(gate, std::cout); });

    cli::RecommendOptions recommend;
    auto* recommend_cmd =
        app.add_subcommand("recommend", "Sweep doubling sizes and report the largest feasible one");
    recommend_cmd->add_option("--model", recommend.model, "model bundle")->required();
    recommend_cmd->add_option("--profile", recommend.profile,
                              "device profile name or file (default zcu104)");
    recommend_cmd->add_option("--ceiling", recommend.ceiling,
                              "utilization ceiling percent (default 100)");
    recommend_cmd->add_option("--start", recommend.start, "first num_ste in the sweep");
    recommend_cmd->add_option("--doublings", recommend.doublings, "number of doublings");
    recommend_cmd->add_option("--fanout", recommend.fanout_limit, "fanout limit for all candidates");
    recommend_cmd->add_option("--bus", recommend.bus_width, "bus width for all candidates");
    recommend_cmd->add_option("--out", recommend.out_json, "machine-readable JSON output path");
    recommend_cmd->callback([&] { rc = cli::cmd_recommend(recommend, std::cout); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kExitOk : cli::kExitError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitError;
    }
    return rc;
}
