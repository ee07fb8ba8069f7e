// tsadp — data generation, training, evaluation, gradient checking and
// checkpoint inspection for the TSADP objective.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tsadp/commands.hpp"

namespace {

tsadp::CliConfig load(const std::string& config_path) {
    if (config_path.empty()) return tsadp::CliConfig{};
    return tsadp::load_config(config_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TSADP training objective toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, ablation, checkpoint_path,
        dataset_path;
    bool have_seed = false;
    std::uint64_t seed = 0;
    bool plant_fault = false;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("--config", config_path, "config file");
        if (config_required) opt->required();
        cmd->add_option("--out", out_path, "output path override");
        cmd->add_option_function<std::uint64_t>(
            "--seed",
            [&](std::uint64_t s) {
                have_seed = true;
                seed = s;
            },
            "seed override");
    };

    auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
    add_common(gen, true);

    auto* tr = app.add_subcommand("train", "train a model on a dataset");
    add_common(tr, true);
    tr->add_option("--ablation", ablation, "full, no_dpg or no_tcl");

    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
    add_common(ev, false);
    ev->add_option("--checkpoint", checkpoint_path, "checkpoint file")
        ->required();
    ev->add_option("--dataset", dataset_path, "dataset file")->required();

    auto* gc = app.add_subcommand("gradcheck",
                                  "verify analytic gradients by finite "
                                  "differences");
    add_common(gc, true);
    gc->add_flag("--plant-fault", plant_fault,
                 "corrupt one analytic coordinate (checker self-test)");

    auto* in = app.add_subcommand("inspect", "list checkpoint parameters");
    in->add_option("--checkpoint", checkpoint_path, "checkpoint file")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        tsadp::CliConfig cfg = load(config_path);
        if (have_seed) {
            cfg.synth.seed = seed;
            cfg.train.seed = seed;
            cfg.gradcheck.seed = seed;
            cfg.model_seed = seed;
            cfg.eval_seed = seed;
        }
        if (!ablation.empty()) {
            cfg.train.ablation = tsadp::parse_ablation(ablation);
        }
        if (gen->parsed()) {
            return tsadp::cli::cmd_gen_data(cfg, out_path, std::cout);
        }
        if (tr->parsed()) {
            return tsadp::cli::cmd_train(cfg, out_path, std::cout);
        }
        if (ev->parsed()) {
            return tsadp::cli::cmd_eval(checkpoint_path, dataset_path, cfg,
                                        out_path, std::cout);
        }
        if (gc->parsed()) {
            return tsadp::cli::cmd_gradcheck(cfg, plant_fault, std::cout);
        }
        if (in->parsed()) {
            return tsadp::cli::cmd_inspect(checkpoint_path, std::cout);
        }
    } catch (const std::exception& e) {
        return tsadp::cli::report_error(e, std::cerr);
    }
    return tsadp::cli::kExitOk;
}
