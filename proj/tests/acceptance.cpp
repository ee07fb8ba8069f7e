// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Thresholds and tolerances are pinned here on purpose;
// do not loosen them to make a run green.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tsadp/checkpoint.hpp"
#include "tsadp/commands.hpp"
#include "tsadp/config.hpp"
#include "tsadp/synth.hpp"

using namespace tsadp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

bool g_all_pass = true;

void report(int n, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": "
              << detail << std::endl;
    if (!ok) g_all_pass = false;
}

// ---- criterion 4/5/6 shared machinery --------------------------------

struct SplitData {
    std::vector<SequencePair> train;
    std::vector<SequencePair> heldout;
};

SplitData make_split(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.num_sequences = 250;
    cfg.T = 8;
    cfg.d_visual = 16;
    cfg.d_language = 16;
    cfg.latent_dim = 4;
    cfg.noise_scale = 0.05;
    cfg.seed = seed;
    const Dataset ds = generate_dataset(cfg);
    SplitData split;
    split.train.assign(ds.pairs.begin(), ds.pairs.begin() + 200);
    split.heldout.assign(ds.pairs.begin() + 200, ds.pairs.end());
    return split;
}

BenchResult train_and_eval(const SplitData& data, std::uint64_t seed,
                           Ablation ablation) {
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.epochs = 200;
    cfg.batch_size = 32;
    cfg.learning_rate = 1e-3;
    cfg.optimizer = Optimizer::Adam;
    cfg.ablation = ablation;

    TsadpModel model = TsadpModel::init(ModelDims{}, derive_seed(seed, 100));
    train(model, data.train, cfg);
    return evaluate(model, data.heldout, cfg.effective_window(),
                    MaskSpec{cfg.loss.mask_rate}, 7);
}

}  // namespace

int main() {
    // -- 1: gradient correctness, seeds 0-4, < 30 s -----------------------
    {
        const auto start = Clock::now();
        bool ok = true;
        std::string first_failure;
        for (std::uint64_t seed = 0; seed <= 4; ++seed) {
            CliConfig cfg;  // gradcheck defaults: d=8 T=6 k=1 batch=2
                            // mask_rate=0.25 eps=1e-6 tol=1e-5
            cfg.gradcheck.seed = seed;
            std::ostringstream table;
            if (cli::cmd_gradcheck(cfg, false, table) != cli::kExitOk) {
                ok = false;
                if (first_failure.empty()) first_failure = table.str();
            }
        }
        const double secs = seconds_since(start);
        ok = ok && secs < 30.0;
        std::ostringstream detail;
        detail << "gradcheck d=8 T=6 k=1 seeds 0-4 (tol 1e-5, eps 1e-6), "
               << secs << " s";
        report(1, ok, detail.str());
        if (!first_failure.empty()) std::cout << first_failure;
    }

    // -- 2: contrastive closed forms --------------------------------------
    {
        Matrix z_v(4, 2), z_l(4, 2);
        for (int t = 0; t < 4; ++t) {
            z_v.row(t) << 1.0, 2.0;
            z_l.row(t) << -0.5, 0.25;
        }
        bool ok = true;
        double worst = 0.0;
        for (double tau : {0.05, 0.07, 1.0}) {
            const double err = std::abs(
                temporal_contrastive_loss(z_v, z_l, tau) - 4.0 * std::log(4.0));
            worst = std::max(worst, err);
            if (err > 1e-9) ok = false;
        }
        Matrix one_v(1, 2), one_l(1, 2);
        one_v << 0.4, -1.1;
        one_l << 2.0, 0.3;
        if (temporal_contrastive_loss(one_v, one_l, 0.07) != 0.0) ok = false;
        std::ostringstream detail;
        detail << "uniform-similarity loss = 4 ln 4 (max err " << worst
               << ", tol 1e-9); T=1 loss exactly 0";
        report(2, ok, detail.str());
    }

    // -- 3: attention invariants ------------------------------------------
    {
        Rng rng(33);
        bool rows_ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int k = trial % 3;
            const int d = 2 + static_cast<int>(rng.uniform() * 4.0);
            const int d_proj = 2 + static_cast<int>(rng.uniform() * 4.0);
            DpgParams p = DpgParams::init(d, d_proj, d, d, rng);
            Matrix window(2 * k + 1, d);
            for (int i = 0; i < window.rows(); ++i)
                for (int j = 0; j < d; ++j) window(i, j) = 3.0 * rng.gaussian();
            const Matrix a = attention_scores(window, p);
            for (int i = 0; i < a.rows(); ++i) {
                const double err = std::abs(a.row(i).sum() - 1.0);
                worst = std::max(worst, err);
                if (err > 1e-12) rows_ok = false;
            }
        }

        bool exact_ok = true;
        for (int trial = 0; trial < 50; ++trial) {
            const int d = 3;
            DpgParams p = DpgParams::init(d, d, d, d, rng);
            Matrix seq(5, d);
            for (int t = 0; t < 5; ++t)
                for (int j = 0; j < d; ++j) seq(t, j) = rng.gaussian();
            const Matrix prompts = dpg_forward(seq, p, WindowSpec{0, 1});
            for (int t = 0; t < 5; ++t) {
                const Vector want =
                    p.w_p * (p.w_v * seq.row(t).transpose());
                for (int j = 0; j < d; ++j) {
                    if (prompts(t, j) != want(j)) exact_ok = false;
                }
            }
        }
        std::ostringstream detail;
        detail << "1000 windows k in {0,1,2}: row sums within 1e-12 (worst "
               << worst << "); k=0 prompt reduction bit-exact";
        report(3, rows_ok && exact_ok, detail.str());
    }

    // -- 4/5/6: training efficacy, ablation direction, MTP efficacy -------
    BenchResult seed0_full;
    {
        const auto start = Clock::now();
        const SplitData split0 = make_split(0);
        seed0_full = train_and_eval(split0, 0, Ablation::Full);
        const double secs = seconds_since(start);
        const bool ok = seed0_full.retrieval_accuracy >= 0.90 &&
                        seed0_full.chronology_mae <= 0.5 && secs < 300.0;
        std::ostringstream detail;
        detail << "200 epochs Adam lr 1e-3: held-out retrieval "
               << seed0_full.retrieval_accuracy
               << " (need >= 0.90), chronology MAE "
               << seed0_full.chronology_mae << " (need <= 0.5), " << secs
               << " s (need < 300)";
        report(4, ok, detail.str());
    }

    {
        double full_sum = seed0_full.retrieval_accuracy;
        double no_tcl_sum = 0.0;
        double no_dpg_sum = 0.0;
        for (std::uint64_t seed = 0; seed <= 2; ++seed) {
            const SplitData split = make_split(seed);
            if (seed != 0) {
                full_sum +=
                    train_and_eval(split, seed, Ablation::Full)
                        .retrieval_accuracy;
            }
            no_tcl_sum += train_and_eval(split, seed, Ablation::NoTcl)
                              .retrieval_accuracy;
            no_dpg_sum += train_and_eval(split, seed, Ablation::NoDpg)
                              .retrieval_accuracy;
        }
        const double full = full_sum / 3.0;
        const double no_tcl = no_tcl_sum / 3.0;
        const double no_dpg = no_dpg_sum / 3.0;
        const bool ok = (full - no_tcl >= 0.20) && (no_dpg < full);
        std::ostringstream detail;
        detail << "3-seed mean retrieval: full " << full << ", no_tcl "
               << no_tcl << " (need gap >= 0.20), no_dpg " << no_dpg
               << " (need < full)";
        report(5, ok, detail.str());
    }

    {
        const bool ok = seed0_full.masked_mse_ratio <= 0.5;
        std::ostringstream detail;
        detail << "masked_mse_ratio " << seed0_full.masked_mse_ratio
               << " at mask rate 0.25 (need <= 0.5)";
        report(6, ok, detail.str());
    }

    // -- 7: determinism and persistence ------------------------------------
    {
        bool ok = true;
        std::string why;

        CliConfig cfg;
        cfg.synth.num_sequences = 20;
        cfg.synth.T = 6;
        cfg.synth.d_visual = 8;
        cfg.synth.d_language = 8;
        cfg.synth.latent_dim = 3;
        cfg.synth.seed = 5;
        cfg.dims.d = 8;
        cfg.dims.d_lang = 8;
        cfg.train.epochs = 15;
        cfg.train.batch_size = 8;
        cfg.paths.dataset = "acc_ds.bin";

        std::ostringstream sink;
        cli::cmd_gen_data(cfg, "acc_ds_a.bin", sink);
        cli::cmd_gen_data(cfg, "acc_ds_b.bin", sink);
        if (slurp("acc_ds_a.bin") != slurp("acc_ds_b.bin")) {
            ok = false;
            why = "dataset bytes differ across identical gen-data runs";
        }

        cli::cmd_gen_data(cfg, "", sink);
        cli::cmd_train(cfg, "acc_ckpt_a.bin", sink);
        cli::cmd_train(cfg, "acc_ckpt_b.bin", sink);
        if (slurp("acc_ckpt_a.bin") != slurp("acc_ckpt_b.bin")) {
            ok = false;
            why = "checkpoint bytes differ across identical train runs";
        }

        const TsadpModel loaded = load_checkpoint("acc_ckpt_a.bin");
        save_checkpoint(loaded, "acc_ckpt_c.bin");
        if (slurp("acc_ckpt_a.bin") != slurp("acc_ckpt_c.bin")) {
            ok = false;
            why = "save -> load -> save is not byte-identical";
        }

        for (const char* f : {"acc_ds.bin", "acc_ds_a.bin", "acc_ds_b.bin",
                              "acc_ckpt_a.bin", "acc_ckpt_b.bin",
                              "acc_ckpt_c.bin"}) {
            std::remove(f);
        }
        report(7, ok,
               ok ? "repeated train, save/load/save and gen-data are all "
                    "byte-identical"
                  : why);
    }

    // -- 8: chance calibration ---------------------------------------------
    {
        const SplitData split = make_split(3);
        const TsadpModel untrained = TsadpModel::init(ModelDims{}, 999);
        const double acc =
            eval_retrieval(untrained, split.heldout);
        const double mae =
            eval_chronology(untrained, split.heldout, 17);
        const bool ok = std::abs(acc - 0.125) <= 0.1 &&
                        std::abs(mae - 2.625) <= 0.5 &&
                        split.heldout.size() >= 50;
        std::ostringstream detail;
        detail << "untrained model on " << split.heldout.size()
               << " held-out sequences: retrieval " << acc
               << " (need 0.125 +/- 0.1), chronology MAE " << mae
               << " (need 2.625 +/- 0.5)";
        report(8, ok, detail.str());
    }

    return g_all_pass ? 0 : 1;
}
