#ifndef TSADP_TRAINER_HPP
#define TSADP_TRAINER_HPP

#include <string>
#include <vector>

#include "tsadp/grad.hpp"
#include "tsadp/model.hpp"

namespace tsadp {

enum class Optimizer { Sgd, Adam };
enum class Ablation { Full, NoDpg, NoTcl };

Optimizer parse_optimizer(const std::string& s);
Ablation parse_ablation(const std::string& s);
std::string to_string(Ablation a);

struct TrainConfig {
    std::uint64_t seed = 0;
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    LossConfig loss;
    WindowSpec window;
    Ablation ablation = Ablation::Full;

    void validate() const;

    /// Loss/window settings after applying the ablation switch:
    /// no_tcl zeroes lambda1, no_dpg removes attention mixing by forcing
    /// a self-only window (k = 0, so P_t = w_p w_v v_t).
    LossConfig effective_loss() const;
    WindowSpec effective_window() const;
};

/// Uniform i.i.d. masking. A draw that would mask every frame has its
/// highest-indexed masked frame unmasked.
struct MaskSpec {
    double rate = 0.25;
};

std::vector<int> sample_mask(int T, const MaskSpec& spec, Rng& rng);

struct AdamState {
    GradBundle m;
    GradBundle v;
    long step = 0;

    static AdamState zeros_like(const TsadpModel& model);
};

/// One update in place. SGD ignores `state`.
void optimizer_step(TsadpModel& model, const GradBundle& grads,
                    AdamState& state, const TrainConfig& cfg);

struct EpochMetrics {
    int epoch = 0;
    double loss_total = 0.0;
    double loss_tcl = 0.0;
    double loss_mtp = 0.0;
    double wall_ms = 0.0;
};

/// Seeded training loop: per epoch shuffle, batch, sample masks, forward,
/// backward, update. Aborts with a diagnostic on non-finite loss. Losses
/// in the metrics are per-sequence means across the epoch.
std::vector<EpochMetrics> train(TsadpModel& model,
                                const std::vector<SequencePair>& dataset,
                                const TrainConfig& cfg);

}  // namespace tsadp

#endif  // TSADP_TRAINER_HPP
