#include "tsadp/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tsadp {

Optimizer parse_optimizer(const std::string& s) {
    if (s == "sgd") return Optimizer::Sgd;
    if (s == "adam") return Optimizer::Adam;
    throw ValidationError("unknown optimizer \"" + s +
                          "\", expected sgd or adam");
}

Ablation parse_ablation(const std::string& s) {
    if (s == "full") return Ablation::Full;
    if (s == "no_dpg") return Ablation::NoDpg;
    if (s == "no_tcl") return Ablation::NoTcl;
    throw ValidationError("unknown ablation \"" + s +
                          "\", expected full, no_dpg or no_tcl");
}

std::string to_string(Ablation a) {
    switch (a) {
        case Ablation::Full: return "full";
        case Ablation::NoDpg: return "no_dpg";
        case Ablation::NoTcl: return "no_tcl";
    }
    return "full";
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ValidationError("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) {
        throw ValidationError("TrainConfig: batch_size must be >= 1");
    }
    if (!(learning_rate > 0.0)) {
        throw ValidationError("TrainConfig: learning_rate must be > 0");
    }
    loss.validate();
    window.validate();
}

LossConfig TrainConfig::effective_loss() const {
    LossConfig lc = loss;
    if (ablation == Ablation::NoTcl) lc.lambda1 = 0.0;
    return lc;
}

WindowSpec TrainConfig::effective_window() const {
    WindowSpec w = window;
    if (ablation == Ablation::NoDpg) w.k = 0;
    return w;
}

std::vector<int> sample_mask(int T, const MaskSpec& spec, Rng& rng) {
    if (T < 1) throw ValidationError("sample_mask: T must be >= 1");
    if (spec.rate < 0.0 || spec.rate >= 1.0) {
        throw ValidationError("sample_mask: rate must be in [0, 1)");
    }
    // Fixed-count sampling (round(rate * T) frames) with a minimum spacing
    // of two, so every masked frame keeps unmasked neighbours inside its
    // context window. Spaced subsets {i_1 < ... < i_w : i_{j+1} - i_j >= 2}
    // biject with plain subsets of {0..T-w} via i_j = c_j + (j - 1).
    int want = static_cast<int>(spec.rate * static_cast<double>(T) + 0.5);
    want = std::min(want, (T + 1) / 2);  // max spaced subset size
    if (want >= T) want = T - 1;         // never mask every frame
    if (want <= 0) return {};
    std::vector<int> pool(static_cast<std::size_t>(T - want + 1));
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
    rng.shuffle(pool);
    std::vector<int> mask(pool.begin(), pool.begin() + want);
    std::sort(mask.begin(), mask.end());
    for (int j = 0; j < want; ++j) mask[static_cast<std::size_t>(j)] += j;
    return mask;
}

AdamState AdamState::zeros_like(const TsadpModel& model) {
    AdamState s;
    s.m = GradBundle::zeros_like(model);
    s.v = GradBundle::zeros_like(model);
    s.step = 0;
    return s;
}

void optimizer_step(TsadpModel& model, const GradBundle& grads,
                    AdamState& state, const TrainConfig& cfg) {
    auto thetas = model.params();
    auto gs = grads.params();
    if (cfg.optimizer == Optimizer::Sgd) {
        for (std::size_t p = 0; p < thetas.size(); ++p) {
            if (thetas[p].value->rows() != gs[p].value->rows() ||
                thetas[p].value->cols() != gs[p].value->cols()) {
                throw ShapeError("optimizer_step: gradient shape mismatch on " +
                                 thetas[p].name);
            }
            *thetas[p].value -= cfg.learning_rate * (*gs[p].value);
        }
        return;
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, state.step);
    const double bc2 = 1.0 - std::pow(cfg.beta2, state.step);
    auto ms = state.m.params();
    auto vs = state.v.params();
    for (std::size_t p = 0; p < thetas.size(); ++p) {
        const Matrix& g = *gs[p].value;
        Matrix& m = *ms[p].value;
        Matrix& v = *vs[p].value;
        if (thetas[p].value->rows() != g.rows() ||
            thetas[p].value->cols() != g.cols()) {
            throw ShapeError("optimizer_step: gradient shape mismatch on " +
                             thetas[p].name);
        }
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
        const Matrix m_hat = m / bc1;
        const Matrix v_hat = v / bc2;
        thetas[p].value->array() -=
            cfg.learning_rate * m_hat.array() /
            (v_hat.array().sqrt() + cfg.adam_eps);
    }
}

std::vector<EpochMetrics> train(TsadpModel& model,
                                const std::vector<SequencePair>& dataset,
                                const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw ValidationError("train: empty dataset");

    const LossConfig loss_cfg = cfg.effective_loss();
    const WindowSpec window = cfg.effective_window();
    const MaskSpec mask_spec{loss_cfg.mask_rate};

    Rng shuffle_rng(derive_seed(cfg.seed, 0));
    Rng mask_rng(derive_seed(cfg.seed, 1));

    AdamState state = AdamState::zeros_like(model);
    std::vector<int> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    std::vector<EpochMetrics> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        shuffle_rng.shuffle(order);
        double lc_sum = 0.0, lm_sum = 0.0, total_sum = 0.0;
        std::size_t n_seen = 0;
        int batch_index = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
            TrainingBatch batch;
            const std::size_t end = std::min(
                order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            for (std::size_t i = start; i < end; ++i) {
                const auto& pair = dataset[static_cast<std::size_t>(order[i])];
                batch.sequences.push_back(pair);
                batch.mask_sets.push_back(sample_mask(
                    static_cast<int>(pair.visual.rows()), mask_spec, mask_rng));
            }
            auto [losses, grads] = backward(model, batch, loss_cfg, window);
            if (!std::isfinite(losses.total)) {
                throw ValidationError(
                    "train: non-finite loss at epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(batch_index));
            }
            const double n = static_cast<double>(batch.sequences.size());
            lc_sum += losses.lc * n;
            lm_sum += losses.lm * n;
            total_sum += losses.total * n;
            n_seen += batch.sequences.size();
            optimizer_step(model, grads, state, cfg);
        }
        const auto t1 = std::chrono::steady_clock::now();
        EpochMetrics m;
        m.epoch = epoch;
        m.loss_tcl = lc_sum / static_cast<double>(n_seen);
        m.loss_mtp = lm_sum / static_cast<double>(n_seen);
        m.loss_total = total_sum / static_cast<double>(n_seen);
        m.wall_ms =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
        history.push_back(m);
    }
    return history;
}

}  // namespace tsadp
