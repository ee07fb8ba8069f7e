#include "tsadp/synth.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "io_util.hpp"
#include "tsadp/numeric.hpp"

namespace tsadp {

void SynthConfig::validate() const {
    if (num_sequences < 1) {
        throw ValidationError("SynthConfig: num_sequences must be >= 1");
    }
    if (T < 1) throw ValidationError("SynthConfig: T must be >= 1");
    if (d_visual < 1 || d_language < 1 || latent_dim < 1) {
        throw ValidationError("SynthConfig: dims must be >= 1");
    }
    if (drift_scale < 0.0 || noise_scale < 0.0) {
        throw ValidationError("SynthConfig: scales must be >= 0");
    }
}

namespace {

Matrix gaussian_matrix(int rows, int cols, double scale, Rng& rng) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.gaussian();
    return m;
}

Dataset generate_impl(const SynthConfig& cfg, const Matrix& m_v,
                      const Matrix& m_l, Rng& rng) {
    Dataset ds;
    ds.d_visual = cfg.d_visual;
    ds.d_language = cfg.d_language;
    ds.latent_dim = cfg.latent_dim;
    ds.seed = cfg.seed;
    ds.pairs.reserve(static_cast<std::size_t>(cfg.num_sequences));
    ds.latents.reserve(static_cast<std::size_t>(cfg.num_sequences));
    for (int s = 0; s < cfg.num_sequences; ++s) {
        Matrix latent(cfg.T, cfg.latent_dim);
        Vector state(cfg.latent_dim);
        for (int i = 0; i < cfg.latent_dim; ++i) state(i) = rng.gaussian();
        latent.row(0) = state.transpose();
        for (int t = 1; t < cfg.T; ++t) {
            for (int i = 0; i < cfg.latent_dim; ++i) {
                state(i) += cfg.drift_scale * rng.gaussian();
            }
            latent.row(t) = state.transpose();
        }
        SequencePair pair;
        pair.visual = latent * m_v.transpose();
        pair.language = latent * m_l.transpose();
        for (int t = 0; t < cfg.T; ++t) {
            for (int i = 0; i < cfg.d_visual; ++i) {
                pair.visual(t, i) += cfg.noise_scale * rng.gaussian();
            }
            for (int i = 0; i < cfg.d_language; ++i) {
                pair.language(t, i) += cfg.noise_scale * rng.gaussian();
            }
        }
        ds.pairs.push_back(std::move(pair));
        ds.latents.push_back(std::move(latent));
    }
    return ds;
}

}  // namespace

Dataset generate_dataset(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const double map_scale = 1.0 / std::sqrt(static_cast<double>(cfg.latent_dim));
    const Matrix m_v =
        gaussian_matrix(cfg.d_visual, cfg.latent_dim, map_scale, rng);
    const Matrix m_l =
        gaussian_matrix(cfg.d_language, cfg.latent_dim, map_scale, rng);
    return generate_impl(cfg, m_v, m_l, rng);
}

Dataset generate_dataset_with_maps(const SynthConfig& cfg, const Matrix& m_v,
                                   const Matrix& m_l) {
    cfg.validate();
    if (m_v.rows() != cfg.d_visual || m_v.cols() != cfg.latent_dim ||
        m_l.rows() != cfg.d_language || m_l.cols() != cfg.latent_dim) {
        throw ShapeError("generate_dataset_with_maps: map shapes " +
                         shape_str(m_v) + ", " + shape_str(m_l) +
                         " do not match config dims");
    }
    Rng rng(cfg.seed);
    return generate_impl(cfg, m_v, m_l, rng);
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open dataset for writing: " + path);
    os.write("TSDS", 4);
    io::write_u32(os, kDatasetVersion);
    io::write_u32(os, static_cast<std::uint32_t>(ds.pairs.size()));
    io::write_u32(os, static_cast<std::uint32_t>(ds.d_visual));
    io::write_u32(os, static_cast<std::uint32_t>(ds.d_language));
    io::write_u32(os, static_cast<std::uint32_t>(ds.latent_dim));
    io::write_u64(os, ds.seed);
    for (std::size_t s = 0; s < ds.pairs.size(); ++s) {
        const auto& pair = ds.pairs[s];
        io::write_u32(os, static_cast<std::uint32_t>(pair.visual.rows()));
        io::write_matrix(os, pair.visual);
        io::write_matrix(os, pair.language);
        io::write_matrix(os, ds.latents[s]);
    }
    if (!os) throw IoError("write failure on dataset: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open dataset for reading: " + path);
    io::expect_magic(is, "TSDS", "dataset");
    const std::uint32_t version = io::read_u32(is, "dataset version");
    if (version != kDatasetVersion) {
        throw FormatError("unsupported dataset version " +
                          std::to_string(version));
    }
    Dataset ds;
    const std::uint32_t n = io::read_u32(is, "sequence count");
    ds.d_visual = static_cast<int>(io::read_u32(is, "d_visual"));
    ds.d_language = static_cast<int>(io::read_u32(is, "d_language"));
    ds.latent_dim = static_cast<int>(io::read_u32(is, "latent_dim"));
    ds.seed = io::read_u64(is, "seed");
    for (std::uint32_t s = 0; s < n; ++s) {
        const std::uint32_t T = io::read_u32(is, "sequence length");
        SequencePair pair;
        pair.visual = io::read_matrix(is, T, ds.d_visual, "visual block");
        pair.language =
            io::read_matrix(is, T, ds.d_language, "language block");
        ds.latents.push_back(
            io::read_matrix(is, T, ds.latent_dim, "latent block"));
        ds.pairs.push_back(std::move(pair));
    }
    return ds;
}

namespace {

/// Degenerate one-frame window: per-frame embeddings for the alignment
/// probes.
constexpr WindowSpec kFrameWindow{0, 1};

}  // namespace

double eval_retrieval(const TsadpModel& model,
                      const std::vector<SequencePair>& data) {
    long correct = 0;
    long total = 0;
    for (const auto& pair : data) {
        const Matrix z_v = encode_visual(model, pair.visual, kFrameWindow);
        const Matrix z_l = encode_language(model, pair.language);
        const int T = static_cast<int>(z_v.rows());
        for (int t = 0; t < T; ++t) {
            const double own = cosine_sim(z_v.row(t).transpose(),
                                          z_l.row(t).transpose());
            bool best = true;
            for (int u = 0; u < T && best; ++u) {
                if (u == t) continue;
                const double other = cosine_sim(z_v.row(t).transpose(),
                                                z_l.row(u).transpose());
                if (other >= own) best = false;  // ties count as incorrect
            }
            if (best) ++correct;
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) /
                                  static_cast<double>(total);
}

double eval_chronology(const TsadpModel& model,
                       const std::vector<SequencePair>& data,
                       std::uint64_t seed) {
    Rng rng(seed);
    double displacement = 0.0;
    long total = 0;
    for (const auto& pair : data) {
        const int T = static_cast<int>(pair.visual.rows());
        std::vector<int> perm(T);
        for (int t = 0; t < T; ++t) perm[t] = t;
        rng.shuffle(perm);  // perm[i] = true index of shuffled frame i

        Matrix shuffled(T, pair.visual.cols());
        for (int i = 0; i < T; ++i) shuffled.row(i) = pair.visual.row(perm[i]);

        const Matrix z_v = encode_visual(model, shuffled, kFrameWindow);
        const Matrix z_l = encode_language(model, pair.language);
        Matrix sims(T, T);
        for (int i = 0; i < T; ++i) {
            for (int u = 0; u < T; ++u) {
                sims(i, u) = cosine_sim(z_v.row(i).transpose(),
                                        z_l.row(u).transpose());
            }
        }
        // Greedy assignment over all remaining (frame, slot) pairs.
        std::vector<bool> frame_used(T, false), slot_used(T, false);
        std::vector<int> assigned(T, -1);
        for (int step = 0; step < T; ++step) {
            int best_i = -1, best_u = -1;
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < T; ++i) {
                if (frame_used[i]) continue;
                for (int u = 0; u < T; ++u) {
                    if (slot_used[u]) continue;
                    if (sims(i, u) > best) {
                        best = sims(i, u);
                        best_i = i;
                        best_u = u;
                    }
                }
            }
            frame_used[best_i] = true;
            slot_used[best_u] = true;
            assigned[best_i] = best_u;
        }
        for (int i = 0; i < T; ++i) {
            displacement += std::abs(assigned[i] - perm[i]);
            ++total;
        }
    }
    return total == 0 ? 0.0 : displacement / static_cast<double>(total);
}

double eval_masked_recovery(const TsadpModel& model,
                            const std::vector<SequencePair>& data,
                            const WindowSpec& spec, const MaskSpec& mask_spec,
                            std::uint64_t seed) {
    Rng rng(seed);
    double model_loss = 0.0;
    double baseline_loss = 0.0;
    for (const auto& pair : data) {
        const int T = static_cast<int>(pair.visual.rows());
        const std::vector<int> mask = sample_mask(T, mask_spec, rng);
        if (mask.empty()) continue;
        const Matrix targets = mtp_targets(model, pair.visual, spec);
        const auto preds = predict_masked(model, pair.visual, mask, spec);
        const Eigen::RowVectorXd mean = targets.colwise().mean();
        for (std::size_t m = 0; m < mask.size(); ++m) {
            const int t = mask[m];
            model_loss +=
                (preds[m].transpose() - targets.row(t)).squaredNorm();
            baseline_loss += (mean - targets.row(t)).squaredNorm();
        }
    }
    if (baseline_loss == 0.0) {
        return model_loss == 0.0 ? 0.0
                                 : std::numeric_limits<double>::infinity();
    }
    return model_loss / baseline_loss;
}

BenchResult evaluate(const TsadpModel& model,
                     const std::vector<SequencePair>& data,
                     const WindowSpec& spec, const MaskSpec& mask_spec,
                     std::uint64_t seed) {
    BenchResult r;
    r.retrieval_accuracy = eval_retrieval(model, data);
    r.chronology_mae = eval_chronology(model, data, derive_seed(seed, 10));
    r.masked_mse_ratio = eval_masked_recovery(model, data, spec, mask_spec,
                                              derive_seed(seed, 11));
    return r;
}

}  // namespace tsadp
