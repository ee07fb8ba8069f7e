#ifndef TSADP_SYNTH_HPP
#define TSADP_SYNTH_HPP

#include <string>
#include <vector>

#include "tsadp/model.hpp"
#include "tsadp/trainer.hpp"

namespace tsadp {

/// Shared-latent generator configuration. Both modalities observe the
/// same latent random walk through fixed random linear maps, so the
/// ground-truth frame alignment is the identity permutation.
struct SynthConfig {
    int num_sequences = 200;
    int T = 8;
    int d_visual = 16;
    int d_language = 16;
    int latent_dim = 4;
    double drift_scale = 1.0;
    double noise_scale = 0.05;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Dataset {
    int d_visual = 0;
    int d_language = 0;
    int latent_dim = 0;
    std::uint64_t seed = 0;
    std::vector<SequencePair> pairs;
    std::vector<Matrix> latents;  // T x latent_dim per sequence, for audits
};

/// Latent walk s_t = s_{t-1} + drift * eta_t observed as
/// v_t = M_v s_t + noise, l_t = M_l s_t + noise with dataset-wide random
/// maps M_v, M_l.
Dataset generate_dataset(const SynthConfig& cfg);

/// Same generator with caller-supplied observation maps.
Dataset generate_dataset_with_maps(const SynthConfig& cfg, const Matrix& m_v,
                                   const Matrix& m_l);

/// Dataset file, little-endian: magic "TSDS", version u32, num_sequences
/// u32, d_visual u32, d_language u32, latent_dim u32, seed u64, then per
/// sequence: T u32, visual block (T x d_v row-major f64), language block,
/// latent block.
inline constexpr std::uint32_t kDatasetVersion = 1;

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

struct BenchResult {
    double retrieval_accuracy = 0.0;
    double chronology_mae = 0.0;
    double masked_mse_ratio = 0.0;
};

/// Frame-alignment retrieval: for each t, the language embedding with the
/// highest cosine similarity to z_v_t must be z_l_t. Ties count as
/// incorrect. Retrieval and chronology probe the learned shared space on
/// per-frame embeddings (a degenerate one-frame window), so they measure
/// alignment quality independently of the context-aggregation width;
/// masked recovery is the probe that exercises context aggregation.
double eval_retrieval(const TsadpModel& model,
                      const std::vector<SequencePair>& data);

/// Chronology recovery: visual frames are shuffled (seeded), then greedily
/// assigned to language slots in order of descending cosine similarity.
/// Returns the mean absolute displacement (in frames) between assigned
/// and true index. Uses per-frame embeddings (see eval_retrieval).
double eval_chronology(const TsadpModel& model,
                       const std::vector<SequencePair>& data,
                       std::uint64_t seed);

/// Masked-recovery quality: MTP loss of the model divided by the MTP loss
/// of a per-sequence mean baseline (predicting the mean clean embedding
/// for every masked frame). < 1 beats the baseline.
double eval_masked_recovery(const TsadpModel& model,
                            const std::vector<SequencePair>& data,
                            const WindowSpec& spec, const MaskSpec& mask_spec,
                            std::uint64_t seed);

/// Runs all three probes; `spec` is the context window for masked
/// recovery only.
BenchResult evaluate(const TsadpModel& model,
                     const std::vector<SequencePair>& data,
                     const WindowSpec& spec, const MaskSpec& mask_spec,
                     std::uint64_t seed);

}  // namespace tsadp

#endif  // TSADP_SYNTH_HPP
