#ifndef TSADP_MODEL_HPP
#define TSADP_MODEL_HPP

#include <string>
#include <vector>

#include "tsadp/dpg.hpp"
#include "tsadp/objectives.hpp"
#include "tsadp/types.hpp"

namespace tsadp {

struct ModelDims {
    int d = 16;         // frame feature dimension
    int d_proj = 16;    // query/key dimension
    int d_out = 16;     // attention value dimension
    int d_prompt = 16;  // temporal prompt dimension
    int d_emb = 16;     // shared semantic space dimension
    int d_lang = 16;    // language feature dimension

    void validate() const;
};

/// Reference to one named parameter block. Vectors are exposed as n x 1.
struct ParamRef {
    std::string name;
    Matrix* value;
};

struct ConstParamRef {
    std::string name;
    const Matrix* value;
};

/// Full parameter set: the prompt generator, the two shared-space
/// projection heads, the learned mask token and the masked-prediction
/// head.
///
/// Canonical parameter order (checkpoints, gradient bundles, reports):
///   w_q, w_k, w_v, w_p, u_v, u_l, mask_token, predictor
struct TsadpModel {
    DpgParams dpg;
    Matrix u_v;         // d_emb x d_prompt, visual projection
    Matrix u_l;         // d_emb x d_lang, language projection
    Matrix mask_token;  // d x 1, learned placeholder for masked frames
    Matrix predictor;   // d_emb x d_prompt, masked-prediction head

    static TsadpModel init(const ModelDims& dims, std::uint64_t seed);

    ModelDims dims() const;
    void validate() const;

    std::vector<ParamRef> params();
    std::vector<ConstParamRef> params() const;
};

/// One paired training sequence: visual frames (T x d) and frame-aligned
/// language features (T x d_lang).
struct SequencePair {
    Matrix visual;
    Matrix language;
};

struct TrainingBatch {
    std::vector<SequencePair> sequences;
    std::vector<std::vector<int>> mask_sets;  // one index set per sequence

    void validate() const;
};

struct LossValues {
    double lc = 0.0;     // contrastive, mean over sequences
    double lm = 0.0;     // masked prediction, mean over sequences
    double total = 0.0;  // lambda1*lc + lambda2*lm
};

/// Shared-space visual embeddings z_v = u_v * P_t, T x d_emb.
Matrix encode_visual(const TsadpModel& model, const Matrix& seq,
                     const WindowSpec& spec);

/// Shared-space language embeddings z_l = u_l * l_t, T x d_emb.
Matrix encode_language(const TsadpModel& model, const Matrix& lseq);

/// `seq` with the masked rows replaced by the mask token.
Matrix corrupt_sequence(const Matrix& seq, const std::vector<int>& mask,
                        const Matrix& mask_token);

/// Predicted embeddings for the masked frames, in mask order. The
/// prediction runs the prompt generator on the corrupted sequence, so for
/// a masked frame t the output never depends on the original v_t.
std::vector<Vector> predict_masked(const TsadpModel& model, const Matrix& seq,
                                   const std::vector<int>& mask,
                                   const WindowSpec& spec);

/// Masked-prediction targets: clean-path embeddings u_v * P_t, one row per
/// frame. These are constants under differentiation (stop-gradient).
Matrix mtp_targets(const TsadpModel& model, const Matrix& seq,
                   const WindowSpec& spec);

/// Both losses averaged over the batch, using freshly computed
/// (stop-gradient) targets.
LossValues forward_losses(const TsadpModel& model, const TrainingBatch& batch,
                          const LossConfig& cfg, const WindowSpec& spec);

/// Same forward pass with externally supplied per-sequence targets. This
/// is the function the finite-difference oracle differentiates: targets
/// captured at the base point stay fixed while parameters move.
LossValues forward_losses_frozen(const TsadpModel& model,
                                 const TrainingBatch& batch,
                                 const LossConfig& cfg,
                                 const WindowSpec& spec,
                                 const std::vector<Matrix>& targets);

/// Inference entry point: temporal prompts for an unseen sequence,
/// identical to the training-time prompts for the same weights.
Matrix infer_prompts(const TsadpModel& model, const Matrix& seq,
                     const WindowSpec& spec);

}  // namespace tsadp

#endif  // TSADP_MODEL_HPP
