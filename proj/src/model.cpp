#include "tsadp/model.hpp"

namespace tsadp {

void ModelDims::validate() const {
    if (d < 1 || d_proj < 1 || d_out < 1 || d_prompt < 1 || d_emb < 1 ||
        d_lang < 1) {
        throw ValidationError("ModelDims: all dimensions must be >= 1");
    }
}

namespace {

Matrix init_matrix(int rows, int cols, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
    return m;
}

}  // namespace

TsadpModel TsadpModel::init(const ModelDims& dims, std::uint64_t seed) {
    dims.validate();
    Rng rng(seed);
    TsadpModel m;
    m.dpg = DpgParams::init(dims.d, dims.d_proj, dims.d_out, dims.d_prompt,
                            rng);
    m.u_v = init_matrix(dims.d_emb, dims.d_prompt, rng);
    m.u_l = init_matrix(dims.d_emb, dims.d_lang, rng);
    m.mask_token = Matrix::Zero(dims.d, 1);
    m.predictor = init_matrix(dims.d_emb, dims.d_prompt, rng);
    return m;
}

ModelDims TsadpModel::dims() const {
    ModelDims dm;
    dm.d = dpg.d();
    dm.d_proj = dpg.d_proj();
    dm.d_out = dpg.d_out();
    dm.d_prompt = dpg.d_prompt();
    dm.d_emb = static_cast<int>(u_v.rows());
    dm.d_lang = static_cast<int>(u_l.cols());
    return dm;
}

void TsadpModel::validate() const {
    dpg.validate();
    if (u_v.cols() != dpg.d_prompt()) {
        throw ShapeError("TsadpModel: u_v " + shape_str(u_v) +
                         " must accept prompts of dim " +
                         std::to_string(dpg.d_prompt()));
    }
    if (u_l.rows() != u_v.rows()) {
        throw ShapeError("TsadpModel: u_l " + shape_str(u_l) +
                         " must share output dim with u_v " + shape_str(u_v));
    }
    if (mask_token.rows() != dpg.d() || mask_token.cols() != 1) {
        throw ShapeError("TsadpModel: mask_token must be " +
                         std::to_string(dpg.d()) + "x1, got " +
                         shape_str(mask_token));
    }
    if (predictor.rows() != u_v.rows() ||
        predictor.cols() != dpg.d_prompt()) {
        throw ShapeError("TsadpModel: predictor " + shape_str(predictor) +
                         " must match u_v " + shape_str(u_v));
    }
}

std::vector<ParamRef> TsadpModel::params() {
    return {{"w_q", &dpg.w_q},           {"w_k", &dpg.w_k},
            {"w_v", &dpg.w_v},           {"w_p", &dpg.w_p},
            {"u_v", &u_v},               {"u_l", &u_l},
            {"mask_token", &mask_token}, {"predictor", &predictor}};
}

std::vector<ConstParamRef> TsadpModel::params() const {
    return {{"w_q", &dpg.w_q},           {"w_k", &dpg.w_k},
            {"w_v", &dpg.w_v},           {"w_p", &dpg.w_p},
            {"u_v", &u_v},               {"u_l", &u_l},
            {"mask_token", &mask_token}, {"predictor", &predictor}};
}

void TrainingBatch::validate() const {
    if (sequences.empty()) {
        throw ValidationError("TrainingBatch: empty batch");
    }
    if (mask_sets.size() != sequences.size()) {
        throw ValidationError(
            "TrainingBatch: one mask set per sequence required");
    }
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        const auto& s = sequences[i];
        if (s.visual.rows() != s.language.rows()) {
            throw ShapeError("TrainingBatch: visual/language length mismatch " +
                             shape_str(s.visual) + " vs " +
                             shape_str(s.language));
        }
        for (int t : mask_sets[i]) {
            if (t < 0 || t >= s.visual.rows()) {
                throw IndexError("TrainingBatch: mask index " +
                                 std::to_string(t) + " out of range");
            }
        }
    }
}

Matrix encode_visual(const TsadpModel& model, const Matrix& seq,
                     const WindowSpec& spec) {
    const Matrix prompts = dpg_forward(seq, model.dpg, spec);
    return prompts * model.u_v.transpose();
}

Matrix encode_language(const TsadpModel& model, const Matrix& lseq) {
    if (lseq.cols() != model.u_l.cols()) {
        throw ShapeError("encode_language: feature dim " + shape_str(lseq) +
                         " does not match u_l " + shape_str(model.u_l));
    }
    return lseq * model.u_l.transpose();
}

Matrix corrupt_sequence(const Matrix& seq, const std::vector<int>& mask,
                        const Matrix& mask_token) {
    if (mask_token.rows() != seq.cols()) {
        throw ShapeError("corrupt_sequence: mask token dim " +
                         shape_str(mask_token) + " vs frame dim " +
                         std::to_string(seq.cols()));
    }
    Matrix out = seq;
    for (int t : mask) {
        if (t < 0 || t >= seq.rows()) {
            throw IndexError("corrupt_sequence: mask index " +
                             std::to_string(t) + " out of range");
        }
        out.row(t) = mask_token.col(0).transpose();
    }
    return out;
}

std::vector<Vector> predict_masked(const TsadpModel& model, const Matrix& seq,
                                   const std::vector<int>& mask,
                                   const WindowSpec& spec) {
    if (spec.k == 0 && static_cast<Eigen::Index>(mask.size()) == seq.rows() &&
        !mask.empty()) {
        throw ValidationError(
            "predict_masked: degenerate context, every frame masked with "
            "k = 0");
    }
    const Matrix corrupted = corrupt_sequence(seq, mask, model.mask_token);
    const Matrix prompts = dpg_forward(corrupted, model.dpg, spec);
    std::vector<Vector> out;
    out.reserve(mask.size());
    for (int t : mask) {
        out.push_back(model.predictor * prompts.row(t).transpose());
    }
    return out;
}

Matrix mtp_targets(const TsadpModel& model, const Matrix& seq,
                   const WindowSpec& spec) {
    return encode_visual(model, seq, spec);
}

namespace {

LossValues forward_losses_impl(const TsadpModel& model,
                               const TrainingBatch& batch,
                               const LossConfig& cfg, const WindowSpec& spec,
                               const std::vector<Matrix>* frozen_targets) {
    batch.validate();
    cfg.validate();
    model.validate();
    const auto B = batch.sequences.size();
    double lc_sum = 0.0;
    double lm_sum = 0.0;
    for (std::size_t i = 0; i < B; ++i) {
        const auto& pair = batch.sequences[i];
        const auto& mask = batch.mask_sets[i];

        const Matrix z_v = encode_visual(model, pair.visual, spec);
        const Matrix z_l = encode_language(model, pair.language);
        lc_sum += temporal_contrastive_loss(z_v, z_l, cfg.tau, cfg.symmetric);

        if (!mask.empty()) {
            const Matrix corrupted =
                corrupt_sequence(pair.visual, mask, model.mask_token);
            const Matrix pred =
                dpg_forward(corrupted, model.dpg, spec) *
                model.predictor.transpose();
            const Matrix targets = frozen_targets
                                       ? (*frozen_targets)[i]
                                       : mtp_targets(model, pair.visual, spec);
            lm_sum += masked_prediction_loss(pred, targets, mask);
        }
    }
    LossValues out;
    out.lc = lc_sum / static_cast<double>(B);
    out.lm = lm_sum / static_cast<double>(B);
    out.total = total_loss(out.lc, out.lm, cfg);
    return out;
}

}  // namespace

LossValues forward_losses(const TsadpModel& model, const TrainingBatch& batch,
                          const LossConfig& cfg, const WindowSpec& spec) {
    return forward_losses_impl(model, batch, cfg, spec, nullptr);
}

LossValues forward_losses_frozen(const TsadpModel& model,
                                 const TrainingBatch& batch,
                                 const LossConfig& cfg,
                                 const WindowSpec& spec,
                                 const std::vector<Matrix>& targets) {
    if (targets.size() != batch.sequences.size()) {
        throw ValidationError(
            "forward_losses_frozen: one target block per sequence required");
    }
    return forward_losses_impl(model, batch, cfg, spec, &targets);
}

Matrix infer_prompts(const TsadpModel& model, const Matrix& seq,
                     const WindowSpec& spec) {
    return dpg_forward(seq, model.dpg, spec);
}

}  // namespace tsadp
