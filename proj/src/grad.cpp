#include "tsadp/grad.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "tsadp/numeric.hpp"

namespace tsadp {

GradBundle GradBundle::zeros_like(const TsadpModel& model) {
    GradBundle g;
    g.w_q = Matrix::Zero(model.dpg.w_q.rows(), model.dpg.w_q.cols());
    g.w_k = Matrix::Zero(model.dpg.w_k.rows(), model.dpg.w_k.cols());
    g.w_v = Matrix::Zero(model.dpg.w_v.rows(), model.dpg.w_v.cols());
    g.w_p = Matrix::Zero(model.dpg.w_p.rows(), model.dpg.w_p.cols());
    g.u_v = Matrix::Zero(model.u_v.rows(), model.u_v.cols());
    g.u_l = Matrix::Zero(model.u_l.rows(), model.u_l.cols());
    g.mask_token = Matrix::Zero(model.mask_token.rows(), 1);
    g.predictor = Matrix::Zero(model.predictor.rows(), model.predictor.cols());
    return g;
}

std::vector<ParamRef> GradBundle::params() {
    return {{"w_q", &w_q},           {"w_k", &w_k},
            {"w_v", &w_v},           {"w_p", &w_p},
            {"u_v", &u_v},           {"u_l", &u_l},
            {"mask_token", &mask_token}, {"predictor", &predictor}};
}

std::vector<ConstParamRef> GradBundle::params() const {
    return {{"w_q", &w_q},           {"w_k", &w_k},
            {"w_v", &w_v},           {"w_p", &w_p},
            {"u_v", &u_v},           {"u_l", &u_l},
            {"mask_token", &mask_token}, {"predictor", &predictor}};
}

GradBundle& GradBundle::operator+=(const GradBundle& other) {
    auto mine = params();
    auto theirs = other.params();
    for (std::size_t i = 0; i < mine.size(); ++i) {
        *mine[i].value += *theirs[i].value;
    }
    return *this;
}

GradBundle& GradBundle::operator*=(double s) {
    for (auto& p : params()) *p.value *= s;
    return *this;
}

bool GradBundle::all_finite() const {
    for (const auto& p : params()) {
        if (!p.value->allFinite()) return false;
    }
    return true;
}

namespace {

/// Reverse pass through the per-frame windowed attention pipeline.
/// d_prompts holds dL/dP_t per row. Parameter gradients accumulate into
/// g; input-frame gradients accumulate into *d_seq when provided.
void dpg_backward(const Matrix& seq, const DpgParams& params,
                  const WindowSpec& spec, const Matrix& d_prompts,
                  GradBundle& g, Matrix* d_seq) {
    const int T = static_cast<int>(seq.rows());
    const int H = spec.heads;
    const int dph = params.d_proj() / H;
    const int dvh = params.d_out() / H;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dph));
    const int c = spec.k;
    const int L = spec.length();

    for (int t = 0; t < T; ++t) {
        if (d_prompts.row(t).isZero(0.0)) continue;
        const Matrix window = extract_window(seq, t, spec);
        Matrix d_window = Matrix::Zero(L, seq.cols());

        // Recompute forward intermediates.
        Vector v_hat(params.d_out());
        std::vector<Vector> q_cs(H), attn(H);
        std::vector<Matrix> keys(H), values(H);
        for (int h = 0; h < H; ++h) {
            const auto wq = params.w_q.middleRows(h * dph, dph);
            const auto wk = params.w_k.middleRows(h * dph, dph);
            const auto wv = params.w_v.middleRows(h * dvh, dvh);
            q_cs[h] = wq * window.row(c).transpose();
            keys[h] = window * wk.transpose();          // L x dph
            values[h] = window * wv.transpose();        // L x dvh
            const Matrix a =
                row_softmax(scale * (keys[h] * q_cs[h]).transpose());
            attn[h] = a.row(0).transpose();             // L
            v_hat.segment(h * dvh, dvh) =
                values[h].transpose() * attn[h];
        }

        const Vector d_p = d_prompts.row(t).transpose();
        g.w_p += d_p * v_hat.transpose();
        const Vector d_vhat = params.w_p.transpose() * d_p;

        for (int h = 0; h < H; ++h) {
            const auto wq = params.w_q.middleRows(h * dph, dph);
            const auto wk = params.w_k.middleRows(h * dph, dph);
            const auto wv = params.w_v.middleRows(h * dvh, dvh);
            const Vector& a = attn[h];
            const Vector d_vh = d_vhat.segment(h * dvh, dvh);

            // Value path: v_hat_h = sum_j a_j (wv x_j).
            const Vector d_a = values[h] * d_vh;  // L
            g.w_v.middleRows(h * dvh, dvh) +=
                d_vh * (a.transpose() * window);
            d_window += a * (wv.transpose() * d_vh).transpose();

            // Softmax: s_j = scale * q_c . k_j.
            const double a_dot = a.dot(d_a);
            const Vector d_s =
                (a.array() * (d_a.array() - a_dot)).matrix();

            // Query path (center frame only).
            const Vector d_qc = scale * (keys[h].transpose() * d_s);
            g.w_q.middleRows(h * dph, dph) += d_qc * window.row(c);
            d_window.row(c) += (wq.transpose() * d_qc).transpose();

            // Key path.
            const Matrix d_k = scale * d_s * q_cs[h].transpose();  // L x dph
            g.w_k.middleRows(h * dph, dph) += d_k.transpose() * window;
            d_window += d_k * wk;
        }

        if (d_seq) {
            for (int j = 0; j < L; ++j) {
                const int src = std::clamp(t - spec.k + j, 0, T - 1);
                d_seq->row(src) += d_window.row(j);
            }
        }
    }
}

/// Gradient of cosine similarity s = a.b / (max(|a|,eps) max(|b|,eps))
/// with respect to a. In the clamped regime the norm is constant.
Vector d_cosine_da(const Vector& a, const Vector& b, double s, double eps) {
    const double na = std::max(a.norm(), eps);
    const double nb = std::max(b.norm(), eps);
    Vector grad = b / (na * nb);
    if (a.norm() >= eps) grad -= (s / (na * na)) * a;
    return grad;
}

}  // namespace

std::pair<LossValues, GradBundle> backward(const TsadpModel& model,
                                           const TrainingBatch& batch,
                                           const LossConfig& cfg,
                                           const WindowSpec& spec) {
    batch.validate();
    cfg.validate();
    model.validate();
    const double eps = 1e-12;
    const auto B = batch.sequences.size();
    const double w1 = cfg.lambda1 / static_cast<double>(B);
    const double w2 = cfg.lambda2 / static_cast<double>(B);

    GradBundle g = GradBundle::zeros_like(model);
    double lc_sum = 0.0;
    double lm_sum = 0.0;

    for (std::size_t i = 0; i < B; ++i) {
        const Matrix& seq = batch.sequences[i].visual;
        const Matrix& lseq = batch.sequences[i].language;
        const auto& mask = batch.mask_sets[i];
        const int T = static_cast<int>(seq.rows());

        // ---- Temporal contrastive loss ----
        const Matrix prompts = dpg_forward(seq, model.dpg, spec);
        const Matrix z_v = prompts * model.u_v.transpose();  // T x d_emb
        const Matrix z_l = encode_language(model, lseq);

        Matrix sims(T, T);
        Vector na(T), nb(T);
        for (int t = 0; t < T; ++t) {
            na(t) = std::max(z_v.row(t).norm(), eps);
            nb(t) = std::max(z_l.row(t).norm(), eps);
        }
        for (int t = 0; t < T; ++t) {
            for (int u = 0; u < T; ++u) {
                sims(t, u) = z_v.row(t).dot(z_l.row(u)) / (na(t) * nb(u));
            }
        }
        // lc via the stable logsumexp route (same value as the public op).
        lc_sum += temporal_contrastive_loss(z_v, z_l, cfg.tau, cfg.symmetric);

        if (cfg.lambda1 != 0.0) {
            const Matrix probs = row_softmax(sims / cfg.tau);
            Matrix d_sims = (w1 / cfg.tau) *
                            (probs - Matrix::Identity(T, T));
            if (cfg.symmetric) {
                const Matrix probs_col =
                    row_softmax(sims.transpose() / cfg.tau).transpose();
                d_sims += (w1 / cfg.tau) *
                          (probs_col - Matrix::Identity(T, T));
            }

            Matrix d_zv = Matrix::Zero(T, z_v.cols());
            Matrix d_zl = Matrix::Zero(T, z_l.cols());
            for (int t = 0; t < T; ++t) {
                for (int u = 0; u < T; ++u) {
                    const double w = d_sims(t, u);
                    if (w == 0.0) continue;
                    d_zv.row(t) +=
                        w * d_cosine_da(z_v.row(t).transpose(),
                                        z_l.row(u).transpose(), sims(t, u),
                                        eps)
                                .transpose();
                    d_zl.row(u) +=
                        w * d_cosine_da(z_l.row(u).transpose(),
                                        z_v.row(t).transpose(), sims(t, u),
                                        eps)
                                .transpose();
                }
            }
            g.u_v += d_zv.transpose() * prompts;
            g.u_l += d_zl.transpose() * lseq;
            const Matrix d_prompts = d_zv * model.u_v;  // T x d_prompt
            dpg_backward(seq, model.dpg, spec, d_prompts, g, nullptr);
        }

        // ---- Masked temporal prediction ----
        if (!mask.empty()) {
            const Matrix corrupted =
                corrupt_sequence(seq, mask, model.mask_token);
            const Matrix prompts_c = dpg_forward(corrupted, model.dpg, spec);
            const Matrix pred = prompts_c * model.predictor.transpose();
            const Matrix targets = z_v;  // clean-path embeddings, detached
            lm_sum += masked_prediction_loss(pred, targets, mask);

            if (cfg.lambda2 != 0.0) {
                Matrix d_prompts_c = Matrix::Zero(T, prompts_c.cols());
                for (int t : mask) {
                    const Vector r =
                        (pred.row(t) - targets.row(t)).transpose();
                    const Vector d_pred = 2.0 * w2 * r;
                    g.predictor += d_pred * prompts_c.row(t);
                    d_prompts_c.row(t) +=
                        (model.predictor.transpose() * d_pred).transpose();
                }
                Matrix d_corrupted = Matrix::Zero(T, seq.cols());
                dpg_backward(corrupted, model.dpg, spec, d_prompts_c, g,
                             &d_corrupted);
                for (int t : mask) {
                    g.mask_token.col(0) += d_corrupted.row(t).transpose();
                }
            }
        }
    }

    LossValues lv;
    lv.lc = lc_sum / static_cast<double>(B);
    lv.lm = lm_sum / static_cast<double>(B);
    lv.total = total_loss(lv.lc, lv.lm, cfg);
    return {lv, g};
}

GradBundle finite_diff_grad(const TsadpModel& model,
                            const TrainingBatch& batch, const LossConfig& cfg,
                            const WindowSpec& spec, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw ValidationError("finite_diff_grad: epsilon must be > 0");
    }
    // Targets captured once at the base point; the perturbed evaluations
    // treat them as constants (stop-gradient convention).
    std::vector<Matrix> targets;
    targets.reserve(batch.sequences.size());
    for (const auto& pair : batch.sequences) {
        targets.push_back(mtp_targets(model, pair.visual, spec));
    }

    TsadpModel work = model;
    GradBundle g = GradBundle::zeros_like(model);
    auto wparams = work.params();
    auto gparams = g.params();
    for (std::size_t p = 0; p < wparams.size(); ++p) {
        Matrix& theta = *wparams[p].value;
        Matrix& grad = *gparams[p].value;
        for (Eigen::Index i = 0; i < theta.rows(); ++i) {
            for (Eigen::Index j = 0; j < theta.cols(); ++j) {
                const double orig = theta(i, j);
                theta(i, j) = orig + epsilon;
                const double f_plus =
                    forward_losses_frozen(work, batch, cfg, spec, targets)
                        .total;
                theta(i, j) = orig - epsilon;
                const double f_minus =
                    forward_losses_frozen(work, batch, cfg, spec, targets)
                        .total;
                theta(i, j) = orig;
                grad(i, j) = (f_plus - f_minus) / (2.0 * epsilon);
            }
        }
    }
    return g;
}

GradCheckReport compare_grads(const GradBundle& analytic,
                              const GradBundle& numeric, double tolerance) {
    if (!(tolerance > 0.0)) {
        throw ValidationError("compare_grads: tolerance must be > 0");
    }
    GradCheckReport report;
    report.tolerance = tolerance;
    auto aps = analytic.params();
    auto nps = numeric.params();
    for (std::size_t p = 0; p < aps.size(); ++p) {
        const Matrix& a = *aps[p].value;
        const Matrix& n = *nps[p].value;
        ParamCheck pc;
        pc.name = aps[p].name;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                const double abs_err = std::abs(a(i, j) - n(i, j));
                const double rel_err =
                    abs_err /
                    std::max({std::abs(a(i, j)), std::abs(n(i, j)), 1e-8});
                pc.max_abs_err = std::max(pc.max_abs_err, abs_err);
                if (rel_err > pc.max_rel_err) {
                    pc.max_rel_err = rel_err;
                    pc.argmax_row = static_cast<int>(i);
                    pc.argmax_col = static_cast<int>(j);
                }
            }
        }
        report.max_rel_err = std::max(report.max_rel_err, pc.max_rel_err);
        report.per_param.push_back(pc);
    }
    report.pass = report.max_rel_err <= tolerance;
    return report;
}

GradCheckReport gradcheck(const TsadpModel& model, const TrainingBatch& batch,
                          const LossConfig& cfg, const WindowSpec& spec,
                          double epsilon, double tolerance, bool plant_fault) {
    GradBundle analytic = backward(model, batch, cfg, spec).second;
    if (plant_fault) analytic.w_q(0, 0) += 1.0;
    const GradBundle numeric =
        finite_diff_grad(model, batch, cfg, spec, epsilon);
    return compare_grads(analytic, numeric, tolerance);
}

std::string GradCheckReport::table() const {
    std::ostringstream os;
    os << std::left << std::setw(12) << "param" << std::right << std::setw(14)
       << "max_abs_err" << std::setw(14) << "max_rel_err" << std::setw(10)
       << "argmax" << "\n";
    for (const auto& pc : per_param) {
        os << std::left << std::setw(12) << pc.name << std::right
           << std::setw(14) << std::scientific << std::setprecision(3)
           << pc.max_abs_err << std::setw(14) << pc.max_rel_err
           << std::setw(6) << ("(" + std::to_string(pc.argmax_row) + "," +
                               std::to_string(pc.argmax_col) + ")")
           << "\n";
    }
    os << (pass ? "PASS" : "FAIL") << " max_rel_err=" << std::scientific
       << std::setprecision(3) << max_rel_err << " tolerance=" << tolerance
       << "\n";
    return os.str();
}

}  // namespace tsadp
