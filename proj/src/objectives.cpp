#include "tsadp/objectives.hpp"

#include <cmath>

#include "tsadp/numeric.hpp"

namespace tsadp {

namespace {

/// log(sum_i exp(x_i)) with max subtraction.
double logsumexp(const Eigen::RowVectorXd& x) {
    const double m = x.maxCoeff();
    return m + std::log((x.array() - m).exp().sum());
}

}  // namespace

void LossConfig::validate() const {
    if (!(tau > 0.0)) throw ValidationError("LossConfig: tau must be > 0");
    if (lambda1 < 0.0 || lambda2 < 0.0) {
        throw ValidationError("LossConfig: lambda weights must be >= 0");
    }
    if (k < 0) throw ValidationError("LossConfig: k must be >= 0");
    if (mask_rate < 0.0 || mask_rate >= 1.0) {
        throw ValidationError("LossConfig: mask_rate must be in [0, 1)");
    }
}

double cosine_sim(const Vector& a, const Vector& b, double eps) {
    if (a.size() != b.size()) {
        throw ShapeError("cosine_sim: dims " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
    }
    const double na = std::max(a.norm(), eps);
    const double nb = std::max(b.norm(), eps);
    return a.dot(b) / (na * nb);
}

double temporal_contrastive_loss(const Matrix& z_v, const Matrix& z_l,
                                 double tau, bool symmetric) {
    if (z_v.rows() != z_l.rows() || z_v.cols() != z_l.cols()) {
        throw ShapeError("temporal_contrastive_loss: " + shape_str(z_v) +
                         " vs " + shape_str(z_l));
    }
    const Eigen::Index T = z_v.rows();
    if (T == 0) {
        throw ValidationError("temporal_contrastive_loss: empty sequence");
    }
    if (!(tau > 0.0)) {
        throw ValidationError("temporal_contrastive_loss: tau must be > 0");
    }
    Matrix sims(T, T);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index u = 0; u < T; ++u) {
            sims(t, u) =
                cosine_sim(z_v.row(t).transpose(), z_l.row(u).transpose());
        }
    }
    double loss = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
        loss += logsumexp(sims.row(t) / tau) - sims(t, t) / tau;
    }
    if (symmetric) {
        for (Eigen::Index t = 0; t < T; ++t) {
            loss += logsumexp(sims.col(t).transpose() / tau) -
                    sims(t, t) / tau;
        }
    }
    return loss;
}

double masked_prediction_loss(const Matrix& pred, const Matrix& truth,
                              const std::vector<int>& mask) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
        throw ShapeError("masked_prediction_loss: " + shape_str(pred) +
                         " vs " + shape_str(truth));
    }
    double loss = 0.0;
    for (int t : mask) {
        if (t < 0 || t >= pred.rows()) {
            throw IndexError("masked_prediction_loss: mask index " +
                             std::to_string(t) + " out of range [0, " +
                             std::to_string(pred.rows()) + ")");
        }
        loss += (pred.row(t) - truth.row(t)).squaredNorm();
    }
    return loss;
}

double total_loss(double lc, double lm, const LossConfig& cfg) {
    return cfg.lambda1 * lc + cfg.lambda2 * lm;
}

}  // namespace tsadp
