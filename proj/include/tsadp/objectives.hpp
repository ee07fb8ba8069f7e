#ifndef TSADP_OBJECTIVES_HPP
#define TSADP_OBJECTIVES_HPP

#include <vector>

#include "tsadp/types.hpp"

namespace tsadp {

/// Loss hyperparameters. tau is the contrastive temperature, lambda1 and
/// lambda2 weight the contrastive and masked-prediction terms, k is the
/// temporal window half-size and mask_rate the per-frame masking
/// probability. `symmetric` adds the language-anchored contrastive
/// direction (off by default; only the visual-anchored direction is
/// standard here).
struct LossConfig {
    double tau = 0.07;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    int k = 1;
    double mask_rate = 0.25;
    bool symmetric = false;

    void validate() const;
};

/// Cosine similarity with norms clamped at eps.
double cosine_sim(const Vector& a, const Vector& b, double eps = 1e-12);

/// InfoNCE over time within one sequence. z_v and z_l are T x d_emb, one
/// embedding per row. For each anchor t the positive is z_l row t and the
/// negatives are the remaining rows of z_l:
///   -sum_t log( exp(sim(zv_t, zl_t)/tau) / sum_t' exp(sim(zv_t, zl_t')/tau) )
/// Summed over t, not averaged.
double temporal_contrastive_loss(const Matrix& z_v, const Matrix& z_l,
                                 double tau, bool symmetric = false);

/// Sum of squared prediction errors over the masked rows:
/// sum_{t in mask} ||pred_t - truth_t||^2. Empty mask yields 0.
double masked_prediction_loss(const Matrix& pred, const Matrix& truth,
                              const std::vector<int>& mask);

/// lambda1 * lc + lambda2 * lm.
double total_loss(double lc, double lm, const LossConfig& cfg);

}  // namespace tsadp

#endif  // TSADP_OBJECTIVES_HPP
