#ifndef TSADP_GRAD_HPP
#define TSADP_GRAD_HPP

#include <string>
#include <utility>
#include <vector>

#include "tsadp/model.hpp"

namespace tsadp {

/// Per-parameter gradients, mirroring TsadpModel's shapes and canonical
/// parameter order.
struct GradBundle {
    Matrix w_q, w_k, w_v, w_p, u_v, u_l, mask_token, predictor;

    static GradBundle zeros_like(const TsadpModel& model);

    std::vector<ParamRef> params();
    std::vector<ConstParamRef> params() const;

    GradBundle& operator+=(const GradBundle& other);
    GradBundle& operator*=(double s);
    bool all_finite() const;
};

/// Exact reverse-mode gradients of forward_losses(...).total with respect
/// to every parameter. Masked-prediction targets are constants under
/// differentiation (stop-gradient); no gradient flows through the target
/// path.
std::pair<LossValues, GradBundle> backward(const TsadpModel& model,
                                           const TrainingBatch& batch,
                                           const LossConfig& cfg,
                                           const WindowSpec& spec);

/// Central-difference oracle: (f(p+eps) - f(p-eps)) / 2eps per scalar
/// parameter, where f is the frozen-target forward loss with targets
/// captured at the base point. This matches the stop-gradient convention
/// backward() implements.
GradBundle finite_diff_grad(const TsadpModel& model,
                            const TrainingBatch& batch, const LossConfig& cfg,
                            const WindowSpec& spec, double epsilon);

struct ParamCheck {
    std::string name;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    int argmax_row = 0;
    int argmax_col = 0;
};

struct GradCheckReport {
    std::vector<ParamCheck> per_param;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    std::string table() const;
};

/// Coordinate-wise comparison of two bundles, relative error
/// |a - n| / max(|a|, |n|, 1e-8).
GradCheckReport compare_grads(const GradBundle& analytic,
                              const GradBundle& numeric, double tolerance);

/// backward() vs finite_diff_grad() on the given instance. When
/// `plant_fault` is set, one analytic coordinate is deliberately
/// corrupted (self-test of the checker).
GradCheckReport gradcheck(const TsadpModel& model, const TrainingBatch& batch,
                          const LossConfig& cfg, const WindowSpec& spec,
                          double epsilon, double tolerance,
                          bool plant_fault = false);

}  // namespace tsadp

#endif  // TSADP_GRAD_HPP
