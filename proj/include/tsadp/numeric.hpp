#ifndef TSADP_NUMERIC_HPP
#define TSADP_NUMERIC_HPP

#include "tsadp/types.hpp"

namespace tsadp {

constexpr double kNormEps = 1e-12;

/// Shape-checked matrix product.
Matrix matmul(const Matrix& a, const Matrix& b);

/// Row-wise softmax with per-row max subtraction. Each output row is
/// nonnegative and sums to 1.
Matrix row_softmax(const Matrix& x);

/// v / max(||v||, eps). The zero vector maps to itself.
Vector l2_normalize(const Vector& v, double eps = kNormEps);

}  // namespace tsadp

#endif  // TSADP_NUMERIC_HPP
