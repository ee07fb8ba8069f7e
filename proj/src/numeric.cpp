#include "tsadp/numeric.hpp"

namespace tsadp {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions disagree, " + shape_str(a) +
                         " * " + shape_str(b));
    }
    return a * b;
}

Matrix row_softmax(const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        Eigen::RowVectorXd e = (x.row(i).array() - m).exp();
        out.row(i) = e / e.sum();
    }
    return out;
}

Vector l2_normalize(const Vector& v, double eps) {
    const double n = v.norm();
    return v / std::max(n, eps);
}

}  // namespace tsadp
