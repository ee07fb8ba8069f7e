#include "tsadp/dpg.hpp"

namespace tsadp {

namespace {

Matrix init_matrix(int rows, int cols, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
    return m;
}

}  // namespace

void DpgParams::validate() const {
    if (w_q.rows() != w_k.rows() || w_q.cols() != w_k.cols()) {
        throw ShapeError("DpgParams: w_q " + shape_str(w_q) +
                         " and w_k " + shape_str(w_k) + " must match");
    }
    if (w_v.cols() != w_q.cols()) {
        throw ShapeError("DpgParams: w_v " + shape_str(w_v) +
                         " input dim must equal w_q input dim " +
                         shape_str(w_q));
    }
    if (w_p.cols() != w_v.rows()) {
        throw ShapeError("DpgParams: w_p " + shape_str(w_p) +
                         " must accept w_v output " + shape_str(w_v));
    }
    if (!w_q.allFinite() || !w_k.allFinite() || !w_v.allFinite() ||
        !w_p.allFinite()) {
        throw ValidationError("DpgParams: non-finite entries");
    }
}

DpgParams DpgParams::init(int d, int d_proj, int d_out, int d_prompt,
                          Rng& rng) {
    DpgParams p;
    p.w_q = init_matrix(d_proj, d, rng);
    p.w_k = init_matrix(d_proj, d, rng);
    p.w_v = init_matrix(d_out, d, rng);
    p.w_p = init_matrix(d_prompt, d_out, rng);
    return p;
}

void WindowSpec::validate() const {
    if (k < 0) throw ValidationError("WindowSpec: k must be nonnegative");
    if (heads < 1) throw ValidationError("WindowSpec: heads must be >= 1");
}

Matrix extract_window(const Matrix& seq, int t, const WindowSpec& spec) {
    const int T = static_cast<int>(seq.rows());
    if (t < 0 || t >= T) {
        throw IndexError("extract_window: frame index " + std::to_string(t) +
                         " out of range [0, " + std::to_string(T) + ")");
    }
    spec.validate();
    Matrix w(spec.length(), seq.cols());
    for (int j = -spec.k; j <= spec.k; ++j) {
        const int src = std::clamp(t + j, 0, T - 1);
        w.row(j + spec.k) = seq.row(src);
    }
    return w;
}

Matrix attention_scores(const Matrix& window, const DpgParams& params) {
    if (window.rows() == 0) {
        throw ShapeError("attention_scores: empty window");
    }
    if (window.cols() != params.w_q.cols()) {
        throw ShapeError("attention_scores: frame dim " + shape_str(window) +
                         " does not match w_q " + shape_str(params.w_q));
    }
    const Matrix q = window * params.w_q.transpose();  // (2k+1) x d_proj
    const Matrix k = window * params.w_k.transpose();
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.d_proj()));
    return row_softmax(scale * (q * k.transpose()));
}

Vector attend(const Matrix& window, const Matrix& a, const DpgParams& params,
              int center_row) {
    if (a.rows() != window.rows() || a.cols() != window.rows()) {
        throw ShapeError("attend: score matrix " + shape_str(a) +
                         " does not match window " + shape_str(window));
    }
    if (window.cols() != params.w_v.cols()) {
        throw ShapeError("attend: frame dim " + shape_str(window) +
                         " does not match w_v " + shape_str(params.w_v));
    }
    if (center_row < 0 || center_row >= a.rows()) {
        throw IndexError("attend: center row out of range");
    }
    Vector out = Vector::Zero(params.d_out());
    for (Eigen::Index j = 0; j < window.rows(); ++j) {
        out += a(center_row, j) * (params.w_v * window.row(j).transpose());
    }
    return out;
}

Vector make_prompt(const Vector& v_hat, const DpgParams& params) {
    if (v_hat.size() != params.w_p.cols()) {
        throw ShapeError("make_prompt: input dim " +
                         std::to_string(v_hat.size()) +
                         " does not match w_p " + shape_str(params.w_p));
    }
    return params.w_p * v_hat;
}

Matrix dpg_forward(const Matrix& seq, const DpgParams& params,
                   const WindowSpec& spec) {
    if (seq.rows() < 1) throw ValidationError("dpg_forward: empty sequence");
    spec.validate();
    params.validate();
    const int H = spec.heads;
    if (params.d_proj() % H != 0 || params.d_out() % H != 0) {
        throw ValidationError(
            "dpg_forward: d_proj and d_out must be divisible by heads");
    }
    const int T = static_cast<int>(seq.rows());
    const int dph = params.d_proj() / H;
    const int dvh = params.d_out() / H;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dph));
    const int c = spec.k;  // window center

    Matrix prompts(T, params.d_prompt());
    Vector v_hat(params.d_out());
    for (int t = 0; t < T; ++t) {
        const Matrix window = extract_window(seq, t, spec);
        for (int h = 0; h < H; ++h) {
            const auto wq = params.w_q.middleRows(h * dph, dph);
            const auto wk = params.w_k.middleRows(h * dph, dph);
            const auto wv = params.w_v.middleRows(h * dvh, dvh);
            // Only the center row of the score matrix feeds the output.
            const Vector q_c = wq * window.row(c).transpose();
            const Matrix keys = window * wk.transpose();
            const Matrix a = row_softmax(scale * (keys * q_c).transpose());
            Vector v_hat_h = Vector::Zero(dvh);
            for (Eigen::Index j = 0; j < window.rows(); ++j) {
                v_hat_h += a(0, j) * (wv * window.row(j).transpose());
            }
            v_hat.segment(h * dvh, dvh) = v_hat_h;
        }
        prompts.row(t) = (params.w_p * v_hat).transpose();
    }
    return prompts;
}

}  // namespace tsadp
