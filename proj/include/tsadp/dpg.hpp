#ifndef TSADP_DPG_HPP
#define TSADP_DPG_HPP

#include "tsadp/numeric.hpp"
#include "tsadp/types.hpp"

namespace tsadp {

/// Projection weights of the dynamic prompt generator.
///
/// Frame features (dimension d) are projected into query/key space
/// (d_proj), value space (d_out), and finally into prompt space
/// (d_prompt) by w_p.
struct DpgParams {
    Matrix w_q;  // d_proj x d
    Matrix w_k;  // d_proj x d
    Matrix w_v;  // d_out  x d
    Matrix w_p;  // d_prompt x d_out

    int d() const { return static_cast<int>(w_q.cols()); }
    int d_proj() const { return static_cast<int>(w_q.rows()); }
    int d_out() const { return static_cast<int>(w_v.rows()); }
    int d_prompt() const { return static_cast<int>(w_p.rows()); }

    void validate() const;

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
    static DpgParams init(int d, int d_proj, int d_out, int d_prompt,
                          Rng& rng);
};

/// Temporal window configuration. The window around frame t covers
/// indices t-k..t+k; out-of-range indices are clamped to [0, T-1] so the
/// window length is always 2k+1. `heads` > 1 splits query/key/value
/// projections into equal head blocks whose attended outputs are
/// concatenated before the prompt projection.
struct WindowSpec {
    int k = 1;
    int heads = 1;

    int length() const { return 2 * k + 1; }
    void validate() const;
};

/// Rows t-k..t+k of `seq` (one frame per row), clamped at the edges.
Matrix extract_window(const Matrix& seq, int t, const WindowSpec& spec);

/// Row-stochastic attention matrix softmax_j(q_i . k_j / sqrt(d_proj))
/// over a window (single head).
Matrix attention_scores(const Matrix& window, const DpgParams& params);

/// Attended representation of the window center:
/// sum_j a(center_row, j) * (w_v x_j).
Vector attend(const Matrix& window, const Matrix& a, const DpgParams& params,
              int center_row);

/// Prompt projection P = w_p * v_hat.
Vector make_prompt(const Vector& v_hat, const DpgParams& params);

/// Full per-frame pipeline; returns a T x d_prompt matrix, one prompt per
/// row. Frames are processed independently.
Matrix dpg_forward(const Matrix& seq, const DpgParams& params,
                   const WindowSpec& spec);

}  // namespace tsadp

#endif  // TSADP_DPG_HPP
