#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hsic::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// rows x cols x channels feature map, channel index fastest.
struct Tensor3 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t channels = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(std::size_t r, std::size_t c, std::size_t ch) : rows(r), cols(c), channels(ch), data(r * c * ch, 0.0) {}

    double at(std::size_t r, std::size_t c, std::size_t ch) const { return data[(r * cols + c) * channels + ch]; }
    double& at(std::size_t r, std::size_t c, std::size_t ch) { return data[(r * cols + c) * channels + ch]; }
};

enum class Activation { Relu, Identity };

// Batched feature maps are stored as (batch * side * side) x channels
// row-major matrices: one row per spatial position, samples outermost.

/// Unrolls every f x f x C window of a batch of side x side maps into one
/// row of length f*f*C (window row, window col, channel). Output rows are
/// ordered (sample, out_row, out_col) with out side = side - f + 1.
Matrix im2col(const Matrix& maps, std::size_t batch, std::size_t side, std::size_t f);

/// Adjoint of im2col: scatters window-row gradients back onto the maps.
Matrix col2im(const Matrix& cols, std::size_t batch, std::size_t side, std::size_t channels, std::size_t f);

/// 2x2 stride-2 max pooling; odd sides keep a partial last window, so the
/// output side is ceil(side / 2). `argmax` receives, per output element,
/// the input row that held the maximum (first maximum on ties).
Matrix maxpool2_ceil(const Matrix& maps, std::size_t batch, std::size_t side, std::vector<std::uint32_t>& argmax);

/// Routes pooled gradients back to the recorded argmax rows.
Matrix maxpool2_backward(const Matrix& grad_out, const std::vector<std::uint32_t>& argmax, std::size_t in_rows);

inline std::size_t pooled_side(std::size_t side) { return (side + 1) / 2; }

// Single-sample forms.

/// Valid cross-correlation plus per-filter bias. `weights` is F x (f*f*C)
/// in (window row, window col, channel) order.
Tensor3 conv2d_valid(const Tensor3& input, const Matrix& weights, const Vector& bias, std::size_t f);

struct PoolResult {
    Tensor3 output;
    std::vector<std::uint32_t> argmax;  // flat input index per output element
};
PoolResult maxpool2_ceil(const Tensor3& input);

Vector dense_forward(const Vector& x, const Matrix& weights, const Vector& bias, Activation activation);

/// Max-subtracted normalized exponential.
std::vector<double> softmax(std::span<const double> logits);

/// Row-wise softmax of a batch of logits, in place.
void softmax_rows(Matrix& logits);

/// Probabilities are floored here before the log.
inline constexpr double kProbFloor = 1e-10;

/// Mean over rows of -sum_k y_ik log max(p_ik, floor).
double cross_entropy(const Matrix& one_hot, const Matrix& probs);

}  // namespace hsic::nn
