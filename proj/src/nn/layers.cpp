#include "hsic/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsic::nn {

Matrix im2col(const Matrix& maps, std::size_t batch, std::size_t side, std::size_t f) {
    const std::size_t channels = static_cast<std::size_t>(maps.cols());
    if (static_cast<std::size_t>(maps.rows()) != batch * side * side) throw std::invalid_argument("im2col: row count mismatch");
    if (f == 0 || f > side) throw std::invalid_argument("im2col: kernel larger than map");
    const std::size_t out = side - f + 1;
    const std::size_t span = f * channels;
    Matrix cols(static_cast<Eigen::Index>(batch * out * out), static_cast<Eigen::Index>(f * span));
    const double* src = maps.data();
    double* dst = cols.data();
    for (std::size_t s = 0; s < batch; ++s) {
        const double* sample = src + s * side * side * channels;
        for (std::size_t i = 0; i < out; ++i)
            for (std::size_t j = 0; j < out; ++j)
                for (std::size_t u = 0; u < f; ++u) {
                    // f consecutive positions of one map row are contiguous
                    const double* row = sample + ((i + u) * side + j) * channels;
                    dst = std::copy(row, row + span, dst);
                }
    }
    return cols;
}

Matrix col2im(const Matrix& cols, std::size_t batch, std::size_t side, std::size_t channels, std::size_t f) {
    const std::size_t out = side - f + 1;
    const std::size_t span = f * channels;
    if (static_cast<std::size_t>(cols.rows()) != batch * out * out || static_cast<std::size_t>(cols.cols()) != f * span)
        throw std::invalid_argument("col2im: shape mismatch");
    Matrix maps = Matrix::Zero(static_cast<Eigen::Index>(batch * side * side), static_cast<Eigen::Index>(channels));
    const double* src = cols.data();
    double* dst = maps.data();
    for (std::size_t s = 0; s < batch; ++s) {
        double* sample = dst + s * side * side * channels;
        for (std::size_t i = 0; i < out; ++i)
            for (std::size_t j = 0; j < out; ++j)
                for (std::size_t u = 0; u < f; ++u) {
                    double* row = sample + ((i + u) * side + j) * channels;
                    for (std::size_t t = 0; t < span; ++t) row[t] += src[t];
                    src += span;
                }
    }
    return maps;
}

Matrix maxpool2_ceil(const Matrix& maps, std::size_t batch, std::size_t side, std::vector<std::uint32_t>& argmax) {
    const std::size_t channels = static_cast<std::size_t>(maps.cols());
    if (static_cast<std::size_t>(maps.rows()) != batch * side * side) throw std::invalid_argument("maxpool2_ceil: row count mismatch");
    const std::size_t out = pooled_side(side);
    Matrix pooled(static_cast<Eigen::Index>(batch * out * out), static_cast<Eigen::Index>(channels));
    argmax.assign(batch * out * out * channels, 0);
    for (std::size_t s = 0; s < batch; ++s)
        for (std::size_t i = 0; i < out; ++i)
            for (std::size_t j = 0; j < out; ++j) {
                const std::size_t orow = (s * out + i) * out + j;
                const std::size_t r0 = 2 * i;
                const std::size_t c0 = 2 * j;
                const std::size_t r1 = std::min(r0 + 2, side);
                const std::size_t c1 = std::min(c0 + 2, side);
                for (std::size_t ch = 0; ch < channels; ++ch) {
                    std::size_t best_row = (s * side + r0) * side + c0;
                    double best = maps(static_cast<Eigen::Index>(best_row), static_cast<Eigen::Index>(ch));
                    for (std::size_t r = r0; r < r1; ++r)
                        for (std::size_t c = c0; c < c1; ++c) {
                            const std::size_t irow = (s * side + r) * side + c;
                            const double v = maps(static_cast<Eigen::Index>(irow), static_cast<Eigen::Index>(ch));
                            if (v > best) {
                                best = v;
                                best_row = irow;
                            }
                        }
                    pooled(static_cast<Eigen::Index>(orow), static_cast<Eigen::Index>(ch)) = best;
                    argmax[orow * channels + ch] = static_cast<std::uint32_t>(best_row);
                }
            }
    return pooled;
}

Matrix maxpool2_backward(const Matrix& grad_out, const std::vector<std::uint32_t>& argmax, std::size_t in_rows) {
    const auto channels = grad_out.cols();
    Matrix grad_in = Matrix::Zero(static_cast<Eigen::Index>(in_rows), channels);
    const double* g = grad_out.data();
    for (std::size_t o = 0; o < argmax.size(); ++o) {
        const auto ch = static_cast<Eigen::Index>(o % static_cast<std::size_t>(channels));
        grad_in(static_cast<Eigen::Index>(argmax[o]), ch) += g[o];
    }
    return grad_in;
}

Tensor3 conv2d_valid(const Tensor3& input, const Matrix& weights, const Vector& bias, std::size_t f) {
    if (static_cast<std::size_t>(weights.cols()) != f * f * input.channels)
        throw std::invalid_argument("conv2d_valid: filter channels do not match input channels");
    if (weights.rows() != bias.size()) throw std::invalid_argument("conv2d_valid: bias length mismatch");
    if (input.rows != input.cols) throw std::invalid_argument("conv2d_valid: input must be square");
    if (f == 0 || f > input.rows) throw std::invalid_argument("conv2d_valid: kernel larger than input");
    const Eigen::Map<const Matrix> maps(input.data.data(), static_cast<Eigen::Index>(input.rows * input.cols),
                                        static_cast<Eigen::Index>(input.channels));
    const Matrix cols = im2col(maps, 1, input.rows, f);
    const std::size_t out = input.rows - f + 1;
    Tensor3 result(out, out, static_cast<std::size_t>(weights.rows()));
    Eigen::Map<Matrix> dst(result.data.data(), static_cast<Eigen::Index>(out * out), weights.rows());
    dst.noalias() = cols * weights.transpose();
    dst.rowwise() += bias.transpose();
    return result;
}

PoolResult maxpool2_ceil(const Tensor3& input) {
    if (input.rows != input.cols) throw std::invalid_argument("maxpool2_ceil: input must be square");
    const Eigen::Map<const Matrix> maps(input.data.data(), static_cast<Eigen::Index>(input.rows * input.cols),
                                        static_cast<Eigen::Index>(input.channels));
    PoolResult result;
    std::vector<std::uint32_t> rows;
    const Matrix pooled = maxpool2_ceil(maps, 1, input.rows, rows);
    const std::size_t out = pooled_side(input.rows);
    result.output = Tensor3(out, out, input.channels);
    std::copy(pooled.data(), pooled.data() + pooled.size(), result.output.data.begin());
    result.argmax.resize(rows.size());
    for (std::size_t o = 0; o < rows.size(); ++o)
        result.argmax[o] = static_cast<std::uint32_t>(rows[o] * input.channels + o % input.channels);
    return result;
}

Vector dense_forward(const Vector& x, const Matrix& weights, const Vector& bias, Activation activation) {
    if (weights.cols() != x.size() || weights.rows() != bias.size()) throw std::invalid_argument("dense_forward: shape mismatch");
    Vector y = weights * x + bias;
    if (activation == Activation::Relu) y = y.cwiseMax(0.0);
    return y;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.begin(), logits.end());
    if (out.empty()) return out;
    const double top = *std::max_element(out.begin(), out.end());
    double sum = 0.0;
    for (double& v : out) {
        v = std::exp(v - top);
        sum += v;
    }
    for (double& v : out) v /= sum;
    return out;
}

void softmax_rows(Matrix& logits) {
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        auto row = logits.row(r);
        row.array() -= row.maxCoeff();
        row = row.array().exp().matrix();
        row /= row.sum();
    }
}

double cross_entropy(const Matrix& one_hot, const Matrix& probs) {
    if (one_hot.rows() != probs.rows() || one_hot.cols() != probs.cols()) throw std::invalid_argument("cross_entropy: shape mismatch");
    if (probs.rows() == 0) throw std::invalid_argument("cross_entropy: empty batch");
    double total = 0.0;
    for (Eigen::Index r = 0; r < probs.rows(); ++r)
        for (Eigen::Index k = 0; k < probs.cols(); ++k)
            if (one_hot(r, k) != 0.0) total -= one_hot(r, k) * std::log(std::max(probs(r, k), kProbFloor));
    return total / static_cast<double>(probs.rows());
}

}  // namespace hsic::nn
