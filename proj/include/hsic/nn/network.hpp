#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsic/data.hpp"
#include "hsic/nn/layers.hpp"
#include "hsic/rng.hpp"

namespace hsic::nn {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class InitMode { Scaled, Raw };

/// conv(k1) -> pool -> conv(k2) -> pool -> hidden dense stack -> output.
struct NetworkConfig {
    std::size_t patch_size = 9;
    std::size_t bands = 0;
    std::size_t conv1_filters = 100;
    std::size_t conv1_kernel = 5;
    std::size_t conv2_filters = 200;
    std::size_t conv2_kernel = 3;
    std::vector<std::size_t> hidden = {200, 100};
    int classes = 0;
    double dropout = 0.5;  // drop probability on every hidden dense layer
    InitMode init = InitMode::Scaled;
    /// Multiplies the initial weight standard deviation of every layer.
    double init_gain = 2.0;

    bool operator==(const NetworkConfig&) const = default;
};

/// Spatial sides after each stage: n1 conv1, n2 pool1, n3 conv2, n4 pool2.
struct LayerShapes {
    std::size_t n1 = 0, n2 = 0, n3 = 0, n4 = 0;
    std::size_t flat = 0;  // n4 * n4 * conv2_filters
};

/// Throws ConfigError naming the first violated size constraint.
LayerShapes derive_shapes(const NetworkConfig& cfg);

/// Shrinks the conv kernels so that small patches still yield sides >= 1:
/// conv1_kernel <= patch_size and conv2_kernel <= n2.
NetworkConfig fit_kernels_to_patch(NetworkConfig cfg);

/// Network with `depth` layers counted as conv, pool, conv, pool, hidden..., output.
/// Depth 7 is the default two-hidden-layer net; each +2 adds two hidden
/// layers of the last hidden width, 5 drops the hidden stack.
NetworkConfig with_depth(NetworkConfig cfg, int depth);

/// Parameters in layer order: conv1, conv2, hidden..., output.
struct Parameters {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t scalar_count() const;
};

class Network {
public:
    Network(NetworkConfig cfg, Parameters params, std::uint64_t dropout_seed = 0);

    const NetworkConfig& config() const { return cfg_; }
    const LayerShapes& shapes() const { return shapes_; }
    const Parameters& params() const { return params_; }
    Parameters& params() { return params_; }
    Rng& dropout_rng() { return dropout_rng_; }

    /// Length of one flattened input patch (k * k * d).
    std::size_t input_size() const { return cfg_.patch_size * cfg_.patch_size * cfg_.bands; }

    bool same_parameters(const Network& other) const;

private:
    NetworkConfig cfg_;
    LayerShapes shapes_;
    Parameters params_;
    Rng dropout_rng_;
};

/// Weights ~ N(0, 1) times init_gain, also scaled by 1/sqrt(fan_in) in
/// Scaled mode; biases 0.
Network init_network(const NetworkConfig& cfg, std::uint64_t seed);

enum class Mode { Train, Eval };

/// Intermediate values of one batched forward pass, kept for backprop.
struct ForwardCache {
    std::size_t batch = 0;
    Mode mode = Mode::Eval;
    Matrix cols1, act1, pool1;
    std::vector<std::uint32_t> arg1;
    Matrix cols2, act2, pool2;
    std::vector<std::uint32_t> arg2;
    std::vector<Matrix> dense_in;  // input of each dense layer (after dropout)
    std::vector<Matrix> relu_out;  // hidden activations before dropout
    std::vector<Matrix> masks;     // scaled keep masks, train mode only
    Matrix probs;                  // batch x K
};

/// Forward pass over a batch of flattened patches (one patch per row,
/// layout k x k x d with the band fastest). Train mode applies inverted
/// dropout drawn from `rng`; Eval mode is deterministic.
ForwardCache forward_batch(const Network& net, const Matrix& patches, Mode mode, Rng* rng = nullptr);

/// Gradients of the mean cross-entropy over the batch. `labels` are class
/// indices 0..K-1. `loss` receives the batch loss when non-null.
Parameters backward_batch(const Network& net, const ForwardCache& cache, std::span<const int> labels, double* loss = nullptr);

struct ForwardResult {
    std::vector<double> probs;
    ForwardCache cache;
};

/// Single-patch forward.
ForwardResult forward(Network& net, const Patch& patch, Mode mode);

/// Gradients for one patch; `label` is a class in 1..K.
Parameters backward(const Network& net, const ForwardCache& cache, int label);

/// p <- p - lr * g for every parameter. Throws on a non-finite gradient.
void sgd_step(Network& net, const Parameters& grads, double learning_rate);

}  // namespace hsic::nn
