#include "hsic/nn/network.hpp"

#include <cmath>

namespace hsic::nn {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t v) { return static_cast<Index>(v); }

}  // namespace

LayerShapes derive_shapes(const NetworkConfig& cfg) {
    if (cfg.patch_size == 0 || cfg.patch_size % 2 == 0)
        throw ConfigError("patch_size must be odd and positive, got " + std::to_string(cfg.patch_size));
    if (cfg.bands == 0) throw ConfigError("bands must be positive");
    if (cfg.classes < 1) throw ConfigError("classes must be positive");
    if (cfg.conv1_filters == 0 || cfg.conv2_filters == 0) throw ConfigError("convolution widths must be positive");
    if (cfg.conv1_kernel == 0 || cfg.conv2_kernel == 0) throw ConfigError("kernel sizes must be positive");
    for (std::size_t h : cfg.hidden)
        if (h == 0) throw ConfigError("hidden layer widths must be positive");
    if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
    if (!(cfg.init_gain > 0.0) || !std::isfinite(cfg.init_gain)) throw ConfigError("init_gain must be finite and > 0");

    LayerShapes s;
    if (cfg.patch_size < cfg.conv1_kernel)
        throw ConfigError("n1 = patch_size - conv1_kernel + 1 >= 1 violated (patch_size " + std::to_string(cfg.patch_size) +
                          ", conv1_kernel " + std::to_string(cfg.conv1_kernel) + ")");
    s.n1 = cfg.patch_size - cfg.conv1_kernel + 1;
    s.n2 = pooled_side(s.n1);
    if (s.n2 < cfg.conv2_kernel)
        throw ConfigError("n3 = n2 - conv2_kernel + 1 >= 1 violated (n2 " + std::to_string(s.n2) + ", conv2_kernel " +
                          std::to_string(cfg.conv2_kernel) + ")");
    s.n3 = s.n2 - cfg.conv2_kernel + 1;
    s.n4 = pooled_side(s.n3);
    s.flat = s.n4 * s.n4 * cfg.conv2_filters;
    return s;
}

NetworkConfig fit_kernels_to_patch(NetworkConfig cfg) {
    cfg.conv1_kernel = std::min(cfg.conv1_kernel, cfg.patch_size);
    const std::size_t n2 = pooled_side(cfg.patch_size - cfg.conv1_kernel + 1);
    cfg.conv2_kernel = std::min(cfg.conv2_kernel, n2);
    return cfg;
}

NetworkConfig with_depth(NetworkConfig cfg, int depth) {
    if (depth < 5) throw ConfigError("network depth must be at least 5, got " + std::to_string(depth));
    const auto hidden_count = static_cast<std::size_t>(depth - 5);
    std::vector<std::size_t> hidden;
    for (std::size_t i = 0; i < hidden_count; ++i)
        hidden.push_back(i < cfg.hidden.size() ? cfg.hidden[i] : (cfg.hidden.empty() ? 100 : cfg.hidden.back()));
    cfg.hidden = std::move(hidden);
    return cfg;
}

std::size_t Parameters::scalar_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
    for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
    return n;
}

Network::Network(NetworkConfig cfg, Parameters params, std::uint64_t dropout_seed)
    : cfg_(std::move(cfg)), shapes_(derive_shapes(cfg_)), params_(std::move(params)), dropout_rng_(make_rng(dropout_seed, 0x64726f70ULL)) {
    // expected (rows, cols) of each weight matrix
    std::vector<std::pair<std::size_t, std::size_t>> expected = {
        {cfg_.conv1_filters, cfg_.conv1_kernel * cfg_.conv1_kernel * cfg_.bands},
        {cfg_.conv2_filters, cfg_.conv2_kernel * cfg_.conv2_kernel * cfg_.conv1_filters},
    };
    std::size_t in = shapes_.flat;
    for (std::size_t h : cfg_.hidden) {
        expected.emplace_back(h, in);
        in = h;
    }
    expected.emplace_back(static_cast<std::size_t>(cfg_.classes), in);
    if (params_.weights.size() != expected.size() || params_.biases.size() != expected.size())
        throw ConfigError("parameter layer count does not match the configuration");
    for (std::size_t l = 0; l < expected.size(); ++l) {
        const auto& w = params_.weights[l];
        if (static_cast<std::size_t>(w.rows()) != expected[l].first || static_cast<std::size_t>(w.cols()) != expected[l].second ||
            static_cast<std::size_t>(params_.biases[l].size()) != expected[l].first)
            throw ConfigError("parameter shape mismatch in layer " + std::to_string(l));
    }
}

bool Network::same_parameters(const Network& other) const {
    if (cfg_ != other.cfg_) return false;
    for (std::size_t l = 0; l < params_.layer_count(); ++l)
        if (params_.weights[l] != other.params_.weights[l] || params_.biases[l] != other.params_.biases[l]) return false;
    return true;
}

Network init_network(const NetworkConfig& cfg, std::uint64_t seed) {
    const LayerShapes shapes = derive_shapes(cfg);
    Rng rng = make_rng(seed, 0x696e6974ULL);
    Parameters p;
    auto add_layer = [&](std::size_t out, std::size_t fan_in) {
        Matrix w(idx(out), idx(fan_in));
        const double scale = cfg.init_gain * (cfg.init == InitMode::Scaled ? 1.0 / std::sqrt(static_cast<double>(fan_in)) : 1.0);
        for (Index i = 0; i < w.size(); ++i) w.data()[i] = scale * standard_normal(rng);
        p.weights.push_back(std::move(w));
        p.biases.push_back(Vector::Zero(idx(out)));
    };
    add_layer(cfg.conv1_filters, cfg.conv1_kernel * cfg.conv1_kernel * cfg.bands);
    add_layer(cfg.conv2_filters, cfg.conv2_kernel * cfg.conv2_kernel * cfg.conv1_filters);
    std::size_t in = shapes.flat;
    for (std::size_t h : cfg.hidden) {
        add_layer(h, in);
        in = h;
    }
    add_layer(static_cast<std::size_t>(cfg.classes), in);
    return Network(cfg, std::move(p), seed);
}

ForwardCache forward_batch(const Network& net, const Matrix& patches, Mode mode, Rng* rng) {
    const auto& cfg = net.config();
    const auto& s = net.shapes();
    const auto& p = net.params();
    if (static_cast<std::size_t>(patches.cols()) != net.input_size())
        throw std::invalid_argument("forward_batch: patch length " + std::to_string(patches.cols()) + " does not match " +
                                    std::to_string(net.input_size()));
    const bool drop = mode == Mode::Train && cfg.dropout > 0.0;
    if (drop && rng == nullptr) throw std::invalid_argument("forward_batch: train mode with dropout needs an rng");

    ForwardCache c;
    c.batch = static_cast<std::size_t>(patches.rows());
    c.mode = mode;
    const std::size_t b = c.batch;

    // a batch of k x k x d patches viewed as (b * k * k) x d maps
    const Eigen::Map<const Matrix> input(patches.data(), idx(b * cfg.patch_size * cfg.patch_size), idx(cfg.bands));
    c.cols1 = im2col(input, b, cfg.patch_size, cfg.conv1_kernel);
    c.act1.noalias() = c.cols1 * p.weights[0].transpose();
    c.act1.rowwise() += p.biases[0].transpose();
    c.act1 = c.act1.cwiseMax(0.0);
    c.pool1 = maxpool2_ceil(c.act1, b, s.n1, c.arg1);

    c.cols2 = im2col(c.pool1, b, s.n2, cfg.conv2_kernel);
    c.act2.noalias() = c.cols2 * p.weights[1].transpose();
    c.act2.rowwise() += p.biases[1].transpose();
    c.act2 = c.act2.cwiseMax(0.0);
    c.pool2 = maxpool2_ceil(c.act2, b, s.n3, c.arg2);

    // (b * n4 * n4) x F2 row-major is exactly b x (n4 * n4 * F2)
    Matrix x = Eigen::Map<const Matrix>(c.pool2.data(), idx(b), idx(s.flat));
    const std::size_t hidden = cfg.hidden.size();
    const double keep = 1.0 - cfg.dropout;
    for (std::size_t l = 0; l < hidden; ++l) {
        Matrix z;
        z.noalias() = x * p.weights[2 + l].transpose();
        z.rowwise() += p.biases[2 + l].transpose();
        z = z.cwiseMax(0.0);
        c.dense_in.push_back(std::move(x));
        if (drop) {
            Matrix mask(z.rows(), z.cols());
            for (Index i = 0; i < mask.size(); ++i) mask.data()[i] = unit_double((*rng)()) < keep ? 1.0 / keep : 0.0;
            x = z.cwiseProduct(mask);
            c.masks.push_back(std::move(mask));
        } else {
            x = z;
        }
        c.relu_out.push_back(std::move(z));
    }
    Matrix logits;
    logits.noalias() = x * p.weights[2 + hidden].transpose();
    logits.rowwise() += p.biases[2 + hidden].transpose();
    c.dense_in.push_back(std::move(x));
    softmax_rows(logits);
    c.probs = std::move(logits);
    return c;
}

Parameters backward_batch(const Network& net, const ForwardCache& c, std::span<const int> labels, double* loss) {
    const auto& cfg = net.config();
    const auto& s = net.shapes();
    const auto& p = net.params();
    const std::size_t b = c.batch;
    if (labels.size() != b) throw std::invalid_argument("backward_batch: label count does not match batch");
    const std::size_t hidden = cfg.hidden.size();

    Parameters g;
    g.weights.resize(p.weights.size());
    g.biases.resize(p.biases.size());

    // fused softmax + cross-entropy gradient at the logits
    Matrix delta = c.probs;
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const int y = labels[i];
        if (y < 0 || y >= cfg.classes) throw std::invalid_argument("backward_batch: label out of range");
        total -= std::log(std::max(c.probs(idx(i), y), kProbFloor));
        delta(idx(i), y) -= 1.0;
    }
    if (loss) *loss = total / static_cast<double>(b);
    delta /= static_cast<double>(b);

    for (std::size_t l = hidden + 1; l-- > 0;) {
        const std::size_t layer = 2 + l;
        g.weights[layer].noalias() = delta.transpose() * c.dense_in[l];
        g.biases[layer] = delta.colwise().sum().transpose();
        Matrix dx;
        dx.noalias() = delta * p.weights[layer];
        if (l == 0) {
            delta = std::move(dx);
            break;
        }
        // back through dropout and ReLU of hidden layer l - 1
        if (!c.masks.empty()) dx = dx.cwiseProduct(c.masks[l - 1]);
        delta = dx.cwiseProduct((c.relu_out[l - 1].array() > 0.0).cast<double>().matrix());
    }

    const Matrix d_pool2 = Eigen::Map<const Matrix>(delta.data(), idx(b * s.n4 * s.n4), idx(cfg.conv2_filters));
    Matrix d_act2 = maxpool2_backward(d_pool2, c.arg2, b * s.n3 * s.n3);
    d_act2 = d_act2.cwiseProduct((c.act2.array() > 0.0).cast<double>().matrix());
    g.weights[1].noalias() = d_act2.transpose() * c.cols2;
    g.biases[1] = d_act2.colwise().sum().transpose();

    Matrix d_cols2;
    d_cols2.noalias() = d_act2 * p.weights[1];
    const Matrix d_pool1 = col2im(d_cols2, b, s.n2, cfg.conv1_filters, cfg.conv2_kernel);
    Matrix d_act1 = maxpool2_backward(d_pool1, c.arg1, b * s.n1 * s.n1);
    d_act1 = d_act1.cwiseProduct((c.act1.array() > 0.0).cast<double>().matrix());
    g.weights[0].noalias() = d_act1.transpose() * c.cols1;
    g.biases[0] = d_act1.colwise().sum().transpose();
    return g;
}

ForwardResult forward(Network& net, const Patch& patch, Mode mode) {
    if (patch.size != net.config().patch_size || patch.bands != net.config().bands)
        throw std::invalid_argument("forward: patch shape does not match the network");
    const Eigen::Map<const Matrix> row(patch.values.data(), 1, idx(patch.values.size()));
    ForwardResult r;
    r.cache = forward_batch(net, Matrix(row), mode, &net.dropout_rng());
    r.probs.assign(r.cache.probs.data(), r.cache.probs.data() + r.cache.probs.size());
    return r;
}

Parameters backward(const Network& net, const ForwardCache& cache, int label) {
    const int y = label - 1;
    return backward_batch(net, cache, std::span<const int>(&y, 1));
}

void sgd_step(Network& net, const Parameters& grads, double learning_rate) {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("sgd_step: learning rate must be positive");
    auto& p = net.params();
    if (grads.weights.size() != p.weights.size()) throw std::invalid_argument("sgd_step: gradient layer count mismatch");
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite())
            throw std::runtime_error("sgd_step: non-finite gradient in layer " + std::to_string(l) + " (training diverged)");
        p.weights[l] -= learning_rate * grads.weights[l];
        p.biases[l] -= learning_rate * grads.biases[l];
    }
}

}  // namespace hsic::nn
