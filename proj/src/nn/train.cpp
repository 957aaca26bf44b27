#include "hsic/nn/train.hpp"

#include <algorithm>
#include <stdexcept>

namespace hsic::nn {

namespace {

// Source coordinate of output position (u, v) under a dihedral transform.
std::pair<std::size_t, std::size_t> dihedral_source(std::size_t u, std::size_t v, std::size_t k, int transform) {
    if (transform >= 4) v = k - 1 - v;
    for (int r = 0; r < transform % 4; ++r) {
        const std::size_t nu = v;
        const std::size_t nv = k - 1 - u;
        u = nu;
        v = nv;
    }
    return {u, v};
}

}  // namespace

PatchSource::PatchSource(const HsiCube& cube, std::size_t patch_size)
    : k_(patch_size), height_(cube.height()), width_(cube.width()), padded_(mirror_pad(cube, patch_size / 2)) {
    if (patch_size % 2 == 0) throw std::invalid_argument("PatchSource: patch size must be odd");
}

void PatchSource::fill(std::size_t pixel, std::span<double> out) const {
    if (out.size() != patch_length()) throw std::invalid_argument("PatchSource::fill: buffer length mismatch");
    const std::size_t r = pixel / width_;
    const std::size_t c = pixel % width_;
    const std::size_t span = k_ * padded_.bands();
    for (std::size_t u = 0; u < k_; ++u) {
        const auto row = padded_.spectrum((r + u) * padded_.width() + c);
        std::copy(row.data(), row.data() + span, out.begin() + static_cast<std::ptrdiff_t>(u * span));
    }
}

void PatchSource::fill_transformed(std::size_t pixel, int transform, std::span<double> out) const {
    if (transform == 0) return fill(pixel, out);
    if (out.size() != patch_length()) throw std::invalid_argument("PatchSource::fill: buffer length mismatch");
    const std::size_t r = pixel / width_;
    const std::size_t c = pixel % width_;
    const std::size_t d = padded_.bands();
    for (std::size_t u = 0; u < k_; ++u)
        for (std::size_t v = 0; v < k_; ++v) {
            const auto [su, sv] = dihedral_source(u, v, k_, transform);
            const auto spec = padded_.spectrum((r + su) * padded_.width() + c + sv);
            std::copy(spec.begin(), spec.end(), out.begin() + static_cast<std::ptrdiff_t>((u * k_ + v) * d));
        }
}

Patch PatchSource::patch(std::size_t pixel) const {
    Patch p{k_, padded_.bands(), pixel / width_, pixel % width_, std::vector<double>(patch_length())};
    fill(pixel, p.values);
    return p;
}

Patch apply_dihedral(const Patch& patch, int transform) {
    if (transform < 0 || transform > 7) throw std::invalid_argument("apply_dihedral: transform must be 0..7");
    Patch out = patch;
    const std::size_t k = patch.size;
    const std::size_t d = patch.bands;
    for (std::size_t u = 0; u < k; ++u)
        for (std::size_t v = 0; v < k; ++v) {
            const auto [su, sv] = dihedral_source(u, v, k, transform);
            std::copy_n(patch.values.begin() + static_cast<std::ptrdiff_t>((su * k + sv) * d), d,
                        out.values.begin() + static_cast<std::ptrdiff_t>((u * k + v) * d));
        }
    return out;
}

Patch augment_patch(const Patch& patch, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x6175676dULL);
    return apply_dihedral(patch, static_cast<int>(uniform_index(rng, 8)));
}

std::vector<EpochStats> train_epochs(Network& net, std::span<const Sample> samples, const PatchSource& source,
                                     const TrainConfig& cfg, std::size_t epochs, Rng& rng) {
    if (samples.empty()) throw std::invalid_argument("train_epochs: no training samples");
    if (cfg.batch_size == 0) throw std::invalid_argument("train_epochs: batch size must be at least 1");
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train_epochs: learning rate must be positive");
    if (source.patch_size() != net.config().patch_size || source.bands() != net.config().bands)
        throw std::invalid_argument("train_epochs: patch source does not match the network");

    const Mode mode = cfg.dropout ? Mode::Train : Mode::Eval;
    std::vector<std::size_t> order(samples.size());
    std::vector<EpochStats> stats;
    Matrix batch;
    std::vector<int> labels;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(order, rng);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t b = std::min(cfg.batch_size, order.size() - start);
            batch.resize(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(source.patch_length()));
            labels.resize(b);
            for (std::size_t i = 0; i < b; ++i) {
                const Sample& s = samples[order[start + i]];
                std::span<double> row(batch.data() + i * source.patch_length(), source.patch_length());
                if (cfg.augment) source.fill_transformed(s.pixel, static_cast<int>(uniform_index(rng, 8)), row);
                else source.fill(s.pixel, row);
                labels[i] = s.label - 1;
            }
            const ForwardCache cache = forward_batch(net, batch, mode, &net.dropout_rng());
            double loss = 0.0;
            const Parameters grads = backward_batch(net, cache, labels, &loss);
            sgd_step(net, grads, cfg.learning_rate);
            loss_sum += loss * static_cast<double>(b);
            for (std::size_t i = 0; i < b; ++i) {
                Eigen::Index best = 0;
                cache.probs.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
                if (best == labels[i]) ++correct;
            }
        }
        stats.push_back({loss_sum / static_cast<double>(order.size()),
                         static_cast<double>(correct) / static_cast<double>(order.size())});
    }
    return stats;
}

ProbMap predict_probmap(const Network& net, const PatchSource& source) {
    if (source.patch_size() != net.config().patch_size || source.bands() != net.config().bands)
        throw std::invalid_argument("predict_probmap: patch source does not match the network");
    const std::size_t n = source.height() * source.width();
    const int k = net.config().classes;
    ProbMap probs(n, k);
    constexpr std::size_t kChunk = 256;
    Matrix batch;
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t b = std::min(kChunk, n - start);
        batch.resize(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(source.patch_length()));
        for (std::size_t i = 0; i < b; ++i)
            source.fill(start + i, std::span<double>(batch.data() + i * source.patch_length(), source.patch_length()));
        const ForwardCache cache = forward_batch(net, batch, Mode::Eval);
        std::copy(cache.probs.data(), cache.probs.data() + cache.probs.size(), probs.row(start).data());
    }
    return probs;
}

ProbMap predict_probmap(const Network& net, const HsiCube& cube, std::size_t k) {
    return predict_probmap(net, PatchSource(cube, k));
}

}  // namespace hsic::nn
