#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hsic/data.hpp"
#include "hsic/nn/network.hpp"

namespace hsic::nn {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 100;
    bool dropout = true;
    bool augment = false;
    std::uint64_t seed = 0;
};

/// Serves k x k x d patches of a (normalized) cube. Holds a mirror-padded
/// copy so every patch row is a contiguous copy.
class PatchSource {
public:
    PatchSource(const HsiCube& cube, std::size_t patch_size);

    std::size_t patch_size() const { return k_; }
    std::size_t bands() const { return padded_.bands(); }
    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t patch_length() const { return k_ * k_ * padded_.bands(); }

    /// Writes the patch centered at `pixel` (row-major index) into `out`.
    void fill(std::size_t pixel, std::span<double> out) const;

    /// Same patch under dihedral transform `transform` (0..7).
    void fill_transformed(std::size_t pixel, int transform, std::span<double> out) const;

    Patch patch(std::size_t pixel) const;

private:
    std::size_t k_;
    std::size_t height_;
    std::size_t width_;
    HsiCube padded_;
};

/// One of the 8 symmetries of the square acting on the spatial axes:
/// rotate by 90 degrees `t % 4` times, then mirror columns when t >= 4.
Patch apply_dihedral(const Patch& patch, int transform);

/// Applies a uniformly chosen dihedral transform.
Patch augment_patch(const Patch& patch, std::uint64_t seed);

struct EpochStats {
    double mean_loss = 0.0;
    double train_accuracy = 0.0;  // of the train-mode forward passes
};

/// Shuffles the samples every epoch (from `rng`), then runs one
/// forward/backward/SGD step per batch. Dropout masks come from the
/// network's own generator.
std::vector<EpochStats> train_epochs(Network& net, std::span<const Sample> samples, const PatchSource& source,
                                     const TrainConfig& cfg, std::size_t epochs, Rng& rng);

/// Eval-mode posteriors for every pixel, rows in row-major pixel order.
ProbMap predict_probmap(const Network& net, const PatchSource& source);
ProbMap predict_probmap(const Network& net, const HsiCube& cube, std::size_t k);

}  // namespace hsic::nn
