#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hsic/data.hpp"

namespace hsic::synth {

/// K pure-material spectra, each a d-vector.
struct EndmemberSet {
    std::vector<std::vector<double>> spectra;

    int count() const { return static_cast<int>(spectra.size()); }
    std::size_t bands() const { return spectra.empty() ? 0 : spectra.front().size(); }
};

/// h x w x K abundances, class index fastest. Non-negative and summing to
/// one at every pixel.
struct AbundanceField {
    std::size_t height = 0;
    std::size_t width = 0;
    int classes = 0;
    std::vector<double> values;

    std::span<const double> at(std::size_t pixel) const {
        return {values.data() + pixel * static_cast<std::size_t>(classes), static_cast<std::size_t>(classes)};
    }
};

enum class GammaMode { PerPixel, Global };

struct GbmConfig {
    std::size_t height = 100;
    std::size_t width = 100;
    std::size_t bands = 64;
    int classes = 5;
    double snr_db = 30.0;
    bool add_noise = true;
    /// Gaussian-field length scale in pixels.
    double field_smoothness = 16.0;
    /// Scale applied to the unit-variance fields before the softmax; larger
    /// values give purer pixels.
    double abundance_contrast = 12.0;
    GammaMode gamma_mode = GammaMode::PerPixel;
    std::uint64_t seed = 0;
};

struct SyntheticScene {
    HsiCube cube;
    LabelMap truth;
    EndmemberSet endmembers;
    AbundanceField abundances;
};

/// Smoothed positive random walks rescaled to [0.1, 0.9].
EndmemberSet sample_endmembers(std::size_t bands, int classes, std::uint64_t seed);

/// K smoothed white-noise fields pushed through a per-pixel softmax.
AbundanceField gaussian_abundance_fields(std::size_t height, std::size_t width, int classes, double field_smoothness,
                                         std::uint64_t seed, double contrast = 4.0);

/// Generalized bilinear mixture:
///   z = sum_i a_i e_i + sum_{i<j} gamma_ij a_i a_j (e_i .* e_j) + noise.
/// `gamma` is K x K row-major; only entries with i < j are read.
std::vector<double> gbm_mix(std::span<const double> abundances, const EndmemberSet& endmembers,
                            std::span<const double> gamma, std::span<const double> noise);

/// Noise variance that realizes `snr_db` for a signal of mean power `signal_power`.
double noise_variance_for_snr(double signal_power, double snr_db);

/// Adds i.i.d. zero-mean Gaussian noise at the requested SNR, where the
/// signal power is the mean squared value of `clean`.
std::vector<double> add_noise_snr(std::span<const double> clean, double snr_db, std::uint64_t seed);

/// Abundances -> per-pixel gamma -> GBM mix -> SNR noise. Truth is the
/// argmax abundance (ties to the smaller class index).
SyntheticScene generate_synthetic(const GbmConfig& cfg);

}  // namespace hsic::synth
