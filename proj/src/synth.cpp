#include "hsic/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hsic/rng.hpp"

namespace hsic::synth {

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
        const double v = std::exp(-0.5 * static_cast<double>(t * t) / (sigma * sigma));
        k[static_cast<std::size_t>(t + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

// 1-D convolution along a strided line with mirror borders.
void convolve_line(const double* in, double* out, std::size_t n, std::size_t stride, const std::vector<double>& kernel) {
    const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
            const std::size_t j = reflect_index(static_cast<std::ptrdiff_t>(i) + t, n);
            acc += kernel[static_cast<std::size_t>(t + radius)] * in[j * stride];
        }
        out[i * stride] = acc;
    }
}

// White noise smoothed by an isotropic Gaussian and rescaled back to unit variance.
std::vector<double> smooth_field(std::size_t h, std::size_t w, double sigma, Rng& rng) {
    std::vector<double> field(h * w);
    for (double& v : field) v = standard_normal(rng);
    if (sigma < 1e-3) return field;
    const auto kernel = gaussian_kernel(sigma);
    std::vector<double> tmp(h * w);
    for (std::size_t r = 0; r < h; ++r) convolve_line(field.data() + r * w, tmp.data() + r * w, w, 1, kernel);
    for (std::size_t c = 0; c < w; ++c) convolve_line(tmp.data() + c, field.data() + c, h, w, kernel);
    double energy = 0.0;
    for (double v : kernel) energy += v * v;
    // the 2-D kernel is separable, so its squared norm is energy^2
    for (double& v : field) v /= energy;
    return field;
}

}  // namespace

EndmemberSet sample_endmembers(std::size_t bands, int classes, std::uint64_t seed) {
    if (classes < 2) throw std::invalid_argument("sample_endmembers: need at least 2 endmembers");
    if (static_cast<std::size_t>(classes) > bands)
        throw std::invalid_argument("sample_endmembers: " + std::to_string(classes) + " endmembers exceed " +
                                    std::to_string(bands) + " bands");
    Rng rng = make_rng(seed, 0x656e646dULL);
    const auto kernel = gaussian_kernel(std::max(1.0, static_cast<double>(bands) / 32.0));
    EndmemberSet set;
    while (set.spectra.size() < static_cast<std::size_t>(classes)) {
        std::vector<double> walk(bands);
        double x = 0.0;
        for (double& v : walk) {
            x += standard_normal(rng);
            v = x;
        }
        std::vector<double> spectrum(bands);
        convolve_line(walk.data(), spectrum.data(), bands, 1, kernel);
        const auto [lo_it, hi_it] = std::minmax_element(spectrum.begin(), spectrum.end());
        const double lo = *lo_it;
        const double hi = *hi_it;
        if (!(hi > lo)) continue;
        for (double& v : spectrum) v = 0.1 + 0.8 * (v - lo) / (hi - lo);
        const bool duplicate = std::any_of(set.spectra.begin(), set.spectra.end(), [&](const std::vector<double>& e) {
            double dist = 0.0;
            for (std::size_t b = 0; b < bands; ++b) dist += (e[b] - spectrum[b]) * (e[b] - spectrum[b]);
            return dist < 1e-12;
        });
        if (!duplicate) set.spectra.push_back(std::move(spectrum));
    }
    return set;
}

AbundanceField gaussian_abundance_fields(std::size_t height, std::size_t width, int classes, double field_smoothness,
                                         std::uint64_t seed, double contrast) {
    if (height == 0 || width == 0) throw std::invalid_argument("gaussian_abundance_fields: empty grid");
    if (classes < 1) throw std::invalid_argument("gaussian_abundance_fields: need at least one class");
    if (!(field_smoothness >= 0.0) || !std::isfinite(field_smoothness))
        throw std::invalid_argument("gaussian_abundance_fields: smoothness must be finite and non-negative");
    if (!(contrast > 0.0) || !std::isfinite(contrast))
        throw std::invalid_argument("gaussian_abundance_fields: contrast must be positive");

    const std::size_t n = height * width;
    const auto k_count = static_cast<std::size_t>(classes);
    std::vector<std::vector<double>> fields;
    fields.reserve(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        Rng rng = make_rng(seed, 0x6669656c64ULL + k);
        fields.push_back(smooth_field(height, width, field_smoothness, rng));
    }

    AbundanceField out{height, width, classes, std::vector<double>(n * k_count)};
    std::vector<double> logits(k_count);
    for (std::size_t i = 0; i < n; ++i) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < k_count; ++k) {
            logits[k] = contrast * fields[k][i];
            top = std::max(top, logits[k]);
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            logits[k] = std::exp(logits[k] - top);
            sum += logits[k];
        }
        for (std::size_t k = 0; k < k_count; ++k) out.values[i * k_count + k] = logits[k] / sum;
    }
    return out;
}

std::vector<double> gbm_mix(std::span<const double> abundances, const EndmemberSet& endmembers,
                            std::span<const double> gamma, std::span<const double> noise) {
    const std::size_t k_count = abundances.size();
    const std::size_t d = endmembers.bands();
    if (static_cast<int>(k_count) != endmembers.count()) throw std::invalid_argument("gbm_mix: abundance length mismatch");
    if (gamma.size() != k_count * k_count) throw std::invalid_argument("gbm_mix: gamma must be K x K");
    if (noise.size() != d) throw std::invalid_argument("gbm_mix: noise length mismatch");

    std::vector<double> z(noise.begin(), noise.end());
    for (std::size_t i = 0; i < k_count; ++i) {
        const auto& ei = endmembers.spectra[i];
        for (std::size_t b = 0; b < d; ++b) z[b] += abundances[i] * ei[b];
    }
    for (std::size_t i = 0; i + 1 < k_count; ++i) {
        const auto& ei = endmembers.spectra[i];
        for (std::size_t j = i + 1; j < k_count; ++j) {
            const double scale = gamma[i * k_count + j] * abundances[i] * abundances[j];
            if (scale == 0.0) continue;
            const auto& ej = endmembers.spectra[j];
            for (std::size_t b = 0; b < d; ++b) z[b] += scale * ei[b] * ej[b];
        }
    }
    return z;
}

double noise_variance_for_snr(double signal_power, double snr_db) {
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

std::vector<double> add_noise_snr(std::span<const double> clean, double snr_db, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("add_noise_snr: SNR must be finite");
    if (clean.empty()) throw std::invalid_argument("add_noise_snr: empty signal");
    double power = 0.0;
    for (double v : clean) power += v * v;
    power /= static_cast<double>(clean.size());
    if (!(power > 0.0)) throw std::invalid_argument("add_noise_snr: signal has zero power, SNR is undefined");
    const double sigma = std::sqrt(noise_variance_for_snr(power, snr_db));
    Rng rng = make_rng(seed, 0x6e6f697365ULL);
    std::vector<double> out(clean.begin(), clean.end());
    for (double& v : out) v += sigma * standard_normal(rng);
    return out;
}

SyntheticScene generate_synthetic(const GbmConfig& cfg) {
    if (cfg.height == 0 || cfg.width == 0 || cfg.bands == 0) throw std::invalid_argument("generate_synthetic: empty cube");
    if (cfg.add_noise && !std::isfinite(cfg.snr_db)) throw std::invalid_argument("generate_synthetic: SNR must be finite");

    SyntheticScene scene;
    scene.endmembers = sample_endmembers(cfg.bands, cfg.classes, hash_combine(cfg.seed, 1));
    scene.abundances = gaussian_abundance_fields(cfg.height, cfg.width, cfg.classes, cfg.field_smoothness,
                                                 hash_combine(cfg.seed, 2), cfg.abundance_contrast);

    const std::size_t n = cfg.height * cfg.width;
    const auto k_count = static_cast<std::size_t>(cfg.classes);
    const std::uint64_t gamma_seed = hash_combine(cfg.seed, 3);
    std::vector<double> gamma(k_count * k_count, 0.0);
    auto draw_gamma = [&](std::uint64_t key) {
        for (std::size_t i = 0; i < k_count; ++i)
            for (std::size_t j = i + 1; j < k_count; ++j)
                gamma[i * k_count + j] = unit_double(hash_combine(hash_combine(gamma_seed, key), i * k_count + j));
    };
    if (cfg.gamma_mode == GammaMode::Global) draw_gamma(std::numeric_limits<std::uint64_t>::max());

    std::vector<double> clean(n * cfg.bands);
    const std::vector<double> zero_noise(cfg.bands, 0.0);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (cfg.gamma_mode == GammaMode::PerPixel) draw_gamma(i);
        const auto a = scene.abundances.at(i);
        const auto z = gbm_mix(a, scene.endmembers, gamma, zero_noise);
        std::copy(z.begin(), z.end(), clean.begin() + static_cast<std::ptrdiff_t>(i * cfg.bands));
        labels[i] = static_cast<int>(std::max_element(a.begin(), a.end()) - a.begin()) + 1;
    }

    std::vector<double> values = cfg.add_noise ? add_noise_snr(clean, cfg.snr_db, hash_combine(cfg.seed, 4)) : std::move(clean);
    scene.cube = HsiCube(cfg.height, cfg.width, cfg.bands, std::move(values));
    scene.truth = LabelMap(cfg.height, cfg.width, cfg.classes, std::move(labels));
    return scene;
}

}  // namespace hsic::synth
