#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsic/synth.hpp"

using namespace hsic;
using namespace hsic::synth;

namespace {

// Sizes of the 4-connected same-label components.
std::vector<std::size_t> component_sizes(const LabelMap& m) {
    const std::size_t h = m.height(), w = m.width();
    std::vector<bool> seen(m.pixels(), false);
    std::vector<std::size_t> sizes, stack;
    for (std::size_t start = 0; start < m.pixels(); ++start) {
        if (seen[start]) continue;
        std::size_t count = 0;
        stack.push_back(start);
        seen[start] = true;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++count;
            const std::size_t r = p / w, c = p % w;
            auto visit = [&](std::size_t q) {
                if (!seen[q] && m[q] == m[p]) {
                    seen[q] = true;
                    stack.push_back(q);
                }
            };
            if (r > 0) visit(p - w);
            if (r + 1 < h) visit(p + w);
            if (c > 0) visit(p - 1);
            if (c + 1 < w) visit(p + 1);
        }
        sizes.push_back(count);
    }
    return sizes;
}

double median(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? static_cast<double>(v[v.size() / 2]) : 0.5 * static_cast<double>(v[v.size() / 2 - 1] + v[v.size() / 2]);
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("endmembers are bounded, distinct and reproducible") {
    const EndmemberSet e = sample_endmembers(162, 5, 7);
    REQUIRE(e.count() == 5);
    CHECK(e.bands() == 162);
    for (const auto& s : e.spectra)
        for (double v : s) {
            CHECK(v >= 0.1 - 1e-12);
            CHECK(v <= 0.9 + 1e-12);
        }
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            double d2 = 0.0;
            for (std::size_t b = 0; b < 162; ++b) d2 += std::pow(e.spectra[i][b] - e.spectra[j][b], 2);
            CHECK(d2 > 0.0);
        }
    CHECK(sample_endmembers(162, 5, 7).spectra == e.spectra);
    CHECK(sample_endmembers(2, 2, 0).count() == 2);
    CHECK_THROWS(sample_endmembers(3, 4, 0));
}

TEST_CASE("abundances satisfy ANC and ASC") {
    const AbundanceField a = gaussian_abundance_fields(30, 20, 4, 3.0, 5);
    for (std::size_t i = 0; i < 600; ++i) {
        const auto v = a.at(i);
        CHECK(*std::min_element(v.begin(), v.end()) >= 0.0);
        CHECK(std::accumulate(v.begin(), v.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
    const AbundanceField one = gaussian_abundance_fields(4, 4, 1, 2.0, 5);
    for (double v : one.values) CHECK(v == 1.0);
}

TEST_CASE("smoother fields give larger label components") {
    auto labels_for = [](double smoothness) {
        const AbundanceField a = gaussian_abundance_fields(60, 60, 5, smoothness, 11);
        std::vector<int> y(3600);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const auto v = a.at(i);
            y[i] = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin()) + 1;
        }
        return LabelMap(60, 60, 5, y);
    };
    CHECK(median(component_sizes(labels_for(0.3))) < median(component_sizes(labels_for(6.0))));
}

TEST_CASE("gbm_mix worked examples") {
    const std::vector<double> zero2 = {0.0, 0.0};
    const std::vector<double> gamma = {0.0, 1.0, 0.0, 0.0};
    EndmemberSet e{{{1.0, 0.0}, {0.0, 1.0}}};
    std::vector<double> a = {0.5, 0.5};
    CHECK(gbm_mix(a, e, gamma, zero2) == std::vector<double>{0.5, 0.5});

    EndmemberSet ones{{{1.0, 1.0}, {1.0, 1.0}}};
    const auto z = gbm_mix(a, ones, gamma, zero2);
    CHECK(z[0] == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(z[1] == doctest::Approx(1.25).epsilon(1e-15));

    const EndmemberSet e3 = sample_endmembers(8, 3, 1);
    const std::vector<double> g3 = {0, 0.3, 0.9, 0, 0, 0.5, 0, 0, 0};
    const std::vector<double> one_hot = {0.0, 1.0, 0.0};
    CHECK(gbm_mix(one_hot, e3, g3, std::vector<double>(8, 0.0)) == e3.spectra[1]);
}

TEST_CASE("zero gamma reduces to linear mixing") {
    const EndmemberSet e = sample_endmembers(6, 3, 2);
    const std::vector<double> a = {0.2, 0.5, 0.3};
    const auto z = gbm_mix(a, e, std::vector<double>(9, 0.0), std::vector<double>(6, 0.0));
    for (std::size_t b = 0; b < 6; ++b) {
        const double lin = 0.2 * e.spectra[0][b] + 0.5 * e.spectra[1][b] + 0.3 * e.spectra[2][b];
        CHECK(z[b] == doctest::Approx(lin).epsilon(1e-14));
    }
}

TEST_CASE("noise variance from SNR") {
    CHECK(noise_variance_for_snr(1.0, 30.0) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(noise_variance_for_snr(4.0, 0.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS(add_noise_snr(std::vector<double>(10, 0.0), 30.0, 0));
}

TEST_CASE("realized SNR within 0.1 dB") {
    std::vector<double> clean(1000000);
    for (std::size_t i = 0; i < clean.size(); ++i) clean[i] = 0.5 + 0.4 * std::sin(0.001 * static_cast<double>(i));
    for (double snr : {10.0, 30.0}) {
        const auto noisy = add_noise_snr(clean, snr, 99);
        double ps = 0.0, pn = 0.0;
        for (std::size_t i = 0; i < clean.size(); ++i) {
            ps += clean[i] * clean[i];
            pn += (noisy[i] - clean[i]) * (noisy[i] - clean[i]);
        }
        CHECK(std::abs(10.0 * std::log10(ps / pn) - snr) < 0.1);
    }
}

TEST_CASE("generated scene shape, determinism and SNR") {
    GbmConfig cfg;
    cfg.seed = 3;
    const auto scene = generate_synthetic(cfg);
    CHECK(scene.cube.height() == 100);
    CHECK(scene.cube.width() == 100);
    CHECK(scene.cube.bands() == 64);
    CHECK(scene.truth.num_classes() == 5);
    CHECK(scene.truth.fully_labeled());
    const auto again = generate_synthetic(cfg);
    CHECK(again.cube == scene.cube);
    CHECK(again.truth == scene.truth);

    // noise-free cube from the same seed isolates the realized noise
    GbmConfig clean_cfg = cfg;
    clean_cfg.add_noise = false;
    const auto clean = generate_synthetic(clean_cfg);
    double ps = 0.0, pn = 0.0;
    for (std::size_t i = 0; i < clean.cube.values().size(); ++i) {
        ps += std::pow(clean.cube.values()[i], 2);
        pn += std::pow(scene.cube.values()[i] - clean.cube.values()[i], 2);
    }
    CHECK(std::abs(10.0 * std::log10(ps / pn) - 30.0) < 0.1);
}

TEST_CASE("truth is the argmax abundance") {
    GbmConfig cfg;
    cfg.height = 30;
    cfg.width = 30;
    const auto scene = generate_synthetic(cfg);
    for (std::size_t i = 0; i < 900; ++i) {
        const auto a = scene.abundances.at(i);
        CHECK(scene.truth[i] == static_cast<int>(std::max_element(a.begin(), a.end()) - a.begin()) + 1);
    }
}

TEST_CASE("near one-hot abundances without noise reproduce endmembers") {
    GbmConfig cfg;
    cfg.height = 20;
    cfg.width = 20;
    cfg.add_noise = false;
    cfg.abundance_contrast = 1e6;
    const auto scene = generate_synthetic(cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < 400; ++i) {
        const auto z = scene.cube.spectrum(i);
        const auto& e = scene.endmembers.spectra[static_cast<std::size_t>(scene.truth[i] - 1)];
        for (std::size_t b = 0; b < z.size(); ++b) worst = std::max(worst, std::abs(z[b] - e[b]));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("default scenes cover every class") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        GbmConfig cfg;
        cfg.seed = seed;
        cfg.add_noise = false;
        const auto scene = generate_synthetic(cfg);
        std::vector<std::size_t> counts(6, 0);
        for (int y : scene.truth.labels()) ++counts[static_cast<std::size_t>(y)];
        for (int k = 1; k <= 5; ++k) CHECK_MESSAGE(counts[k] >= 1, "seed " << seed << " class " << k);
    }
}

TEST_CASE("global gamma mode is reproducible and differs from per-pixel") {
    GbmConfig cfg;
    cfg.height = 10;
    cfg.width = 10;
    cfg.add_noise = false;
    cfg.gamma_mode = GammaMode::Global;
    const auto a = generate_synthetic(cfg);
    CHECK(generate_synthetic(cfg).cube == a.cube);
    cfg.gamma_mode = GammaMode::PerPixel;
    CHECK_FALSE(generate_synthetic(cfg).cube == a.cube);
}

}
