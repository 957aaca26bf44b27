#include "hsic/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hsic/rng.hpp"

namespace hsic {

HsiCube::HsiCube(std::size_t height, std::size_t width, std::size_t bands)
    : height_(height), width_(width), bands_(bands), values_(height * width * bands, 0.0) {
    if (height == 0 || width == 0 || bands == 0) throw std::invalid_argument("HsiCube: dimensions must be positive");
}

HsiCube::HsiCube(std::size_t height, std::size_t width, std::size_t bands, std::vector<double> values)
    : height_(height), width_(width), bands_(bands), values_(std::move(values)) {
    if (height == 0 || width == 0 || bands == 0) throw std::invalid_argument("HsiCube: dimensions must be positive");
    if (values_.size() != height * width * bands)
        throw std::invalid_argument("HsiCube: value count " + std::to_string(values_.size()) + " does not match " +
                                    std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(bands));
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("HsiCube: non-finite value");
}

LabelMap::LabelMap(std::size_t height, std::size_t width, int num_classes)
    : height_(height), width_(width), num_classes_(num_classes), labels_(height * width, 0) {
    if (height == 0 || width == 0) throw std::invalid_argument("LabelMap: dimensions must be positive");
    if (num_classes < 1) throw std::invalid_argument("LabelMap: num_classes must be positive");
}

LabelMap::LabelMap(std::size_t height, std::size_t width, int num_classes, std::vector<int> labels)
    : height_(height), width_(width), num_classes_(num_classes), labels_(std::move(labels)) {
    if (height == 0 || width == 0) throw std::invalid_argument("LabelMap: dimensions must be positive");
    if (num_classes < 1) throw std::invalid_argument("LabelMap: num_classes must be positive");
    if (labels_.size() != height * width) throw std::invalid_argument("LabelMap: label count does not match dimensions");
    for (int v : labels_)
        if (v < 0 || v > num_classes)
            throw std::invalid_argument("LabelMap: label " + std::to_string(v) + " outside 0.." +
                                        std::to_string(num_classes));
}

bool LabelMap::fully_labeled() const {
    return std::all_of(labels_.begin(), labels_.end(), [](int v) { return v != 0; });
}

ProbMap::ProbMap(std::size_t rows, int classes)
    : rows_(rows), classes_(classes), probs_(rows * static_cast<std::size_t>(classes), 0.0) {
    if (classes < 1) throw std::invalid_argument("ProbMap: classes must be positive");
}

ProbMap::ProbMap(std::size_t rows, int classes, std::vector<double> probs)
    : rows_(rows), classes_(classes), probs_(std::move(probs)) {
    if (classes < 1) throw std::invalid_argument("ProbMap: classes must be positive");
    if (probs_.size() != rows * static_cast<std::size_t>(classes))
        throw std::invalid_argument("ProbMap: value count does not match rows x classes");
}

LabelMap ProbMap::argmax(std::size_t height, std::size_t width) const {
    if (height * width != rows_) throw std::invalid_argument("ProbMap::argmax: grid does not match row count");
    std::vector<int> labels(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        const auto r = row(i);
        labels[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin()) + 1;
    }
    return LabelMap(height, width, classes_, std::move(labels));
}

void ProbMap::validate(double tol) const {
    for (std::size_t i = 0; i < rows_; ++i) {
        double sum = 0.0;
        for (double p : row(i)) {
            if (!(p >= 0.0)) throw std::runtime_error("ProbMap: negative or NaN entry in row " + std::to_string(i));
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol) throw std::runtime_error("ProbMap: row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
}

std::size_t reflect_index(std::ptrdiff_t index, std::size_t extent) {
    if (extent == 1) return 0;
    const auto n = static_cast<std::ptrdiff_t>(extent);
    const std::ptrdiff_t period = 2 * (n - 1);
    std::ptrdiff_t m = index % period;
    if (m < 0) m += period;
    return static_cast<std::size_t>(m < n ? m : period - m);
}

Patch extract_patch(const HsiCube& cube, std::size_t row, std::size_t col, std::size_t k) {
    if (k % 2 == 0) throw std::invalid_argument("extract_patch: patch size " + std::to_string(k) + " is not odd");
    if (row >= cube.height() || col >= cube.width())
        throw std::invalid_argument("extract_patch: center (" + std::to_string(row) + "," + std::to_string(col) +
                                    ") outside the cube");
    const std::size_t d = cube.bands();
    const auto half = static_cast<std::ptrdiff_t>(k / 2);
    Patch patch{k, d, row, col, std::vector<double>(k * k * d)};
    for (std::size_t u = 0; u < k; ++u) {
        const std::size_t src_r = reflect_index(static_cast<std::ptrdiff_t>(row) - half + static_cast<std::ptrdiff_t>(u), cube.height());
        for (std::size_t v = 0; v < k; ++v) {
            const std::size_t src_c = reflect_index(static_cast<std::ptrdiff_t>(col) - half + static_cast<std::ptrdiff_t>(v), cube.width());
            const auto src = cube.spectrum(src_r * cube.width() + src_c);
            std::copy(src.begin(), src.end(), patch.values.begin() + static_cast<std::ptrdiff_t>((u * k + v) * d));
        }
    }
    return patch;
}

HsiCube mirror_pad(const HsiCube& cube, std::size_t pad) {
    const std::size_t h = cube.height() + 2 * pad;
    const std::size_t w = cube.width() + 2 * pad;
    const std::size_t d = cube.bands();
    HsiCube out(h, w, d);
    const auto p = static_cast<std::ptrdiff_t>(pad);
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t sr = reflect_index(static_cast<std::ptrdiff_t>(r) - p, cube.height());
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t sc = reflect_index(static_cast<std::ptrdiff_t>(c) - p, cube.width());
            const auto src = cube.spectrum(sr * cube.width() + sc);
            std::copy(src.begin(), src.end(), out.spectrum(r * w + c).begin());
        }
    }
    return out;
}

std::pair<SampleSet, SampleSet> stratified_split(const LabelMap& truth, const SplitSpec& spec, std::uint64_t seed) {
    const int num_classes = truth.num_classes();
    if (const auto* f = std::get_if<SplitFraction>(&spec)) {
        if (!(f->value > 0.0 && f->value < 1.0)) throw std::invalid_argument("stratified_split: fraction must lie in (0, 1)");
    } else if (std::get<SplitCount>(spec).value < 1) {
        throw std::invalid_argument("stratified_split: count must be at least 1");
    }

    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes) + 1);
    for (std::size_t i = 0; i < truth.pixels(); ++i)
        if (truth[i] != 0) by_class[static_cast<std::size_t>(truth[i])].push_back(i);

    SampleSet train, test;
    train.class_counts.assign(static_cast<std::size_t>(num_classes) + 1, 0);
    test.class_counts.assign(static_cast<std::size_t>(num_classes) + 1, 0);
    for (int k = 1; k <= num_classes; ++k) {
        auto& pixels = by_class[static_cast<std::size_t>(k)];
        if (pixels.empty()) throw std::invalid_argument("stratified_split: class " + std::to_string(k) + " has no labeled pixels");
        const std::size_t total = pixels.size();
        std::size_t n_train = 0;
        if (const auto* f = std::get_if<SplitFraction>(&spec)) {
            n_train = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(f->value * static_cast<double>(total))));
        } else {
            n_train = std::min(std::get<SplitCount>(spec).value, total);
        }
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(k));
        shuffle(pixels, rng);
        std::sort(pixels.begin(), pixels.begin() + static_cast<std::ptrdiff_t>(n_train));
        std::sort(pixels.begin() + static_cast<std::ptrdiff_t>(n_train), pixels.end());
        for (std::size_t j = 0; j < total; ++j) {
            auto& set = j < n_train ? train : test;
            set.samples.push_back({pixels[j], k});
            ++set.class_counts[static_cast<std::size_t>(k)];
        }
    }
    return {std::move(train), std::move(test)};
}

HsiCube normalize_bands(const HsiCube& cube) {
    const std::size_t d = cube.bands();
    const std::size_t n = cube.pixels();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = cube.spectrum(i);
        for (std::size_t b = 0; b < d; ++b) {
            if (!std::isfinite(s[b])) throw std::invalid_argument("normalize_bands: non-finite value");
            lo[b] = std::min(lo[b], s[b]);
            hi[b] = std::max(hi[b], s[b]);
        }
    }
    HsiCube out(cube.height(), cube.width(), d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = cube.spectrum(i);
        auto o = out.spectrum(i);
        for (std::size_t b = 0; b < d; ++b) o[b] = hi[b] > lo[b] ? (s[b] - lo[b]) / (hi[b] - lo[b]) : 0.0;
    }
    return out;
}

HsiCube standardize_bands(const HsiCube& cube) {
    const std::size_t d = cube.bands();
    const std::size_t n = cube.pixels();
    std::vector<double> mean(d, 0.0);
    std::vector<double> sq(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = cube.spectrum(i);
        for (std::size_t b = 0; b < d; ++b) {
            if (!std::isfinite(s[b])) throw std::invalid_argument("standardize_bands: non-finite value");
            mean[b] += s[b];
        }
    }
    for (auto& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = cube.spectrum(i);
        for (std::size_t b = 0; b < d; ++b) sq[b] += (s[b] - mean[b]) * (s[b] - mean[b]);
    }
    HsiCube out(cube.height(), cube.width(), d);
    for (std::size_t b = 0; b < d; ++b) sq[b] = std::sqrt(sq[b] / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = cube.spectrum(i);
        auto o = out.spectrum(i);
        // relative threshold so round-off in a constant band does not blow up
        for (std::size_t b = 0; b < d; ++b)
            o[b] = sq[b] > 1e-12 * (1.0 + std::abs(mean[b])) ? (s[b] - mean[b]) / sq[b] : 0.0;
    }
    return out;
}

}  // namespace hsic
