#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace hsic {

/// h x w x d reflectance volume. Storage is row-major with the band index
/// fastest: value(r, c, b) lives at (r * w + c) * d + b.
class HsiCube {
public:
    HsiCube() = default;
    HsiCube(std::size_t height, std::size_t width, std::size_t bands);
    HsiCube(std::size_t height, std::size_t width, std::size_t bands, std::vector<double> values);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t bands() const { return bands_; }
    std::size_t pixels() const { return height_ * width_; }

    double at(std::size_t row, std::size_t col, std::size_t band) const {
        return values_[(row * width_ + col) * bands_ + band];
    }
    double& at(std::size_t row, std::size_t col, std::size_t band) {
        return values_[(row * width_ + col) * bands_ + band];
    }

    std::span<const double> spectrum(std::size_t pixel) const {
        return {values_.data() + pixel * bands_, bands_};
    }
    std::span<double> spectrum(std::size_t pixel) { return {values_.data() + pixel * bands_, bands_}; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool operator==(const HsiCube&) const = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t bands_ = 0;
    std::vector<double> values_;
};

/// h x w class field. 0 marks an unlabeled pixel; classes are 1..K.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(std::size_t height, std::size_t width, int num_classes);
    LabelMap(std::size_t height, std::size_t width, int num_classes, std::vector<int> labels);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t pixels() const { return height_ * width_; }
    int num_classes() const { return num_classes_; }

    int at(std::size_t row, std::size_t col) const { return labels_[row * width_ + col]; }
    int& at(std::size_t row, std::size_t col) { return labels_[row * width_ + col]; }
    int operator[](std::size_t pixel) const { return labels_[pixel]; }
    int& operator[](std::size_t pixel) { return labels_[pixel]; }

    const std::vector<int>& labels() const { return labels_; }

    /// True when every pixel carries a class in 1..K.
    bool fully_labeled() const;

    bool operator==(const LabelMap&) const = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    int num_classes_ = 0;
    std::vector<int> labels_;
};

/// k x k x d window with the band index fastest.
struct Patch {
    std::size_t size = 0;
    std::size_t bands = 0;
    std::size_t row = 0;
    std::size_t col = 0;
    std::vector<double> values;

    double at(std::size_t u, std::size_t v, std::size_t b) const { return values[(u * size + v) * bands + b]; }
};

struct Sample {
    std::size_t pixel = 0;
    int label = 0;

    bool operator==(const Sample&) const = default;
};

/// Labeled pixels grouped by class. Pixel indices are row-major.
struct SampleSet {
    std::vector<Sample> samples;
    std::vector<std::size_t> class_counts;  // index 0 unused; class_counts[k] = l^(k)

    std::size_t size() const { return samples.size(); }
};

/// n x K row-stochastic posterior matrix, rows in row-major pixel order.
class ProbMap {
public:
    ProbMap() = default;
    ProbMap(std::size_t rows, int classes);
    ProbMap(std::size_t rows, int classes, std::vector<double> probs);

    std::size_t rows() const { return rows_; }
    int classes() const { return classes_; }

    double at(std::size_t row, int cls) const { return probs_[row * classes_ + cls]; }
    double& at(std::size_t row, int cls) { return probs_[row * classes_ + cls]; }
    std::span<const double> row(std::size_t i) const {
        return {probs_.data() + i * classes_, static_cast<std::size_t>(classes_)};
    }
    std::span<double> row(std::size_t i) { return {probs_.data() + i * classes_, static_cast<std::size_t>(classes_)}; }

    const std::vector<double>& values() const { return probs_; }

    /// Per-row argmax as a label map (classes 1..K, ties to the smaller index).
    LabelMap argmax(std::size_t height, std::size_t width) const;

    /// Throws when a row is negative or does not sum to 1 within tol.
    void validate(double tol = 1e-9) const;

private:
    std::size_t rows_ = 0;
    int classes_ = 0;
    std::vector<double> probs_;
};

/// Mirror index about the border without repeating the edge sample
/// (..., 2, 1, | 0, 1, ..., n-1, | n-2, ...). Folds repeatedly for any offset.
std::size_t reflect_index(std::ptrdiff_t index, std::size_t extent);

Patch extract_patch(const HsiCube& cube, std::size_t row, std::size_t col, std::size_t k);

/// Cube padded by `pad` pixels on each side with the same mirror rule as
/// extract_patch. The patch centered at (r, c) is the k x k window of the
/// padded cube whose top-left corner is (r, c) when pad = k / 2.
HsiCube mirror_pad(const HsiCube& cube, std::size_t pad);

struct SplitFraction {
    double value;
};
struct SplitCount {
    std::size_t value;
};
using SplitSpec = std::variant<SplitFraction, SplitCount>;

/// Per-class random split. Train size per class is max(1, round(f * total))
/// for a fraction, or min(count, total) for a count.
std::pair<SampleSet, SampleSet> stratified_split(const LabelMap& truth, const SplitSpec& spec, std::uint64_t seed);

/// Linearly rescales every band to [0, 1]; constant bands map to 0.
HsiCube normalize_bands(const HsiCube& cube);

/// Shifts and scales every band to zero mean and unit variance; constant
/// bands map to 0.
HsiCube standardize_bands(const HsiCube& cube);

}  // namespace hsic
