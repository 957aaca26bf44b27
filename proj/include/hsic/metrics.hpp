#pragma once

#include <cstddef>
#include <vector>

#include "hsic/data.hpp"

namespace hsic {

/// K x K counts, rows are true classes and columns predicted classes (1-based accessors).
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int classes);
    /// Row-major counts, K * K entries.
    ConfusionMatrix(int classes, std::vector<std::size_t> counts);

    int classes() const { return classes_; }
    std::size_t at(int truth, int pred) const { return counts_[index(truth, pred)]; }
    void add(int truth, int pred) { ++counts_[index(truth, pred)]; }
    std::size_t total() const;
    std::size_t row_total(int truth) const;
    std::size_t col_total(int pred) const;
    std::size_t trace() const;

private:
    std::size_t index(int truth, int pred) const;
    int classes_;
    std::vector<std::size_t> counts_;
};

/// Counts pixels where truth != 0. Every such pixel must carry a class in 1..K
/// in both maps.
ConfusionMatrix confusion(const LabelMap& truth, const LabelMap& pred, int classes);

double oa(const ConfusionMatrix& cm);
/// Mean per-class accuracy over classes that have at least one true pixel.
/// Classes left out are appended to `excluded` when given.
double aa(const ConfusionMatrix& cm, std::vector<int>* excluded = nullptr);
/// Cohen's kappa; 0 when chance agreement is 1.
double kappa(const ConfusionMatrix& cm);
/// c[t][t] / row_t per class; NaN for classes without true pixels.
std::vector<double> per_class_accuracy(const ConfusionMatrix& cm);

}  // namespace hsic
