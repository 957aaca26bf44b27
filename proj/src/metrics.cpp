#include "hsic/metrics.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hsic {

ConfusionMatrix::ConfusionMatrix(int classes) : classes_(classes) {
    if (classes < 1) throw std::invalid_argument("ConfusionMatrix: need at least one class");
    counts_.assign(static_cast<std::size_t>(classes) * static_cast<std::size_t>(classes), 0);
}

ConfusionMatrix::ConfusionMatrix(int classes, std::vector<std::size_t> counts) : ConfusionMatrix(classes) {
    if (counts.size() != counts_.size()) throw std::invalid_argument("ConfusionMatrix: expected K*K counts");
    counts_ = std::move(counts);
}

std::size_t ConfusionMatrix::index(int truth, int pred) const {
    if (truth < 1 || truth > classes_ || pred < 1 || pred > classes_)
        throw std::out_of_range("ConfusionMatrix: class index out of range");
    return static_cast<std::size_t>(truth - 1) * static_cast<std::size_t>(classes_) + static_cast<std::size_t>(pred - 1);
}

std::size_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::row_total(int truth) const {
    std::size_t s = 0;
    for (int p = 1; p <= classes_; ++p) s += at(truth, p);
    return s;
}

std::size_t ConfusionMatrix::col_total(int pred) const {
    std::size_t s = 0;
    for (int t = 1; t <= classes_; ++t) s += at(t, pred);
    return s;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t s = 0;
    for (int k = 1; k <= classes_; ++k) s += at(k, k);
    return s;
}

ConfusionMatrix confusion(const LabelMap& truth, const LabelMap& pred, int classes) {
    if (truth.height() != pred.height() || truth.width() != pred.width())
        throw std::invalid_argument("confusion: truth is " + std::to_string(truth.height()) + "x" + std::to_string(truth.width()) +
                                    " but prediction is " + std::to_string(pred.height()) + "x" + std::to_string(pred.width()));
    ConfusionMatrix cm(classes);
    for (std::size_t i = 0; i < truth.pixels(); ++i) {
        const int t = truth[i];
        if (t == 0) continue;
        const int p = pred[i];
        if (t > classes || p < 1 || p > classes)
            throw std::invalid_argument("confusion: pixel " + std::to_string(i) + " has a label outside 1.." + std::to_string(classes));
        cm.add(t, p);
    }
    return cm;
}

namespace {

double checked_total(const ConfusionMatrix& cm) {
    const std::size_t m = cm.total();
    if (m == 0) throw std::invalid_argument("metrics: confusion matrix is empty");
    return static_cast<double>(m);
}

}  // namespace

double oa(const ConfusionMatrix& cm) { return static_cast<double>(cm.trace()) / checked_total(cm); }

std::vector<double> per_class_accuracy(const ConfusionMatrix& cm) {
    std::vector<double> acc;
    for (int t = 1; t <= cm.classes(); ++t) {
        const std::size_t row = cm.row_total(t);
        acc.push_back(row == 0 ? std::numeric_limits<double>::quiet_NaN()
                               : static_cast<double>(cm.at(t, t)) / static_cast<double>(row));
    }
    return acc;
}

double aa(const ConfusionMatrix& cm, std::vector<int>* excluded) {
    checked_total(cm);
    double sum = 0.0;
    int used = 0;
    for (int t = 1; t <= cm.classes(); ++t) {
        const std::size_t row = cm.row_total(t);
        if (row == 0) {
            if (excluded) excluded->push_back(t);
            continue;
        }
        sum += static_cast<double>(cm.at(t, t)) / static_cast<double>(row);
        ++used;
    }
    return sum / used;
}

double kappa(const ConfusionMatrix& cm) {
    const double m = checked_total(cm);
    const double po = static_cast<double>(cm.trace()) / m;
    double pe = 0.0;
    for (int k = 1; k <= cm.classes(); ++k)
        pe += static_cast<double>(cm.row_total(k)) * static_cast<double>(cm.col_total(k));
    pe /= m * m;
    if (pe == 1.0) return 0.0;
    return (po - pe) / (1.0 - pe);
}

}  // namespace hsic
