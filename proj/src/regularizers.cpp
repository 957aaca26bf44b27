#include "hsic/regularizers.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsic {

namespace {

void require_full(const LabelMap& labels, const char* who) {
    for (std::size_t i = 0; i < labels.pixels(); ++i)
        if (labels[i] < 1 || labels[i] > labels.num_classes())
            throw std::invalid_argument(std::string(who) + ": pixel " + std::to_string(i) + " is unlabeled");
}

template <typename Reduce>
LabelMap filter(const LabelMap& labels, WindowSpec win, Reduce reduce) {
    const std::size_t h = labels.height();
    const std::size_t w = labels.width();
    const auto half = static_cast<std::ptrdiff_t>(win.side() / 2);
    LabelMap out(h, w, labels.num_classes());
    std::vector<int> window;
    window.reserve(win.side() * win.side());
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            window.clear();
            for (std::ptrdiff_t dr = -half; dr <= half; ++dr)
                for (std::ptrdiff_t dc = -half; dc <= half; ++dc)
                    window.push_back(labels.at(reflect_index(static_cast<std::ptrdiff_t>(r) + dr, h),
                                               reflect_index(static_cast<std::ptrdiff_t>(c) + dc, w)));
            out.at(r, c) = reduce(window, labels.at(r, c));
        }
    return out;
}

}  // namespace

WindowSpec::WindowSpec(std::size_t side) : side_(side) {
    if (side < 3 || side % 2 == 0) throw std::invalid_argument("window side must be odd and >= 3, got " + std::to_string(side));
}

LabelMap median_filter_labels(const LabelMap& labels, WindowSpec win) {
    require_full(labels, "median_filter_labels");
    return filter(labels, win, [](std::vector<int>& window, int) {
        // windows are always odd-sized, so the lower median is the middle element
        const auto mid = window.begin() + static_cast<std::ptrdiff_t>((window.size() - 1) / 2);
        std::nth_element(window.begin(), mid, window.end());
        return *mid;
    });
}

LabelMap majority_vote_labels(const LabelMap& labels, WindowSpec win) {
    require_full(labels, "majority_vote_labels");
    std::vector<std::size_t> counts(static_cast<std::size_t>(labels.num_classes()) + 1);
    return filter(labels, win, [&counts](std::vector<int>& window, int center) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int y : window) ++counts[static_cast<std::size_t>(y)];
        const std::size_t best = *std::max_element(counts.begin(), counts.end());
        if (counts[static_cast<std::size_t>(center)] == best) return center;
        return static_cast<int>(std::find(counts.begin(), counts.end(), best) - counts.begin());
    });
}

}  // namespace hsic
