#pragma once

#include <cstddef>

#include "hsic/data.hpp"

namespace hsic {

/// Odd square window side, at least 3.
struct WindowSpec {
    explicit WindowSpec(std::size_t side);
    std::size_t side() const { return side_; }

private:
    std::size_t side_;
};

/// Each pixel becomes the lower median of the class indices in its w x w
/// mirror-padded window.
LabelMap median_filter_labels(const LabelMap& labels, WindowSpec win);

/// Each pixel becomes the most frequent class in its mirror-padded window.
/// Ties keep the current label when it is one of the modes, otherwise the
/// smallest tied class wins.
LabelMap majority_vote_labels(const LabelMap& labels, WindowSpec win);

}  // namespace hsic
