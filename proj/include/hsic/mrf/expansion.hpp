#pragma once

#include <cstddef>
#include <vector>

#include "hsic/mrf/energy.hpp"

namespace hsic::mrf {

struct MoveResult {
    std::vector<int> labels;
    double cost = 0.0;
    bool changed = false;
};

/// Optimal alpha-expansion move from `labels` (every pixel may keep its label
/// or switch to alpha). Ties keep the current label. The move is only taken if
/// its cost does not exceed the current cost.
MoveResult expansion_move(const EnergyModel& model, const std::vector<int>& labels, int alpha);

struct ExpansionResult {
    std::vector<int> labels;
    /// cost of the initial labeling, then the cost after each sweep
    std::vector<double> cost_history;
    std::size_t sweeps = 0;
};

/// Sweeps alpha = 1..K until a sweep lowers the cost by at most `tol` or
/// `max_sweeps` is reached.
ExpansionResult alpha_expansion(const EnergyModel& model, std::vector<int> init, std::size_t max_sweeps = 5, double tol = 1e-9);

/// Exact minimizer by enumeration, for tiny models only (K^n <= 2^20).
/// Labelings are visited in lexicographic order; the first minimum wins.
std::vector<int> exhaustive_map(const EnergyModel& model);

}  // namespace hsic::mrf
