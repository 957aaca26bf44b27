#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hsic/data.hpp"

namespace hsic::mrf {

enum class Neighborhood { Four, Eight };

/// Unordered neighbor pairs (i < j) of an h x w grid, row-major pixel indices.
std::vector<std::pair<std::uint32_t, std::uint32_t>> grid_edges(std::size_t height, std::size_t width, Neighborhood nb);

/// Cost-form Potts model:
///   cost(y) = sum_i unary[i][y_i] + potts_weight * #{edges with y_i != y_j}.
struct EnergyModel {
    std::size_t height = 0;
    std::size_t width = 0;
    int classes = 0;
    std::vector<double> unary;  // n x K, class index fastest (class c at column c - 1)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    double potts_weight = 0.0;

    std::size_t pixels() const { return height * width; }
    double unary_at(std::size_t pixel, int label) const {
        return unary[pixel * static_cast<std::size_t>(classes) + static_cast<std::size_t>(label - 1)];
    }
};

inline constexpr double kUnaryFloor = 1e-10;

/// unary[i][k] = -log(max(p_ik, 1e-10)); potts_weight = 4 * mu, which makes
/// minimizing the cost equivalent to maximizing the +-1 smoothness objective.
EnergyModel build_energy(const ProbMap& probs, std::size_t height, std::size_t width, double mu,
                         Neighborhood nb = Neighborhood::Four);

/// Model from explicit unaries and a Potts weight (used by tests and oracles).
EnergyModel make_energy(std::size_t height, std::size_t width, int classes, std::vector<double> unary, double potts_weight,
                        Neighborhood nb = Neighborhood::Four);

double cost(const EnergyModel& model, const LabelMap& labeling);
double cost(const EnergyModel& model, const std::vector<int>& labeling);

/// sum_i log p_{i,y_i} + mu * sum_i sum_{j in N(i)} delta(y_i - y_j), with
/// delta(0) = 1, delta(other) = -1 and every neighbor pair counted in both
/// orders. Probabilities are floored at 1e-10 as in the unary costs.
double objective(const LabelMap& labeling, const ProbMap& probs, double mu, Neighborhood nb = Neighborhood::Four);

/// Number of ordered neighbor pairs, 2 * |edges|.
std::size_t ordered_pair_count(std::size_t height, std::size_t width, Neighborhood nb);

}  // namespace hsic::mrf
