#include "hsic/mrf/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsic::mrf {

std::vector<std::pair<std::uint32_t, std::uint32_t>> grid_edges(std::size_t height, std::size_t width, Neighborhood nb) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    auto id = [width](std::size_t r, std::size_t c) { return static_cast<std::uint32_t>(r * width + c); };
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c) {
            if (c + 1 < width) edges.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < height) edges.emplace_back(id(r, c), id(r + 1, c));
            if (nb == Neighborhood::Eight && r + 1 < height) {
                if (c + 1 < width) edges.emplace_back(id(r, c), id(r + 1, c + 1));
                if (c > 0) edges.emplace_back(id(r, c), id(r + 1, c - 1));
            }
        }
    return edges;
}

std::size_t ordered_pair_count(std::size_t height, std::size_t width, Neighborhood nb) {
    return 2 * grid_edges(height, width, nb).size();
}

EnergyModel make_energy(std::size_t height, std::size_t width, int classes, std::vector<double> unary, double potts_weight,
                        Neighborhood nb) {
    if (height == 0 || width == 0) throw std::invalid_argument("make_energy: empty grid");
    if (classes < 1) throw std::invalid_argument("make_energy: need at least one class");
    if (unary.size() != height * width * static_cast<std::size_t>(classes))
        throw std::invalid_argument("make_energy: unary table must be n x K");
    if (!(potts_weight >= 0.0) || !std::isfinite(potts_weight))
        throw std::invalid_argument("make_energy: Potts weight must be finite and non-negative");
    for (double u : unary)
        if (!std::isfinite(u)) throw std::invalid_argument("make_energy: non-finite unary cost");
    EnergyModel m;
    m.height = height;
    m.width = width;
    m.classes = classes;
    m.unary = std::move(unary);
    m.edges = grid_edges(height, width, nb);
    m.potts_weight = potts_weight;
    return m;
}

EnergyModel build_energy(const ProbMap& probs, std::size_t height, std::size_t width, double mu, Neighborhood nb) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("build_energy: mu must be finite and >= 0");
    if (probs.rows() != height * width) throw std::invalid_argument("build_energy: probability rows do not match the grid");
    std::vector<double> unary(probs.values().size());
    std::transform(probs.values().begin(), probs.values().end(), unary.begin(),
                   [](double p) { return -std::log(std::max(p, kUnaryFloor)); });
    return make_energy(height, width, probs.classes(), std::move(unary), 4.0 * mu, nb);
}

double cost(const EnergyModel& model, const std::vector<int>& labeling) {
    if (labeling.size() != model.pixels()) throw std::invalid_argument("cost: labeling size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < labeling.size(); ++i) {
        const int y = labeling[i];
        if (y < 1 || y > model.classes) throw std::invalid_argument("cost: labeling has an unlabeled or out-of-range pixel");
        total += model.unary_at(i, y);
    }
    std::size_t disagree = 0;
    for (const auto& [a, b] : model.edges)
        if (labeling[a] != labeling[b]) ++disagree;
    return total + model.potts_weight * static_cast<double>(disagree);
}

double cost(const EnergyModel& model, const LabelMap& labeling) {
    if (labeling.height() != model.height || labeling.width() != model.width)
        throw std::invalid_argument("cost: labeling dimensions do not match the model");
    return cost(model, labeling.labels());
}

double objective(const LabelMap& labeling, const ProbMap& probs, double mu, Neighborhood nb) {
    const std::size_t h = labeling.height();
    const std::size_t w = labeling.width();
    if (probs.rows() != h * w) throw std::invalid_argument("objective: probability rows do not match the grid");
    double data = 0.0;
    for (std::size_t i = 0; i < h * w; ++i) {
        const int y = labeling[i];
        if (y == 0) throw std::invalid_argument("objective: pixel " + std::to_string(i) + " is unlabeled");
        if (y > probs.classes()) throw std::invalid_argument("objective: label out of range");
        data += std::log(std::max(probs.at(i, y - 1), kUnaryFloor));
    }
    // visit each pixel's neighbor set, so every pair is seen from both ends
    const std::vector<std::pair<int, int>> offsets4 = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    const std::vector<std::pair<int, int>> offsets8 = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    const auto& offsets = nb == Neighborhood::Four ? offsets4 : offsets8;
    double smooth = 0.0;
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            for (const auto& [dr, dc] : offsets) {
                const auto nr = static_cast<std::ptrdiff_t>(r) + dr;
                const auto nc = static_cast<std::ptrdiff_t>(c) + dc;
                if (nr < 0 || nc < 0 || nr >= static_cast<std::ptrdiff_t>(h) || nc >= static_cast<std::ptrdiff_t>(w)) continue;
                smooth += labeling.at(r, c) == labeling.at(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc)) ? 1.0 : -1.0;
            }
    return data + mu * smooth;
}

}  // namespace hsic::mrf
