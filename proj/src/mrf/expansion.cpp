#include "hsic/mrf/expansion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hsic/mrf/maxflow.hpp"

namespace hsic::mrf {

namespace {

void check_labels(const EnergyModel& model, const std::vector<int>& labels) {
    if (labels.size() != model.pixels()) throw std::invalid_argument("alpha expansion: labeling size mismatch");
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 1 || labels[i] > model.classes)
            throw std::invalid_argument("alpha expansion: pixel " + std::to_string(i) + " has label " + std::to_string(labels[i]) +
                                        " outside 1.." + std::to_string(model.classes));
}

}  // namespace

MoveResult expansion_move(const EnergyModel& model, const std::vector<int>& labels, int alpha) {
    if (alpha < 1 || alpha > model.classes) throw std::invalid_argument("expansion_move: alpha out of range");
    check_labels(model, labels);
    const std::size_t n = model.pixels();
    const double lambda = model.potts_weight;

    // x_p = 1 means p switches to alpha and sits on the source side of the cut.
    // Pairwise table: A = V(keep,keep), B = V(keep,alpha), C = V(alpha,keep), D = 0.
    //   E = A + (C - A) x_p + (D - C) x_q + (B + C - A - D)(1 - x_p) x_q
    std::vector<double> delta(n);
    for (std::size_t p = 0; p < n; ++p) delta[p] = model.unary_at(p, alpha) - model.unary_at(p, labels[p]);

    FlowNetwork net(n + 2, n, n + 1);
    const std::size_t s = n;
    const std::size_t t = n + 1;
    for (const auto& [p, q] : model.edges) {
        const double a = labels[p] != labels[q] ? lambda : 0.0;
        const double b = labels[p] != alpha ? lambda : 0.0;
        const double c = alpha != labels[q] ? lambda : 0.0;
        delta[p] += c - a;
        delta[q] += -c;
        const double w = b + c - a;
        // paid when q is on the source side and p is not
        if (w > 0.0) net.add_arc(q, p, w);
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (delta[p] > 0.0)
            net.add_arc(p, t, delta[p]);
        else if (delta[p] < 0.0)
            net.add_arc(s, p, -delta[p]);
    }
    const auto flow = max_flow_min_cut(net);

    MoveResult out;
    out.labels = labels;
    for (std::size_t p = 0; p < n; ++p)
        if (flow.source_side[p]) out.labels[p] = alpha;
    const double before = cost(model, labels);
    const double after = cost(model, out.labels);
    if (after <= before && out.labels != labels) {
        out.cost = after;
        out.changed = true;
    } else {
        out.labels = labels;
        out.cost = before;
    }
    return out;
}

ExpansionResult alpha_expansion(const EnergyModel& model, std::vector<int> init, std::size_t max_sweeps, double tol) {
    check_labels(model, init);
    ExpansionResult r;
    r.labels = std::move(init);
    double current = cost(model, r.labels);
    r.cost_history.push_back(current);
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        const double start = current;
        for (int alpha = 1; alpha <= model.classes; ++alpha) {
            auto move = expansion_move(model, r.labels, alpha);
            if (move.changed) {
                r.labels = std::move(move.labels);
                current = move.cost;
            }
        }
        r.cost_history.push_back(current);
        ++r.sweeps;
        if (start - current <= tol) break;
    }
    return r;
}

std::vector<int> exhaustive_map(const EnergyModel& model) {
    const std::size_t n = model.pixels();
    const auto k = static_cast<double>(model.classes);
    if (std::pow(k, static_cast<double>(n)) > static_cast<double>(1u << 20))
        throw std::invalid_argument("exhaustive_map: more than 2^20 labelings");
    std::vector<int> current(n, 1);
    std::vector<int> best = current;
    double best_cost = cost(model, current);
    while (true) {
        // next labeling in lexicographic order, last pixel fastest
        std::size_t i = n;
        while (i > 0 && current[i - 1] == model.classes) current[--i] = 1;
        if (i == 0) break;
        ++current[i - 1];
        const double c = cost(model, current);
        if (c < best_cost) {
            best_cost = c;
            best = current;
        }
    }
    return best;
}

}  // namespace hsic::mrf
