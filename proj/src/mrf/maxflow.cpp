#include "hsic/mrf/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hsic::mrf {

namespace {

// residual capacities at or below this are treated as saturated
constexpr double kEps = 1e-12;

struct Residual {
    std::vector<std::size_t> head;  // per node, first arc or npos
    std::vector<std::size_t> next;
    std::vector<std::size_t> to;
    std::vector<double> cap;
};

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

}  // namespace

FlowNetwork::FlowNetwork(std::size_t nodes, std::size_t source, std::size_t sink) : nodes_(nodes), source_(source), sink_(sink) {
    if (source >= nodes || sink >= nodes) throw std::invalid_argument("FlowNetwork: terminal out of range");
    if (source == sink) throw std::invalid_argument("FlowNetwork: source and sink must differ");
}

std::size_t FlowNetwork::add_node() { return nodes_++; }

void FlowNetwork::add_arc(std::size_t from, std::size_t to, double capacity, double reverse_capacity) {
    if (from >= nodes_ || to >= nodes_) throw std::invalid_argument("FlowNetwork::add_arc: node out of range");
    if (!(capacity >= 0.0) || !(reverse_capacity >= 0.0) || !std::isfinite(capacity) || !std::isfinite(reverse_capacity))
        throw std::invalid_argument("FlowNetwork::add_arc: capacities must be finite and non-negative");
    arcs_.push_back({from, to, capacity, reverse_capacity});
}

double cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side) {
    double total = 0.0;
    for (const auto& a : net.arcs()) {
        if (source_side[a.from] && !source_side[a.to]) total += a.capacity;
        if (source_side[a.to] && !source_side[a.from]) total += a.reverse_capacity;
    }
    return total;
}

MaxFlowResult max_flow_min_cut(const FlowNetwork& net) {
    const std::size_t n = net.node_count();
    const std::size_t s = net.source();
    const std::size_t t = net.sink();

    Residual g;
    g.head.assign(n, npos);
    const std::size_t m = 2 * net.arcs().size();
    g.next.resize(m);
    g.to.resize(m);
    g.cap.resize(m);
    // arcs 2e and 2e+1 are each other's reverse; prepend then reverse each list
    // at the end so adjacency follows insertion order
    for (std::size_t e = 0; e < net.arcs().size(); ++e) {
        const auto& a = net.arcs()[e];
        g.to[2 * e] = a.to;
        g.cap[2 * e] = a.capacity;
        g.to[2 * e + 1] = a.from;
        g.cap[2 * e + 1] = a.reverse_capacity;
        g.next[2 * e] = g.head[a.from];
        g.head[a.from] = 2 * e;
        g.next[2 * e + 1] = g.head[a.to];
        g.head[a.to] = 2 * e + 1;
    }
    for (std::size_t v = 0; v < n; ++v) {
        std::size_t prev = npos;
        std::size_t cur = g.head[v];
        while (cur != npos) {
            const std::size_t nxt = g.next[cur];
            g.next[cur] = prev;
            prev = cur;
            cur = nxt;
        }
        g.head[v] = prev;
    }

    std::vector<int> level(n);
    std::vector<std::size_t> queue(n);
    std::vector<std::size_t> it(n);
    std::vector<std::size_t> path;
    double flow = 0.0;

    auto bfs = [&]() {
        std::fill(level.begin(), level.end(), -1);
        std::size_t qh = 0, qt = 0;
        level[s] = 0;
        queue[qt++] = s;
        while (qh < qt) {
            const std::size_t u = queue[qh++];
            for (std::size_t e = g.head[u]; e != npos; e = g.next[e])
                if (g.cap[e] > kEps && level[g.to[e]] < 0) {
                    level[g.to[e]] = level[u] + 1;
                    queue[qt++] = g.to[e];
                }
        }
        return level[t] >= 0;
    };

    while (bfs()) {
        it = g.head;
        path.clear();
        std::size_t u = s;
        while (true) {
            if (u == t) {
                double bottleneck = std::numeric_limits<double>::infinity();
                for (std::size_t e : path) bottleneck = std::min(bottleneck, g.cap[e]);
                for (std::size_t e : path) {
                    g.cap[e] -= bottleneck;
                    g.cap[e ^ 1] += bottleneck;
                }
                flow += bottleneck;
                // retreat to just before the first saturated arc
                std::size_t keep = 0;
                while (keep < path.size() && g.cap[path[keep]] > kEps) ++keep;
                path.resize(keep);
                u = path.empty() ? s : g.to[path.back()];
                continue;
            }
            std::size_t& e = it[u];
            while (e != npos && !(g.cap[e] > kEps && level[g.to[e]] == level[u] + 1)) e = g.next[e];
            if (e != npos) {
                path.push_back(e);
                u = g.to[e];
                continue;
            }
            // dead end: prune u from the level graph and back up
            level[u] = -1;
            if (path.empty()) break;
            const std::size_t back = path.back();
            path.pop_back();
            u = g.to[back ^ 1];
            it[u] = g.next[it[u]];
        }
    }

    MaxFlowResult result;
    result.flow_value = flow;
    result.source_side.assign(n, false);
    std::size_t qh = 0, qt = 0;
    result.source_side[s] = true;
    queue[qt++] = s;
    while (qh < qt) {
        const std::size_t v = queue[qh++];
        for (std::size_t e = g.head[v]; e != npos; e = g.next[e])
            if (g.cap[e] > kEps && !result.source_side[g.to[e]]) {
                result.source_side[g.to[e]] = true;
                queue[qt++] = g.to[e];
            }
    }
    result.cut_capacity = cut_capacity(net, result.source_side);
    if (std::abs(result.cut_capacity - flow) > 1e-7 * (1.0 + std::abs(flow)))
        throw std::logic_error("max_flow_min_cut: flow " + std::to_string(flow) + " differs from cut capacity " +
                               std::to_string(result.cut_capacity));
    return result;
}

}  // namespace hsic::mrf
