#pragma once

#include <cstddef>
#include <vector>

namespace hsic::mrf {

/// Directed capacitated graph with a distinguished source and sink.
class FlowNetwork {
public:
    struct Arc {
        std::size_t from;
        std::size_t to;
        double capacity;
        double reverse_capacity;  // capacity of the paired to -> from arc
    };

    FlowNetwork(std::size_t nodes, std::size_t source, std::size_t sink);

    std::size_t add_node();
    /// from -> to with `capacity` (and optionally to -> from with `reverse_capacity`).
    void add_arc(std::size_t from, std::size_t to, double capacity, double reverse_capacity = 0.0);

    std::size_t node_count() const { return nodes_; }
    std::size_t source() const { return source_; }
    std::size_t sink() const { return sink_; }
    const std::vector<Arc>& arcs() const { return arcs_; }

private:
    std::size_t nodes_;
    std::size_t source_;
    std::size_t sink_;
    std::vector<Arc> arcs_;
};

struct MaxFlowResult {
    double flow_value = 0.0;
    /// Nodes reachable from the source in the final residual graph.
    std::vector<bool> source_side;
    double cut_capacity = 0.0;
};

/// Dinic's blocking-flow algorithm; arcs are scanned in insertion order so
/// results are deterministic. Throws std::logic_error if the flow value and
/// the capacity of the returned cut disagree.
MaxFlowResult max_flow_min_cut(const FlowNetwork& net);

/// Total capacity of arcs leaving the source side.
double cut_capacity(const FlowNetwork& net, const std::vector<bool>& source_side);

}  // namespace hsic::mrf
