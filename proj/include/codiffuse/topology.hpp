#pragma once

// Network layers over a shared node set: a periodic square lattice and a
// random regular graph, combined into a two-layer multiplex.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "codiffuse/errors.hpp"
#include "codiffuse/rng.hpp"

namespace codiffuse {
using NodeId = std::uint32_t;
}  // namespace codiffuse

namespace codiffuse::topology {

enum class LayerKind { PeriodicLattice, RandomRegular };

// A regular layer: every node has exactly degree() neighbor entries, stored
// row-major in one flat array. Immutable after construction.
class Layer {
public:
    Layer(LayerKind kind, std::uint32_t parameter, std::uint32_t n, std::uint32_t degree,
          std::vector<NodeId> adjacency);

    LayerKind kind() const noexcept { return kind_; }
    // Lattice side or RRG degree, depending on kind().
    std::uint32_t parameter() const noexcept { return parameter_; }
    std::uint32_t size() const noexcept { return n_; }
    std::uint32_t degree() const noexcept { return degree_; }

    std::span<const NodeId> neighbors(NodeId node) const;

    // Unchecked; node < size().
    std::span<const NodeId> neighbors_unchecked(NodeId node) const noexcept {
        return {adjacency_.data() + std::size_t{node} * degree_, degree_};
    }

    // Undirected edges u <= v, one entry per adjacency pair (u in adj(v)).
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    std::string describe() const;

private:
    LayerKind kind_;
    std::uint32_t parameter_;
    std::uint32_t n_;
    std::uint32_t degree_;
    std::vector<NodeId> adjacency_;
};

// Periodic square lattice with von Neumann neighborhoods. Node (r, c) has
// index r * side + c; neighbors are listed as up, down, left, right. For
// side 2 the wrapped duplicates are kept so that every node has degree 4.
Layer build_lattice(std::uint32_t side);

constexpr int kRrgRestartBudget = 1000;

// Simple d-regular graph from the configuration model, restarting the whole
// pairing whenever a self-loop or a repeated edge appears.
Layer build_rrg(std::uint32_t n, std::uint32_t degree, rng::Stream& stream,
                int restart_budget = kRrgRestartBudget);

enum class LayerSelect { A, B };

class MultiplexGraph {
public:
    // Two-layer multiplex. Contagion A reads layer_a, contagion B reads layer_b.
    MultiplexGraph(std::shared_ptr<const Layer> layer_a, std::shared_ptr<const Layer> layer_b);

    // Single-layer mode: both contagions share one adjacency.
    static MultiplexGraph single(std::shared_ptr<const Layer> layer);

    std::uint32_t size() const noexcept { return layer_a_->size(); }
    const Layer& layer(LayerSelect which) const noexcept {
        return which == LayerSelect::A ? *layer_a_ : *layer_b_;
    }
    const Layer& layer_a() const noexcept { return *layer_a_; }
    const Layer& layer_b() const noexcept { return *layer_b_; }
    bool single_layer() const noexcept { return layer_a_ == layer_b_; }

private:
    std::shared_ptr<const Layer> layer_a_;
    std::shared_ptr<const Layer> layer_b_;
};

// Throws std::out_of_range for node >= graph.size().
std::span<const NodeId> neighbors(const MultiplexGraph& graph, LayerSelect which, NodeId node);

// Edge-list dump: per layer a header "# layer=A kind=... n=..." then one
// "u v" line per edge.
void write_edge_list(std::ostream& out, const MultiplexGraph& graph);

}  // namespace codiffuse::topology
