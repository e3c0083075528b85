#include "codiffuse/topology.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace codiffuse::topology {

Layer::Layer(LayerKind kind, std::uint32_t parameter, std::uint32_t n, std::uint32_t degree,
             std::vector<NodeId> adjacency)
    : kind_(kind), parameter_(parameter), n_(n), degree_(degree), adjacency_(std::move(adjacency)) {
    if (adjacency_.size() != std::size_t{n_} * degree_) {
        throw std::invalid_argument("layer adjacency size does not match n * degree");
    }
}

std::span<const NodeId> Layer::neighbors(NodeId node) const {
    if (node >= n_) {
        throw std::out_of_range("node " + std::to_string(node) + " out of range for layer of " +
                                std::to_string(n_) + " nodes");
    }
    return neighbors_unchecked(node);
}

std::vector<std::pair<NodeId, NodeId>> Layer::edges() const {
    // Each undirected edge appears twice in the adjacency; keep the copy seen
    // from the smaller endpoint. Self-adjacency (side 2 wrap) never occurs.
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(adjacency_.size() / 2);
    for (NodeId u = 0; u < n_; ++u) {
        for (NodeId v : neighbors_unchecked(u)) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

std::string Layer::describe() const {
    std::ostringstream s;
    if (kind_ == LayerKind::PeriodicLattice) {
        s << "lattice(side=" << parameter_ << ")";
    } else {
        s << "rrg(degree=" << parameter_ << ")";
    }
    return s.str();
}

Layer build_lattice(std::uint32_t side) {
    if (side < 2) {
        throw ConfigError("lattice side must be >= 2, got " + std::to_string(side));
    }
    if (std::uint64_t{side} * side > 0xFFFFFFFFull / 4) {
        throw ConfigError("lattice side too large: " + std::to_string(side));
    }
    const std::uint32_t n = side * side;
    std::vector<NodeId> adj;
    adj.reserve(std::size_t{n} * 4);
    for (std::uint32_t r = 0; r < side; ++r) {
        const std::uint32_t up = (r + side - 1) % side;
        const std::uint32_t down = (r + 1) % side;
        for (std::uint32_t c = 0; c < side; ++c) {
            const std::uint32_t left = (c + side - 1) % side;
            const std::uint32_t right = (c + 1) % side;
            adj.push_back(up * side + c);
            adj.push_back(down * side + c);
            adj.push_back(r * side + left);
            adj.push_back(r * side + right);
        }
    }
    return Layer(LayerKind::PeriodicLattice, side, n, 4, std::move(adj));
}

Layer build_rrg(std::uint32_t n, std::uint32_t degree, rng::Stream& stream, int restart_budget) {
    if (degree == 0 || degree >= n) {
        throw ConfigError("random regular graph needs 0 < degree < n (degree=" + std::to_string(degree) +
                          ", n=" + std::to_string(n) + ")");
    }
    const std::uint64_t stub_count = std::uint64_t{n} * degree;
    if (stub_count % 2 != 0) {
        throw ConfigError("random regular graph needs n * degree even (n=" + std::to_string(n) +
                          ", degree=" + std::to_string(degree) + ")");
    }
    if (stub_count > 0xFFFFFFFFull) {
        throw ConfigError("random regular graph too large");
    }

    std::vector<NodeId> stubs(stub_count);
    std::vector<NodeId> adj(stub_count);
    std::vector<std::uint32_t> fill(n);

    for (int attempt = 0; attempt < restart_budget; ++attempt) {
        for (std::uint64_t i = 0; i < stub_count; ++i) stubs[i] = static_cast<NodeId>(i / degree);
        std::fill(fill.begin(), fill.end(), 0u);

        // Uniform perfect matching built pair by pair; any violation restarts
        // from scratch, which keeps the accepted graph uniform over simple
        // d-regular graphs.
        bool ok = true;
        for (std::uint64_t i = 0; i < stub_count; i += 2) {
            const auto remaining = static_cast<std::uint32_t>(stub_count - i - 1);
            const std::uint64_t j = i + 1 + stream.below(remaining);
            std::swap(stubs[i + 1], stubs[j]);
            const NodeId u = stubs[i];
            const NodeId v = stubs[i + 1];
            if (u == v) {
                ok = false;
                break;
            }
            const auto u_list = std::span<const NodeId>(adj.data() + std::size_t{u} * degree, fill[u]);
            if (std::find(u_list.begin(), u_list.end(), v) != u_list.end()) {
                ok = false;
                break;
            }
            adj[std::size_t{u} * degree + fill[u]++] = v;
            adj[std::size_t{v} * degree + fill[v]++] = u;
        }
        if (!ok) continue;

        // Row order within a node's list follows pairing order; sort for a
        // canonical, seed-determined layout.
        for (NodeId u = 0; u < n; ++u) {
            auto first = adj.begin() + static_cast<std::ptrdiff_t>(std::size_t{u} * degree);
            std::sort(first, first + degree);
        }
        return Layer(LayerKind::RandomRegular, degree, n, degree, std::move(adj));
    }
    throw GenerationError("random regular graph (n=" + std::to_string(n) + ", degree=" + std::to_string(degree) +
                          ") not found within " + std::to_string(restart_budget) + " restarts");
}

MultiplexGraph::MultiplexGraph(std::shared_ptr<const Layer> layer_a, std::shared_ptr<const Layer> layer_b)
    : layer_a_(std::move(layer_a)), layer_b_(std::move(layer_b)) {
    if (!layer_a_ || !layer_b_) throw std::invalid_argument("multiplex layers must be non-null");
    if (layer_a_->size() != layer_b_->size()) {
        throw ConfigError("multiplex layers disagree on node count (" + std::to_string(layer_a_->size()) + " vs " +
                          std::to_string(layer_b_->size()) + ")");
    }
}

MultiplexGraph MultiplexGraph::single(std::shared_ptr<const Layer> layer) {
    auto shared = layer;
    return MultiplexGraph(std::move(layer), std::move(shared));
}

std::span<const NodeId> neighbors(const MultiplexGraph& graph, LayerSelect which, NodeId node) {
    return graph.layer(which).neighbors(node);
}

void write_edge_list(std::ostream& out, const MultiplexGraph& graph) {
    const auto dump = [&](const Layer& layer, const char* name) {
        out << "# layer=" << name << " kind=" << layer.describe() << " n=" << layer.size() << '\n';
        for (const auto& [u, v] : layer.edges()) out << u << ' ' << v << '\n';
    };
    dump(graph.layer_a(), "A");
    dump(graph.layer_b(), "B");
}

}  // namespace codiffuse::topology
