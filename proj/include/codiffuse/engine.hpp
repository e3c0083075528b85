#pragma once

// Synchronous co-diffusion of two contagions with stochastic dormancy.
//
// One step has two phases. Phase 1 (adoption) reads only the pre-step
// buffer: each node that does not hold both contagions computes the density
// of active A adopters among its layer-A neighbors and of active B adopters
// among its layer-B neighbors, then adopts at most one contagion. Phase 2
// (dormancy) deactivates each active adopter, including this step's new
// adopters, with its state's dormancy rate. A node has one activity flag. By
// default a dormant single adopter that takes up the other contagion stays
// dormant (kernel::Reactivation::Persist); Reactivate makes it active again.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "codiffuse/kernel.hpp"
#include "codiffuse/rng.hpp"
#include "codiffuse/topology.hpp"

namespace codiffuse::engine {

struct NodeStatus {
    State state = State::Naive;
    bool active = true;

    friend bool operator==(NodeStatus, NodeStatus) = default;
};

enum class Topology { Multiplex, Lattice };

struct GraphSpec {
    Topology topology = Topology::Multiplex;
    std::uint32_t side = 80;
    std::uint32_t rrg_degree = 4;
    // Reuse the iteration-0 random regular graph for every iteration.
    bool freeze_rrg = false;

    std::uint32_t node_count() const noexcept { return side * side; }
    friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

struct RunConfig {
    GraphSpec graph;
    kernel::KernelParams kernel;
    kernel::DormancyParams dormancy;
    std::uint32_t steps = 700;
    std::uint32_t seeds_per_contagion = 1;
    std::uint64_t master_seed = 1;
};

// Stable 64-bit key of a parameter triple, from the bit patterns of the
// three values. Streams for a parameter set derive from (master seed, key).
std::uint64_t parameter_key(double alpha, double tau_a, double tau_b) noexcept;
rng::StreamKey stream_key(const RunConfig& config) noexcept;

// All random draws that drive a run, addressed by (step, node).
class Draws {
public:
    Draws(rng::StreamKey key, std::uint32_t iteration, kernel::ThresholdMode mode) noexcept
        : key_(key), iteration_(iteration), mode_(mode) {}

    struct Adoption {
        double fire;    // compared against the adoption probability
        double choose;  // splits a naive adoption between A and B
    };

    Adoption adoption(std::uint32_t step, NodeId node) const noexcept {
        const auto w = key_.block(node, step, rng::Channel::Adoption, iteration_);
        if (mode_ == kernel::ThresholdMode::Quenched) {
            return {quenched_threshold(node), rng::unit32(w[2])};
        }
        return {rng::unit53(w[0], w[1]), rng::unit32(w[2])};
    }

    double dormancy(std::uint32_t step, NodeId node) const noexcept {
        const auto w = key_.block(node, step, rng::Channel::Dormancy, iteration_);
        return rng::unit53(w[0], w[1]);
    }

    // The per-node draw fixed for the whole run in quenched mode.
    double quenched_threshold(NodeId node) const noexcept {
        const auto w = key_.block(node, 0, rng::Channel::QuenchedThreshold, iteration_);
        return rng::unit53(w[0], w[1]);
    }

    rng::StreamKey key() const noexcept { return key_; }
    std::uint32_t iteration() const noexcept { return iteration_; }

private:
    rng::StreamKey key_;
    std::uint32_t iteration_;
    kernel::ThresholdMode mode_;
};

// Builds the graph for one iteration. The lattice may be supplied to avoid
// rebuilding it for every iteration of an ensemble.
topology::MultiplexGraph build_graph(const GraphSpec& spec, rng::StreamKey key, std::uint32_t iteration,
                                     std::shared_ptr<const topology::Layer> lattice = nullptr);

// One A seed and one B seed per unit of seeds_per_contagion, all distinct;
// every other node naive. All nodes active.
std::vector<NodeStatus> seed(const topology::MultiplexGraph& graph, rng::Stream& stream,
                             std::uint32_t seeds_per_contagion = 1);

kernel::Densities densities(const topology::MultiplexGraph& graph, std::span<const NodeStatus> statuses,
                            NodeId node);

// Phase 1 for a single node against the pre-step buffer.
NodeStatus adopt(const topology::MultiplexGraph& graph, std::span<const NodeStatus> prev, NodeId node,
                 const kernel::KernelParams& params, const Draws& draws, std::uint32_t step);

// One synchronous step. `order`, if non-empty, is the node evaluation order
// (a permutation of all nodes); the result does not depend on it.
std::vector<NodeStatus> step(const topology::MultiplexGraph& graph, std::span<const NodeStatus> prev,
                             const kernel::KernelParams& params, const kernel::DormancyParams& dormancy,
                             const Draws& draws, std::uint32_t step_index, std::span<const NodeId> order = {});

struct Counts {
    std::int32_t naive = 0;
    std::int32_t a = 0;
    std::int32_t b = 0;
    std::int32_t ab = 0;
    std::int32_t dormant = 0;

    friend bool operator==(const Counts&, const Counts&) = default;
};

Counts tally(std::span<const NodeStatus> statuses) noexcept;

// Per-step state counts; entry t holds the counts after step t + 1.
struct CountsSeries {
    std::vector<std::int32_t> naive;
    std::vector<std::int32_t> a;
    std::vector<std::int32_t> b;
    std::vector<std::int32_t> ab;
    std::vector<std::int32_t> dormant;

    std::size_t steps() const noexcept { return naive.size(); }
    void reserve(std::size_t n);
    void push(const Counts& c);
    Counts at(std::size_t t) const noexcept { return {naive[t], a[t], b[t], ab[t], dormant[t]}; }

    friend bool operator==(const CountsSeries&, const CountsSeries&) = default;
};

// Full run of one iteration. Uses incremental neighbor counts and skips
// nodes that cannot change; bit-identical to repeated step().
CountsSeries run(const RunConfig& config, std::uint32_t iteration = 0);
CountsSeries run_on(const topology::MultiplexGraph& graph, const RunConfig& config, std::uint32_t iteration);

// Same run driven by step(); slow, kept as the reference path.
CountsSeries run_reference(const RunConfig& config, std::uint32_t iteration = 0);

struct MeanSeries {
    std::vector<double> naive;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> ab;
    std::vector<double> dormant;

    std::size_t steps() const noexcept { return naive.size(); }
};

struct EnsembleResult {
    RunConfig config;
    std::uint32_t node_count = 0;
    std::vector<CountsSeries> runs;  // indexed by iteration
    MeanSeries mean;
};

MeanSeries mean_of(std::span<const CountsSeries> runs);

EnsembleResult run_ensemble(const RunConfig& config, std::uint32_t iterations, unsigned workers = 1);

}  // namespace codiffuse::engine
