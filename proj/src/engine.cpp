#include "codiffuse/engine.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "codiffuse/parallel.hpp"

namespace codiffuse::engine {

using kernel::AdoptionMode;
using topology::Layer;
using topology::MultiplexGraph;

std::uint64_t parameter_key(double alpha, double tau_a, double tau_b) noexcept {
    std::uint64_t h = rng::splitmix64(std::bit_cast<std::uint64_t>(alpha));
    h = rng::splitmix64(h ^ std::bit_cast<std::uint64_t>(tau_a));
    return rng::splitmix64(h ^ std::bit_cast<std::uint64_t>(tau_b));
}

rng::StreamKey stream_key(const RunConfig& config) noexcept {
    return rng::StreamKey::derive(config.master_seed,
                                  parameter_key(config.kernel.alpha, config.dormancy.tau_a, config.dormancy.tau_b));
}

MultiplexGraph build_graph(const GraphSpec& spec, rng::StreamKey key, std::uint32_t iteration,
                           std::shared_ptr<const Layer> lattice) {
    if (!lattice) lattice = std::make_shared<const Layer>(topology::build_lattice(spec.side));
    if (spec.topology == Topology::Lattice) return MultiplexGraph::single(std::move(lattice));

    const std::uint32_t stream_iteration = spec.freeze_rrg ? 0 : iteration;
    rng::Stream stream(key, rng::Channel::RandomRegular, stream_iteration);
    try {
        auto rrg = std::make_shared<const Layer>(topology::build_rrg(lattice->size(), spec.rrg_degree, stream));
        return MultiplexGraph(std::move(lattice), std::move(rrg));
    } catch (const GenerationError& e) {
        throw GenerationError(std::string(e.what()) + " [stream key " + std::to_string(key.value()) +
                              ", iteration " + std::to_string(stream_iteration) + "]");
    }
}

std::vector<NodeStatus> seed(const MultiplexGraph& graph, rng::Stream& stream, std::uint32_t seeds_per_contagion) {
    const std::uint32_t n = graph.size();
    if (n < 2) throw ConfigError("seeding needs at least 2 nodes");
    if (seeds_per_contagion == 0 || std::uint64_t{seeds_per_contagion} * 2 > n) {
        throw ConfigError("seeds_per_contagion must be in [1, n/2], got " + std::to_string(seeds_per_contagion));
    }
    std::vector<NodeStatus> statuses(n);
    const auto place = [&](State s) {
        for (;;) {
            const NodeId node = stream.below(n);
            if (statuses[node].state == State::Naive) {
                statuses[node].state = s;
                return;
            }
        }
    };
    for (std::uint32_t k = 0; k < seeds_per_contagion; ++k) {
        place(State::A);
        place(State::B);
    }
    return statuses;
}

namespace {

bool contributes_a(NodeStatus s) noexcept { return s.active && has_a(s.state); }
bool contributes_b(NodeStatus s) noexcept { return s.active && has_b(s.state); }

State adopted_state(State current, double term_a, double term_b, double u_choose) {
    if (current == State::Naive) {
        return kernel::choose_from_terms(term_a, term_b, u_choose) == Contagion::A ? State::A : State::B;
    }
    return State::AB;
}

}  // namespace

kernel::Densities densities(const MultiplexGraph& graph, std::span<const NodeStatus> statuses, NodeId node) {
    const auto na = graph.layer_a().neighbors(node);
    const auto nb = graph.layer_b().neighbors(node);
    std::uint32_t ca = 0;
    std::uint32_t cb = 0;
    for (NodeId v : na) ca += contributes_a(statuses[v]) ? 1u : 0u;
    for (NodeId v : nb) cb += contributes_b(statuses[v]) ? 1u : 0u;
    return {static_cast<double>(ca) / static_cast<double>(na.size()),
            static_cast<double>(cb) / static_cast<double>(nb.size())};
}

NodeStatus adopt(const MultiplexGraph& graph, std::span<const NodeStatus> prev, NodeId node,
                 const kernel::KernelParams& params, const Draws& draws, std::uint32_t step) {
    const NodeStatus self = prev[node];
    if (self.state == State::AB) return self;
    if (params.mode == AdoptionMode::Exclusive && self.state != State::Naive) return self;

    const auto dens = densities(graph, prev, node);
    const double term_a = kernel::contribution(dens.a, params.k_a, params.alpha);
    const double term_b = kernel::contribution(dens.b, params.k_b, params.alpha);
    const double p = kernel::adoption_from_terms(self.state, term_a, term_b, params.mode);
    if (!(p > 0.0)) return self;

    const auto d = draws.adoption(step, node);
    if (!kernel::fires(p, d.fire)) return self;
    return {adopted_state(self.state, has_a(self.state) ? 0.0 : term_a, has_b(self.state) ? 0.0 : term_b, d.choose),
            self.active || params.reactivation == kernel::Reactivation::Reactivate};
}

std::vector<NodeStatus> step(const MultiplexGraph& graph, std::span<const NodeStatus> prev,
                             const kernel::KernelParams& params, const kernel::DormancyParams& dormancy,
                             const Draws& draws, std::uint32_t step_index, std::span<const NodeId> order) {
    const std::uint32_t n = graph.size();
    if (prev.size() != n) throw std::invalid_argument("status vector size does not match graph");
    if (!order.empty() && order.size() != n) throw std::invalid_argument("evaluation order must cover every node");

    std::vector<NodeStatus> next(prev.begin(), prev.end());
    const auto visit = [&](auto&& fn) {
        if (order.empty()) {
            for (NodeId v = 0; v < n; ++v) fn(v);
        } else {
            for (NodeId v : order) fn(v);
        }
    };

    visit([&](NodeId v) { next[v] = adopt(graph, prev, v, params, draws, step_index); });

    visit([&](NodeId v) {
        NodeStatus& s = next[v];
        if (s.state == State::Naive || !s.active) return;
        const double rate = kernel::dormancy_rate(s.state, dormancy);
        if (rate > 0.0 && draws.dormancy(step_index, v) < rate) s.active = false;
    });
    return next;
}

Counts tally(std::span<const NodeStatus> statuses) noexcept {
    Counts c;
    for (const NodeStatus s : statuses) {
        switch (s.state) {
            case State::Naive: ++c.naive; break;
            case State::A: ++c.a; break;
            case State::B: ++c.b; break;
            case State::AB: ++c.ab; break;
        }
        if (!s.active) ++c.dormant;
    }
    return c;
}

void CountsSeries::reserve(std::size_t n) {
    naive.reserve(n);
    a.reserve(n);
    b.reserve(n);
    ab.reserve(n);
    dormant.reserve(n);
}

void CountsSeries::push(const Counts& c) {
    naive.push_back(c.naive);
    a.push_back(c.a);
    b.push_back(c.b);
    ab.push_back(c.ab);
    dormant.push_back(c.dormant);
}

namespace {

void validate(const RunConfig& config) {
    if (config.steps < 1) throw ConfigError("steps must be >= 1");
    const auto& k = config.kernel;
    if (!(k.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
    if (!(k.k_a > 0.0) || !(k.k_b > 0.0)) throw ConfigError("k_a and k_b must be > 0");
    const auto& d = config.dormancy;
    if (!(d.tau_a >= 0.0 && d.tau_a <= 1.0) || !(d.tau_b >= 0.0 && d.tau_b <= 1.0)) {
        throw ConfigError("tau values must lie in [0, 1]");
    }
}

void add_counts(std::vector<std::uint16_t>& counts, std::span<const NodeId> nbrs, int delta) {
    for (NodeId v : nbrs) counts[v] = static_cast<std::uint16_t>(counts[v] + delta);
}

// Incremental run: active-neighbor counts are maintained as nodes change, so
// Phase 1 only evaluates nodes with a positive adoption probability. Each
// draw is addressed by (step, node), which keeps the result identical to the
// full synchronous sweep performed by step().
class FastRun {
public:
    FastRun(const MultiplexGraph& graph, const RunConfig& config, std::uint32_t iteration)
        : graph_(graph),
          config_(config),
          draws_(stream_key(config), iteration, config.kernel.threshold),
          terms_a_(graph.layer_a().degree(), config.kernel.k_a, config.kernel.alpha),
          terms_b_(graph.layer_b().degree(), config.kernel.k_b, config.kernel.alpha) {
        if (graph.layer_a().degree() > 0xFFFF || graph.layer_b().degree() > 0xFFFF) {
            throw ConfigError("layer degree too large");
        }
        rng::Stream seeding(draws_.key(), rng::Channel::Seeding, iteration);
        status_ = seed(graph, seeding, config.seeds_per_contagion);
        const std::uint32_t n = graph.size();
        count_a_.assign(n, 0);
        count_b_.assign(n, 0);
        for (NodeId v = 0; v < n; ++v) {
            if (contributes_a(status_[v])) add_counts(count_a_, graph.layer_a().neighbors_unchecked(v), +1);
            if (contributes_b(status_[v])) add_counts(count_b_, graph.layer_b().neighbors_unchecked(v), +1);
        }
        counts_ = tally(status_);
        rates_[static_cast<int>(State::Naive)] = 0.0;
        rates_[static_cast<int>(State::A)] = config.dormancy.tau_a;
        rates_[static_cast<int>(State::B)] = config.dormancy.tau_b;
        rates_[static_cast<int>(State::AB)] = config.dormancy.tau_ab();
        any_dormancy_ = config.dormancy.tau_a > 0.0 || config.dormancy.tau_b > 0.0;
    }

    CountsSeries execute() {
        CountsSeries series;
        series.reserve(config_.steps);
        for (std::uint32_t t = 1; t <= config_.steps; ++t) {
            const bool live = adoption_phase(t);
            const bool decaying = any_dormancy_ && dormancy_phase(t);
            series.push(counts_);
            if (!live && !decaying) {
                // Nothing can change any more: every later step repeats.
                while (series.steps() < config_.steps) series.push(counts_);
                break;
            }
        }
        return series;
    }

private:
    bool adoption_phase(std::uint32_t t) {
        const auto mode = config_.kernel.mode;
        const std::uint32_t n = graph_.size();
        bool live = false;
        changes_.clear();
        for (NodeId v = 0; v < n; ++v) {
            const State s = status_[v].state;
            if (s == State::AB) continue;
            if (mode == AdoptionMode::Exclusive && s != State::Naive) continue;
            const double ta = has_a(s) ? 0.0 : terms_a_[count_a_[v]];
            const double tb = has_b(s) ? 0.0 : terms_b_[count_b_[v]];
            if (ta == 0.0 && tb == 0.0) continue;
            const double p = kernel::adoption_from_terms(s, ta, tb, mode);
            if (!(p > 0.0)) continue;
            live = true;
            const auto d = draws_.adoption(t, v);
            if (!kernel::fires(p, d.fire)) continue;
            changes_.push_back({v, adopted_state(s, ta, tb, d.choose)});
        }
        for (const auto& [v, next] : changes_) apply(v, next);
        return live;
    }

    void apply(NodeId v, State next) {
        const NodeStatus old = status_[v];
        const bool had_a = contributes_a(old);
        const bool had_b = contributes_b(old);
        const bool active = old.active || config_.kernel.reactivation == kernel::Reactivation::Reactivate;
        status_[v] = {next, active};
        if (!active) {
            bump(old.state, -1);
            bump(next, +1);
            return;
        }
        if (has_a(next) && !had_a) add_counts(count_a_, graph_.layer_a().neighbors_unchecked(v), +1);
        if (has_b(next) && !had_b) add_counts(count_b_, graph_.layer_b().neighbors_unchecked(v), +1);
        bump(old.state, -1);
        bump(next, +1);
        if (!old.active) --counts_.dormant;
    }

    bool dormancy_phase(std::uint32_t t) {
        const std::uint32_t n = graph_.size();
        bool decaying = false;
        for (NodeId v = 0; v < n; ++v) {
            NodeStatus& s = status_[v];
            if (!s.active) continue;
            const double rate = rates_[static_cast<int>(s.state)];
            if (!(rate > 0.0)) continue;
            decaying = true;
            if (draws_.dormancy(t, v) >= rate) continue;
            s.active = false;
            ++counts_.dormant;
            if (has_a(s.state)) add_counts(count_a_, graph_.layer_a().neighbors_unchecked(v), -1);
            if (has_b(s.state)) add_counts(count_b_, graph_.layer_b().neighbors_unchecked(v), -1);
        }
        return decaying;
    }

    void bump(State s, int delta) {
        switch (s) {
            case State::Naive: counts_.naive += delta; break;
            case State::A: counts_.a += delta; break;
            case State::B: counts_.b += delta; break;
            case State::AB: counts_.ab += delta; break;
        }
    }

    struct Change {
        NodeId node;
        State next;
    };

    const MultiplexGraph& graph_;
    const RunConfig& config_;
    Draws draws_;
    kernel::TermTable terms_a_;
    kernel::TermTable terms_b_;
    std::vector<NodeStatus> status_;
    std::vector<std::uint16_t> count_a_;
    std::vector<std::uint16_t> count_b_;
    std::vector<Change> changes_;
    Counts counts_;
    double rates_[4]{};
    bool any_dormancy_ = false;
};

}  // namespace

CountsSeries run_on(const MultiplexGraph& graph, const RunConfig& config, std::uint32_t iteration) {
    validate(config);
    return FastRun(graph, config, iteration).execute();
}

CountsSeries run(const RunConfig& config, std::uint32_t iteration) {
    validate(config);
    const auto graph = build_graph(config.graph, stream_key(config), iteration);
    return FastRun(graph, config, iteration).execute();
}

CountsSeries run_reference(const RunConfig& config, std::uint32_t iteration) {
    validate(config);
    const auto key = stream_key(config);
    const auto graph = build_graph(config.graph, key, iteration);
    const Draws draws(key, iteration, config.kernel.threshold);
    rng::Stream seeding(key, rng::Channel::Seeding, iteration);
    auto statuses = seed(graph, seeding, config.seeds_per_contagion);
    CountsSeries series;
    series.reserve(config.steps);
    for (std::uint32_t t = 1; t <= config.steps; ++t) {
        statuses = step(graph, statuses, config.kernel, config.dormancy, draws, t);
        series.push(tally(statuses));
    }
    return series;
}

MeanSeries mean_of(std::span<const CountsSeries> runs) {
    MeanSeries m;
    if (runs.empty()) return m;
    const std::size_t steps = runs.front().steps();
    for (const auto& r : runs) {
        if (r.steps() != steps) throw std::invalid_argument("runs in an ensemble must have equal length");
    }
    const auto average = [&](auto member) {
        std::vector<double> out(steps, 0.0);
        for (const auto& r : runs) {
            const auto& v = r.*member;
            for (std::size_t t = 0; t < steps; ++t) out[t] += v[t];
        }
        for (double& x : out) x /= static_cast<double>(runs.size());
        return out;
    };
    m.naive = average(&CountsSeries::naive);
    m.a = average(&CountsSeries::a);
    m.b = average(&CountsSeries::b);
    m.ab = average(&CountsSeries::ab);
    m.dormant = average(&CountsSeries::dormant);
    return m;
}

EnsembleResult run_ensemble(const RunConfig& config, std::uint32_t iterations, unsigned workers) {
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    validate(config);
    const auto key = stream_key(config);
    auto lattice = std::make_shared<const Layer>(topology::build_lattice(config.graph.side));

    std::shared_ptr<const MultiplexGraph> frozen;
    if (config.graph.topology == Topology::Lattice || config.graph.freeze_rrg) {
        frozen = std::make_shared<const MultiplexGraph>(build_graph(config.graph, key, 0, lattice));
    }

    EnsembleResult result;
    result.config = config;
    result.node_count = lattice->size();
    result.runs.resize(iterations);
    parallel_for(iterations, workers, [&](std::size_t i) {
        const auto it = static_cast<std::uint32_t>(i);
        if (frozen) {
            result.runs[i] = FastRun(*frozen, config, it).execute();
        } else {
            const auto graph = build_graph(config.graph, key, it, lattice);
            result.runs[i] = FastRun(graph, config, it).execute();
        }
    });
    result.mean = mean_of(result.runs);
    return result;
}

}  // namespace codiffuse::engine
