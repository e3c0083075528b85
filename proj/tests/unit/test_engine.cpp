#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>

#include "codiffuse/engine.hpp"
#include "codiffuse/errors.hpp"

using namespace codiffuse;
using namespace codiffuse::engine;

namespace {

RunConfig small_config(double alpha, double tau_a, double tau_b, std::uint32_t side = 12, std::uint32_t steps = 150) {
    RunConfig c;
    c.graph.side = side;
    c.kernel.alpha = alpha;
    c.dormancy = {tau_a, tau_b};
    c.steps = steps;
    c.master_seed = 2024;
    return c;
}

topology::MultiplexGraph multiplex(std::uint32_t side, std::uint64_t key) {
    auto lat = std::make_shared<const topology::Layer>(topology::build_lattice(side));
    rng::Stream s(rng::StreamKey{key}, rng::Channel::RandomRegular, 0);
    auto rrg = std::make_shared<const topology::Layer>(topology::build_rrg(side * side, 4, s));
    return {lat, rrg};
}

}  // namespace

TEST_CASE("seeding places one A and one distinct B") {
    const auto g = multiplex(80, 1);
    rng::Stream s(rng::StreamKey{5}, rng::Channel::Seeding, 0);
    const auto st = seed(g, s);
    const auto c = tally(st);
    CHECK(c == Counts{6398, 1, 1, 0, 0});

    for (std::uint32_t i = 0; i < 10000; ++i) {
        const auto g4 = topology::MultiplexGraph::single(std::make_shared<const topology::Layer>(topology::build_lattice(2)));
        rng::Stream si(rng::StreamKey{i}, rng::Channel::Seeding, i);
        const auto c4 = tally(seed(g4, si));
        REQUIRE(c4.a == 1);
        REQUIRE(c4.b == 1);
    }

    rng::Stream s1(rng::StreamKey{9}, rng::Channel::Seeding, 3);
    rng::Stream s2(rng::StreamKey{9}, rng::Channel::Seeding, 3);
    CHECK(seed(g, s1) == seed(g, s2));

    rng::Stream bad(rng::StreamKey{1}, rng::Channel::Seeding, 0);
    CHECK_THROWS_AS(seed(g, bad, 4000), ConfigError);
}

TEST_CASE("counts at t=0 for the default graph") {
    RunConfig c;
    const auto key = stream_key(c);
    const auto g = build_graph(c.graph, key, 0);
    CHECK(g.size() == 6400);
    CHECK(g.layer_b().degree() == 4);
}

TEST_CASE("without seeds nothing ever happens") {
    const auto g = multiplex(10, 3);
    const auto c = small_config(1.0, 0.1, 0.1, 10);
    const Draws draws(stream_key(c), 0, c.kernel.threshold);
    std::vector<NodeStatus> st(100);
    for (std::uint32_t t = 1; t <= 20; ++t) st = step(g, st, c.kernel, c.dormancy, draws, t);
    CHECK(tally(st) == Counts{100, 0, 0, 0, 0});
}

TEST_CASE("with zero dormancy activity never changes") {
    auto c = small_config(0.8, 0.0, 0.0);
    const auto s = run(c);
    for (auto d : s.dormant) REQUIRE(d == 0);
}

TEST_CASE("one active A neighbor gives adoption probability 1/9") {
    const auto g = multiplex(10, 4);
    std::vector<NodeStatus> st(100);
    const NodeId target = 55;
    st[g.layer_a().neighbors(target)[0]] = {State::A, true};
    kernel::KernelParams kp;
    kp.alpha = 1.0;
    constexpr int kTrials = 100000;
    int fired = 0;
    for (int i = 0; i < kTrials; ++i) {
        const Draws draws(rng::StreamKey{77}, static_cast<std::uint32_t>(i), kernel::ThresholdMode::Annealed);
        const auto next = adopt(g, st, target, kp, draws, 1);
        if (next.state != State::Naive) {
            REQUIRE(next.state == State::A);
            ++fired;
        }
    }
    const double p = 1.0 / 9.0;
    CHECK(std::abs(double(fired) / kTrials - p) < 3 * std::sqrt(p * (1 - p) / kTrials));
}

TEST_CASE("dormant neighbors do not contribute") {
    const auto g = multiplex(10, 4);
    std::vector<NodeStatus> st(100);
    const NodeId target = 55;
    for (NodeId v : g.layer_a().neighbors(target)) st[v] = {State::A, false};
    const auto d = densities(g, st, target);
    CHECK(d.a == 0.0);
    CHECK(d.b == 0.0);
}

TEST_CASE("second adoption keeps or clears dormancy by reactivation mode") {
    const auto g = multiplex(10, 4);
    std::vector<NodeStatus> st(100);
    const NodeId target = 55;
    st[target] = {State::B, false};
    for (NodeId v : g.layer_a().neighbors(target)) st[v] = {State::A, true};
    kernel::KernelParams kp;
    kp.alpha = 0.0;  // probability 1/2 for a B node with any active A neighbor
    for (auto mode : {kernel::Reactivation::Persist, kernel::Reactivation::Reactivate}) {
        kp.reactivation = mode;
        int adopted = 0;
        for (std::uint32_t i = 0; i < 200; ++i) {
            const Draws draws(rng::StreamKey{3}, i, kernel::ThresholdMode::Annealed);
            const auto next = adopt(g, st, target, kp, draws, 1);
            if (next.state == State::AB) {
                ++adopted;
                CHECK(next.active == (mode == kernel::Reactivation::Reactivate));
            }
        }
        CHECK(adopted > 50);
    }
}

TEST_CASE("a node adopts at most one contagion per step") {
    const auto g = multiplex(10, 4);
    std::vector<NodeStatus> st(100);
    const NodeId target = 55;
    for (NodeId v : g.layer_a().neighbors(target)) st[v] = {State::A, true};
    for (NodeId v : g.layer_b().neighbors(target)) st[v] = {State::B, true};
    kernel::KernelParams kp;
    kp.alpha = 0.0;
    for (std::uint32_t i = 0; i < 1000; ++i) {
        const Draws draws(rng::StreamKey{8}, i, kernel::ThresholdMode::Annealed);
        REQUIRE(adopt(g, st, target, kp, draws, 1).state != State::AB);
    }
}

TEST_CASE("exclusive mode never produces AB") {
    auto c = small_config(0.5, 0.0, 0.0);
    c.kernel.mode = kernel::AdoptionMode::Exclusive;
    const auto s = run(c);
    for (auto ab : s.ab) REQUIRE(ab == 0);
    CHECK(s.a.back() + s.b.back() > 0);
}

TEST_CASE("incremental run matches the step-by-step reference bit for bit") {
    std::vector<RunConfig> configs;
    for (double alpha : {0.0, 0.8, 1.3}) {
        for (auto [ta, tb] : {std::pair{0.0, 0.0}, std::pair{0.0, 0.05}, std::pair{0.04, 0.1}}) {
            configs.push_back(small_config(alpha, ta, tb));
        }
    }
    auto c = small_config(1.0, 0.02, 0.02);
    c.kernel.reactivation = kernel::Reactivation::Reactivate;
    configs.push_back(c);
    c.kernel.mode = kernel::AdoptionMode::Exclusive;
    configs.push_back(c);
    c = small_config(0.2, 0.01, 0.03);
    c.kernel.threshold = kernel::ThresholdMode::Quenched;
    configs.push_back(c);
    c = small_config(1.2, 0.0, 0.02);
    c.graph.topology = Topology::Lattice;
    configs.push_back(c);
    c = small_config(0.8, 0.0, 0.02, 12, 100);
    c.seeds_per_contagion = 5;
    configs.push_back(c);

    for (const auto& cfg : configs) {
        for (std::uint32_t it : {0u, 1u, 7u}) {
            CAPTURE(cfg.kernel.alpha);
            CAPTURE(it);
            CHECK(run(cfg, it) == run_reference(cfg, it));
        }
    }
}

TEST_CASE("full-size incremental run matches the reference") {
    const auto c = small_config(1.2, 0.0, 0.1, 80, 700);
    CHECK(run(c, 3) == run_reference(c, 3));
}

TEST_CASE("step result does not depend on evaluation order") {
    const auto g = multiplex(12, 6);
    const auto c = small_config(0.9, 0.05, 0.08);
    const Draws draws(stream_key(c), 2, c.kernel.threshold);
    rng::Stream s(rng::StreamKey{2}, rng::Channel::Seeding, 0);
    auto st = seed(g, s, 6);
    std::vector<NodeId> order(g.size());
    std::iota(order.begin(), order.end(), 0u);
    rng::Stream shuffle(rng::StreamKey{4}, rng::Channel::Seeding, 1);
    for (std::uint32_t t = 1; t <= 60; ++t) {
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            std::swap(order[i], order[shuffle.below(static_cast<std::uint32_t>(i + 1))]);
        }
        const auto forward = step(g, st, c.kernel, c.dormancy, draws, t);
        const auto permuted = step(g, st, c.kernel, c.dormancy, draws, t, order);
        REQUIRE(forward == permuted);
        st = forward;
    }
}

TEST_CASE("conservation, absorption and legal transitions on a trajectory") {
    const auto g = multiplex(12, 9);
    const auto c = small_config(1.0, 0.05, 0.05);
    const Draws draws(stream_key(c), 0, c.kernel.threshold);
    rng::Stream s(rng::StreamKey{2}, rng::Channel::Seeding, 0);
    auto st = seed(g, s, 3);
    std::int32_t last_ab = 0;
    for (std::uint32_t t = 1; t <= 150; ++t) {
        const auto next = step(g, st, c.kernel, c.dormancy, draws, t);
        for (std::size_t v = 0; v < st.size(); ++v) {
            const auto from = static_cast<unsigned>(st[v].state);
            const auto to = static_cast<unsigned>(next[v].state);
            REQUIRE((from & to) == from);  // states only gain contagions
            if (next[v].state == State::Naive) REQUIRE(next[v].active);
        }
        const auto cnt = tally(next);
        REQUIRE(cnt.naive + cnt.a + cnt.b + cnt.ab == 144);
        REQUIRE(cnt.ab >= last_ab);
        last_ab = cnt.ab;
        st = next;
    }
}

TEST_CASE("runs are deterministic and seeds matter") {
    const auto c = small_config(1.0, 0.02, 0.04);
    CHECK(run(c, 5) == run(c, 5));
    CHECK_FALSE(run(c, 5) == run(c, 6));
    auto other = c;
    other.master_seed = 1;
    CHECK_FALSE(run(other, 5) == run(c, 5));
}

TEST_CASE("certain B dormancy: the B seed sleeps at step 1") {
    auto c = small_config(1.0, 0.0, 1.0);
    const auto s = run(c);
    CHECK(s.dormant[0] >= 1);
    // B only spreads again through nodes that first hold A.
    for (std::size_t t = 0; t < s.steps(); ++t) REQUIRE(s.b[t] <= 1);
}

TEST_CASE("ensembles are independent of worker count") {
    const auto c = small_config(1.1, 0.01, 0.05, 16, 120);
    const auto one = run_ensemble(c, 12, 1);
    const auto many = run_ensemble(c, 12, 5);
    CHECK(one.runs == many.runs);
    CHECK(one.mean.a == many.mean.a);
    for (std::uint32_t i = 0; i < 12; ++i) CHECK(one.runs[i] == run(c, i));
}

TEST_CASE("frozen random regular graph is shared across iterations") {
    auto c = small_config(1.0, 0.0, 0.0);
    c.graph.freeze_rrg = true;
    const auto key = stream_key(c);
    CHECK(build_graph(c.graph, key, 0).layer_b().edges() == build_graph(c.graph, key, 9).layer_b().edges());
    c.graph.freeze_rrg = false;
    CHECK(build_graph(c.graph, key, 0).layer_b().edges() != build_graph(c.graph, key, 9).layer_b().edges());
    const auto e = run_ensemble(c, 3, 1);
    CHECK(e.runs[2] == run(c, 2));
}

TEST_CASE("mean series") {
    const auto c = small_config(0.7, 0.0, 0.0);
    const auto single = run_ensemble(c, 1, 1);
    for (std::size_t t = 0; t < single.runs[0].steps(); ++t) {
        REQUIRE(single.mean.a[t] == single.runs[0].a[t]);
    }
    CountsSeries k;
    for (int i = 0; i < 5; ++i) k.push({1, 2, 3, 4, 0});
    const std::vector<CountsSeries> same(4, k);
    const auto m = mean_of(same);
    for (double v : m.b) CHECK(v == 3.0);
}

TEST_CASE("invalid run configurations") {
    auto c = small_config(1.0, 1.5, 0.0);
    CHECK_THROWS_AS(run(c), ConfigError);
    c = small_config(-1.0, 0.0, 0.0);
    CHECK_THROWS_AS(run(c), ConfigError);
    c = small_config(1.0, 0.0, 0.0);
    CHECK_THROWS_AS(run_ensemble(c, 0), ConfigError);
}
