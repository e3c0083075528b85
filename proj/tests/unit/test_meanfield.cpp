#include "doctest.h"

#include <cmath>

#include "codiffuse/errors.hpp"
#include "codiffuse/meanfield.hpp"

using namespace codiffuse;
using namespace codiffuse::meanfield;
using doctest::Approx;

namespace {

MeanFieldParams params(double alpha, double tau_a, double tau_b) {
    MeanFieldParams p;
    p.kernel.alpha = alpha;
    p.dormancy = {tau_a, tau_b};
    return p;
}

}  // namespace

TEST_CASE("rates at a hand-computed state") {
    // x_A = x_B = 0.1, alpha 1, K 2: each term is 0.05.
    const MeanFieldState s{0.1, 0.1, 0.0, 0.8, 0.0};
    const auto d = mf_rates(s, params(1.0, 0.0, 0.0));
    CHECK(d.x_a == Approx(2.0 / 55.0 - 1.0 / 210.0));
    CHECK(d.x_b == Approx(2.0 / 55.0 - 1.0 / 210.0));
    CHECK(d.x_ab == Approx(2.0 / 210.0));
    CHECK(d.x_naive == Approx(-4.0 / 55.0));
    CHECK(d.x_r == 0.0);
    CHECK(std::abs(d.sum()) < 1e-15);
}

TEST_CASE("dormancy moves mass into the removed compartment") {
    const MeanFieldState s{0.2, 0.1, 0.3, 0.4, 0.0};
    const auto d = mf_rates(s, params(1.0, 0.1, 0.3));
    CHECK(d.x_r == Approx(0.1 * 0.2 + 0.3 * 0.1 + 0.2 * 0.3));
    CHECK(std::abs(d.sum()) < 1e-15);
}

TEST_CASE("exclusive mode has no flow into AB") {
    auto p = params(1.0, 0.0, 0.0);
    p.kernel.mode = kernel::AdoptionMode::Exclusive;
    const auto d = mf_rates({0.2, 0.2, 0.0, 0.6, 0.0}, p);
    CHECK(d.x_ab == 0.0);
}

TEST_CASE("seeded initial state") {
    const auto s = seeded_initial(6400);
    CHECK(s.x_a == 1.0 / 6400);
    CHECK(s.x_naive == Approx(6398.0 / 6400));
    CHECK_THROWS_AS(seeded_initial(6400, 4000), ConfigError);
}

TEST_CASE("trajectory sampling and conservation") {
    auto p = params(0.8, 0.04, 0.0);
    const auto traj = integrate(seeded_initial(6400), p);
    REQUIRE(traj.t.size() == 701);
    CHECK(traj.t.front() == 0.0);
    CHECK(traj.t.back() == Approx(700.0));
    for (std::size_t i = 0; i < traj.x.size(); ++i) {
        REQUIRE(std::abs(traj.x[i].sum() - 1.0) < 1e-9);
        if (i > 0) {
            REQUIRE(traj.x[i].x_naive <= traj.x[i - 1].x_naive + 1e-15);
            REQUIRE(traj.x[i].x_r >= traj.x[i - 1].x_r - 1e-15);
        }
    }

    p.horizon = 10.25;
    p.sample_interval = 5.0;
    const auto short_traj = integrate(seeded_initial(100), p);
    CHECK(short_traj.t == std::vector<double>{0.0, 5.0, 10.0, 10.25});
}

TEST_CASE("fourth-order convergence") {
    auto p = params(1.0, 0.02, 0.05);
    p.horizon = 200.0;
    p.step_size = 2.0;
    const double r = richardson_ratio(seeded_initial(100), p);
    CHECK(r == Approx(16.0).epsilon(0.25));
}

TEST_CASE("unstable steps are rejected") {
    auto p = params(0.0, 1.0, 1.0);
    p.step_size = 50.0;
    p.horizon = 500.0;
    CHECK_THROWS_AS(integrate({0.3, 0.3, 0.0, 0.4, 0.0}, p), IntegrationError);
    p.step_size = 0.0;
    CHECK_THROWS_AS(integrate(seeded_initial(100), p), ConfigError);
}
