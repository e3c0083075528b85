#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <tuple>

#include "codiffuse/kernel.hpp"
#include "codiffuse/rng.hpp"

using namespace codiffuse;
using namespace codiffuse::kernel;
using doctest::Approx;

namespace {

KernelParams params(double alpha, AdoptionMode mode = AdoptionMode::Inclusive) {
    KernelParams p;
    p.alpha = alpha;
    p.mode = mode;
    return p;
}

}  // namespace

TEST_CASE("hill function examples") {
    CHECK(hill(2.0, 2.0, 1.0) == Approx(0.5));
    CHECK(hill(1.0, 2.0, 1.0) == Approx(1.0 / 3.0));
    for (double a : {0.0, 0.5, 1.0, 1.3}) CHECK(hill(0.0, 2.0, a) == 0.0);
}

TEST_CASE("contribution uses the zero-density convention at every alpha") {
    CHECK(contribution(0.0, 2.0, 0.0) == 0.0);
    CHECK(contribution(0.25, 2.0, 0.0) == 1.0);
    CHECK(contribution(0.5, 2.0, 1.0) == Approx(0.25));
}

TEST_CASE("adoption probability closed forms") {
    CHECK(adoption_probability(State::Naive, {0.0, 0.0}, params(1.0)) == 0.0);
    CHECK(adoption_probability(State::Naive, {1.0, 0.0}, params(1.0)) == Approx(1.0 / 3.0));
    CHECK(adoption_probability(State::A, {0.0, 1.0}, params(1.0)) == Approx(1.0 / 3.0));
    CHECK(adoption_probability(State::Naive, {0.25, 0.0}, params(1.0)) == Approx(1.0 / 9.0));
    CHECK(adoption_probability(State::AB, {1.0, 1.0}, params(1.0)) == 0.0);
    // Two unit terms at alpha 0.
    CHECK(adoption_probability(State::Naive, {0.5, 0.25}, params(0.0)) == Approx(2.0 / 3.0));
    CHECK(adoption_probability(State::A, {0.5, 0.25}, params(0.0)) == Approx(0.5));
}

TEST_CASE("single adopters ignore their own contagion's density") {
    for (double a : {0.5, 1.0, 1.3}) {
        for (double da : {0.0, 0.25, 1.0}) {
            for (double db : {0.25, 0.5, 1.0}) {
                const double t = std::pow(db / 2.0, a);
                CHECK(adoption_probability(State::A, {da, db}, params(a)) == Approx(t / (1.0 + t)));
                const double u = std::pow(db / 2.0, a);
                CHECK(adoption_probability(State::B, {db, da}, params(a)) == Approx(u / (1.0 + u)));
            }
        }
    }
}

TEST_CASE("exclusive mode blocks second adoptions") {
    const auto ex = params(1.0, AdoptionMode::Exclusive);
    CHECK(adoption_probability(State::A, {1.0, 1.0}, ex) == 0.0);
    CHECK(adoption_probability(State::B, {1.0, 1.0}, ex) == 0.0);
    CHECK(adoption_probability(State::Naive, {1.0, 0.0}, ex) == Approx(1.0 / 3.0));
}

TEST_CASE("probability bounds and monotonicity") {
    for (double a : {0.0, 0.5, 1.0, 1.3, 2.0}) {
        for (int i = 0; i <= 4; ++i) {
            for (int j = 0; j <= 4; ++j) {
                for (State s : {State::Naive, State::A, State::B, State::AB}) {
                    const double p = adoption_probability(s, {i / 4.0, j / 4.0}, params(a));
                    CHECK(p >= 0.0);
                    CHECK(p <= 1.0);
                    if (a > 0.0 && i < 4 && !has_a(s)) {
                        CHECK(adoption_probability(s, {(i + 1) / 4.0, j / 4.0}, params(a)) > p);
                    }
                }
            }
        }
    }
}

TEST_CASE("synergy concavity flips between alpha 0.5 and 1.3") {
    for (double d : {0.25, 0.5, 0.75, 1.0}) {
        const auto p = [&](double alpha, double x, double y) {
            return adoption_probability(State::Naive, {x, y}, params(alpha));
        };
        CHECK(p(0.5, d, 0.0) + p(0.5, 0.0, d) <= 2.0 * p(0.5, d / 2, d / 2) + 1e-12);
        CHECK(p(1.3, d, 0.0) + p(1.3, 0.0, d) >= 2.0 * p(1.3, d / 2, d / 2) - 1e-12);
    }
}

TEST_CASE("contagion choice follows relative terms") {
    CHECK(choose_from_terms(1.0, 0.0, 0.999) == Contagion::A);
    CHECK(choose_from_terms(0.0, 1.0, 0.0) == Contagion::B);
    CHECK_THROWS_AS(choose_from_terms(0.0, 0.0, 0.5), std::invalid_argument);

    rng::Stream s(rng::StreamKey{11}, rng::Channel::Adoption, 0);
    constexpr int kTrials = 100000;
    for (auto [da, db, expect] : {std::tuple{1.0, 0.5, 2.0 / 3.0}, std::tuple{0.5, 0.5, 0.5}}) {
        int a = 0;
        for (int i = 0; i < kTrials; ++i) a += choose_contagion({da, db}, params(1.0), s.uniform()) == Contagion::A;
        const double sigma = std::sqrt(expect * (1 - expect) / kTrials);
        CHECK(std::abs(double(a) / kTrials - expect) < 3 * sigma);
    }
}

TEST_CASE("threshold firing") {
    CHECK(threshold_of(0.0) == 1.0);
    CHECK(threshold_of(1.0) == 0.0);
    CHECK_FALSE(fires(0.0, 0.0));
    CHECK(fires(1.0, 0.999999));

    rng::Stream s(rng::StreamKey{12}, rng::Channel::Adoption, 0);
    constexpr int kTrials = 100000;
    int hits = 0;
    for (int i = 0; i < kTrials; ++i) hits += fires(0.25, s.uniform());
    CHECK(std::abs(double(hits) / kTrials - 0.25) < 3 * std::sqrt(0.25 * 0.75 / kTrials));
}

TEST_CASE("dormancy rates") {
    CHECK(dormancy_rate(State::AB, {0.04, 0.0}) == Approx(0.02));
    CHECK(dormancy_rate(State::A, {0.1, 0.0}) == 0.1);
    CHECK(dormancy_rate(State::B, {0.3, 0.0}) == 0.0);
    CHECK_THROWS(dormancy_rate(State::Naive, {0.1, 0.1}));
}

TEST_CASE("term tables match direct evaluation") {
    const TermTable t(4, 2.0, 1.3);
    CHECK(t.degree() == 4);
    for (std::uint32_t c = 0; c <= 4; ++c) CHECK(t[c] == contribution(c / 4.0, 2.0, 1.3));
}
