#pragma once

// Adoption probabilities for two synergistic contagions, and dormancy rates.

#include <array>
#include <cstdint>
#include <vector>

namespace codiffuse {

enum class State : std::uint8_t { Naive = 0, A = 1, B = 2, AB = 3 };

constexpr bool has_a(State s) noexcept { return (static_cast<std::uint8_t>(s) & 1u) != 0; }
constexpr bool has_b(State s) noexcept { return (static_cast<std::uint8_t>(s) & 2u) != 0; }

const char* to_string(State s) noexcept;

enum class Contagion : std::uint8_t { A, B };

}  // namespace codiffuse

namespace codiffuse::kernel {

enum class AdoptionMode { Inclusive, Exclusive };
enum class ThresholdMode { Annealed, Quenched };
// Activity of a single adopter that takes up its second contagion: Reactivate
// makes the new AB node active; Persist keeps a dormant node dormant.
enum class Reactivation { Reactivate, Persist };

struct KernelParams {
    double alpha = 1.0;
    double k_a = 2.0;
    double k_b = 2.0;
    AdoptionMode mode = AdoptionMode::Inclusive;
    ThresholdMode threshold = ThresholdMode::Annealed;
    Reactivation reactivation = Reactivation::Persist;

    friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

struct DormancyParams {
    double tau_a = 0.0;
    double tau_b = 0.0;

    // Rate for nodes holding both contagions: the arithmetic mean.
    double tau_ab() const noexcept { return (tau_a + tau_b) / 2.0; }

    friend bool operator==(const DormancyParams&, const DormancyParams&) = default;
};

// Fractions of a node's neighbors (on the respective layer) that are active
// adopters of A and of B.
struct Densities {
    double a = 0.0;
    double b = 0.0;
};

// (x / k)^alpha, with the zero-density contribution fixed at 0 for every
// alpha, including alpha = 0.
double contribution(double x, double k, double alpha) noexcept;

// Hill function x^alpha / (x^alpha + k^alpha), written as t / (1 + t) with
// t = contribution(x, k, alpha).
double hill(double x, double k, double alpha) noexcept;

// Adoption probability from precomputed contributions. States that already
// hold a contagion drop its term; AB never adopts; in exclusive mode only
// naive nodes adopt.
double adoption_from_terms(State state, double term_a, double term_b, AdoptionMode mode) noexcept;

double adoption_probability(State state, Densities dens, const KernelParams& params) noexcept;

// Split of a naive adoption between the two contagions in proportion to
// their terms. Throws std::invalid_argument if both terms are zero.
Contagion choose_from_terms(double term_a, double term_b, double u);
Contagion choose_contagion(Densities dens, const KernelParams& params, double u);

// Threshold mu = 1 - p; a draw u in [0, 1) fires when u > mu, which is
// implemented as u < p so that p = 0 never fires and p = 1 always does.
constexpr double threshold_of(double p) noexcept { return 1.0 - p; }
constexpr bool fires(double p, double u) noexcept { return u < p; }

// Throws std::invalid_argument for State::Naive.
double dormancy_rate(State state, const DormancyParams& d);

// contribution() for every possible active-neighbor count of a regular
// layer: entry c holds contribution(c / degree, k, alpha).
class TermTable {
public:
    TermTable(std::uint32_t degree, double k, double alpha);
    double operator[](std::uint32_t count) const noexcept { return terms_[count]; }
    std::uint32_t degree() const noexcept { return static_cast<std::uint32_t>(terms_.size() - 1); }

private:
    std::vector<double> terms_;
};

}  // namespace codiffuse::kernel
