#pragma once

// Well-mixed mean-field model of co-diffusion with dormancy.
//
// Five fractions: active adopters of A only, B only, both, naive nodes, and
// dormant nodes (x_r). Adoption rates follow the network kernel with the
// global fractions of active A holders (x_a + x_ab) and B holders
// (x_b + x_ab) in place of neighbor densities. Flows out of x_a and x_b into
// x_ab are balanced so that the derivatives sum to zero.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "codiffuse/kernel.hpp"

namespace codiffuse::meanfield {

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MeanFieldState {
    double x_a = 0.0;
    double x_b = 0.0;
    double x_ab = 0.0;
    double x_naive = 1.0;
    double x_r = 0.0;

    double sum() const noexcept { return x_a + x_b + x_ab + x_naive + x_r; }
    std::array<double, 5> as_array() const noexcept { return {x_a, x_b, x_ab, x_naive, x_r}; }
    static MeanFieldState from_array(const std::array<double, 5>& v) noexcept {
        return {v[0], v[1], v[2], v[3], v[4]};
    }
};

// One seed of each contagion among n nodes, everything else naive.
MeanFieldState seeded_initial(std::uint32_t nodes, std::uint32_t seeds_per_contagion = 1);

struct MeanFieldParams {
    kernel::KernelParams kernel;
    kernel::DormancyParams dormancy;
    std::uint32_t kappa = 4;  // reported with results; enters no rate
    double step_size = 0.1;
    double horizon = 700.0;
    double sample_interval = 1.0;
};

// Time derivative of every component.
MeanFieldState mf_rates(const MeanFieldState& state, const MeanFieldParams& params);

struct Trajectory {
    std::vector<double> t;
    std::vector<MeanFieldState> x;
};

inline constexpr double kBoundsTolerance = 1e-6;

// Classical fourth-order Runge-Kutta with fixed step to the horizon. Samples
// are taken every sample_interval (rounded to whole steps), always including
// t = 0 and the horizon. Throws IntegrationError if any component leaves
// [0, 1] by more than kBoundsTolerance.
Trajectory integrate(const MeanFieldState& initial, const MeanFieldParams& params);

// max |y_h - y_{h/2}| / max |y_{h/2} - y_{h/4}|, maxima over all components
// at every multiple of h up to the horizon, each component divided by its
// largest magnitude along the h/4 trajectory. Close to 16 for a fourth-order
// scheme in its asymptotic range.
double richardson_ratio(const MeanFieldState& initial, const MeanFieldParams& params);

}  // namespace codiffuse::meanfield
