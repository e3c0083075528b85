#include "codiffuse/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "codiffuse/errors.hpp"

namespace codiffuse::meanfield {

MeanFieldState seeded_initial(std::uint32_t nodes, std::uint32_t seeds_per_contagion) {
    if (nodes < 2 || std::uint64_t{seeds_per_contagion} * 2 > nodes) {
        throw ConfigError("mean-field seeding needs 2 * seeds <= nodes");
    }
    const double f = static_cast<double>(seeds_per_contagion) / static_cast<double>(nodes);
    return {f, f, 0.0, 1.0 - 2.0 * f, 0.0};
}

MeanFieldState mf_rates(const MeanFieldState& s, const MeanFieldParams& params) {
    const auto& k = params.kernel;
    const auto& d = params.dormancy;
    const double term_a = kernel::contribution(s.x_a + s.x_ab, k.k_a, k.alpha);
    const double term_b = kernel::contribution(s.x_b + s.x_ab, k.k_b, k.alpha);

    // Naive adoption probability times the coin-flip share of each contagion.
    const double naive_denominator = 1.0 + term_a + term_b;
    const double naive_to_a = s.x_naive * term_a / naive_denominator;
    const double naive_to_b = s.x_naive * term_b / naive_denominator;

    double a_to_ab = 0.0;
    double b_to_ab = 0.0;
    if (k.mode == kernel::AdoptionMode::Inclusive) {
        a_to_ab = s.x_a * term_b / (1.0 + term_b);
        b_to_ab = s.x_b * term_a / (1.0 + term_a);
    }

    const double sleep_a = d.tau_a * s.x_a;
    const double sleep_b = d.tau_b * s.x_b;
    const double sleep_ab = d.tau_ab() * s.x_ab;

    MeanFieldState dx;
    dx.x_a = naive_to_a - a_to_ab - sleep_a;
    dx.x_b = naive_to_b - b_to_ab - sleep_b;
    dx.x_ab = a_to_ab + b_to_ab - sleep_ab;
    dx.x_naive = -(naive_to_a + naive_to_b);
    dx.x_r = sleep_a + sleep_b + sleep_ab;
    return dx;
}

namespace {

using Vec = std::array<double, 5>;

Vec axpy(const Vec& y, double a, const Vec& k) {
    Vec out;
    for (std::size_t i = 0; i < 5; ++i) out[i] = y[i] + a * k[i];
    return out;
}

Vec rates(const Vec& y, const MeanFieldParams& p) { return mf_rates(MeanFieldState::from_array(y), p).as_array(); }

Vec rk4_step(const Vec& y, double h, const MeanFieldParams& p) {
    const Vec k1 = rates(y, p);
    const Vec k2 = rates(axpy(y, h / 2.0, k1), p);
    const Vec k3 = rates(axpy(y, h / 2.0, k2), p);
    const Vec k4 = rates(axpy(y, h, k3), p);
    Vec out;
    for (std::size_t i = 0; i < 5; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

void check_bounds(const Vec& y, double t, double h) {
    for (double v : y) {
        if (!std::isfinite(v) || v < -kBoundsTolerance || v > 1.0 + kBoundsTolerance) {
            std::ostringstream msg;
            msg << "mean-field state left [0, 1] at t=" << t << " (component " << v << "); reduce the step size h="
                << h;
            throw IntegrationError(msg.str());
        }
    }
}

void validate(const MeanFieldParams& p) {
    if (!(p.step_size > 0.0)) throw ConfigError("meanfield.step_size must be > 0");
    if (!(p.horizon >= p.step_size)) throw ConfigError("meanfield.horizon must be >= step_size");
    if (!(p.sample_interval > 0.0)) throw ConfigError("meanfield.sample_interval must be > 0");
}

}  // namespace

Trajectory integrate(const MeanFieldState& initial, const MeanFieldParams& params) {
    validate(params);
    const double h = params.step_size;
    Vec y = initial.as_array();
    check_bounds(y, 0.0, h);

    // Whole steps up to the horizon, then one shorter step if needed.
    const auto full_steps = static_cast<std::uint64_t>(std::floor(params.horizon / h * (1.0 + 1e-12)));
    const double remainder = params.horizon - static_cast<double>(full_steps) * h;
    const auto sample_every =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(params.sample_interval / h)));

    Trajectory traj;
    traj.t.push_back(0.0);
    traj.x.push_back(MeanFieldState::from_array(y));
    for (std::uint64_t i = 1; i <= full_steps; ++i) {
        y = rk4_step(y, h, params);
        const double t = static_cast<double>(i) * h;
        check_bounds(y, t, h);
        if (i % sample_every == 0 || (i == full_steps && remainder <= h * 1e-9)) {
            traj.t.push_back(t);
            traj.x.push_back(MeanFieldState::from_array(y));
        }
    }
    if (remainder > h * 1e-9) {
        y = rk4_step(y, remainder, params);
        check_bounds(y, params.horizon, h);
        traj.t.push_back(params.horizon);
        traj.x.push_back(MeanFieldState::from_array(y));
    }
    return traj;
}

double richardson_ratio(const MeanFieldState& initial, const MeanFieldParams& params) {
    const double h = params.step_size;
    const auto run = [&](double step) {
        MeanFieldParams p = params;
        p.step_size = step;
        p.sample_interval = h;
        return integrate(initial, p);
    };
    // Samples fall on multiples of h in all three runs, plus the horizon.
    const auto y1 = run(h);
    const auto y2 = run(h / 2.0);
    const auto y4 = run(h / 4.0);
    if (y1.x.size() != y2.x.size() || y1.x.size() != y4.x.size()) {
        throw IntegrationError("richardson check: sample grids differ; choose a horizon that is a multiple of h");
    }
    // Each component is measured against its own largest magnitude so that
    // small fractions are not swamped by rounding in the O(1) ones.
    std::array<double, 5> scale{};
    for (const auto& s : y4.x) {
        const auto c = s.as_array();
        for (std::size_t i = 0; i < 5; ++i) scale[i] = std::max(scale[i], std::abs(c[i]));
    }
    double coarse = 0.0;
    double fine = 0.0;
    for (std::size_t k = 0; k < y1.x.size(); ++k) {
        const auto a = y1.x[k].as_array();
        const auto b = y2.x[k].as_array();
        const auto c = y4.x[k].as_array();
        for (std::size_t i = 0; i < 5; ++i) {
            if (!(scale[i] > 0.0)) continue;
            coarse = std::max(coarse, std::abs(a[i] - b[i]) / scale[i]);
            fine = std::max(fine, std::abs(b[i] - c[i]) / scale[i]);
        }
    }
    if (!(fine > 0.0)) throw IntegrationError("richardson check: step halving changed nothing");
    return coarse / fine;
}

}  // namespace codiffuse::meanfield
