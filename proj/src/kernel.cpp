#include "codiffuse/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace codiffuse {

const char* to_string(State s) noexcept {
    switch (s) {
        case State::Naive: return "naive";
        case State::A: return "A";
        case State::B: return "B";
        case State::AB: return "AB";
    }
    return "?";
}

}  // namespace codiffuse

namespace codiffuse::kernel {

double contribution(double x, double k, double alpha) noexcept {
    if (x <= 0.0) return 0.0;
    return std::pow(x / k, alpha);
}

double hill(double x, double k, double alpha) noexcept {
    const double t = contribution(x, k, alpha);
    return t / (1.0 + t);
}

double adoption_from_terms(State state, double term_a, double term_b, AdoptionMode mode) noexcept {
    if (state == State::AB) return 0.0;
    if (mode == AdoptionMode::Exclusive && state != State::Naive) return 0.0;
    const double ta = has_a(state) ? 0.0 : term_a;
    const double tb = has_b(state) ? 0.0 : term_b;
    const double sum = ta + tb;
    return sum / (1.0 + sum);
}

double adoption_probability(State state, Densities dens, const KernelParams& params) noexcept {
    return adoption_from_terms(state, contribution(dens.a, params.k_a, params.alpha),
                               contribution(dens.b, params.k_b, params.alpha), params.mode);
}

Contagion choose_from_terms(double term_a, double term_b, double u) {
    const double sum = term_a + term_b;
    if (!(sum > 0.0)) {
        throw std::invalid_argument("choose_contagion called with both contributions zero");
    }
    return u * sum < term_a ? Contagion::A : Contagion::B;
}

Contagion choose_contagion(Densities dens, const KernelParams& params, double u) {
    return choose_from_terms(contribution(dens.a, params.k_a, params.alpha),
                             contribution(dens.b, params.k_b, params.alpha), u);
}

double dormancy_rate(State state, const DormancyParams& d) {
    switch (state) {
        case State::A: return d.tau_a;
        case State::B: return d.tau_b;
        case State::AB: return d.tau_ab();
        case State::Naive: break;
    }
    throw std::invalid_argument("dormancy_rate is defined for adopter states only");
}

TermTable::TermTable(std::uint32_t degree, double k, double alpha) : terms_(degree + 1) {
    for (std::uint32_t c = 0; c <= degree; ++c) {
        terms_[c] = contribution(static_cast<double>(c) / degree, k, alpha);
    }
}

}  // namespace codiffuse::kernel
