#pragma once

// Sweep configuration: a single JSON document.
//
// {
//   "graph":      {"topology": "multiplex" | "lattice", "side": 80, "rrg_degree": 4, "freeze_rrg": false},
//   "kernel":     {"k_a": 2.0, "k_b": 2.0, "adoption": "inclusive" | "exclusive",
//                  "threshold": "annealed" | "quenched", "reactivation": "reactivate" | "persist"},
//   "sweep":      {"alpha": [...], "tau_a": [...], "tau_b": [...], "enforce_tau_b_lt_tau_a": false},
//   "simulation": {"iterations": 100, "steps": 700, "seeds_per_contagion": 1, "seed": 1},
//   "meanfield":  {"kappa": 4, "step_size": 0.1, "horizon": 700, "sample_interval": 1.0},
//   "output_dir": "out"
// }
//
// Every key is optional; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "codiffuse/analysis.hpp"
#include "codiffuse/engine.hpp"
#include "codiffuse/errors.hpp"
#include "codiffuse/kernel.hpp"
#include "codiffuse/meanfield.hpp"

namespace codiffuse::config {

struct KernelSettings {
    double k_a = 2.0;
    double k_b = 2.0;
    kernel::AdoptionMode adoption = kernel::AdoptionMode::Inclusive;
    kernel::ThresholdMode threshold = kernel::ThresholdMode::Annealed;
    kernel::Reactivation reactivation = kernel::Reactivation::Persist;

    friend bool operator==(const KernelSettings&, const KernelSettings&) = default;
};

struct MeanFieldSettings {
    std::uint32_t kappa = 4;
    double step_size = 0.1;
    double horizon = 700.0;
    double sample_interval = 1.0;

    friend bool operator==(const MeanFieldSettings&, const MeanFieldSettings&) = default;
};

// 0.0, 0.1, ..., 1.3
std::vector<double> default_alphas();
// 0.00, 0.01, ..., 0.10
std::vector<double> default_taus();

struct SweepSpec {
    engine::GraphSpec graph;
    KernelSettings kernel;
    std::vector<double> alpha = default_alphas();
    std::vector<double> tau_a = default_taus();
    std::vector<double> tau_b = default_taus();
    bool enforce_tau_b_lt_tau_a = false;
    std::uint32_t iterations = 100;
    std::uint32_t steps = 700;
    std::uint32_t seeds_per_contagion = 1;
    std::uint64_t seed = 1;
    MeanFieldSettings meanfield;
    std::string output_dir = "out";

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

// Throws ConfigError naming the offending field path.
void validate(const SweepSpec& spec);

SweepSpec parse_config(const nlohmann::json& doc);
SweepSpec parse_config_text(const std::string& text);
SweepSpec load_config(const std::filesystem::path& path);

nlohmann::json emit_config(const SweepSpec& spec);

// Cartesian product alpha x tau_a x tau_b in that nesting order, dropping
// triples with tau_b >= tau_a when the constraint flag is set.
std::vector<analysis::ParameterTriple> enumerate(const SweepSpec& spec);

engine::RunConfig run_config(const SweepSpec& spec, const analysis::ParameterTriple& triple);
meanfield::MeanFieldParams meanfield_params(const SweepSpec& spec, const analysis::ParameterTriple& triple);

// Comma-separated list of numbers, e.g. "0.1,0.2". Throws ConfigError.
std::vector<double> parse_number_list(const std::string& text, const std::string& field);

}  // namespace codiffuse::config
