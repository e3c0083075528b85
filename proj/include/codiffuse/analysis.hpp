#pragma once

// Reductions of simulated ensembles: ceilings (mean of the final 20% of the
// series), inflection points (first step at half the ceiling), Gaussian KDEs
// with mode counting, and long-format heatmap tables.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "codiffuse/engine.hpp"

namespace codiffuse::analysis {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// State classes, plus the two penetration channels: every node that holds A
// (states A and AB) and every node that holds B (states B and AB).
enum class Category { Naive, A, B, AB, AdoptersA, AdoptersB };

inline constexpr Category kStateCategories[] = {Category::A, Category::B, Category::AB, Category::Naive};

const char* to_string(Category c) noexcept;

std::vector<double> series_of(const engine::CountsSeries& s, Category c);
std::vector<double> series_of(const engine::MeanSeries& s, Category c);

// Length of the tail window: ceil(0.2 * steps).
constexpr std::size_t ceiling_window(std::size_t steps) noexcept { return (steps + 4) / 5; }

// Mean of the last ceiling_window(T) entries. Throws AnalysisError when the
// series is shorter than 5 steps.
double ceiling(std::span<const double> series);

// Smallest index t with series[t] >= ceiling / 2; empty when the ceiling is
// not positive.
std::optional<std::size_t> inflection(std::span<const double> series);

struct CeilingStats {
    Category category;
    std::vector<double> per_iteration;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

CeilingStats ceiling_stats(std::span<const engine::CountsSeries> runs, Category c);

// Population mean and standard deviation. The values are summed in sorted
// order so the result does not depend on the order of the input.
std::pair<double, double> mean_and_std(std::vector<double> values);

inline constexpr std::size_t kKdeGridPoints = 512;
inline constexpr double kKdeGridPadding = 4.0;      // grid spans [min - 4h, max + 4h]
inline constexpr double kModeProminence = 0.05;     // of the global maximum density

struct ModalityReport {
    double bandwidth = 0.0;
    std::string bandwidth_rule;  // "silverman" or "fixed"
    double prominence = kModeProminence;
    std::vector<std::pair<double, double>> grid;  // (position, density)
    std::vector<double> modes;                    // accepted local maxima, ascending
    // Fraction of the input values in each mode's basin. Basins are split at
    // the lowest grid density between neighboring modes.
    std::vector<double> mode_weights;

    std::size_t mode_count() const noexcept { return modes.size(); }
};

// Silverman's rule of thumb, 0.9 * min(sd, IQR / 1.34) * n^(-1/5), falling
// back to sd when the IQR vanishes and to a small positive width when all
// values coincide.
double silverman_bandwidth(std::span<const double> values);

ModalityReport kde(std::span<const double> values, std::optional<double> bandwidth = std::nullopt);

struct ParameterTriple {
    double alpha = 0.0;
    double tau_a = 0.0;
    double tau_b = 0.0;

    friend bool operator==(const ParameterTriple&, const ParameterTriple&) = default;
    friend auto operator<=>(const ParameterTriple&, const ParameterTriple&) = default;
};

enum class Metric { CeilingMean, CeilingStd, InflectionMean };

const char* to_string(Metric m) noexcept;

struct HeatmapRow {
    ParameterTriple params;
    Category category;
    Metric metric;
    std::optional<double> value;  // empty when the inflection is undefined

    friend bool operator==(const HeatmapRow&, const HeatmapRow&) = default;
};

using HeatmapTable = std::vector<HeatmapRow>;

// Rows for one parameter triple: for each state category, the ceiling mean
// and population std over per-iteration ceilings, and the inflection point
// of the ensemble-mean series.
HeatmapTable summarize_one(const ParameterTriple& params, std::span<const engine::CountsSeries> runs);

struct TripleEnsemble {
    ParameterTriple params;
    const engine::EnsembleResult* ensemble;
};

HeatmapTable summarize(std::span<const TripleEnsemble> ensembles);

}  // namespace codiffuse::analysis
