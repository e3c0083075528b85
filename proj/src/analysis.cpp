#include "codiffuse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace codiffuse::analysis {

const char* to_string(Category c) noexcept {
    switch (c) {
        case Category::Naive: return "naive";
        case Category::A: return "a";
        case Category::B: return "b";
        case Category::AB: return "ab";
        case Category::AdoptersA: return "adopters_a";
        case Category::AdoptersB: return "adopters_b";
    }
    return "?";
}

const char* to_string(Metric m) noexcept {
    switch (m) {
        case Metric::CeilingMean: return "ceiling_mean";
        case Metric::CeilingStd: return "ceiling_std";
        case Metric::InflectionMean: return "inflection_mean";
    }
    return "?";
}

namespace {

template <class Series>
std::vector<double> select(const Series& s, Category c) {
    const std::size_t n = s.naive.size();
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        switch (c) {
            case Category::Naive: out[t] = s.naive[t]; break;
            case Category::A: out[t] = s.a[t]; break;
            case Category::B: out[t] = s.b[t]; break;
            case Category::AB: out[t] = s.ab[t]; break;
            case Category::AdoptersA: out[t] = static_cast<double>(s.a[t]) + static_cast<double>(s.ab[t]); break;
            case Category::AdoptersB: out[t] = static_cast<double>(s.b[t]) + static_cast<double>(s.ab[t]); break;
        }
    }
    return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<double> series_of(const engine::CountsSeries& s, Category c) { return select(s, c); }
std::vector<double> series_of(const engine::MeanSeries& s, Category c) { return select(s, c); }

double ceiling(std::span<const double> series) {
    if (series.size() < 5) {
        throw AnalysisError("ceiling needs a series of at least 5 steps, got " + std::to_string(series.size()));
    }
    const std::size_t window = ceiling_window(series.size());
    const auto tail = series.last(window);
    return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(window);
}

std::optional<std::size_t> inflection(std::span<const double> series) {
    const double c = ceiling(series);
    if (!(c > 0.0)) return std::nullopt;
    const double half = c / 2.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (series[t] >= half) return t;
    }
    return std::nullopt;
}

std::pair<double, double> mean_and_std(std::vector<double> values) {
    if (values.empty()) return {0.0, 0.0};
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / n)};
}

CeilingStats ceiling_stats(std::span<const engine::CountsSeries> runs, Category c) {
    CeilingStats stats{c, {}, 0.0, 0.0};
    stats.per_iteration.reserve(runs.size());
    for (const auto& r : runs) stats.per_iteration.push_back(ceiling(series_of(r, c)));
    std::tie(stats.mean, stats.std) = mean_and_std(stats.per_iteration);
    return stats;
}

double silverman_bandwidth(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw AnalysisError("bandwidth needs at least 2 values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    if (!(spread > 0.0)) spread = std::max(std::abs(mean), 1.0) * 1e-3;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

ModalityReport kde(std::span<const double> values, std::optional<double> bandwidth) {
    const std::size_t n = values.size();
    if (n < 2) throw AnalysisError("kde needs at least 2 values, got " + std::to_string(n));
    for (double v : values) {
        if (!std::isfinite(v)) throw AnalysisError("kde input contains a non-finite value");
    }

    ModalityReport report;
    if (bandwidth) {
        if (!(*bandwidth > 0.0)) throw AnalysisError("kde bandwidth must be positive");
        report.bandwidth = *bandwidth;
        report.bandwidth_rule = "fixed";
    } else {
        report.bandwidth = silverman_bandwidth(values);
        report.bandwidth_rule = "silverman";
    }
    const double h = report.bandwidth;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it - kKdeGridPadding * h;
    const double hi = *hi_it + kKdeGridPadding * h;
    const double dx = (hi - lo) / static_cast<double>(kKdeGridPoints - 1);
    const double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * std::numbers::pi));

    std::vector<double> xs(kKdeGridPoints);
    std::vector<double> dens(kKdeGridPoints);
    for (std::size_t i = 0; i < kKdeGridPoints; ++i) {
        const double x = lo + dx * static_cast<double>(i);
        double sum = 0.0;
        for (double v : values) {
            const double z = (x - v) / h;
            sum += std::exp(-0.5 * z * z);
        }
        xs[i] = x;
        dens[i] = sum * norm;
    }
    report.grid.reserve(kKdeGridPoints);
    for (std::size_t i = 0; i < kKdeGridPoints; ++i) report.grid.emplace_back(xs[i], dens[i]);

    const double peak = *std::max_element(dens.begin(), dens.end());
    const double floor = kModeProminence * peak;

    // Local maxima, treating a flat run as one candidate located at its centre.
    std::vector<std::size_t> mode_index;
    for (std::size_t i = 1; i + 1 < kKdeGridPoints; ++i) {
        if (!(dens[i] > dens[i - 1])) continue;
        std::size_t j = i;
        while (j + 1 < kKdeGridPoints && dens[j + 1] == dens[i]) ++j;
        if (j + 1 < kKdeGridPoints && dens[j + 1] < dens[i] && dens[i] > floor) {
            const std::size_t centre = (i + j) / 2;
            mode_index.push_back(centre);
            report.modes.push_back(xs[centre]);
        }
        i = j;
    }

    // Basin boundaries at the lowest density between consecutive modes.
    std::vector<double> cuts;
    for (std::size_t m = 0; m + 1 < mode_index.size(); ++m) {
        const auto first = dens.begin() + static_cast<std::ptrdiff_t>(mode_index[m]);
        const auto last = dens.begin() + static_cast<std::ptrdiff_t>(mode_index[m + 1]) + 1;
        cuts.push_back(xs[static_cast<std::size_t>(std::min_element(first, last) - dens.begin())]);
    }
    report.mode_weights.assign(mode_index.size(), 0.0);
    if (!mode_index.empty()) {
        for (double v : values) {
            const auto basin = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
            report.mode_weights[basin] += 1.0;
        }
        for (double& w : report.mode_weights) w /= static_cast<double>(n);
    }
    return report;
}

HeatmapTable summarize_one(const ParameterTriple& params, std::span<const engine::CountsSeries> runs) {
    if (runs.empty()) throw AnalysisError("cannot summarize an empty ensemble");
    const auto mean = engine::mean_of(runs);
    HeatmapTable rows;
    rows.reserve(std::size(kStateCategories) * 3);
    for (const Category c : kStateCategories) {
        const auto stats = ceiling_stats(runs, c);
        const auto mean_series = series_of(mean, c);
        const auto infl = inflection(mean_series);
        rows.push_back({params, c, Metric::CeilingMean, stats.mean});
        rows.push_back({params, c, Metric::CeilingStd, stats.std});
        rows.push_back({params, c, Metric::InflectionMean,
                        infl ? std::optional<double>(static_cast<double>(*infl)) : std::nullopt});
    }
    return rows;
}

HeatmapTable summarize(std::span<const TripleEnsemble> ensembles) {
    if (ensembles.empty()) throw AnalysisError("summarize needs at least one parameter set");
    HeatmapTable rows;
    for (const auto& e : ensembles) {
        auto part = summarize_one(e.params, e.ensemble->runs);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

}  // namespace codiffuse::analysis
