#pragma once

// File formats.
//
//   time series   step,naive,a,b,ab        (step runs 1..T)
//   heatmap       alpha,tau_a,tau_b,category,metric,value   (NA for missing)
//   trajectory    t,x_a,x_b,x_ab,x_naive,x_r
//   modality      JSON {bandwidth, bandwidth_rule, prominence, grid, modes, mode_weights}
//
// Numbers are written with std::to_chars in shortest round-trip form, so
// equal values always produce equal bytes.

#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

#include "codiffuse/analysis.hpp"
#include "codiffuse/engine.hpp"
#include "codiffuse/meanfield.hpp"

namespace codiffuse::io {

std::string format_number(double v);

void write_series_csv(std::ostream& out, const engine::CountsSeries& series);
void write_series_csv(std::ostream& out, const engine::MeanSeries& series);

// Parses an integer-valued time series written by write_series_csv. Throws
// analysis::AnalysisError on malformed input.
engine::CountsSeries read_series_csv(std::istream& in);

void write_heatmap_csv(std::ostream& out, const analysis::HeatmapTable& table);

void write_trajectory_csv(std::ostream& out, const meanfield::Trajectory& trajectory);

nlohmann::json to_json(const analysis::ModalityReport& report);

std::string sha256_hex(std::string_view data);

}  // namespace codiffuse::io
