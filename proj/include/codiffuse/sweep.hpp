#pragma once

// Sweep orchestration and output layout.
//
//   <out>/manifest.json                 resolved config, seeds, file inventory
//   <out>/heatmap.csv                   long-format statistics
//   <out>/series/<tag>.csv              ensemble-mean time series
//   <out>/series/<tag>/iter_NNNN.csv    per-iteration series (run, --keep-iterations)
//   <out>/modality/<tag>.json           KDEs of per-iteration penetration ceilings
//   <out>/meanfield/<tag>.csv           mean-field trajectories
//   <out>/graph.txt                     edge-list dump
//
// <tag> is p<index>_a<alpha>_ta<tau_a>_tb<tau_b>, index being the position in
// the enumerated parameter list.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "codiffuse/analysis.hpp"
#include "codiffuse/config.hpp"

namespace codiffuse::sweep {

inline constexpr const char* kToolVersion = "1.0.0";

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FileRecord {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uint64_t bytes = 0;
};

struct ParameterSetRecord {
    std::size_t index = 0;
    analysis::ParameterTriple params;
    std::uint64_t stream_key = 0;
    std::string status = "pending";  // pending | ok | error
    std::string error;
    std::vector<std::string> files;
};

struct RunManifest {
    std::string command;
    std::string version = kToolVersion;
    nlohmann::json config;
    unsigned workers = 1;
    std::string started_at;
    std::string finished_at;
    std::string status = "complete";  // complete | partial | aborted
    std::vector<ParameterSetRecord> parameter_sets;
    std::vector<FileRecord> files;

    nlohmann::json to_json() const;
    bool ok() const noexcept { return status == "complete"; }
};

struct SweepOptions {
    unsigned workers = 1;
    bool keep_iterations = false;
    bool dry_run = false;  // enumerate and write the manifest only
    bool progress = true;  // progress lines on standard error
    std::string command = "sweep";
};

std::string tag(std::size_t index, const analysis::ParameterTriple& p);

// Runs every enumerated triple and writes the output tree into
// spec.output_dir. Failures inside a parameter set are recorded in its entry
// and leave the manifest "partial". An I/O failure stops the sweep, writes an
// "aborted" manifest with what exists so far, and throws IoError.
RunManifest execute_sweep(const config::SweepSpec& spec, const SweepOptions& options);

// Recomputes heatmap and modality reports from the per-iteration series of a
// previous run or sweep (which must have kept them).
RunManifest analyze_directory(const std::filesystem::path& input, const std::filesystem::path& output,
                              const SweepOptions& options);

// Integrates the mean-field model for every enumerated triple.
RunManifest execute_meanfield(const config::SweepSpec& spec, const SweepOptions& options);

// Writes the graph of the first enumerated triple for the given iteration.
RunManifest execute_graph_dump(const config::SweepSpec& spec, std::uint32_t iteration, const SweepOptions& options);

}  // namespace codiffuse::sweep
