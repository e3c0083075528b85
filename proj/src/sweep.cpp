#include "codiffuse/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>

#include "codiffuse/engine.hpp"
#include "codiffuse/io.hpp"
#include "codiffuse/parallel.hpp"

namespace codiffuse::sweep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

// Writes files under one root and keeps a hashed inventory. Each path is
// written by exactly one caller.
class OutputTree {
public:
    explicit OutputTree(fs::path root) : root_(std::move(root)) {}

    void write(const std::string& relative, const std::string& content) {
        const fs::path full = root_ / relative;
        std::error_code ec;
        fs::create_directories(full.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + full.parent_path().string() + ": " + ec.message());
        {
            std::ofstream out(full, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot open " + full.string() + " for writing");
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            if (!out) throw IoError("write failed for " + full.string());
        }
        std::lock_guard lock(mutex_);
        files_.push_back({relative, io::sha256_hex(content), content.size()});
    }

    std::vector<FileRecord> inventory() const {
        std::lock_guard lock(mutex_);
        auto out = files_;
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
        return out;
    }

    const fs::path& root() const noexcept { return root_; }

private:
    fs::path root_;
    mutable std::mutex mutex_;
    std::vector<FileRecord> files_;
};

class Progress {
public:
    Progress(bool enabled, std::size_t total) : enabled_(enabled), total_(total) {}

    void done(const ParameterSetRecord& rec, double seconds) {
        if (!enabled_) return;
        std::lock_guard lock(mutex_);
        ++finished_;
        std::cerr << '[' << finished_ << '/' << total_ << "] " << tag(rec.index, rec.params) << ' ' << rec.status;
        if (!rec.error.empty()) std::cerr << ": " << rec.error;
        std::cerr << " (" << std::fixed << std::setprecision(2) << seconds << "s)\n";
        std::cerr.unsetf(std::ios::floatfield);
    }

private:
    bool enabled_;
    std::size_t total_;
    std::size_t finished_ = 0;
    std::mutex mutex_;
};

std::vector<ParameterSetRecord> records_for(const config::SweepSpec& spec) {
    std::vector<ParameterSetRecord> out;
    const auto triples = config::enumerate(spec);
    out.reserve(triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i) {
        ParameterSetRecord rec;
        rec.index = i;
        rec.params = triples[i];
        rec.stream_key = engine::stream_key(config::run_config(spec, triples[i])).value();
        out.push_back(std::move(rec));
    }
    return out;
}

RunManifest start_manifest(const std::string& command, const config::SweepSpec& spec, const SweepOptions& options) {
    RunManifest m;
    m.command = command;
    m.config = config::emit_config(spec);
    m.workers = options.workers;
    m.started_at = utc_now();
    return m;
}

void finish_manifest(RunManifest& m, OutputTree& tree) {
    m.finished_at = utc_now();
    if (m.status != "aborted") {
        const bool failed = std::any_of(m.parameter_sets.begin(), m.parameter_sets.end(),
                                        [](const auto& r) { return r.status == "error"; });
        m.status = failed ? "partial" : "complete";
    }
    m.files = tree.inventory();
    const std::string text = m.to_json().dump(2) + "\n";
    const fs::path full = tree.root() / "manifest.json";
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + full.string());
    out << text;
}

std::string series_text(const engine::CountsSeries& s) {
    std::ostringstream out;
    io::write_series_csv(out, s);
    return out.str();
}

std::string series_text(const engine::MeanSeries& s) {
    std::ostringstream out;
    io::write_series_csv(out, s);
    return out.str();
}

std::string iteration_path(const std::string& t, std::size_t i) {
    std::ostringstream s;
    s << "series/" << t << "/iter_" << std::setw(4) << std::setfill('0') << i << ".csv";
    return s.str();
}

// Modality reports of per-iteration penetration ceilings; null when the
// ensemble is too small for a density estimate.
std::string modality_text(std::span<const engine::CountsSeries> runs) {
    json doc = json::object();
    for (const auto c : {analysis::Category::AdoptersA, analysis::Category::AdoptersB}) {
        const auto stats = analysis::ceiling_stats(runs, c);
        doc[analysis::to_string(c)] = io::to_json(analysis::kde(stats.per_iteration));
    }
    return doc.dump(2) + "\n";
}

// Runs parameter sets fn(record) across workers: over sets when there are at
// least as many sets as workers, otherwise one set at a time with the
// workers passed down to fn.
template <class Fn>
void for_each_set(std::vector<ParameterSetRecord>& sets, unsigned workers, Fn&& fn) {
    std::atomic<bool> aborted{false};
    std::exception_ptr io_failure;
    std::mutex failure_mutex;
    const bool across_sets = sets.size() >= workers;
    const unsigned inner = across_sets ? 1u : workers;
    parallel_for(sets.size(), across_sets ? workers : 1u, [&](std::size_t i) {
        if (aborted.load()) return;
        try {
            fn(sets[i], inner);
        } catch (const IoError&) {
            std::lock_guard lock(failure_mutex);
            if (!io_failure) io_failure = std::current_exception();
            aborted.store(true);
        }
    });
    if (io_failure) std::rethrow_exception(io_failure);
}

template <class Body>
RunManifest guarded(RunManifest manifest, OutputTree& tree, Body&& body) {
    try {
        body(manifest);
    } catch (const IoError&) {
        manifest.status = "aborted";
        try {
            finish_manifest(manifest, tree);
        } catch (const IoError&) {
        }
        throw;
    }
    finish_manifest(manifest, tree);
    return manifest;
}

}  // namespace

json RunManifest::to_json() const {
    json sets = json::array();
    for (const auto& r : parameter_sets) {
        json entry = {
            {"index", r.index},          {"alpha", r.params.alpha}, {"tau_a", r.params.tau_a},
            {"tau_b", r.params.tau_b},   {"stream_key", hex64(r.stream_key)},
            {"status", r.status},        {"files", r.files},
        };
        if (!r.error.empty()) entry["error"] = r.error;
        sets.push_back(std::move(entry));
    }
    json inventory = json::array();
    for (const auto& f : files) inventory.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    return {
        {"tool", "codiffuse"},
        {"version", version},
        {"command", command},
        {"status", status},
        {"started_at", started_at},
        {"finished_at", finished_at},
        {"workers", workers},
        {"config", config},
        {"statistics",
         {{"ceiling", "mean of the final ceil(0.2 * steps) entries"},
          {"ceiling_std", "population standard deviation over per-iteration ceilings"},
          {"inflection_mean", "first step index (0-based) of the ensemble-mean series at half its ceiling"},
          {"kde", "gaussian kernel, silverman bandwidth, 512-point grid over [min - 4h, max + 4h]"},
          {"mode_prominence", analysis::kModeProminence}}},
        {"parameter_set_count", parameter_sets.size()},
        {"parameter_sets", std::move(sets)},
        {"files", std::move(inventory)},
    };
}

std::string tag(std::size_t index, const analysis::ParameterTriple& p) {
    std::ostringstream s;
    s << 'p' << std::setw(4) << std::setfill('0') << index << "_a" << io::format_number(p.alpha) << "_ta"
      << io::format_number(p.tau_a) << "_tb" << io::format_number(p.tau_b);
    return s.str();
}

RunManifest execute_sweep(const config::SweepSpec& spec, const SweepOptions& options) {
    config::validate(spec);
    OutputTree tree(spec.output_dir);
    RunManifest manifest = start_manifest(options.command, spec, options);
    manifest.parameter_sets = records_for(spec);

    return guarded(std::move(manifest), tree, [&](RunManifest& m) {
        std::error_code ec;
        fs::create_directories(tree.root(), ec);
        if (ec) throw IoError("cannot create output directory " + tree.root().string() + ": " + ec.message());
        if (options.dry_run) return;

        std::vector<analysis::HeatmapTable> rows(m.parameter_sets.size());
        Progress progress(options.progress, m.parameter_sets.size());
        for_each_set(m.parameter_sets, options.workers, [&](ParameterSetRecord& rec, unsigned inner) {
            const auto begin = std::chrono::steady_clock::now();
            const std::string t = tag(rec.index, rec.params);
            try {
                const auto ensemble =
                    engine::run_ensemble(config::run_config(spec, rec.params), spec.iterations, inner);
                rows[rec.index] = analysis::summarize_one(rec.params, ensemble.runs);

                const std::string mean_path = "series/" + t + ".csv";
                tree.write(mean_path, series_text(ensemble.mean));
                rec.files.push_back(mean_path);
                if (options.keep_iterations) {
                    for (std::size_t i = 0; i < ensemble.runs.size(); ++i) {
                        const auto path = iteration_path(t, i);
                        tree.write(path, series_text(ensemble.runs[i]));
                        rec.files.push_back(path);
                    }
                }
                if (ensemble.runs.size() >= 2) {
                    const std::string path = "modality/" + t + ".json";
                    tree.write(path, modality_text(ensemble.runs));
                    rec.files.push_back(path);
                }
                rec.status = "ok";
            } catch (const IoError&) {
                rec.status = "error";
                throw;
            } catch (const std::exception& e) {
                rec.status = "error";
                rec.error = e.what();
                rows[rec.index].clear();
            }
            progress.done(rec, std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count());
        });

        analysis::HeatmapTable all;
        for (const auto& part : rows) all.insert(all.end(), part.begin(), part.end());
        std::ostringstream heat;
        io::write_heatmap_csv(heat, all);
        tree.write("heatmap.csv", heat.str());
    });
}

RunManifest analyze_directory(const fs::path& input, const fs::path& output, const SweepOptions& options) {
    std::ifstream in(input / "manifest.json");
    if (!in) throw ConfigError((input / "manifest.json").string() + ": cannot open manifest");
    json source;
    try {
        source = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError((input / "manifest.json").string() + ": malformed manifest: " + e.what());
    }
    if (!source.contains("config") || !source.contains("parameter_sets")) {
        throw ConfigError((input / "manifest.json").string() + ": not a codiffuse manifest");
    }
    config::SweepSpec spec = config::parse_config(source["config"]);
    spec.output_dir = output.string();

    OutputTree tree(output);
    RunManifest manifest = start_manifest("analyze", spec, options);
    for (const auto& entry : source["parameter_sets"]) {
        ParameterSetRecord rec;
        rec.index = entry.at("index").get<std::size_t>();
        rec.params = {entry.at("alpha").get<double>(), entry.at("tau_a").get<double>(),
                      entry.at("tau_b").get<double>()};
        rec.stream_key = engine::stream_key(config::run_config(spec, rec.params)).value();
        if (entry.value("status", "") != "ok") {
            rec.status = "error";
            rec.error = "source parameter set did not complete";
        }
        for (const auto& f : entry.value("files", json::array())) {
            const auto path = f.get<std::string>();
            if (path.find("/iter_") != std::string::npos) rec.files.push_back(path);
        }
        manifest.parameter_sets.push_back(std::move(rec));
    }

    return guarded(std::move(manifest), tree, [&](RunManifest& m) {
        std::vector<analysis::HeatmapTable> rows(m.parameter_sets.size());
        Progress progress(options.progress, m.parameter_sets.size());
        for_each_set(m.parameter_sets, options.workers, [&](ParameterSetRecord& rec, unsigned) {
            const auto begin = std::chrono::steady_clock::now();
            const auto slot = static_cast<std::size_t>(&rec - m.parameter_sets.data());
            auto iteration_files = std::move(rec.files);
            rec.files.clear();
            if (rec.status == "error") {
                progress.done(rec, 0.0);
                return;
            }
            try {
                if (iteration_files.empty()) {
                    throw analysis::AnalysisError("no per-iteration series stored (rerun with --keep-iterations)");
                }
                std::vector<engine::CountsSeries> runs;
                for (const auto& path : iteration_files) {
                    std::ifstream series_in(input / path);
                    if (!series_in) throw analysis::AnalysisError("cannot read " + (input / path).string());
                    runs.push_back(io::read_series_csv(series_in));
                }
                rows[slot] = analysis::summarize_one(rec.params, runs);
                if (runs.size() >= 2) {
                    const std::string path = "modality/" + tag(rec.index, rec.params) + ".json";
                    tree.write(path, modality_text(runs));
                    rec.files.push_back(path);
                }
                rec.status = "ok";
            } catch (const IoError&) {
                rec.status = "error";
                throw;
            } catch (const std::exception& e) {
                rec.status = "error";
                rec.error = e.what();
                rows[slot].clear();
            }
            progress.done(rec, std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count());
        });
        analysis::HeatmapTable all;
        for (const auto& part : rows) all.insert(all.end(), part.begin(), part.end());
        std::ostringstream heat;
        io::write_heatmap_csv(heat, all);
        tree.write("heatmap.csv", heat.str());
    });
}

RunManifest execute_meanfield(const config::SweepSpec& spec, const SweepOptions& options) {
    config::validate(spec);
    OutputTree tree(spec.output_dir);
    RunManifest manifest = start_manifest("meanfield", spec, options);
    manifest.parameter_sets = records_for(spec);
    return guarded(std::move(manifest), tree, [&](RunManifest& m) {
        Progress progress(options.progress, m.parameter_sets.size());
        const auto initial = meanfield::seeded_initial(spec.graph.node_count(), spec.seeds_per_contagion);
        for_each_set(m.parameter_sets, options.workers, [&](ParameterSetRecord& rec, unsigned) {
            const auto begin = std::chrono::steady_clock::now();
            try {
                const auto traj = meanfield::integrate(initial, config::meanfield_params(spec, rec.params));
                std::ostringstream out;
                io::write_trajectory_csv(out, traj);
                const std::string path = "meanfield/" + tag(rec.index, rec.params) + ".csv";
                tree.write(path, out.str());
                rec.files.push_back(path);
                rec.status = "ok";
            } catch (const IoError&) {
                rec.status = "error";
                throw;
            } catch (const std::exception& e) {
                rec.status = "error";
                rec.error = e.what();
            }
            progress.done(rec, std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count());
        });
    });
}

RunManifest execute_graph_dump(const config::SweepSpec& spec, std::uint32_t iteration, const SweepOptions& options) {
    config::validate(spec);
    OutputTree tree(spec.output_dir);
    RunManifest manifest = start_manifest("graph-dump", spec, options);
    auto sets = records_for(spec);
    sets.resize(1);
    manifest.parameter_sets = std::move(sets);
    return guarded(std::move(manifest), tree, [&](RunManifest& m) {
        auto& rec = m.parameter_sets.front();
        const auto rc = config::run_config(spec, rec.params);
        const auto graph = engine::build_graph(rc.graph, engine::stream_key(rc), iteration);
        std::ostringstream out;
        topology::write_edge_list(out, graph);
        tree.write("graph.txt", out.str());
        rec.files.push_back("graph.txt");
        rec.status = "ok";
    });
}

}  // namespace codiffuse::sweep
