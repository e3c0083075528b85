// codiffuse run|sweep|analyze|meanfield|graph-dump
//
// Settings are resolved as defaults < --config file < command-line flags.
// Worker count: --workers, else CODIFFUSE_WORKERS, else hardware threads.
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "codiffuse/config.hpp"
#include "codiffuse/errors.hpp"
#include "codiffuse/parallel.hpp"
#include "codiffuse/sweep.hpp"

namespace {

using namespace codiffuse;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out;
    std::optional<std::string> alpha, tau_a, tau_b;
    std::optional<std::uint32_t> iterations, steps, side, seeds;
    std::optional<std::string> topology, adoption, threshold, reactivation;
    bool freeze_rrg = false;
    bool enforce_tau_order = false;
    bool keep_iterations = false;
    bool dry_run = false;
    bool quiet = false;
    std::string input;
    std::uint32_t iteration = 0;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_flag("--quiet", o.quiet, "no progress output");
}

void add_model(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--alpha", o.alpha, "comma-separated alpha values");
    cmd->add_option("--tau-a", o.tau_a, "comma-separated tau_A values");
    cmd->add_option("--tau-b", o.tau_b, "comma-separated tau_B values");
    cmd->add_option("--iterations", o.iterations, "iterations per parameter set");
    cmd->add_option("--steps", o.steps, "time steps per run");
    cmd->add_option("--side", o.side, "lattice side length");
    cmd->add_option("--seeds", o.seeds, "initial adopters per contagion");
    cmd->add_option("--topology", o.topology, "multiplex or lattice");
    cmd->add_option("--adoption", o.adoption, "inclusive or exclusive");
    cmd->add_option("--threshold", o.threshold, "annealed or quenched");
    cmd->add_option("--reactivation", o.reactivation, "reactivate or persist");
    cmd->add_flag("--freeze-rrg", o.freeze_rrg, "reuse one random regular graph for all iterations");
    cmd->add_flag("--enforce-tau-order", o.enforce_tau_order, "keep only triples with tau_B < tau_A");
}

config::SweepSpec resolve(const Overrides& o) {
    nlohmann::json doc = nlohmann::json::object();
    if (!o.config_path.empty()) {
        doc = config::emit_config(config::load_config(o.config_path));
    }
    auto set = [&doc](const char* section, const char* key, nlohmann::json value) { doc[section][key] = value; };
    if (o.alpha) set("sweep", "alpha", config::parse_number_list(*o.alpha, "sweep.alpha"));
    if (o.tau_a) set("sweep", "tau_a", config::parse_number_list(*o.tau_a, "sweep.tau_a"));
    if (o.tau_b) set("sweep", "tau_b", config::parse_number_list(*o.tau_b, "sweep.tau_b"));
    if (o.enforce_tau_order) set("sweep", "enforce_tau_b_lt_tau_a", true);
    if (o.iterations) set("simulation", "iterations", *o.iterations);
    if (o.steps) set("simulation", "steps", *o.steps);
    if (o.seeds) set("simulation", "seeds_per_contagion", *o.seeds);
    if (o.seed) set("simulation", "seed", *o.seed);
    if (o.side) set("graph", "side", *o.side);
    if (o.topology) set("graph", "topology", *o.topology);
    if (o.freeze_rrg) set("graph", "freeze_rrg", true);
    if (o.adoption) set("kernel", "adoption", *o.adoption);
    if (o.threshold) set("kernel", "threshold", *o.threshold);
    if (o.reactivation) set("kernel", "reactivation", *o.reactivation);
    if (o.out) doc["output_dir"] = *o.out;
    return config::parse_config(doc);
}

sweep::SweepOptions options_for(const Overrides& o, const std::string& command) {
    sweep::SweepOptions opts;
    opts.workers = o.workers ? *o.workers : default_workers();
    opts.keep_iterations = o.keep_iterations;
    opts.dry_run = o.dry_run;
    opts.progress = !o.quiet;
    opts.command = command;
    return opts;
}

int report(const sweep::RunManifest& m) {
    std::size_t failed = 0;
    for (const auto& r : m.parameter_sets) failed += r.status == "error";
    std::cout << m.command << ": " << m.status << ", " << m.parameter_sets.size() << " parameter set(s), "
              << m.files.size() << " file(s)";
    if (failed) std::cout << ", " << failed << " failed";
    std::cout << '\n';
    return m.ok() ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-contagion diffusion on multiplex networks"};
    app.require_subcommand(1);
    Overrides o;

    auto* run = app.add_subcommand("run", "one parameter triple with full per-iteration series");
    auto* sweep_cmd = app.add_subcommand("sweep", "Cartesian product of parameter lists");
    auto* analyze = app.add_subcommand("analyze", "recompute statistics from stored series");
    auto* mf = app.add_subcommand("meanfield", "integrate the mean-field model");
    auto* dump = app.add_subcommand("graph-dump", "write the graph as an edge list");

    for (auto* cmd : {run, sweep_cmd, mf, dump}) {
        add_common(cmd, o);
        add_model(cmd, o);
    }
    add_common(analyze, o);
    sweep_cmd->add_flag("--keep-iterations", o.keep_iterations, "store per-iteration series");
    sweep_cmd->add_flag("--dry-run", o.dry_run, "enumerate parameter sets without running");
    analyze->add_option("--input", o.input, "directory of a previous run or sweep")
        ->required()
        ->check(CLI::ExistingDirectory);
    dump->add_option("--iteration", o.iteration, "iteration whose random graph is drawn");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*analyze) {
            if (!o.config_path.empty()) throw ConfigError("--config: analyze reads the configuration from --input");
            const std::string out = o.out ? *o.out : o.input;
            return report(sweep::analyze_directory(o.input, out, options_for(o, "analyze")));
        }
        auto spec = resolve(o);
        if (*run) {
            if (config::enumerate(spec).size() != 1) {
                throw ConfigError("sweep: run takes exactly one (alpha, tau_a, tau_b) triple");
            }
            auto opts = options_for(o, "run");
            opts.keep_iterations = true;
            return report(sweep::execute_sweep(spec, opts));
        }
        if (*sweep_cmd) return report(sweep::execute_sweep(spec, options_for(o, "sweep")));
        if (*mf) return report(sweep::execute_meanfield(spec, options_for(o, "meanfield")));
        if (*dump) return report(sweep::execute_graph_dump(spec, o.iteration, options_for(o, "graph-dump")));
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
