#include "codiffuse/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace codiffuse::config {

using nlohmann::json;

std::vector<double> default_alphas() {
    std::vector<double> v;
    for (int i = 0; i <= 13; ++i) v.push_back(i / 10.0);
    return v;
}

std::vector<double> default_taus() {
    std::vector<double> v;
    for (int i = 0; i <= 10; ++i) v.push_back(i / 100.0);
    return v;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    return j;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            fail(join(path, key), "unknown key");
        }
    }
}

double read_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

std::uint64_t read_unsigned(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) fail(path, "must be non-negative");
    fail(path, "expected a non-negative integer");
}

std::uint32_t read_u32(const json& j, const std::string& path) {
    const std::uint64_t v = read_unsigned(j, path);
    if (v > 0xFFFFFFFFull) fail(path, "value too large");
    return static_cast<std::uint32_t>(v);
}

bool read_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::string read_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> read_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

template <class Fn>
void with(const json& obj, const char* key, Fn&& fn) {
    if (auto it = obj.find(key); it != obj.end()) fn(*it);
}

const char* topology_name(engine::Topology t) { return t == engine::Topology::Multiplex ? "multiplex" : "lattice"; }
const char* adoption_name(kernel::AdoptionMode m) {
    return m == kernel::AdoptionMode::Inclusive ? "inclusive" : "exclusive";
}
const char* threshold_name(kernel::ThresholdMode m) {
    return m == kernel::ThresholdMode::Annealed ? "annealed" : "quenched";
}
const char* reactivation_name(kernel::Reactivation r) {
    return r == kernel::Reactivation::Reactivate ? "reactivate" : "persist";
}

void check_list(const std::vector<double>& v, const std::string& path, double lo, double hi) {
    if (v.empty()) fail(path, "must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= lo && v[i] <= hi)) {
            std::ostringstream msg;
            msg << "value " << v[i] << " outside [" << lo << ", " << hi << "]";
            fail(path + "[" + std::to_string(i) + "]", msg.str());
        }
    }
}

}  // namespace

void validate(const SweepSpec& s) {
    if (s.graph.side < 2) fail("graph.side", "must be >= 2");
    if (s.graph.side > 4096) fail("graph.side", "must be <= 4096");
    if (s.graph.topology == engine::Topology::Multiplex) {
        const std::uint64_t n = s.graph.node_count();
        if (s.graph.rrg_degree == 0 || s.graph.rrg_degree >= n) fail("graph.rrg_degree", "must be in [1, n)");
        if ((n * s.graph.rrg_degree) % 2 != 0) fail("graph.rrg_degree", "n * rrg_degree must be even");
    }
    if (!(s.kernel.k_a > 0.0)) fail("kernel.k_a", "must be > 0");
    if (!(s.kernel.k_b > 0.0)) fail("kernel.k_b", "must be > 0");
    check_list(s.alpha, "sweep.alpha", 0.0, 2.0);
    check_list(s.tau_a, "sweep.tau_a", 0.0, 1.0);
    check_list(s.tau_b, "sweep.tau_b", 0.0, 1.0);
    if (s.iterations < 1) fail("simulation.iterations", "must be >= 1");
    if (s.steps < 5) fail("simulation.steps", "must be >= 5 (ceilings use the final 20% of steps)");
    if (s.seeds_per_contagion < 1 || std::uint64_t{s.seeds_per_contagion} * 2 > s.graph.node_count()) {
        fail("simulation.seeds_per_contagion", "must be in [1, n/2]");
    }
    if (s.meanfield.kappa < 1) fail("meanfield.kappa", "must be >= 1");
    if (!(s.meanfield.step_size > 0.0)) fail("meanfield.step_size", "must be > 0");
    if (!(s.meanfield.horizon >= s.meanfield.step_size)) fail("meanfield.horizon", "must be >= step_size");
    if (!(s.meanfield.sample_interval > 0.0)) fail("meanfield.sample_interval", "must be > 0");
    if (s.output_dir.empty()) fail("output_dir", "must not be empty");
    if (enumerate(s).empty()) fail("sweep", "no parameter triple satisfies tau_b < tau_a");
}

SweepSpec parse_config(const json& doc) {
    SweepSpec s;
    require_object(doc, "");
    reject_unknown(doc, "", {"graph", "kernel", "sweep", "simulation", "meanfield", "output_dir"});

    with(doc, "graph", [&](const json& g) {
        require_object(g, "graph");
        reject_unknown(g, "graph", {"topology", "side", "rrg_degree", "freeze_rrg"});
        with(g, "topology", [&](const json& v) {
            const auto name = read_string(v, "graph.topology");
            if (name == "multiplex") {
                s.graph.topology = engine::Topology::Multiplex;
            } else if (name == "lattice") {
                s.graph.topology = engine::Topology::Lattice;
            } else {
                fail("graph.topology", "expected \"multiplex\" or \"lattice\", got \"" + name + "\"");
            }
        });
        with(g, "side", [&](const json& v) { s.graph.side = read_u32(v, "graph.side"); });
        with(g, "rrg_degree", [&](const json& v) { s.graph.rrg_degree = read_u32(v, "graph.rrg_degree"); });
        with(g, "freeze_rrg", [&](const json& v) { s.graph.freeze_rrg = read_bool(v, "graph.freeze_rrg"); });
    });

    with(doc, "kernel", [&](const json& k) {
        require_object(k, "kernel");
        reject_unknown(k, "kernel", {"k_a", "k_b", "adoption", "threshold", "reactivation"});
        with(k, "k_a", [&](const json& v) { s.kernel.k_a = read_number(v, "kernel.k_a"); });
        with(k, "k_b", [&](const json& v) { s.kernel.k_b = read_number(v, "kernel.k_b"); });
        with(k, "adoption", [&](const json& v) {
            const auto name = read_string(v, "kernel.adoption");
            if (name == "inclusive") {
                s.kernel.adoption = kernel::AdoptionMode::Inclusive;
            } else if (name == "exclusive") {
                s.kernel.adoption = kernel::AdoptionMode::Exclusive;
            } else {
                fail("kernel.adoption", "expected \"inclusive\" or \"exclusive\", got \"" + name + "\"");
            }
        });
        with(k, "threshold", [&](const json& v) {
            const auto name = read_string(v, "kernel.threshold");
            if (name == "annealed") {
                s.kernel.threshold = kernel::ThresholdMode::Annealed;
            } else if (name == "quenched") {
                s.kernel.threshold = kernel::ThresholdMode::Quenched;
            } else {
                fail("kernel.threshold", "expected \"annealed\" or \"quenched\", got \"" + name + "\"");
            }
        });
        with(k, "reactivation", [&](const json& v) {
            const auto name = read_string(v, "kernel.reactivation");
            if (name == "reactivate") {
                s.kernel.reactivation = kernel::Reactivation::Reactivate;
            } else if (name == "persist") {
                s.kernel.reactivation = kernel::Reactivation::Persist;
            } else {
                fail("kernel.reactivation", "expected \"reactivate\" or \"persist\", got \"" + name + "\"");
            }
        });
    });

    with(doc, "sweep", [&](const json& w) {
        require_object(w, "sweep");
        reject_unknown(w, "sweep", {"alpha", "tau_a", "tau_b", "enforce_tau_b_lt_tau_a"});
        with(w, "alpha", [&](const json& v) { s.alpha = read_list(v, "sweep.alpha"); });
        with(w, "tau_a", [&](const json& v) { s.tau_a = read_list(v, "sweep.tau_a"); });
        with(w, "tau_b", [&](const json& v) { s.tau_b = read_list(v, "sweep.tau_b"); });
        with(w, "enforce_tau_b_lt_tau_a",
             [&](const json& v) { s.enforce_tau_b_lt_tau_a = read_bool(v, "sweep.enforce_tau_b_lt_tau_a"); });
    });

    with(doc, "simulation", [&](const json& m) {
        require_object(m, "simulation");
        reject_unknown(m, "simulation", {"iterations", "steps", "seeds_per_contagion", "seed"});
        with(m, "iterations", [&](const json& v) { s.iterations = read_u32(v, "simulation.iterations"); });
        with(m, "steps", [&](const json& v) { s.steps = read_u32(v, "simulation.steps"); });
        with(m, "seeds_per_contagion",
             [&](const json& v) { s.seeds_per_contagion = read_u32(v, "simulation.seeds_per_contagion"); });
        with(m, "seed", [&](const json& v) { s.seed = read_unsigned(v, "simulation.seed"); });
    });

    with(doc, "meanfield", [&](const json& m) {
        require_object(m, "meanfield");
        reject_unknown(m, "meanfield", {"kappa", "step_size", "horizon", "sample_interval"});
        with(m, "kappa", [&](const json& v) { s.meanfield.kappa = read_u32(v, "meanfield.kappa"); });
        with(m, "step_size", [&](const json& v) { s.meanfield.step_size = read_number(v, "meanfield.step_size"); });
        with(m, "horizon", [&](const json& v) { s.meanfield.horizon = read_number(v, "meanfield.horizon"); });
        with(m, "sample_interval",
             [&](const json& v) { s.meanfield.sample_interval = read_number(v, "meanfield.sample_interval"); });
    });

    with(doc, "output_dir", [&](const json& v) { s.output_dir = read_string(v, "output_dir"); });

    validate(s);
    return s;
}

SweepSpec parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

SweepSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

json emit_config(const SweepSpec& s) {
    return {
        {"graph",
         {{"topology", topology_name(s.graph.topology)},
          {"side", s.graph.side},
          {"rrg_degree", s.graph.rrg_degree},
          {"freeze_rrg", s.graph.freeze_rrg}}},
        {"kernel",
         {{"k_a", s.kernel.k_a},
          {"k_b", s.kernel.k_b},
          {"adoption", adoption_name(s.kernel.adoption)},
          {"threshold", threshold_name(s.kernel.threshold)},
          {"reactivation", reactivation_name(s.kernel.reactivation)}}},
        {"sweep",
         {{"alpha", s.alpha},
          {"tau_a", s.tau_a},
          {"tau_b", s.tau_b},
          {"enforce_tau_b_lt_tau_a", s.enforce_tau_b_lt_tau_a}}},
        {"simulation",
         {{"iterations", s.iterations},
          {"steps", s.steps},
          {"seeds_per_contagion", s.seeds_per_contagion},
          {"seed", s.seed}}},
        {"meanfield",
         {{"kappa", s.meanfield.kappa},
          {"step_size", s.meanfield.step_size},
          {"horizon", s.meanfield.horizon},
          {"sample_interval", s.meanfield.sample_interval}}},
        {"output_dir", s.output_dir},
    };
}

std::vector<analysis::ParameterTriple> enumerate(const SweepSpec& s) {
    std::vector<analysis::ParameterTriple> out;
    out.reserve(s.alpha.size() * s.tau_a.size() * s.tau_b.size());
    for (double a : s.alpha) {
        for (double ta : s.tau_a) {
            for (double tb : s.tau_b) {
                if (s.enforce_tau_b_lt_tau_a && !(tb < ta)) continue;
                out.push_back({a, ta, tb});
            }
        }
    }
    return out;
}

engine::RunConfig run_config(const SweepSpec& s, const analysis::ParameterTriple& t) {
    engine::RunConfig rc;
    rc.graph = s.graph;
    rc.kernel = {t.alpha, s.kernel.k_a, s.kernel.k_b, s.kernel.adoption, s.kernel.threshold,
                s.kernel.reactivation};
    rc.dormancy = {t.tau_a, t.tau_b};
    rc.steps = s.steps;
    rc.seeds_per_contagion = s.seeds_per_contagion;
    rc.master_seed = s.seed;
    return rc;
}

meanfield::MeanFieldParams meanfield_params(const SweepSpec& s, const analysis::ParameterTriple& t) {
    meanfield::MeanFieldParams p;
    p.kernel = {t.alpha, s.kernel.k_a, s.kernel.k_b, s.kernel.adoption, s.kernel.threshold,
                s.kernel.reactivation};
    p.dormancy = {t.tau_a, t.tau_b};
    p.kappa = s.meanfield.kappa;
    p.step_size = s.meanfield.step_size;
    p.horizon = s.meanfield.horizon;
    p.sample_interval = s.meanfield.sample_interval;
    return p;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        std::string item = text.substr(start, comma - start);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
            fail(field, "cannot parse '" + item + "' as a number");
        }
        out.push_back(v);
        start = comma + 1;
    }
    return out;
}

}  // namespace codiffuse::config
