#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "codiffuse/config.hpp"
#include "codiffuse/errors.hpp"

using namespace codiffuse;
using namespace codiffuse::config;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("empty config gives the full defaults") {
    const auto s = parse_config_text("");
    CHECK(s == parse_config_text("{}"));
    CHECK(s.graph.node_count() == 6400);
    CHECK(s.graph.topology == engine::Topology::Multiplex);
    CHECK(s.graph.rrg_degree == 4);
    CHECK(s.steps == 700);
    CHECK(s.iterations == 100);
    CHECK(s.seeds_per_contagion == 1);
    CHECK(s.kernel.k_a == 2.0);
    CHECK(s.kernel.k_b == 2.0);
    CHECK(s.kernel.adoption == kernel::AdoptionMode::Inclusive);
    CHECK(s.kernel.threshold == kernel::ThresholdMode::Annealed);
    CHECK(s.kernel.reactivation == kernel::Reactivation::Persist);
    CHECK_FALSE(s.enforce_tau_b_lt_tau_a);
    REQUIRE(s.alpha.size() == 14);
    CHECK(s.alpha.front() == 0.0);
    CHECK(s.alpha.back() == 1.3);
    REQUIRE(s.tau_a.size() == 11);
    CHECK(s.tau_a[4] == 0.04);
    CHECK(s.tau_b.back() == 0.1);
}

TEST_CASE("default cube enumerates 14 x 11 x 11 triples") {
    const auto s = parse_config_text("{}");
    const auto t = enumerate(s);
    CHECK(t.size() == 1694);
    CHECK(t.front() == analysis::ParameterTriple{0.0, 0.0, 0.0});
    CHECK(t[1] == analysis::ParameterTriple{0.0, 0.0, 0.01});
    CHECK(t[11] == analysis::ParameterTriple{0.0, 0.01, 0.0});
    CHECK(t.back() == analysis::ParameterTriple{1.3, 0.1, 0.1});
}

TEST_CASE("tau ordering constraint") {
    auto s = parse_config_text(R"({"sweep": {"enforce_tau_b_lt_tau_a": true}})");
    // Pairs with tau_b < tau_a among 11 values: 55 per alpha.
    CHECK(enumerate(s).size() == 14 * 55);
    for (const auto& t : enumerate(s)) CHECK(t.tau_b < t.tau_a);
    CHECK(error_of(R"({"sweep": {"enforce_tau_b_lt_tau_a": true, "tau_a": [0.0], "tau_b": [0.0]}})")
              .find("sweep:") == 0);
}

TEST_CASE("the single-timeseries configuration") {
    const auto s = parse_config_text(R"({"sweep": {"alpha": [0.8], "tau_a": [0.04], "tau_b": [0.0]}})");
    const auto t = enumerate(s);
    REQUIRE(t.size() == 1);
    const auto rc = run_config(s, t[0]);
    CHECK(rc.kernel.alpha == 0.8);
    CHECK(rc.dormancy.tau_a == 0.04);
    CHECK(rc.dormancy.tau_b == 0.0);
    CHECK(rc.dormancy.tau_ab() == 0.02);
    CHECK(rc.steps == 700);
    const auto mf = meanfield_params(s, t[0]);
    CHECK(mf.kernel.alpha == 0.8);
    CHECK(mf.kappa == 4);
}

TEST_CASE("range and type errors name the field") {
    CHECK(error_of(R"({"sweep": {"tau_a": [1.5]}})").find("sweep.tau_a[0]:") == 0);
    CHECK(error_of(R"({"sweep": {"tau_b": [0.1, -0.2]}})").find("sweep.tau_b[1]:") == 0);
    CHECK(error_of(R"({"sweep": {"alpha": []}})").find("sweep.alpha:") == 0);
    CHECK(error_of(R"({"sweep": {"alpha": [2.5]}})").find("sweep.alpha[0]:") == 0);
    CHECK(error_of(R"({"sweep": {"alpha": ["x"]}})").find("sweep.alpha[0]:") == 0);
    CHECK(error_of(R"({"simulation": {"iterations": 0}})").find("simulation.iterations:") == 0);
    CHECK(error_of(R"({"simulation": {"iterations": -3}})").find("simulation.iterations:") == 0);
    CHECK(error_of(R"({"simulation": {"steps": 4}})").find("simulation.steps:") == 0);
    CHECK(error_of(R"({"simulation": {"seeds_per_contagion": 4000}})").find("simulation.seeds_per_contagion:") == 0);
    CHECK(error_of(R"({"graph": {"side": 1}})").find("graph.side:") == 0);
    CHECK(error_of(R"({"graph": {"topology": "torus"}})").find("graph.topology:") == 0);
    CHECK(error_of(R"({"graph": {"side": 5, "rrg_degree": 3}})").find("graph.rrg_degree:") == 0);
    CHECK(error_of(R"({"kernel": {"k_a": 0}})").find("kernel.k_a:") == 0);
    CHECK(error_of(R"({"kernel": {"adoption": "both"}})").find("kernel.adoption:") == 0);
    CHECK(error_of(R"({"kernel": {"reactivation": "sometimes"}})").find("kernel.reactivation:") == 0);
    CHECK(error_of(R"({"meanfield": {"step_size": 0}})").find("meanfield.step_size:") == 0);
    CHECK(error_of(R"({"output_dir": ""})").find("output_dir:") == 0);
}

TEST_CASE("unknown keys and malformed documents are rejected") {
    CHECK(error_of(R"({"grpah": {}})").find("grpah") != std::string::npos);
    CHECK(error_of(R"({"kernel": {"alpha": 1}})").find("kernel.alpha") != std::string::npos);
    CHECK_FALSE(error_of(R"({"graph": )").empty());
    CHECK_FALSE(error_of(R"([1, 2])").empty());
    CHECK_FALSE(error_of(R"({"graph": 3})").empty());
}

TEST_CASE("emit and parse round trip") {
    auto s = parse_config_text("{}");
    CHECK(parse_config(emit_config(s)) == s);

    s.graph.topology = engine::Topology::Lattice;
    s.graph.side = 31;
    s.graph.freeze_rrg = true;
    s.kernel.k_a = 1.5;
    s.kernel.adoption = kernel::AdoptionMode::Exclusive;
    s.kernel.threshold = kernel::ThresholdMode::Quenched;
    s.kernel.reactivation = kernel::Reactivation::Reactivate;
    s.alpha = {0.1, 1.6};
    s.tau_a = {0.3};
    s.tau_b = {1.0 / 3.0};
    s.enforce_tau_b_lt_tau_a = false;
    s.iterations = 7;
    s.steps = 33;
    s.seeds_per_contagion = 3;
    s.seed = 0xFFFFFFFFFFFFull;
    s.meanfield = {8, 0.05, 12.5, 0.5};
    s.output_dir = "results/x";
    CHECK(parse_config(emit_config(s)) == s);
    CHECK(parse_config_text(emit_config(s).dump()) == s);
}

TEST_CASE("config files") {
    const auto dir = std::filesystem::temp_directory_path() / "codiffuse_config_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "c.json";
    std::ofstream(path) << R"({"simulation": {"iterations": 3}})";
    CHECK(load_config(path).iterations == 3);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
    std::ofstream(path) << R"({"simulation": {"iterations": 0}})";
    try {
        load_config(path);
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("simulation.iterations") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("number lists from flags") {
    CHECK(parse_number_list("0.1, 0.2,1", "sweep.alpha") == std::vector<double>{0.1, 0.2, 1.0});
    CHECK(parse_number_list("0", "x") == std::vector<double>{0.0});
    CHECK_THROWS_AS(parse_number_list("0.1,,0.2", "x"), ConfigError);
    CHECK_THROWS_AS(parse_number_list("abc", "x"), ConfigError);
    CHECK_THROWS_AS(parse_number_list("", "x"), ConfigError);
}
