#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "slicesim/harness/config.hpp"
#include "slicesim/harness/experiments.hpp"

using namespace slicesim;
using namespace slicesim::harness;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("slicesim_harness_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("built-in scenarios") {
    const auto s1 = builtin_scenario("scenario-1");
    CHECK(s1.type(0).arrival_rate == 2.0);
    CHECK(s1.type(1).arrival_rate == 0.5);
    CHECK(s1.type(0).release_rate == doctest::Approx(0.2));
    CHECK(s1.type(1).utility_rate == 10.0);
    CHECK(s1.cost(0, 1) == 0.2);
    CHECK(s1.cost(1, 0) == 0.05);
    const auto s2 = builtin_scenario("paper-scenario-2");
    CHECK(s2.type(0).arrival_rate == 6.0);
    CHECK(s2.type(1).arrival_rate == 1.5);
    CHECK(*s2.type(1).balking == 0.02);
    CHECK_THROWS_AS((void)builtin_scenario("scenario-3"), ValidationError);
}

TEST_CASE("configuration parsing") {
    const auto c = parse_config("scenario: scenario-2\nseed: 9\nsimulation:\n  rounds: 3\n  reneging: true\n");
    CHECK(c.seed == 9);
    CHECK(c.simulation.rounds == 3);
    CHECK(c.simulation.reneging);
    CHECK(c.model->type(0).arrival_rate == 6.0);
    CHECK(parse_config("").scenario == "scenario-1");

    const auto custom = parse_config(
        "model:\n  pool: [1]\n  types:\n    - {cost: [0.5], arrival_rate: 1, mean_lifetime: 4}\n");
    CHECK(custom.scenario == "custom");
    CHECK(custom.model->type(0).release_rate == 0.25);
}

TEST_CASE("configuration errors carry a position") {
    try {
        (void)parse_config("seed: 1\nsweep:\n  count: 3\n  colour: red\n", "x.yaml");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("x.yaml:4:3:", 0) == 0);
    }
    CHECK_THROWS_AS((void)parse_config("analyze:\n  beta: 1.5\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("sweep:\n  count: 0\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("simulation:\n  rounds: 0\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("scenario: nope\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("seed: [1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("strategy:\n  prefer: 3\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("model:\n  pool: [1]\n  types:\n    - {cost: [0.5, 1], arrival_rate: 1}\n"),
                    ConfigError);
}

TEST_CASE("infeasible slice types are rejected") {
    const ResourceModel m({1.0}, {{2.0}}, {SliceType{}});
    CHECK_THROWS_AS(validate_model(m), ValidationError);
}

TEST_CASE("case study") {
    const auto panels = run_case_study();
    REQUIRE(panels.size() == 3);
    std::ostringstream a;
    std::ostringstream b;
    write_case_study_csv(a, panels);
    write_case_study_csv(b, run_case_study());
    CHECK(a.str() == b.str());
    for (const auto& p : panels) {
        if (p.name == "heterogeneous-queues") CHECK(p.final_state == SystemState{1, 2});
        if (p.name == "homogeneous-queues") CHECK(p.final_state == SystemState{1, 1});
        if (p.name == "single-queue") CHECK(p.final_state == SystemState{1, 0});
    }
}

TEST_CASE("experiment artifacts are reproducible") {
    auto c = default_config();
    c.simulation.rounds = 3;
    c.sweep.count = 4;
    for (const std::string cmd : {"simulate", "sweep", "analyze"}) {
        const auto d1 = scratch(cmd + "_1");
        const auto d2 = scratch(cmd + "_2");
        (void)run_experiment(cmd, c, d1);
        c.simulation.threads = 2;
        c.sweep.threads = 2;
        (void)run_experiment(cmd, c, d2);
        c.simulation.threads = 1;
        c.sweep.threads = 1;
        CHECK(std::filesystem::exists(d1 / "metadata.json"));
        for (const auto& entry : std::filesystem::directory_iterator(d1)) {
            const auto name = entry.path().filename();
            CHECK_MESSAGE(slurp(entry.path()) == slurp(d2 / name), cmd, "/", name.string());
        }
        std::filesystem::remove_all(d1);
        std::filesystem::remove_all(d2);
    }
    CHECK_THROWS((void)run_experiment("bogus", c, scratch("bogus")));
}
