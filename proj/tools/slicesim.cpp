// slicesim command-line tool.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "slicesim/error.hpp"
#include "slicesim/harness/experiments.hpp"

namespace fs = std::filesystem;
using namespace slicesim;
using namespace slicesim::harness;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> rounds;
    std::optional<double> horizon;
    std::optional<std::string> scenario;
    std::optional<std::size_t> threads;
};

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig c = o.config.empty() ? default_config() : load_config(o.config);
    if (o.scenario) {
        c.scenario = *o.scenario;
        c.model = std::make_shared<const ResourceModel>(builtin_scenario(c.scenario));
    }
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.output = *o.out;
    if (o.rounds) {
        if (*o.rounds == 0) throw ValidationError("--rounds must be positive");
        c.simulation.rounds = *o.rounds;
    }
    if (o.horizon) {
        if (!(*o.horizon > c.simulation.warmup)) throw ValidationError("--horizon must exceed the warmup");
        c.simulation.horizon = *o.horizon;
    }
    if (o.threads) {
        c.simulation.threads = *o.threads;
        c.sweep.threads = *o.threads;
    }
    return c;
}

fs::path output_dir(const ExperimentConfig& c, const std::string& command) {
    fs::path dir = c.output ? fs::path(*c.output) : fs::path("out") / command;
    if (dir.is_relative()) {
        if (const char* root = std::getenv("SLICESIM_OUTPUT_ROOT"); root && *root) dir = fs::path(root) / dir;
    }
    return dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network slice admission simulator and analysis tools"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    Overrides o;
    for (const auto& name : commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", o.config, "YAML configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("-o,--out", o.out, "output directory");
        sub->add_option("--rounds", o.rounds, "Monte-Carlo rounds");
        sub->add_option("--horizon", o.horizon, "simulated time per round");
        sub->add_option("--scenario", o.scenario, "built-in scenario (scenario-1, scenario-2)");
        sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const ExperimentConfig config = resolve(o);
        const fs::path out = output_dir(config, command);
        const auto summary = run_experiment(command, config, out);
        std::cout << summary.dump(2) << "\n";
        std::cerr << "wrote " << out.string() << "\n";
    } catch (const ValidationError& e) {
        std::cerr << "slicesim: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "slicesim: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
