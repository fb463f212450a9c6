#pragma once

// Experiment configuration files (YAML). See docs/config.md for the schema.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicesim/error.hpp"
#include "slicesim/markov_steady_state.hpp"
#include "slicesim/optimizer.hpp"
#include "slicesim/queue_analytics.hpp"
#include "slicesim/slice_model.hpp"

#include "json.hpp"

namespace slicesim::harness {

/// Schema violation; the message starts with "<source>:<line>:<column>:".
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

enum class StrategyKind { prefer, greedy, random, file };

struct StrategySpec {
    StrategyKind kind = StrategyKind::prefer;
    std::size_t prefer = 2;  ///< type number for kind = prefer; capped at N when not configured
    std::uint64_t seed = 1;  ///< for kind = random
    std::string file;        ///< for kind = file
};

struct SimulationSpec {
    double horizon = 40.0;
    double warmup = 0.0;
    std::size_t rounds = 20;
    InitialPolicy initial = InitialPolicy::fully_utilized;
    bool balking = false;
    bool reneging = false;
    std::size_t threads = 1;
    bool trace = false;  ///< write the event log of round 0
};

struct AnalyzeSpec {
    QueueParams params{1.0, 1.0, 1.0, 0.8};
    double wait_max = 10.0;
    std::size_t wait_points = 101;
};

struct FitIatSpec {
    double bin_width = 1.0;
    std::size_t strategies = 0;  ///< > 0: random-strategy protocol instead of the configured strategy
    std::optional<std::string> input;  ///< CSV with IAT samples; skips simulation
    std::string column = "iat";
};

struct SteadyStateSpec {
    std::optional<std::vector<double>> p_empty;  ///< measured by simulation when absent
    TransitionOptions transition;
    LongTermOptions long_term;
};

struct SweepSpec {
    std::size_t count = 500;
    Metric metric = Metric::admission;
    std::size_t threads = 1;
};

struct OptimizeSpec {
    std::size_t budget = 100;
    Metric metric = Metric::utility;
    std::uint64_t search_seed = 1;
};

struct ExperimentConfig {
    std::string scenario = "scenario-1";  ///< "custom" for an explicit model block
    std::shared_ptr<const ResourceModel> model;
    std::uint64_t seed = 1;
    std::optional<std::string> output;
    StrategySpec strategy;
    SimulationSpec simulation;
    AnalyzeSpec analyze;
    FitIatSpec fit_iat;
    SteadyStateSpec steady_state;
    SweepSpec sweep;
    OptimizeSpec optimize;

    /// Normalized form, recorded in run metadata.
    [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] std::vector<std::string> builtin_scenarios();

/// "scenario-1" or "scenario-2". Throws ValidationError otherwise.
[[nodiscard]] ResourceModel builtin_scenario(std::string_view name);

/// Scenario 1 with every default.
[[nodiscard]] ExperimentConfig default_config();

[[nodiscard]] ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Rejects models with a type that cannot fit the empty pool, in addition to
/// the ResourceModel checks.
void validate_model(const ResourceModel& model);

}  // namespace slicesim::harness
