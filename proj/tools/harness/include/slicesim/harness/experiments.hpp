#pragma once

// Experiment pipelines behind the slicesim subcommands. Every pipeline writes
// metadata.json and summary.json plus command-specific CSV files into the
// output directory; the files depend only on the configuration (not on the
// thread count or the wall clock).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "slicesim/harness/config.hpp"
#include "slicesim/strategy.hpp"

#include "json.hpp"

namespace slicesim::harness {

[[nodiscard]] std::string_view version() noexcept;

/// simulate, analyze, fit-iat, steady-state, sweep, optimize, casestudy.
[[nodiscard]] const std::vector<std::string>& commands();

/// Runs `command` and writes its artifacts into `out_dir` (created if
/// needed). Returns the summary that is also written to summary.json.
nlohmann::json run_experiment(std::string_view command, const ExperimentConfig& config,
                              const std::filesystem::path& out_dir);

/// The strategy described by config.strategy over `space`.
[[nodiscard]] PreferenceMatrix make_strategy(const ExperimentConfig& config, const StateSpace& space);

/// Monte-Carlo settings from config.simulation and config.seed.
[[nodiscard]] MonteCarloSettings monte_carlo_settings(const ExperimentConfig& config);

// Case study: r = [1], c_1 = [0.6], c_2 = [0.2], s = [1, 0]; requests of
// types 1, 1, 2, 2 arrive at t = 1..4 and the initial type-1 slice is
// released at t = 5. Replayed under one FCFS queue, two mixed FCFS queues
// (round-robin routing) and one queue per type with the greedy preference
// [1, 2, 0] in every state.

struct CaseStudyStep {
    double time = 0.0;
    std::string event;  ///< "arrival" or "release"
    int type = 0;       ///< 1-based
    std::vector<std::uint64_t> accepted;  ///< request ids accepted at this step
    std::string state;   ///< s after the step, "1;2"
    std::string queues;  ///< waiting request types per queue, "1,1|2"
};

struct CaseStudyPanel {
    std::string name;
    std::vector<CaseStudyStep> steps;
    SystemState final_state;
};

[[nodiscard]] std::vector<CaseStudyPanel> run_case_study();

/// panel,time,event,type,accepted,s_vector,queues
void write_case_study_csv(std::ostream& os, const std::vector<CaseStudyPanel>& panels);

}  // namespace slicesim::harness
