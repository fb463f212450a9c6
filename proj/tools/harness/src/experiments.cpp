#include "slicesim/harness/experiments.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "slicesim/admission_controller.hpp"
#include "slicesim/csv.hpp"
#include "slicesim/markov_steady_state.hpp"
#include "slicesim/optimizer.hpp"
#include "slicesim/parallel.hpp"
#include "slicesim/queue_analytics.hpp"
#include "slicesim/rng.hpp"
#include "slicesim/sim_engine.hpp"
#include "slicesim/stat_fit.hpp"

#ifndef SLICESIM_VERSION
#define SLICESIM_VERSION "unknown"
#endif

namespace slicesim::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("error writing " + path.string());
}

template <typename Fn>
void write_csv(const fs::path& path, Fn&& fn) {
    std::ostringstream os;
    fn(os);
    write_file(path, os.str());
}

json summary_json(const MetricSummary& s) { return {{"mean", s.mean}, {"ci95", s.half_width}}; }

json score_json(const StrategyScore& s) {
    return {{"index", s.index},
            {"strategy_seed", s.strategy_seed},
            {"label", s.label},
            {"rounds", s.rounds},
            {"utility", summary_json(s.utility)},
            {"mean_wait", summary_json(s.mean_wait)},
            {"admission", summary_json(s.admission)},
            {"acceptance_rate", s.acceptance_rate},
            {"queue_empty_fraction", s.queue_empty_fraction}};
}

// Per-type geometric fit of pooled inter-acceptance times; null when a type
// has no samples.
struct TypeFit {
    std::size_t samples = 0;
    std::optional<EmpiricalPmf> pmf;
    double p_hat = 0.0;
    double kld = 0.0;
};

TypeFit fit(const std::vector<double>& samples, double bin_width) {
    TypeFit f;
    f.samples = samples.size();
    if (samples.empty()) return f;
    f.pmf.emplace(samples, bin_width);
    f.p_hat = fit_geometric(*f.pmf);
    f.kld = kld_vs_geometric(*f.pmf, f.p_hat);
    return f;
}

json fit_json(const TypeFit& f) {
    if (!f.pmf) return {{"samples", 0}, {"p_hat", nullptr}, {"kld", nullptr}};
    return {{"samples", f.samples}, {"p_hat", f.p_hat}, {"kld", f.kld}};
}

void fit_row(CsvWriter& csv, const TypeFit& f) {
    csv.field(f.samples);
    if (f.pmf) {
        csv.field(f.p_hat).field(f.kld);
    } else {
        csv.field("").field("");
    }
}

void write_pmf_rows(CsvWriter& csv, const std::string& label, const TypeFit& f) {
    if (!f.pmf) return;
    for (std::size_t k = 0; k < f.pmf->num_bins(); ++k) {
        csv.field(label).field(k).field(f.pmf->probability(k)).field(geometric_pmf(f.p_hat, k));
        csv.end_row();
    }
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Setup {
    std::shared_ptr<const StateSpace> space;
    Evaluator evaluator;
};

Setup setup(const ExperimentConfig& config) {
    Setup s;
    s.space = std::make_shared<const StateSpace>(enumerate_state_space(*config.model));
    s.evaluator = {config.model, s.space, monte_carlo_settings(config)};
    return s;
}

SimConfig sim_config(const Setup& s, const PreferenceMatrix& strategy) {
    SimConfig cfg = s.evaluator.sim_config(ControllerKind::multi_queue);
    cfg.strategy = std::make_shared<const PreferenceMatrix>(strategy);
    return cfg;
}

// --- simulate --------------------------------------------------------------

json run_simulate(const ExperimentConfig& config, const fs::path& out) {
    const Setup s = setup(config);
    const PreferenceMatrix strategy = make_strategy(config, *s.space);
    SimConfig cfg = sim_config(s, strategy);
    const MonteCarloResult mc = monte_carlo(cfg, config.simulation.rounds, config.simulation.threads);
    const std::size_t num_types = config.model->num_types();

    write_csv(out / "metrics.csv", [&](std::ostream& os) { write_metrics_csv(os, mc.reports); });
    write_csv(out / "iat.csv", [&](std::ostream& os) {
        CsvWriter csv(os);
        csv.row({"type", "iat"});
        for (std::size_t n = 0; n < num_types; ++n) {
            for (double v : mc.pooled_iat[n]) {
                csv.field(n + 1).field(v);
                csv.end_row();
            }
        }
    });
    std::vector<TypeFit> fits;
    for (std::size_t n = 0; n < num_types; ++n) fits.push_back(fit(mc.pooled_iat[n], config.fit_iat.bin_width));
    write_csv(out / "kld.csv", [&](std::ostream& os) {
        CsvWriter csv(os);
        csv.row({"type", "bin_width", "samples", "p_hat", "kld"});
        for (std::size_t n = 0; n < num_types; ++n) {
            csv.field(n + 1).field(config.fit_iat.bin_width);
            fit_row(csv, fits[n]);
            csv.end_row();
        }
    });
    if (config.simulation.trace) {
        SimConfig one = cfg;
        one.seed = round_seed(cfg.seed, 0);
        one.record_events = true;
        const SimResult res = run(one);
        write_csv(out / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, res.trace); });
    }

    json summary = score_json(evaluate_strategy(s.evaluator, strategy));
    json kld = json::array();
    for (const auto& f : fits) kld.push_back(fit_json(f));
    summary["iat_fit"] = kld;
    return summary;
}

// --- analyze ---------------------------------------------------------------

json run_analyze(const ExperimentConfig& config, const fs::path& out) {
    const QueueParams& p = config.analyze.params;
    const auto pmf = impatient_queue_pmf_table(p);
    write_csv(out / "pmf.csv", [&](std::ostream& os) {
        CsvWriter csv(os);
        csv.row({"l", "p"});
        for (std::size_t l = 0; l < pmf.size(); ++l) {
            csv.field(l).field(pmf[l]);
            csv.end_row();
        }
    });
    const WaitDistributions dist(p);
    write_csv(out / "waits.csv", [&](std::ostream& os) {
        CsvWriter csv(os);
        csv.row({"W", "f_a", "f_r", "f_q"});
        const std::size_t k = config.analyze.wait_points;
        for (std::size_t i = 0; i < k; ++i) {
            const double w = config.analyze.wait_max * static_cast<double>(i) / static_cast<double>(k - 1);
            csv.field(w).field(dist.accepted_pdf(w)).field(dist.reneged_pdf(w)).field(dist.queued_pdf(w));
            csv.end_row();
        }
    });
    const auto& prob = dist.probabilities();
    const WaitMeans means = wait_means(p);
    json summary;
    summary["gamma"] = p.gamma();
    summary["delta"] = p.delta();
    summary["p0"] = pmf.front();
    summary["P_A"] = prob.accepted;
    summary["P_AJ"] = prob.accepted_joined;
    summary["P_A_given_J"] = prob.accepted_given_joined;
    summary["mean_wait"] = {{"accepted", means.accepted},
                            {"reneged", means.reneged},
                            {"queued", means.queued},
                            {"accepted_series", means.accepted_series},
                            {"reneged_identity", means.reneged_identity},
                            {"queued_formula", means.queued_formula}};
    double mean_length = 0.0;
    for (std::size_t l = 0; l < pmf.size(); ++l) mean_length += static_cast<double>(l) * pmf[l];
    summary["mean_length"] = mean_length;
    if (p.lambda < p.mu) summary["mm1_rho"] = p.rho();
    return summary;
}

// --- fit-iat ---------------------------------------------------------------

std::vector<double> read_samples(const fs::path& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open IAT input " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
    const auto header = parse_csv_line(line);
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw ValidationError(path.string() + ": no column '" + column + "'");
    const auto col = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = parse_csv_line(line);
        if (col >= fields.size()) throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": missing field");
        try {
            std::size_t used = 0;
            out.push_back(std::stod(fields[col], &used));
            if (used != fields[col].size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": not a number: " + fields[col]);
        }
    }
    return out;
}

json run_fit_iat(const ExperimentConfig& config, const fs::path& out) {
    const double width = config.fit_iat.bin_width;
    json summary;
    summary["bin_width"] = width;

    if (config.fit_iat.input) {
        const TypeFit f = fit(read_samples(*config.fit_iat.input, config.fit_iat.column), width);
        if (!f.pmf) throw ValidationError("IAT input has no samples");
        write_csv(out / "fit.csv", [&](std::ostream& os) {
            CsvWriter csv(os);
            csv.row({"series", "k", "empirical", "fitted"});
            write_pmf_rows(csv, "input", f);
        });
        write_csv(out / "kld.csv", [&](std::ostream& os) {
            CsvWriter csv(os);
            csv.row({"series", "samples", "p_hat", "kld"});
            csv.field("input");
            fit_row(csv, f);
            csv.end_row();
        });
        summary["input"] = fit_json(f);
        return summary;
    }

    const Setup s = setup(config);
    const std::size_t num_types = config.model->num_types();
    if (config.fit_iat.strategies == 0) {
        const PreferenceMatrix strategy = make_strategy(config, *s.space);
        const auto mc = monte_carlo(sim_config(s, strategy), config.simulation.rounds,
                                    config.simulation.threads);
        std::vector<TypeFit> fits;
        for (std::size_t n = 0; n < num_types; ++n) fits.push_back(fit(mc.pooled_iat[n], width));
        write_csv(out / "fit.csv", [&](std::ostream& os) {
            CsvWriter csv(os);
            csv.row({"type", "k", "empirical", "fitted"});
            for (std::size_t n = 0; n < num_types; ++n) write_pmf_rows(csv, std::to_string(n + 1), fits[n]);
        });
        write_csv(out / "kld.csv", [&](std::ostream& os) {
            CsvWriter csv(os);
            csv.row({"type", "samples", "p_hat", "kld"});
            for (std::size_t n = 0; n < num_types; ++n) {
                csv.field(n + 1);
                fit_row(csv, fits[n]);
                csv.end_row();
            }
        });
        json per_type = json::array();
        for (const auto& f : fits) per_type.push_back(fit_json(f));
        summary["types"] = per_type;
        return summary;
    }

    // Random-strategy protocol: each strategy gets its own Monte-Carlo test
    // and its pooled IAT fitted per queue.
    const std::size_t count = config.fit_iat.strategies;
    std::vector<std::vector<TypeFit>> fits(count);
    parallel_for(count, config.simulation.threads, [&](std::size_t i) {
        const PreferenceMatrix strategy = random_strategy(*s.space, sweep_strategy_seed(config.seed, i));
        const auto mc = monte_carlo(sim_config(s, strategy), config.simulation.rounds, 1);
        for (std::size_t n = 0; n < num_types; ++n) fits[i].push_back(fit(mc.pooled_iat[n], width));
    });
    write_csv(out / "kld.csv", [&](std::ostream& os) {
        CsvWriter csv(os);
        csv.row({"strategy", "strategy_seed", "type", "samples", "p_hat", "kld"});
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t n = 0; n < num_types; ++n) {
                csv.field(i).field(static_cast<unsigned long long>(sweep_strategy_seed(config.seed, i))).field(n + 1);
                fit_row(csv, fits[i][n]);
                csv.end_row();
            }
        }
    });
    json per_type = json::array();
    for (std::size_t n = 0; n < num_types; ++n) {
        std::vector<double> values;
        for (const auto& f : fits) {
            if (f[n].pmf) values.push_back(f[n].kld);
        }
        const auto below = std::count_if(values.begin(), values.end(), [](double v) { return v < 0.3; });
        per_type.push_back({{"fitted_strategies", values.size()},
                            {"median_kld", values.empty() ? json() : json(median(values))},
                            {"fraction_below_0.3",
                             values.empty() ? json() : json(static_cast<double>(below) / values.size())}});
    }
    summary["strategies"] = count;
    summary["types"] = per_type;
    return summary;
}

// --- steady-state ----------------------------------------------------------

json run_steady_state(const ExperimentConfig& config, const fs::path& out) {
    const Setup s = setup(config);
    const PreferenceMatrix strategy = make_strategy(config, *s.space);
    const std::size_t num_types = config.model->num_types();
    json summary;
    std::vector<double> p_empty;
    std::optional<StrategyScore> measured;
    if (config.steady_state.p_empty) {
        p_empty = *config.steady_state.p_empty;
        summary["p_empty_source"] = "config";
    } else {
        measured = evaluate_strategy(s.evaluator, strategy);
        p_empty = measured->queue_empty_fraction;
        summary["p_empty_source"] = "simulation";
    }
    const TransitionMatrix psi =
        build_transition_matrix(*config.model, strategy, *s.space, p_empty, config.steady_state.transition);
    std::vector<double> init(s.space->size(), 0.0);
    if (config.simulation.initial == InitialPolicy::empty || s.space->boundary().empty()) {
        init[*s.space->index_of(SystemState(num_types))] = 1.0;
    } else {
        const double w = 1.0 / static_cast<double>(s.space->boundary().size());
        for (std::size_t i = s.space->num_admissible(); i < s.space->size(); ++i) init[i] = w;
    }
    const StateDistribution dist = long_term_distribution(psi, init, config.steady_state.long_term);
    std::vector<double> eta(num_types), u(num_types);
    for (std::size_t n = 0; n < num_types; ++n) {
        eta[n] = config.model->type(n).release_rate;
        u[n] = config.model->type(n).utility_rate;
    }
    const auto s_bar = expected_slice_counts(dist.probabilities, *s.space);
    const auto mu = estimate_acceptance_rates(dist.probabilities, *s.space, eta);
    const double utility = estimate_mean_utility(mu, eta, u);

    write_csv(out / "distribution.csv", [&](std::ostream& os) {
        CsvWriter csv(os);
        csv.row({"index", "s_vector", "admissible", "probability"});
        for (std::size_t i = 0; i < s.space->size(); ++i) {
            csv.field(i).field(s.space->state(i).to_string()).field(s.space->is_admissible_index(i) ? 1 : 0);
            csv.field(dist.probabilities[i]);
            csv.end_row();
        }
    });
    write_csv(out / "rates.csv", [&](std::ostream& os) {
        CsvWriter csv(os);
        csv.row({"type", "p_empty", "s_bar", "mu_hat", "mu_sim"});
        for (std::size_t n = 0; n < num_types; ++n) {
            csv.field(n + 1).field(p_empty[n]).field(s_bar[n]).field(mu[n]);
            if (measured) {
                csv.field(measured->acceptance_rate[n]);
            } else {
                csv.field("");
            }
            csv.end_row();
        }
    });
    summary["states"] = s.space->size();
    summary["converged"] = dist.converged;
    summary["iterations"] = dist.iterations;
    summary["last_change"] = dist.last_change;
    summary["p_empty"] = p_empty;
    summary["s_bar"] = s_bar;
    summary["mu_hat"] = mu;
    summary["utility_hat"] = utility;
    if (measured) summary["simulation"] = score_json(*measured);
    return summary;
}

// --- sweep / optimize ------------------------------------------------------

json run_sweep(const ExperimentConfig& config, const fs::path& out) {
    const Setup s = setup(config);
    const auto scores = random_sweep(s.evaluator, config.sweep.count, config.seed, config.sweep.threads);
    const StrategyScore baseline = greedy_single_queue_baseline(s.evaluator);
    write_csv(out / "scores.csv", [&](std::ostream& os) { write_scores_csv(os, scores); });
    json summary;
    summary["count"] = scores.size();
    summary["baseline"] = score_json(baseline);
    for (Metric m : {Metric::utility, Metric::mean_wait, Metric::admission}) {
        const auto order = rank_by(scores, m);
        const StrategyScore& best = scores[order.front()];
        const StrategyScore& worst = scores[order.back()];
        summary["metrics"][std::string(to_string(m))] = {
            {"best_index", best.index},
            {"best_strategy_seed", best.strategy_seed},
            {"best", best.objective(m) * (m == Metric::mean_wait ? -1.0 : 1.0)},
            {"worst", worst.objective(m) * (m == Metric::mean_wait ? -1.0 : 1.0)},
            {"baseline", baseline.objective(m) * (m == Metric::mean_wait ? -1.0 : 1.0)},
            {"best_not_worse_than_baseline", best.objective(m) >= baseline.objective(m)}};
    }
    summary["metric"] = std::string(to_string(config.sweep.metric));
    return summary;
}

json run_optimize(const ExperimentConfig& config, const fs::path& out) {
    const Setup s = setup(config);
    const PreferenceMatrix start = make_strategy(config, *s.space);
    const SearchResult res =
        local_search(s.evaluator, start, config.optimize.budget, config.optimize.metric, config.optimize.search_seed);
    write_csv(out / "trajectory.csv", [&](std::ostream& os) {
        CsvWriter csv(os);
        csv.row({"evaluation", "u_mean", "Wq_mean", "PA_mean", "objective"});
        for (const auto& step : res.trajectory) {
            csv.field(step.evaluation)
                .field(step.best.utility.mean)
                .field(step.best.mean_wait.mean)
                .field(step.best.admission.mean)
                .field(step.best.objective(config.optimize.metric));
            csv.end_row();
        }
    });
    write_csv(out / "best_strategy.txt", [&](std::ostream& os) { write_strategy(os, res.best_strategy); });
    json summary;
    summary["metric"] = std::string(to_string(config.optimize.metric));
    summary["evaluations"] = res.evaluations;
    summary["start"] = score_json(res.trajectory.front().best);
    summary["best"] = score_json(res.trajectory.back().best);
    return summary;
}

// --- casestudy -------------------------------------------------------------

json run_casestudy(const ExperimentConfig&, const fs::path& out) {
    const auto panels = run_case_study();
    write_csv(out / "casestudy.csv", [&](std::ostream& os) { write_case_study_csv(os, panels); });
    json summary = json::object();
    for (const auto& p : panels) {
        std::vector<std::uint64_t> order;
        for (const auto& step : p.steps) order.insert(order.end(), step.accepted.begin(), step.accepted.end());
        summary[p.name] = {{"final_state", p.final_state.to_string()}, {"acceptance_order", order}};
    }
    return summary;
}

std::string queue_string(const std::vector<std::deque<Request>>& queues) {
    std::string out;
    for (std::size_t q = 0; q < queues.size(); ++q) {
        if (q) out += '|';
        for (std::size_t i = 0; i < queues[q].size(); ++i) {
            if (i) out += ',';
            out += std::to_string(queues[q][i].type + 1);
        }
    }
    return out;
}

}  // namespace

std::string_view version() noexcept { return SLICESIM_VERSION; }

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"simulate", "analyze",  "fit-iat",  "steady-state",
                                                "sweep",    "optimize", "casestudy"};
    return names;
}

MonteCarloSettings monte_carlo_settings(const ExperimentConfig& config) {
    MonteCarloSettings m;
    m.rounds = config.simulation.rounds;
    m.horizon = config.simulation.horizon;
    m.warmup = config.simulation.warmup;
    m.seed = config.seed;
    m.initial = config.simulation.initial;
    m.balking = config.simulation.balking;
    m.reneging = config.simulation.reneging;
    m.threads = config.simulation.threads;
    return m;
}

PreferenceMatrix make_strategy(const ExperimentConfig& config, const StateSpace& space) {
    switch (config.strategy.kind) {
        case StrategyKind::prefer: return naive_strategy(NaiveKind::prefer_type, space, config.strategy.prefer);
        case StrategyKind::greedy: return naive_strategy(NaiveKind::greedy_order, space);
        case StrategyKind::random: return random_strategy(space, config.strategy.seed);
        case StrategyKind::file: {
            std::ifstream in(config.strategy.file);
            if (!in) throw ValidationError("cannot open strategy file " + config.strategy.file);
            PreferenceMatrix m = read_strategy(in, space.num_types());
            if (auto err = validate(m, space)) throw ValidationError(config.strategy.file + ": " + *err);
            return m;
        }
    }
    throw ContractViolation("unknown strategy kind");
}

json run_experiment(std::string_view command, const ExperimentConfig& config, const fs::path& out_dir) {
    using Runner = json (*)(const ExperimentConfig&, const fs::path&);
    Runner runner = nullptr;
    if (command == "simulate") runner = run_simulate;
    if (command == "analyze") runner = run_analyze;
    if (command == "fit-iat") runner = run_fit_iat;
    if (command == "steady-state") runner = run_steady_state;
    if (command == "sweep") runner = run_sweep;
    if (command == "optimize") runner = run_optimize;
    if (command == "casestudy") runner = run_casestudy;
    if (!runner) throw ValidationError("unknown command '" + std::string(command) + "'");

    fs::create_directories(out_dir);
    json meta;
    meta["tool"] = "slicesim";
    meta["version"] = version();
    meta["command"] = command;
    meta["seed"] = config.seed;
    meta["generator"] = kGeneratorName;
    meta["config"] = config.to_json();
    write_file(out_dir / "metadata.json", meta.dump(2) + "\n");

    json summary = runner(config, out_dir);
    summary["command"] = command;
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    return summary;
}

std::vector<CaseStudyPanel> run_case_study() {
    const ResourceModel model({1.0}, {{0.6, 0.2}}, {SliceType{0.0, 1.0, 0.0, 0.0, std::nullopt},
                                                    SliceType{0.0, 1.0, 0.0, 0.0, std::nullopt}});
    const StateSpace space = enumerate_state_space(model);
    const PreferenceMatrix greedy = naive_strategy(NaiveKind::greedy_order, space);
    const SystemState initial{1, 0};

    struct Arm {
        std::string name;
        std::unique_ptr<Controller> controller;
        std::function<std::string()> queues;
    };
    std::vector<Arm> arms;
    {
        auto c = std::make_unique<MixedFifoController>(space, initial, 1);
        auto* raw = c.get();
        arms.push_back({"single-queue", std::move(c), [raw] { return queue_string(raw->queues()); }});
    }
    {
        auto c = std::make_unique<MixedFifoController>(space, initial, 2);
        auto* raw = c.get();
        arms.push_back({"homogeneous-queues", std::move(c), [raw] { return queue_string(raw->queues()); }});
    }
    {
        auto c = std::make_unique<MultiQueueController>(space, greedy, initial);
        auto* raw = c.get();
        arms.push_back(
            {"heterogeneous-queues", std::move(c), [raw] { return queue_string(raw->controller_state().queues); }});
    }

    const int arrivals[] = {1, 1, 2, 2};
    std::vector<CaseStudyPanel> panels;
    for (auto& arm : arms) {
        CaseStudyPanel panel;
        panel.name = arm.name;
        auto record = [&](double t, const char* event, int type, const ServeResult& res) {
            CaseStudyStep step{t, event, type, {}, arm.controller->state().to_string(), arm.queues()};
            for (const auto& a : res.accepted) step.accepted.push_back(a.request_id);
            panel.steps.push_back(std::move(step));
        };
        for (std::size_t i = 0; i < 4; ++i) {
            const double t = static_cast<double>(i + 1);
            const Request r{i + 1, static_cast<std::size_t>(arrivals[i] - 1), t, t, std::nullopt};
            record(t, "arrival", arrivals[i], arm.controller->handle_request(r, t));
        }
        record(5.0, "release", 1, arm.controller->handle_release(0, 5.0));
        panel.final_state = arm.controller->state();
        panels.push_back(std::move(panel));
    }
    return panels;
}

void write_case_study_csv(std::ostream& os, const std::vector<CaseStudyPanel>& panels) {
    CsvWriter csv(os);
    csv.row({"panel", "time", "event", "type", "accepted", "s_vector", "queues"});
    for (const auto& p : panels) {
        for (const auto& step : p.steps) {
            std::string ids;
            for (std::size_t i = 0; i < step.accepted.size(); ++i) {
                if (i) ids += ';';
                ids += std::to_string(step.accepted[i]);
            }
            csv.field(p.name).field(step.time).field(step.event).field(step.type).field(ids);
            csv.field(step.state).field(step.queues);
            csv.end_row();
        }
    }
}

}  // namespace slicesim::harness
