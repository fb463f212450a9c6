#include "slicesim/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace slicesim::harness {

namespace {

template <typename E>
struct EnumName {
    E value;
    std::string_view name;
};

constexpr EnumName<InitialPolicy> kInitial[] = {{InitialPolicy::empty, "empty"},
                                                {InitialPolicy::fully_utilized, "fully-utilized"}};
constexpr EnumName<StrategyKind> kStrategy[] = {{StrategyKind::prefer, "prefer"},
                                                {StrategyKind::greedy, "greedy"},
                                                {StrategyKind::random, "random"},
                                                {StrategyKind::file, "file"}};
constexpr EnumName<Metric> kMetric[] = {
    {Metric::utility, "utility"}, {Metric::mean_wait, "mean-wait"}, {Metric::admission, "admission"}};
constexpr EnumName<TransitionMode> kMode[] = {{TransitionMode::with_releases, "with-releases"},
                                              {TransitionMode::paper_literal, "paper-literal"}};
constexpr EnumName<OpportunityModel> kOpportunity[] = {{OpportunityModel::arrival_conditioned, "arrival-conditioned"},
                                                       {OpportunityModel::pooled, "pooled"}};
constexpr EnumName<LongTermMethod> kMethod[] = {{LongTermMethod::lazy_power, "lazy-power"},
                                                {LongTermMethod::cesaro, "cesaro"}};

template <typename E, std::size_t K>
std::string_view name_of(const EnumName<E> (&table)[K], E value) {
    for (const auto& e : table) {
        if (e.value == value) return e.name;
    }
    return "?";
}

class Reader {
public:
    explicit Reader(std::string_view source) : source_(source) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
        const YAML::Mark m = at.Mark();
        std::ostringstream os;
        os << source_ << ':' << (m.line + 1) << ':' << (m.column + 1) << ": " << msg;
        throw ConfigError(os.str());
    }

    void require_map(const YAML::Node& node, std::string_view what) const {
        if (!node.IsMap()) fail(node, std::string(what) + " must be a mapping");
    }

    void check_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed,
                    std::string_view section) const {
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            bool ok = false;
            for (auto a : allowed) ok = ok || key == a;
            if (!ok) fail(kv.first, "unknown key '" + key + "' in " + std::string(section));
        }
    }

    double number(const YAML::Node& node, std::string_view key) const {
        try {
            return node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, std::string(key) + " must be a number");
        }
    }

    double positive(const YAML::Node& node, std::string_view key) const {
        const double v = number(node, key);
        if (!(v > 0.0) || !std::isfinite(v)) fail(node, std::string(key) + " must be > 0");
        return v;
    }

    double non_negative(const YAML::Node& node, std::string_view key) const {
        const double v = number(node, key);
        if (!(v >= 0.0) || !std::isfinite(v)) fail(node, std::string(key) + " must be >= 0");
        return v;
    }

    double unit(const YAML::Node& node, std::string_view key) const {
        const double v = number(node, key);
        if (!(v >= 0.0 && v <= 1.0)) fail(node, std::string(key) + " must be in [0, 1]");
        return v;
    }

    std::uint64_t count(const YAML::Node& node, std::string_view key) const {
        try {
            const auto v = node.as<long long>();
            if (v < 0) fail(node, std::string(key) + " must be >= 0");
            return static_cast<std::uint64_t>(v);
        } catch (const YAML::Exception&) {
            fail(node, std::string(key) + " must be a non-negative integer");
        }
    }

    bool flag(const YAML::Node& node, std::string_view key) const {
        try {
            return node.as<bool>();
        } catch (const YAML::Exception&) {
            fail(node, std::string(key) + " must be true or false");
        }
    }

    std::string text(const YAML::Node& node, std::string_view key) const {
        if (!node.IsScalar()) fail(node, std::string(key) + " must be a string");
        return node.as<std::string>();
    }

    std::vector<double> numbers(const YAML::Node& node, std::string_view key) const {
        if (!node.IsSequence()) fail(node, std::string(key) + " must be a list of numbers");
        std::vector<double> out;
        for (const auto& item : node) out.push_back(non_negative(item, key));
        return out;
    }

    template <typename E, std::size_t K>
    E choice(const YAML::Node& node, std::string_view key, const EnumName<E> (&table)[K]) const {
        const std::string v = text(node, key);
        std::string options;
        for (const auto& e : table) {
            if (e.name == v) return e.value;
            options += options.empty() ? "" : ", ";
            options += e.name;
        }
        fail(node, std::string(key) + " must be one of: " + options);
    }

private:
    std::string source_;
};

SliceType parse_type(const Reader& r, const YAML::Node& node, std::vector<double>& cost_column) {
    r.require_map(node, "slice type");
    r.check_keys(node, {"cost", "arrival_rate", "release_rate", "mean_lifetime", "utility_rate", "reneging_rate",
                        "balking"},
                 "slice type");
    SliceType t;
    if (!node["cost"]) r.fail(node, "slice type needs 'cost'");
    cost_column = r.numbers(node["cost"], "cost");
    if (!node["arrival_rate"]) r.fail(node, "slice type needs 'arrival_rate'");
    t.arrival_rate = r.non_negative(node["arrival_rate"], "arrival_rate");
    const bool has_rate = static_cast<bool>(node["release_rate"]);
    const bool has_life = static_cast<bool>(node["mean_lifetime"]);
    if (has_rate == has_life) r.fail(node, "give exactly one of 'release_rate' and 'mean_lifetime'");
    t.release_rate = has_rate ? r.positive(node["release_rate"], "release_rate")
                              : 1.0 / r.positive(node["mean_lifetime"], "mean_lifetime");
    if (node["utility_rate"]) t.utility_rate = r.non_negative(node["utility_rate"], "utility_rate");
    if (node["reneging_rate"]) t.reneging_rate = r.non_negative(node["reneging_rate"], "reneging_rate");
    if (node["balking"] && !node["balking"].IsNull()) t.balking = r.unit(node["balking"], "balking");
    return t;
}

std::shared_ptr<const ResourceModel> parse_model(const Reader& r, const YAML::Node& node) {
    r.require_map(node, "model");
    r.check_keys(node, {"pool", "types"}, "model");
    if (!node["pool"]) r.fail(node, "model needs 'pool'");
    if (!node["types"] || !node["types"].IsSequence() || node["types"].size() == 0) {
        r.fail(node, "model needs a non-empty 'types' list");
    }
    std::vector<double> pool = r.numbers(node["pool"], "pool");
    std::vector<SliceType> types;
    std::vector<std::vector<double>> cost(pool.size());
    for (const auto& tn : node["types"]) {
        std::vector<double> column;
        types.push_back(parse_type(r, tn, column));
        if (column.size() != pool.size()) r.fail(tn["cost"], "cost needs one entry per pool resource");
        for (std::size_t m = 0; m < pool.size(); ++m) cost[m].push_back(column[m]);
    }
    try {
        auto model = std::make_shared<const ResourceModel>(pool, cost, types);
        validate_model(*model);
        return model;
    } catch (const ValidationError& e) {
        r.fail(node, e.what());
    }
}

void parse_simulation(const Reader& r, const YAML::Node& node, SimulationSpec& s) {
    r.require_map(node, "simulation");
    r.check_keys(node, {"horizon", "warmup", "rounds", "initial", "balking", "reneging", "threads", "trace"},
                 "simulation");
    if (node["horizon"]) s.horizon = r.positive(node["horizon"], "horizon");
    if (node["warmup"]) s.warmup = r.non_negative(node["warmup"], "warmup");
    if (node["rounds"]) s.rounds = r.count(node["rounds"], "rounds");
    if (node["initial"]) s.initial = r.choice(node["initial"], "initial", kInitial);
    if (node["balking"]) s.balking = r.flag(node["balking"], "balking");
    if (node["reneging"]) s.reneging = r.flag(node["reneging"], "reneging");
    if (node["threads"]) s.threads = r.count(node["threads"], "threads");
    if (node["trace"]) s.trace = r.flag(node["trace"], "trace");
    if (s.rounds == 0) r.fail(node["rounds"], "rounds must be >= 1");
    if (!(s.horizon > s.warmup)) r.fail(node, "horizon must exceed warmup");
}

void parse_strategy(const Reader& r, const YAML::Node& node, StrategySpec& s) {
    r.require_map(node, "strategy");
    r.check_keys(node, {"kind", "prefer", "seed", "file"}, "strategy");
    if (node["kind"]) s.kind = r.choice(node["kind"], "kind", kStrategy);
    if (node["prefer"]) s.prefer = r.count(node["prefer"], "prefer");
    if (node["seed"]) s.seed = r.count(node["seed"], "seed");
    if (node["file"]) s.file = r.text(node["file"], "file");
    if (s.kind == StrategyKind::file && s.file.empty()) r.fail(node, "strategy kind 'file' needs 'file'");
}

void parse_analyze(const Reader& r, const YAML::Node& node, AnalyzeSpec& a) {
    r.require_map(node, "analyze");
    r.check_keys(node, {"lambda", "mu", "alpha", "beta", "wait_max", "wait_points"}, "analyze");
    if (node["lambda"]) a.params.lambda = r.positive(node["lambda"], "lambda");
    if (node["mu"]) a.params.mu = r.positive(node["mu"], "mu");
    if (node["alpha"]) a.params.alpha = r.positive(node["alpha"], "alpha");
    if (node["beta"]) a.params.beta = r.unit(node["beta"], "beta");
    if (node["wait_max"]) a.wait_max = r.positive(node["wait_max"], "wait_max");
    if (node["wait_points"]) a.wait_points = r.count(node["wait_points"], "wait_points");
    if (!(a.params.beta > 0.0)) r.fail(node["beta"], "beta must be > 0 for the closed forms");
    if (a.wait_points < 2) r.fail(node["wait_points"], "wait_points must be >= 2");
}

void parse_fit(const Reader& r, const YAML::Node& node, FitIatSpec& f) {
    r.require_map(node, "fit_iat");
    r.check_keys(node, {"bin_width", "strategies", "input", "column"}, "fit_iat");
    if (node["bin_width"]) f.bin_width = r.positive(node["bin_width"], "bin_width");
    if (node["strategies"]) f.strategies = r.count(node["strategies"], "strategies");
    if (node["input"]) f.input = r.text(node["input"], "input");
    if (node["column"]) f.column = r.text(node["column"], "column");
}

void parse_steady(const Reader& r, const YAML::Node& node, SteadyStateSpec& s, std::size_t num_types) {
    r.require_map(node, "steady_state");
    r.check_keys(node, {"p_empty", "mode", "opportunities", "opportunity_rate", "serve_after_release", "cascade",
                        "method", "tolerance", "max_iterations"},
                 "steady_state");
    if (node["p_empty"] && !node["p_empty"].IsNull()) {
        auto v = r.numbers(node["p_empty"], "p_empty");
        if (v.size() != num_types) r.fail(node["p_empty"], "p_empty needs one value per slice type");
        for (double p : v) {
            if (p > 1.0) r.fail(node["p_empty"], "p_empty values must be in [0, 1]");
        }
        s.p_empty = std::move(v);
    }
    auto& t = s.transition;
    if (node["mode"]) t.mode = r.choice(node["mode"], "mode", kMode);
    if (node["opportunities"]) t.opportunities = r.choice(node["opportunities"], "opportunities", kOpportunity);
    if (node["opportunity_rate"]) t.opportunity_rate = r.non_negative(node["opportunity_rate"], "opportunity_rate");
    if (node["serve_after_release"]) t.serve_after_release = r.flag(node["serve_after_release"], "serve_after_release");
    if (node["cascade"]) t.cascade = r.flag(node["cascade"], "cascade");
    auto& l = s.long_term;
    if (node["method"]) l.method = r.choice(node["method"], "method", kMethod);
    if (node["tolerance"]) l.tolerance = r.positive(node["tolerance"], "tolerance");
    if (node["max_iterations"]) l.max_iterations = r.count(node["max_iterations"], "max_iterations");
}

void parse_sweep(const Reader& r, const YAML::Node& node, SweepSpec& s) {
    r.require_map(node, "sweep");
    r.check_keys(node, {"count", "metric", "threads"}, "sweep");
    if (node["count"]) s.count = r.count(node["count"], "count");
    if (node["metric"]) s.metric = r.choice(node["metric"], "metric", kMetric);
    if (node["threads"]) s.threads = r.count(node["threads"], "threads");
    if (s.count == 0) r.fail(node["count"], "sweep count must be >= 1");
}

void parse_optimize(const Reader& r, const YAML::Node& node, OptimizeSpec& o) {
    r.require_map(node, "optimize");
    r.check_keys(node, {"budget", "metric", "search_seed"}, "optimize");
    if (node["budget"]) o.budget = r.count(node["budget"], "budget");
    if (node["metric"]) o.metric = r.choice(node["metric"], "metric", kMetric);
    if (node["search_seed"]) o.search_seed = r.count(node["search_seed"], "search_seed");
}

nlohmann::json model_json(const ResourceModel& model) {
    nlohmann::json types = nlohmann::json::array();
    for (std::size_t n = 0; n < model.num_types(); ++n) {
        const SliceType& t = model.type(n);
        nlohmann::json cost = nlohmann::json::array();
        for (std::size_t m = 0; m < model.num_resources(); ++m) cost.push_back(model.cost(m, n));
        types.push_back({{"cost", cost},
                         {"arrival_rate", t.arrival_rate},
                         {"release_rate", t.release_rate},
                         {"utility_rate", t.utility_rate},
                         {"reneging_rate", t.reneging_rate},
                         {"balking", t.balking ? nlohmann::json(*t.balking) : nlohmann::json()}});
    }
    return {{"pool", model.pool()}, {"types", types}};
}

}  // namespace

std::vector<std::string> builtin_scenarios() { return {"scenario-1", "scenario-2"}; }

ResourceModel builtin_scenario(std::string_view name) {
    // Long-form aliases "paper-scenario-1" and "paper-scenario-2".
    if (name.starts_with("paper-")) name.remove_prefix(6);
    double scale = 0.0;
    if (name == "scenario-1") {
        scale = 1.0;
    } else if (name == "scenario-2") {
        scale = 3.0;
    } else {
        throw ValidationError("unknown scenario '" + std::string(name) + "'");
    }
    std::vector<SliceType> types(2);
    types[0] = {2.0 * scale, 1.0 / 5.0, 1.0, 1.0, 0.02};
    types[1] = {0.5 * scale, 1.0 / 2.0, 10.0, 1.0, 0.02};
    // Columns c_1 = [0.01, 0.05], c_2 = [0.2, 0.04].
    return ResourceModel({1.0, 1.0}, {{0.01, 0.2}, {0.05, 0.04}}, types);
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.model = std::make_shared<const ResourceModel>(builtin_scenario(c.scenario));
    return c;
}

void validate_model(const ResourceModel& model) {
    const auto bad = model.individually_infeasible_types();
    if (!bad.empty()) {
        throw ValidationError("slice type " + std::to_string(bad.front() + 1) + " does not fit the empty pool");
    }
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
    const Reader r(source);
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        std::ostringstream os;
        os << source << ':' << (e.mark.line + 1) << ':' << (e.mark.column + 1) << ": " << e.msg;
        throw ConfigError(os.str());
    }
    ExperimentConfig c = default_config();
    if (root.IsNull()) return c;
    r.require_map(root, "configuration");
    r.check_keys(root, {"scenario", "model", "seed", "output", "strategy", "simulation", "analyze", "fit_iat",
                        "steady_state", "sweep", "optimize"},
                 "configuration");
    if (root["scenario"] && root["model"]) r.fail(root["model"], "give either 'scenario' or 'model', not both");
    if (root["scenario"]) {
        c.scenario = r.text(root["scenario"], "scenario");
        try {
            c.model = std::make_shared<const ResourceModel>(builtin_scenario(c.scenario));
        } catch (const ValidationError& e) {
            r.fail(root["scenario"], e.what());
        }
    }
    if (root["model"]) {
        c.scenario = "custom";
        c.model = parse_model(r, root["model"]);
    }
    if (root["seed"]) c.seed = r.count(root["seed"], "seed");
    if (root["output"]) c.output = r.text(root["output"], "output");
    if (root["strategy"]) {
        parse_strategy(r, root["strategy"], c.strategy);
    } else {
        c.strategy.prefer = std::min<std::size_t>(c.strategy.prefer, c.model->num_types());
    }
    if (c.strategy.kind == StrategyKind::prefer &&
        (c.strategy.prefer < 1 || c.strategy.prefer > c.model->num_types())) {
        r.fail(root["strategy"] ? root["strategy"] : root, "strategy.prefer must name a slice type");
    }
    if (root["simulation"]) parse_simulation(r, root["simulation"], c.simulation);
    if (root["analyze"]) parse_analyze(r, root["analyze"], c.analyze);
    if (root["fit_iat"]) parse_fit(r, root["fit_iat"], c.fit_iat);
    if (root["steady_state"]) parse_steady(r, root["steady_state"], c.steady_state, c.model->num_types());
    if (root["sweep"]) parse_sweep(r, root["sweep"], c.sweep);
    if (root["optimize"]) parse_optimize(r, root["optimize"], c.optimize);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["model"] = model_json(*model);
    j["seed"] = seed;
    j["strategy"] = {{"kind", name_of(kStrategy, strategy.kind)},
                     {"prefer", strategy.prefer},
                     {"seed", strategy.seed},
                     {"file", strategy.file}};
    j["simulation"] = {{"horizon", simulation.horizon},     {"warmup", simulation.warmup},
                       {"rounds", simulation.rounds},       {"initial", name_of(kInitial, simulation.initial)},
                       {"balking", simulation.balking},     {"reneging", simulation.reneging},
                       {"trace", simulation.trace}};
    j["analyze"] = {{"lambda", analyze.params.lambda}, {"mu", analyze.params.mu},
                    {"alpha", analyze.params.alpha},   {"beta", analyze.params.beta},
                    {"wait_max", analyze.wait_max},    {"wait_points", analyze.wait_points}};
    j["fit_iat"] = {{"bin_width", fit_iat.bin_width},
                    {"strategies", fit_iat.strategies},
                    {"input", fit_iat.input ? nlohmann::json(*fit_iat.input) : nlohmann::json()},
                    {"column", fit_iat.column}};
    const auto& t = steady_state.transition;
    j["steady_state"] = {
        {"p_empty", steady_state.p_empty ? nlohmann::json(*steady_state.p_empty) : nlohmann::json()},
        {"mode", name_of(kMode, t.mode)},
        {"opportunities", name_of(kOpportunity, t.opportunities)},
        {"opportunity_rate", t.opportunity_rate ? nlohmann::json(*t.opportunity_rate) : nlohmann::json()},
        {"serve_after_release", t.serve_after_release},
        {"cascade", t.cascade},
        {"method", name_of(kMethod, steady_state.long_term.method)},
        {"tolerance", steady_state.long_term.tolerance},
        {"max_iterations", steady_state.long_term.max_iterations}};
    j["sweep"] = {{"count", sweep.count}, {"metric", name_of(kMetric, sweep.metric)}};
    j["optimize"] = {{"budget", optimize.budget},
                     {"metric", name_of(kMetric, optimize.metric)},
                     {"search_seed", optimize.search_seed}};
    return j;
}

}  // namespace slicesim::harness
