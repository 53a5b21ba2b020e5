#include "darrl/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "darrl/baseline.hpp"
#include "darrl/cat_io.hpp"
#include "darrl/envs.hpp"
#include "darrl/parallel.hpp"

#ifndef DARRL_VERSION
#define DARRL_VERSION "unknown"
#endif

namespace darrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kEnvNames = {"wumpus", "example", "office", "taxi", "waterworld"};

bool known_env(const std::string& name) {
    return std::find(kEnvNames.begin(), kEnvNames.end(), name) != kEnvNames.end();
}

// Reads typed fields out of a JSON object, collecting problems instead of
// throwing on the first one.
class Reader {
public:
    Reader(const json& obj, std::string where, std::vector<std::string>& problems)
        : obj_(obj), where_(std::move(where)), problems_(problems) {}

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) return;
        if (!matches<T>(*it)) {
            problems_.push_back(where_ + key + ": wrong type");
            return;
        }
        out = it->template get<T>();
    }

    template <class T>
    void read(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return;
        if (!matches<T>(*it)) {
            problems_.push_back(where_ + key + ": wrong type");
            return;
        }
        out = it->template get<T>();
    }

    void mark(const char* key) { seen_.insert(key); }

    void reject_unknown() {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) problems_.push_back(where_ + it.key() + ": unknown field");
        }
    }

private:
    template <class T>
    static bool matches(const json& v) {
        if constexpr (std::is_same_v<T, bool>) {
            return v.is_boolean();
        } else if constexpr (std::is_same_v<T, std::string>) {
            return v.is_string();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
        } else if constexpr (std::is_integral_v<T>) {
            return v.is_number_integer();
        } else {
            return v.is_number();
        }
    }

    const json& obj_;
    std::string where_;
    std::vector<std::string>& problems_;
    std::set<std::string> seen_;
};

void apply_env_defaults(const EnvSpec& env, AgentConfig& agent) {
    if (env.name == "office") {
        agent.gamma = 0.99;
        agent.epsilon_start = 1.0;
    } else if (env.name == "taxi") {
        agent.gamma = 0.999;
        agent.epsilon_start = 1.0;
    } else {
        agent.gamma = 0.95;
    }
}

void read_agent(const json& obj, AgentConfig& a, std::vector<std::string>& problems) {
    Reader r(obj, "agent.", problems);
    r.read("alpha", a.alpha);
    r.read("gamma", a.gamma);
    r.read("epsilon_start", a.epsilon_start);
    r.read("epsilon_decay", a.epsilon_decay);
    r.read("epsilon_min", a.epsilon_min);
    r.read("split_factor", a.split_factor);
    r.read("n_episodes", a.n_episodes);
    r.read("n_eval", a.n_eval);
    r.read("n_check", a.n_check);
    r.read("success_window", a.success_window);
    r.read("success_threshold", a.success_threshold);
    r.read("min_samples", a.min_samples);
    r.read("horizon", a.horizon);
    r.read("eval_alpha", a.eval_alpha);
    r.read("min_real_width", a.min_real_width);
    r.reject_unknown();
}

std::vector<std::string> env_problems(const EnvSpec& env) {
    std::vector<std::string> p;
    if (!known_env(env.name)) {
        p.push_back("env.name: unknown environment '" + env.name + "'");
        return p;
    }
    if (env.name == "wumpus" && env.size < 4) p.push_back("env.size: wumpus needs size >= 4");
    if (env.name == "office" && (env.size < 4 || env.size % 2 != 0)) {
        p.push_back("env.size: office needs an even size >= 4");
    }
    if (env.name == "taxi" && env.size < 5) p.push_back("env.size: taxi needs size >= 5");
    if ((env.name == "wumpus" || env.name == "office" || env.name == "taxi") && !(env.slip >= 0.0 && env.slip < 0.5)) {
        p.push_back("env.slip: must lie in [0, 0.5)");
    }
    if (env.random_start && env.name != "wumpus" && env.name != "example") {
        p.push_back("env.random_start: only grid worlds take a start mode");
    }
    return p;
}

void write_file(const fs::path& root, const fs::path& rel, const std::string& text, std::vector<fs::path>& files) {
    const fs::path full = root / rel;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + full.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + full.string());
    files.push_back(rel);
}

fs::path run_csv_path(Algorithm a, std::uint64_t seed) {
    return fs::path("runs") / (to_string(a) + "_seed" + std::to_string(seed) + ".csv");
}

struct AggregateRow {
    int runs = 0;
    double mean = 0.0;
    double std = 0.0;
};

std::vector<AggregateRow> aggregate_rows(const std::vector<const TrainStats*>& runs) {
    std::vector<std::vector<double>> curves;
    std::size_t longest = 0;
    for (const TrainStats* s : runs) {
        curves.push_back(s->moving_success_curve(100));
        longest = std::max(longest, curves.back().size());
    }
    std::vector<AggregateRow> rows(longest);
    for (std::size_t k = 0; k < longest; ++k) {
        double sum = 0.0;
        int n = 0;
        for (const auto& c : curves) {
            if (k < c.size()) {
                sum += c[k];
                ++n;
            }
        }
        const double mean = sum / n;
        double sse = 0.0;
        for (const auto& c : curves) {
            if (k < c.size()) sse += (c[k] - mean) * (c[k] - mean);
        }
        rows[k] = {n, mean, std::sqrt(sse / n)};
    }
    return rows;
}

void write_runs(const fs::path& root, Algorithm algorithm, const std::vector<RunResult>& runs,
                std::vector<fs::path>& files) {
    std::vector<const TrainStats*> all;
    for (const RunResult& r : runs) {
        write_file(root, run_csv_path(algorithm, r.seed), metrics_csv(r.stats), files);
        all.push_back(&r.stats);
        if (r.cat) {
            const std::string stem = "cat_seed" + std::to_string(r.seed);
            write_file(root, fs::path("cats") / (stem + ".json"), serialize_cat(*r.cat), files);
            write_file(root, fs::path("cats") / (stem + ".dot"), cat_to_dot(*r.cat), files);
        }
    }
    write_file(root, "aggregate_" + to_string(algorithm) + ".csv", aggregate_csv(all), files);
}

json summary_json(const AlgorithmSummary& s) {
    json j;
    j["algorithm"] = to_string(s.algorithm);
    j["runs"] = s.runs;
    j["reached"] = s.reached;
    j["median_episodes"] = s.median_episodes ? json(*s.median_episodes) : json(nullptr);
    j["final_mean"] = s.final_mean;
    return j;
}

void write_manifest(const ExperimentConfig& config, const std::vector<Algorithm>& algorithms, ArtifactSet& set,
                    const json& extra) {
    json m;
    m["tool"] = "darrl";
    m["version"] = DARRL_VERSION;
    m["config"] = to_json(config);
    m["algorithms"] = json::array();
    for (Algorithm a : algorithms) m["algorithms"].push_back(to_string(a));
    m["seeds"] = config.seeds;
    m["artifacts"] = json::array();
    for (const fs::path& f : set.files) m["artifacts"].push_back(f.generic_string());
    if (!extra.is_null()) m["summary"] = extra;
    write_file(set.root, "manifest.json", m.dump(2) + "\n", set.files);
}

}  // namespace

std::string to_string(Algorithm a) { return a == Algorithm::dar_rl ? "dar_rl" : "q_learning"; }

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ExperimentConfig parse_experiment_config(const json& document, const ConfigOverrides& overrides) {
    std::vector<std::string> problems;
    if (!document.is_object()) {
        throw ConfigError({"config document must be a JSON object"});
    }
    ExperimentConfig cfg;

    Reader top(document, "", problems);
    json env_obj = json::object();
    json agent_obj = json::object();
    std::string algorithm = "dar_rl";
    std::vector<std::uint64_t> seeds;
    std::string out;
    if (auto it = document.find("env"); it != document.end()) {
        if (it->is_object()) {
            env_obj = *it;
        } else {
            problems.emplace_back("env: must be an object");
        }
    }
    if (auto it = document.find("agent"); it != document.end()) {
        if (it->is_object()) {
            agent_obj = *it;
        } else {
            problems.emplace_back("agent: must be an object");
        }
    }
    if (auto it = document.find("seeds"); it != document.end()) {
        if (!it->is_array()) {
            problems.emplace_back("seeds: must be an array of non-negative integers");
        } else {
            for (const json& s : *it) {
                if (s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
                    seeds.push_back(s.get<std::uint64_t>());
                } else {
                    problems.emplace_back("seeds: must be an array of non-negative integers");
                    break;
                }
            }
        }
    }
    top.mark("env");
    top.mark("agent");
    top.mark("seeds");
    top.read("algorithm", algorithm);
    top.read("output_dir", out);
    top.read("workers", cfg.workers);
    top.reject_unknown();

    Reader env_reader(env_obj, "env.", problems);
    env_reader.read("name", cfg.env.name);
    env_reader.read("size", cfg.env.size);
    env_reader.read("slip", cfg.env.slip);
    env_reader.read("layout_seed", cfg.env.layout_seed);
    env_reader.read("random_start", cfg.env.random_start);
    env_reader.reject_unknown();
    if (overrides.env) cfg.env.name = *overrides.env;
    if (overrides.size) cfg.env.size = *overrides.size;

    if (algorithm == "dar_rl") {
        cfg.algorithm = Algorithm::dar_rl;
    } else if (algorithm == "q_learning") {
        cfg.algorithm = Algorithm::q_learning;
    } else {
        problems.push_back("algorithm: unknown algorithm '" + algorithm + "'");
    }

    const auto env_issues = env_problems(cfg.env);
    problems.insert(problems.end(), env_issues.begin(), env_issues.end());
    if (env_issues.empty()) {
        apply_env_defaults(cfg.env, cfg.agent);
        cfg.agent.horizon = make_environment(cfg.env)->descriptor().horizon_hint;
    }
    read_agent(agent_obj, cfg.agent, problems);
    if (overrides.episodes) cfg.agent.n_episodes = *overrides.episodes;

    cfg.seeds = overrides.seed ? std::vector<std::uint64_t>{*overrides.seed} : seeds;
    cfg.output_dir = overrides.out ? *overrides.out : fs::path(out);

    if (!problems.empty()) throw ConfigError(problems);
    validate(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& file, const ConfigOverrides& overrides) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read config " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
    }
    return parse_experiment_config(doc, overrides);
}

void validate(const ExperimentConfig& config) {
    std::vector<std::string> problems = env_problems(config.env);
    try {
        config.agent.validate();
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) problems.push_back("agent: " + p);
    }
    if (config.seeds.empty()) problems.emplace_back("seeds: at least one seed is required");
    std::set<std::uint64_t> distinct(config.seeds.begin(), config.seeds.end());
    if (distinct.size() != config.seeds.size()) problems.emplace_back("seeds: duplicates are not allowed");
    if (config.output_dir.empty()) problems.emplace_back("output_dir: required");
    if (config.workers < 0) problems.emplace_back("workers: must be non-negative");
    if (config.algorithm == Algorithm::q_learning && config.env.name == "waterworld") {
        problems.emplace_back("algorithm: q_learning needs a discrete environment");
    }
    if (!problems.empty()) throw ConfigError(problems);
}

json to_json(const ExperimentConfig& c) {
    json env = {{"name", c.env.name}, {"size", c.env.size}, {"slip", c.env.slip}, {"layout_seed", c.env.layout_seed}};
    if (c.env.random_start) env["random_start"] = *c.env.random_start;
    const AgentConfig& a = c.agent;
    json agent = {{"alpha", a.alpha},
                  {"gamma", a.gamma},
                  {"epsilon_start", a.epsilon_start},
                  {"epsilon_decay", a.epsilon_decay},
                  {"epsilon_min", a.epsilon_min},
                  {"split_factor", a.split_factor},
                  {"n_episodes", a.n_episodes},
                  {"n_eval", a.n_eval},
                  {"n_check", a.n_check},
                  {"success_window", a.success_window},
                  {"success_threshold", a.success_threshold},
                  {"min_samples", a.min_samples},
                  {"horizon", a.horizon},
                  {"min_real_width", a.min_real_width}};
    if (a.eval_alpha) agent["eval_alpha"] = *a.eval_alpha;
    return json{{"env", env},
                {"algorithm", to_string(c.algorithm)},
                {"agent", agent},
                {"seeds", c.seeds},
                {"output_dir", c.output_dir.generic_string()},
                {"workers", c.workers}};
}

std::unique_ptr<Environment> make_environment(const EnvSpec& spec) {
    if (spec.name == "wumpus") {
        GridWorld w = wumpus_make(spec.size, spec.layout_seed, spec.slip);
        if (!spec.random_start.value_or(false)) return std::make_unique<GridWorld>(std::move(w));
        GridLayout layout = w.layout();
        layout.start.reset();
        return std::make_unique<GridWorld>(w.descriptor().name, layout, w.rewards(), w.slip(),
                                           w.descriptor().horizon_hint);
    }
    if (spec.name == "example") return std::make_unique<GridWorld>(example_grid(spec.random_start.value_or(true)));
    if (spec.name == "office") return std::make_unique<OfficeWorld>(office_make(spec.size, spec.slip));
    if (spec.name == "taxi") return std::make_unique<TaxiWorld>(taxi_make(spec.size, spec.slip));
    if (spec.name == "waterworld") return std::make_unique<WaterWorld>(waterworld_make());
    throw ConfigError({"env.name: unknown environment '" + spec.name + "'"});
}

RunResult run_seed(const ExperimentConfig& config, std::uint64_t seed) {
    auto env = make_environment(config.env);
    Rng rng(seed);
    RunResult r;
    r.seed = seed;
    r.algorithm = config.algorithm;
    if (config.algorithm == Algorithm::dar_rl) {
        LearnResult learned = learn(*env, config.agent, rng);
        r.stats = std::move(learned.stats);
        r.cat = std::move(learned.cat);
    } else {
        r.stats = concrete_q_learn(*env, config.agent, rng).stats;
    }
    return r;
}

std::vector<RunResult> run_all(const ExperimentConfig& config) {
    std::vector<RunResult> runs(config.seeds.size());
    if (config.workers == 1) {
        for (std::size_t i = 0; i < runs.size(); ++i) runs[i] = run_seed(config, config.seeds[i]);
        return runs;
    }
    parallel_for_jobs(runs.size(), config.workers, [&](std::size_t i) { runs[i] = run_seed(config, config.seeds[i]); });
    return runs;
}

ArtifactSet run_experiment(const ExperimentConfig& config) {
    validate(config);
    ArtifactSet set;
    set.root = config.output_dir;
    set.runs = run_all(config);
    fs::create_directories(set.root);
    write_runs(set.root, config.algorithm, set.runs, set.files);
    write_manifest(config, {config.algorithm}, set, json());
    return set;
}

AlgorithmSummary summarize(Algorithm algorithm, const std::vector<RunResult>& runs, double level) {
    AlgorithmSummary s;
    s.algorithm = algorithm;
    s.runs = static_cast<int>(runs.size());
    std::vector<double> reached;
    double total = 0.0;
    for (const RunResult& r : runs) {
        const int e = r.stats.episodes_to_reach(level);
        if (e > 0) reached.push_back(e);
        if (!r.stats.empty()) total += r.stats.moving_success(r.stats.size() - 1);
    }
    s.reached = static_cast<int>(reached.size());
    s.final_mean = runs.empty() ? 0.0 : total / static_cast<double>(runs.size());
    if (!reached.empty()) {
        std::sort(reached.begin(), reached.end());
        const std::size_t n = reached.size();
        s.median_episodes = n % 2 ? reached[n / 2] : 0.5 * (reached[n / 2 - 1] + reached[n / 2]);
    }
    return s;
}

CompareResult run_compare(const ExperimentConfig& config, double level) {
    ExperimentConfig dar = config;
    dar.algorithm = Algorithm::dar_rl;
    ExperimentConfig ql = config;
    ql.algorithm = Algorithm::q_learning;
    validate(dar);
    validate(ql);

    CompareResult result;
    result.level = level;
    ArtifactSet& set = result.artifacts;
    set.root = config.output_dir;
    std::vector<RunResult> dar_runs = run_all(dar);
    std::vector<RunResult> ql_runs = run_all(ql);
    result.dar_rl = summarize(Algorithm::dar_rl, dar_runs, level);
    result.q_learning = summarize(Algorithm::q_learning, ql_runs, level);

    fs::create_directories(set.root);
    write_runs(set.root, Algorithm::dar_rl, dar_runs, set.files);
    write_runs(set.root, Algorithm::q_learning, ql_runs, set.files);

    std::vector<const TrainStats*> d, q;
    for (const auto& r : dar_runs) d.push_back(&r.stats);
    for (const auto& r : ql_runs) q.push_back(&r.stats);
    const auto da = aggregate_rows(d);
    const auto qa = aggregate_rows(q);
    std::string out = "episode,dar_rl_mean,dar_rl_std,q_learning_mean,q_learning_std\n";
    for (std::size_t k = 0; k < std::min(da.size(), qa.size()); ++k) {
        out += std::to_string(k + 1) + ',' + format_number(da[k].mean) + ',' + format_number(da[k].std) + ',' +
               format_number(qa[k].mean) + ',' + format_number(qa[k].std) + '\n';
    }
    write_file(set.root, "compare.csv", out, set.files);

    json summary = {{"level", level}, {"dar_rl", summary_json(result.dar_rl)}, {"q_learning", summary_json(result.q_learning)}};
    write_manifest(config, {Algorithm::dar_rl, Algorithm::q_learning}, set, summary);
    set.runs = std::move(dar_runs);
    set.runs.insert(set.runs.end(), std::make_move_iterator(ql_runs.begin()), std::make_move_iterator(ql_runs.end()));
    return result;
}

std::string metrics_csv(const TrainStats& stats) {
    std::string out = "episode,return,steps,success,moving_success_100,leaf_count,epsilon\n";
    const auto curve = stats.moving_success_curve(100);
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const EpisodeRecord& e = stats.episodes[k];
        out += std::to_string(e.episode);
        out += ',' + format_number(e.ret);
        out += ',' + std::to_string(e.steps);
        out += e.success ? ",1" : ",0";
        out += ',' + format_number(curve[k]);
        out += ',' + std::to_string(e.leaf_count);
        out += ',' + format_number(e.epsilon);
        out += '\n';
    }
    return out;
}

std::string aggregate_csv(const std::vector<const TrainStats*>& runs) {
    std::string out = "episode,runs,mean_moving_success,std_moving_success\n";
    const auto rows = aggregate_rows(runs);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out += std::to_string(k + 1) + ',' + std::to_string(rows[k].runs) + ',' + format_number(rows[k].mean) + ',' +
               format_number(rows[k].std) + '\n';
    }
    return out;
}

}  // namespace darrl
