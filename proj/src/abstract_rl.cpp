#include "darrl/abstract_rl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace darrl {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration:";
    for (const auto& p : problems) {
        out += "\n  - " + p;
    }
    return out;
}

struct Moments {
    std::size_t count = 0;
    double mean = 0.0;
    double sse = 0.0;  // sum of squared deviations from the mean
};

Moments moments(const std::vector<double>& values) {
    Moments m;
    m.count = values.size();
    if (values.empty()) {
        return m;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    for (double v : values) m.sse += (v - m.mean) * (v - m.mean);
    return m;
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::invalid_argument(join_problems(problems)), problems_(problems) {}

ExhaustedLeafError::ExhaustedLeafError(NodeId leaf)
    : std::runtime_error("leaf " + std::to_string(leaf) + " has no splittable variable"), leaf_(leaf) {}

void AgentConfig::validate() const {
    std::vector<std::string> problems;
    auto require = [&](bool ok, const char* what) {
        if (!ok) problems.emplace_back(what);
    };
    require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
    require(epsilon_start >= 0.0 && epsilon_start <= 1.0, "epsilon_start must lie in [0, 1]");
    require(epsilon_decay > 0.0 && epsilon_decay <= 1.0, "epsilon_decay must lie in (0, 1]");
    require(epsilon_min >= 0.0 && epsilon_min <= 1.0, "epsilon_min must lie in [0, 1]");
    require(split_factor >= 2, "split_factor must be at least 2");
    require(n_episodes >= 0, "n_episodes must be non-negative");
    require(n_eval >= 1, "n_eval must be at least 1");
    require(n_check >= 1, "n_check must be at least 1");
    require(success_window >= 1, "success_window must be at least 1");
    require(success_threshold >= 0.0 && success_threshold <= 1.0, "success_threshold must lie in [0, 1]");
    require(min_samples >= 1, "min_samples must be at least 1");
    require(horizon >= 0, "horizon must be non-negative");
    require(!eval_alpha || (*eval_alpha >= 0.0 && *eval_alpha <= 1.0), "eval_alpha must lie in [0, 1]");
    require(min_real_width > 0.0, "min_real_width must be positive");
    if (!problems.empty()) {
        throw ConfigError(problems);
    }
}

double AgentConfig::epsilon_at(int episode) const {
    return std::max(epsilon_min, epsilon_start * std::pow(epsilon_decay, episode - 1));
}

// ---------------------------------------------------------------------------

AbstractQTable::AbstractQTable(std::size_t num_actions, std::size_t num_nodes) : num_actions_(num_actions) {
    if (num_actions == 0) {
        throw std::invalid_argument("Q-table needs at least one action");
    }
    values_.assign(num_actions * num_nodes, 0.0);
}

void AbstractQTable::resize(std::size_t num_nodes) {
    if (num_nodes * num_actions_ > values_.size()) {
        values_.resize(num_nodes * num_actions_, 0.0);
    }
}

std::size_t AbstractQTable::index(NodeId node, ActionId a) const {
    if (a < 0 || static_cast<std::size_t>(a) >= num_actions_) {
        throw std::out_of_range("action id out of range");
    }
    const std::size_t i = node * num_actions_ + static_cast<std::size_t>(a);
    if (i >= values_.size()) {
        throw std::out_of_range("no Q row for node " + std::to_string(node));
    }
    return i;
}

double AbstractQTable::get(NodeId node, ActionId a) const { return values_[index(node, a)]; }

void AbstractQTable::set(NodeId node, ActionId a, double value) { values_[index(node, a)] = value; }

double AbstractQTable::max(NodeId node) const { return get(node, argmax(node)); }

ActionId AbstractQTable::argmax(NodeId node) const {
    const std::size_t base = index(node, 0);
    ActionId best = 0;
    for (std::size_t a = 1; a < num_actions_; ++a) {
        if (values_[base + a] > values_[base + static_cast<std::size_t>(best)]) {
            best = static_cast<ActionId>(a);
        }
    }
    return best;
}

std::vector<double> AbstractQTable::row(NodeId node) const {
    const std::size_t base = index(node, 0);
    return {values_.begin() + static_cast<std::ptrdiff_t>(base),
            values_.begin() + static_cast<std::ptrdiff_t>(base + num_actions_)};
}

void AbstractQTable::copy_row(NodeId from, NodeId to) {
    const std::size_t src = index(from, 0);
    const std::size_t dst = index(to, 0);
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(src), num_actions_,
                values_.begin() + static_cast<std::ptrdiff_t>(dst));
}

// ---------------------------------------------------------------------------

ActionId select_action(const AbstractQTable& q, NodeId leaf, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && uniform01(rng) < epsilon) {
        return static_cast<ActionId>(uniform_index(rng, q.num_actions()));
    }
    return q.argmax(leaf);
}

ExtendedStepResult extended_step(Environment& env, const Cat& cat, const State& state, ActionId action,
                                 double gamma, int max_steps, Rng& rng) {
    if (max_steps < 1) {
        throw std::invalid_argument("extended_step needs at least one step of budget");
    }
    const NodeId start_leaf = cat.find_abstract(state);
    ExtendedStepResult out;
    out.next_state = state;
    out.next_leaf = start_leaf;
    double discount = 1.0;
    while (out.k < max_steps) {
        StepResult r = env.step(action, rng);
        out.r_bar += discount * r.reward;
        discount *= gamma;
        ++out.k;
        const bool blocked = r.next_state == out.next_state;
        out.next_state = std::move(r.next_state);
        out.next_leaf = cat.find_abstract(out.next_state);
        if (r.done) {
            out.done = true;
            out.success = r.success;
            break;
        }
        if (blocked || out.next_leaf != start_leaf) {
            break;
        }
    }
    return out;
}

void q_update(AbstractQTable& q, NodeId leaf, ActionId action, double r_bar, int k, NodeId next_leaf,
              bool done, double alpha, double gamma) {
    double target = r_bar;
    if (!done) {
        target += std::pow(gamma, k) * q.max(next_leaf);
    }
    q.set(leaf, action, (1.0 - alpha) * q.get(leaf, action) + alpha * target);
}

EpisodeRecord train_episode(Environment& env, const Cat& cat, AbstractQTable& q, const AgentConfig& config,
                            double epsilon, Rng& rng) {
    EpisodeRecord rec;
    rec.epsilon = epsilon;
    rec.leaf_count = cat.leaf_count();
    if (config.horizon <= 0) {
        return rec;
    }
    State s = env.reset(rng);
    double discount = 1.0;
    int t = 0;
    while (t < config.horizon) {
        const NodeId leaf = cat.find_abstract(s);
        const ActionId a = select_action(q, leaf, epsilon, rng);
        ExtendedStepResult ext = extended_step(env, cat, s, a, config.gamma, config.horizon - t, rng);
        q_update(q, leaf, a, ext.r_bar, ext.k, ext.next_leaf, ext.done, config.alpha, config.gamma);
        rec.ret += discount * ext.r_bar;
        discount *= std::pow(config.gamma, ext.k);
        t += ext.k;
        s = std::move(ext.next_state);
        if (ext.done) {
            rec.success = ext.success;
            break;
        }
    }
    rec.steps = t;
    return rec;
}

bool needs_refinement(const TrainStats& stats, const AgentConfig& config) {
    if (stats.empty()) {
        return false;
    }
    const int episode = stats.episodes.back().episode;
    if (episode <= 0 || episode % config.n_check != 0) {
        return false;
    }
    const double recent = stats.moving_success(stats.size() - 1, static_cast<std::size_t>(config.success_window));
    return recent < config.success_threshold;
}

DispersionLog evaluate(Environment& env, const Cat& cat, const AbstractQTable& q, const AgentConfig& config,
                       Rng& rng) {
    DispersionLog log;
    AbstractQTable scratch = q;
    const double alpha = config.evaluation_alpha();
    for (int e = 1; e <= config.n_eval; ++e) {
        if (config.horizon <= 0) {
            continue;
        }
        State s = env.reset(rng);
        int t = 0;
        while (t < config.horizon) {
            const NodeId leaf = cat.find_abstract(s);
            const ActionId a = q.argmax(leaf);
            ExtendedStepResult ext = extended_step(env, cat, s, a, config.gamma, config.horizon - t, rng);
            q_update(scratch, leaf, a, ext.r_bar, ext.k, ext.next_leaf, ext.done, alpha, config.gamma);
            log.samples.push_back({e, t, leaf, a, scratch.get(leaf, a), s});
            t += ext.k;
            s = std::move(ext.next_state);
            if (ext.done) {
                break;
            }
        }
    }
    return log;
}

std::vector<PairDispersion> pair_dispersion(const DispersionLog& log, const AgentConfig& config) {
    std::map<std::pair<NodeId, ActionId>, std::vector<double>> groups;
    for (const auto& s : log.samples) {
        groups[{s.leaf, s.action}].push_back(s.q_value);
    }
    std::vector<PairDispersion> out;
    double max_std = 0.0;
    for (const auto& [key, values] : groups) {
        if (values.size() < static_cast<std::size_t>(config.min_samples)) {
            continue;
        }
        const Moments m = moments(values);
        PairDispersion d;
        d.leaf = key.first;
        d.action = key.second;
        d.count = m.count;
        d.mean = m.mean;
        d.std = std::sqrt(m.sse / static_cast<double>(m.count));
        max_std = std::max(max_std, d.std);
        out.push_back(d);
    }
    for (auto& d : out) {
        d.normalized = max_std > 0.0 ? d.std / max_std : 0.0;
    }
    return out;
}

std::map<NodeId, double> leaf_scores(const DispersionLog& log, const AgentConfig& config) {
    std::map<NodeId, double> scores;
    for (const auto& d : pair_dispersion(log, config)) {
        auto [it, inserted] = scores.emplace(d.leaf, d.normalized);
        if (!inserted) {
            it->second = std::max(it->second, d.normalized);
        }
    }
    return scores;
}

std::vector<NodeId> two_means_high_cluster(const std::map<NodeId, double>& scores) {
    if (scores.size() < 2) {
        return {};
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& [leaf, s] : scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (lo == hi) {
        return {};
    }
    std::map<NodeId, bool> high;
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        double sum_lo = 0.0, sum_hi = 0.0;
        int n_lo = 0, n_hi = 0;
        for (const auto& [leaf, s] : scores) {
            const bool h = std::abs(s - hi) < std::abs(s - lo);
            auto [it, inserted] = high.emplace(leaf, h);
            if (!inserted && it->second != h) {
                it->second = h;
                changed = true;
            }
            changed = changed || inserted;
            (h ? sum_hi : sum_lo) += s;
            (h ? n_hi : n_lo) += 1;
        }
        if (n_lo > 0) lo = sum_lo / n_lo;
        if (n_hi > 0) hi = sum_hi / n_hi;
        if (!changed) {
            break;
        }
    }
    std::vector<NodeId> out;
    for (const auto& [leaf, h] : high) {
        if (h) out.push_back(leaf);
    }
    return out;
}

std::vector<NodeId> unstable_states(const DispersionLog& log, const AgentConfig& config) {
    const auto pairs = pair_dispersion(log, config);
    const auto scores = leaf_scores(log, config);
    // A lone scored leaf cannot be clustered; it is unstable if its values
    // move at all, otherwise the initial one-leaf tree could never be refined.
    if (scores.size() == 1) {
        const bool disperses = std::any_of(pairs.begin(), pairs.end(), [](const auto& d) { return d.std > 0.0; });
        return disperses ? std::vector<NodeId>{scores.begin()->first} : std::vector<NodeId>{};
    }
    return two_means_high_cluster(scores);
}

std::size_t unstable_var(const DispersionLog& log, NodeId leaf, const Cat& cat, const AgentConfig& config) {
    const Abstraction& theta = cat.node(leaf).abstraction;
    std::vector<const DispersionSample*> mine;
    for (const auto& s : log.samples) {
        if (s.leaf == leaf) mine.push_back(&s);
    }
    std::optional<std::size_t> best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!splittable(theta, i, config.split_factor, cat.limits())) {
            continue;
        }
        const auto parts = f_split(theta, i, config.split_factor, cat.limits());
        std::map<std::pair<ActionId, std::size_t>, std::vector<double>> buckets;
        for (const DispersionSample* s : mine) {
            std::size_t child = 0;
            while (child + 1 < parts.size() && !parts[child][i].contains(s->concrete_state[i])) {
                ++child;
            }
            buckets[{s->action, child}].push_back(s->q_value);
        }
        double sse = 0.0;
        for (const auto& [key, values] : buckets) {
            sse += moments(values).sse;
        }
        if (!best || sse < best_sse - 1e-12 * (1.0 + std::abs(best_sse))) {
            best = i;
            best_sse = sse;
        }
    }
    if (!best) {
        throw ExhaustedLeafError(leaf);
    }
    return *best;
}

// ---------------------------------------------------------------------------

LearnResult learn(Environment& env, const AgentConfig& config, Rng& rng, const LearnHooks& hooks) {
    config.validate();
    const EnvDescriptor& desc = env.descriptor();
    LearnResult result{make_cat(desc.variables, SplitLimits{config.min_real_width}),
                       AbstractQTable(env.num_actions()), TrainStats{}, 0};
    Cat& cat = result.cat;
    AbstractQTable& q = result.q;
    for (int episode = 1; episode <= config.n_episodes; ++episode) {
        EpisodeRecord rec = train_episode(env, cat, q, config, config.epsilon_at(episode), rng);
        rec.episode = episode;
        result.stats.episodes.push_back(rec);
        if (!needs_refinement(result.stats, config)) {
            continue;
        }
        const DispersionLog log = evaluate(env, cat, q, config, rng);
        const std::vector<NodeId> unstable = unstable_states(log, config);
        if (unstable.empty()) {
            continue;
        }
        std::optional<Cat> before;
        if (hooks.on_refinement) {
            before = cat;
        }
        RefinementEvent event;
        for (NodeId leaf : unstable) {
            std::size_t var = 0;
            try {
                var = unstable_var(log, leaf, cat, config);
            } catch (const ExhaustedLeafError&) {
                continue;
            }
            auto children = cat.refine_leaf(leaf, var, config.split_factor);
            q.resize(cat.size());
            for (NodeId c : children) {
                q.copy_row(leaf, c);
            }
            event.splits.emplace_back(leaf, std::move(children));
        }
        if (event.splits.empty()) {
            continue;
        }
        ++result.refinement_rounds;
        if (hooks.on_refinement) {
            event.episode = episode;
            event.before = &*before;
            event.after = &cat;
            event.q = &q;
            hooks.on_refinement(event);
        }
    }
    return result;
}

ActionId greedy_action(const Cat& cat, const AbstractQTable& q, const State& state) {
    return q.argmax(cat.find_abstract(state));
}

}  // namespace darrl
