#pragma once

// Q-learning over the leaves of a conditional abstraction tree, interleaved
// with fixed-policy evaluation phases that log Q-value dispersion, and
// refinement of the leaves whose values disperse the most.

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "darrl/cat.hpp"
#include "darrl/environment.hpp"
#include "darrl/stats.hpp"

namespace darrl {

/// Raised by config validation; the message lists every problem found.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::vector<std::string>& problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// No variable of the leaf can be split any further.
class ExhaustedLeafError : public std::runtime_error {
public:
    explicit ExhaustedLeafError(NodeId leaf);
    NodeId leaf() const { return leaf_; }

private:
    NodeId leaf_;
};

struct AgentConfig {
    double alpha = 0.05;
    double gamma = 0.95;
    double epsilon_start = 0.95;
    double epsilon_decay = 0.99;  // multiplicative, once per episode
    double epsilon_min = 0.05;
    int split_factor = 2;
    int n_episodes = 1000;
    int n_eval = 10;     // evaluation episodes per refinement check
    int n_check = 50;    // episodes between refinement checks
    int success_window = 100;
    double success_threshold = 0.6;
    int min_samples = 5;  // per (leaf, action) pair before it is scored
    int horizon = 100;    // concrete steps per episode
    /// Learning rate of the scratch table during evaluation; unset means alpha.
    std::optional<double> eval_alpha;
    double min_real_width = 1.0;

    double evaluation_alpha() const { return eval_alpha.value_or(alpha); }
    /// Throws ConfigError listing every violated constraint.
    void validate() const;
    /// Epsilon used in 1-based episode `episode`.
    double epsilon_at(int episode) const;
};

/// Q-values keyed by (node id, action). Rows exist for every node ever
/// created; unseen pairs read as 0.
class AbstractQTable {
public:
    explicit AbstractQTable(std::size_t num_actions, std::size_t num_nodes = 1);

    std::size_t num_actions() const { return num_actions_; }
    std::size_t num_nodes() const { return values_.size() / num_actions_; }
    void resize(std::size_t num_nodes);

    double get(NodeId node, ActionId a) const;
    void set(NodeId node, ActionId a, double value);
    double max(NodeId node) const;
    /// Greedy action, lowest id on ties.
    ActionId argmax(NodeId node) const;
    std::vector<double> row(NodeId node) const;
    void copy_row(NodeId from, NodeId to);

    bool operator==(const AbstractQTable&) const = default;

private:
    std::size_t index(NodeId node, ActionId a) const;

    std::size_t num_actions_;
    std::vector<double> values_;
};

/// Epsilon-greedy: uniform action with probability epsilon, else greedy with
/// lowest-id tie-break.
ActionId select_action(const AbstractQTable& q, NodeId leaf, double epsilon, Rng& rng);

struct ExtendedStepResult {
    State next_state;
    NodeId next_leaf = 0;
    double r_bar = 0.0;  // sum of gamma^t r_t over the k concrete steps
    int k = 0;
    bool done = false;
    bool success = false;
};

/// Repeats `action` from `state` (the environment's current state) until the
/// leaf changes, a terminal state is reached, a step leaves the state
/// unchanged, or `max_steps` concrete steps have been taken.
ExtendedStepResult extended_step(Environment& env, const Cat& cat, const State& state, ActionId action,
                                 double gamma, int max_steps, Rng& rng);

/// Q(leaf,a) <- (1-alpha) Q(leaf,a) + alpha [r_bar + gamma^k max_a' Q(next,a')],
/// with no bootstrap term when `done`.
void q_update(AbstractQTable& q, NodeId leaf, ActionId action, double r_bar, int k, NodeId next_leaf,
              bool done, double alpha, double gamma);

/// One training episode of abstract epsilon-greedy Q-learning.
EpisodeRecord train_episode(Environment& env, const Cat& cat, AbstractQTable& q, const AgentConfig& config,
                            double epsilon, Rng& rng);

/// True on every n_check-th episode when recent success is below threshold.
bool needs_refinement(const TrainStats& stats, const AgentConfig& config);

struct DispersionSample {
    int episode = 0;  // 1-based evaluation episode
    int step = 0;     // concrete step at decision time
    NodeId leaf = 0;
    ActionId action = 0;
    double q_value = 0.0;  // scratch Q(leaf, action) right after its update
    State concrete_state;  // state at decision time
};

struct DispersionLog {
    std::vector<DispersionSample> samples;
};

/// Runs n_eval episodes with the greedy policy of `q` frozen. TD updates go
/// to a scratch copy of `q`; each update logs one sample.
DispersionLog evaluate(Environment& env, const Cat& cat, const AbstractQTable& q, const AgentConfig& config,
                       Rng& rng);

struct PairDispersion {
    NodeId leaf = 0;
    ActionId action = 0;
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;         // population standard deviation
    double normalized = 0.0;  // std / max std over all scored pairs
};

/// Dispersion of every (leaf, action) pair with at least min_samples samples,
/// ordered by (leaf, action).
std::vector<PairDispersion> pair_dispersion(const DispersionLog& log, const AgentConfig& config);

/// Leaf score: the largest normalized std over the leaf's scored pairs.
std::map<NodeId, double> leaf_scores(const DispersionLog& log, const AgentConfig& config);

/// One-dimensional 2-means seeded at the minimum and maximum score. Returns
/// the members of the high cluster; empty when fewer than two scores exist or
/// all scores are equal.
std::vector<NodeId> two_means_high_cluster(const std::map<NodeId, double>& scores);

/// Leaves whose Q-values disperse significantly more than the rest. A single
/// scored leaf is unstable when any of its pairs has nonzero dispersion.
std::vector<NodeId> unstable_states(const DispersionLog& log, const AgentConfig& config);

/// Variable to blame for `leaf`'s dispersion: the splittable variable whose
/// tentative f-split leaves the least within-child variance of the leaf's
/// logged values, grouping samples per action. Throws ExhaustedLeafError when
/// no variable can be split.
std::size_t unstable_var(const DispersionLog& log, NodeId leaf, const Cat& cat, const AgentConfig& config);

struct RefinementEvent {
    int episode = 0;
    const Cat* before = nullptr;
    const Cat* after = nullptr;
    const AbstractQTable* q = nullptr;
    std::vector<std::pair<NodeId, std::vector<NodeId>>> splits;  // parent -> new children
};

struct LearnHooks {
    std::function<void(const RefinementEvent&)> on_refinement;
};

struct LearnResult {
    Cat cat;
    AbstractQTable q;
    TrainStats stats;
    int refinement_rounds = 0;
};

/// Full learn-evaluate-refine loop for config.n_episodes episodes.
LearnResult learn(Environment& env, const AgentConfig& config, Rng& rng, const LearnHooks& hooks = {});

/// Greedy action of the learned abstract policy at a concrete state.
ActionId greedy_action(const Cat& cat, const AbstractQTable& q, const State& state);

}  // namespace darrl
