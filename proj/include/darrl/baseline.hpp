#pragma once

#include <stdexcept>
#include <vector>

#include "darrl/abstract_rl.hpp"
#include "darrl/environment.hpp"
#include "darrl/stats.hpp"

namespace darrl {

class UnsupportedEnvironmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Q-values over concrete states of a discrete environment. States are mapped
/// to a dense mixed-radix index over the integer variable ranges; unseen
/// pairs read as 0.
class ConcreteQTable {
public:
    ConcreteQTable(const std::vector<VariableSpec>& variables, std::size_t num_actions);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    std::size_t index_of(const State& state) const;

    double get(const State& state, ActionId a) const { return values_[index_of(state) * num_actions_ + a]; }
    void set(const State& state, ActionId a, double v) { values_[index_of(state) * num_actions_ + a] = v; }
    double max(const State& state) const;
    ActionId argmax(const State& state) const;

private:
    std::vector<VariableSpec> variables_;
    std::vector<std::size_t> strides_;
    std::size_t num_states_ = 1;
    std::size_t num_actions_;
    std::vector<double> values_;
};

struct BaselineResult {
    TrainStats stats;
    ConcreteQTable q;
};

/// Tabular one-step epsilon-greedy Q-learning on concrete states, sharing the
/// episode, horizon, learning-rate and exploration schedule of AgentConfig.
/// Throws UnsupportedEnvironmentError for continuous state variables.
BaselineResult concrete_q_learn(Environment& env, const AgentConfig& config, Rng& rng);

}  // namespace darrl
