#include "darrl/baseline.hpp"

#include <cmath>

namespace darrl {

ConcreteQTable::ConcreteQTable(const std::vector<VariableSpec>& variables, std::size_t num_actions)
    : variables_(variables), num_actions_(num_actions) {
    if (num_actions == 0) {
        throw std::invalid_argument("Q-table needs at least one action");
    }
    strides_.resize(variables_.size());
    for (std::size_t i = variables_.size(); i-- > 0;) {
        const VariableSpec& v = variables_[i];
        if (v.kind != VarKind::integer) {
            throw UnsupportedEnvironmentError("tabular Q-learning needs discrete state variables; '" + v.name +
                                              "' is real-valued");
        }
        v.validate();
        strides_[i] = num_states_;
        num_states_ *= static_cast<std::size_t>(v.hi - v.lo + 1.0);
    }
    values_.assign(num_states_ * num_actions_, 0.0);
}

std::size_t ConcreteQTable::index_of(const State& state) const {
    if (state.size() != variables_.size()) {
        throw std::invalid_argument("state dimensionality mismatch");
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const VariableSpec& v = variables_[i];
        if (!(state[i] >= v.lo && state[i] <= v.hi)) {
            throw std::out_of_range("state component '" + v.name + "' out of range");
        }
        idx += static_cast<std::size_t>(state[i] - v.lo) * strides_[i];
    }
    return idx;
}

double ConcreteQTable::max(const State& state) const { return get(state, argmax(state)); }

ActionId ConcreteQTable::argmax(const State& state) const {
    const std::size_t base = index_of(state) * num_actions_;
    std::size_t best = 0;
    for (std::size_t a = 1; a < num_actions_; ++a) {
        if (values_[base + a] > values_[base + best]) {
            best = a;
        }
    }
    return static_cast<ActionId>(best);
}

BaselineResult concrete_q_learn(Environment& env, const AgentConfig& config, Rng& rng) {
    config.validate();
    const EnvDescriptor& desc = env.descriptor();
    if (!desc.discrete()) {
        throw UnsupportedEnvironmentError("tabular Q-learning does not support continuous environment '" +
                                          desc.name + "'");
    }
    BaselineResult result{TrainStats{}, ConcreteQTable(desc.variables, env.num_actions())};
    ConcreteQTable& q = result.q;
    const std::size_t num_actions = env.num_actions();
    for (int episode = 1; episode <= config.n_episodes; ++episode) {
        EpisodeRecord rec;
        rec.episode = episode;
        rec.epsilon = config.epsilon_at(episode);
        rec.leaf_count = q.num_states();
        if (config.horizon > 0) {
            State s = env.reset(rng);
            double discount = 1.0;
            int t = 0;
            while (t < config.horizon) {
                ActionId a = 0;
                if (rec.epsilon > 0.0 && uniform01(rng) < rec.epsilon) {
                    a = static_cast<ActionId>(uniform_index(rng, num_actions));
                } else {
                    a = q.argmax(s);
                }
                StepResult r = env.step(a, rng);
                const double target = r.reward + (r.done ? 0.0 : config.gamma * q.max(r.next_state));
                q.set(s, a, (1.0 - config.alpha) * q.get(s, a) + config.alpha * target);
                rec.ret += discount * r.reward;
                discount *= config.gamma;
                ++t;
                s = std::move(r.next_state);
                if (r.done) {
                    rec.success = r.success;
                    break;
                }
            }
            rec.steps = t;
        }
        result.stats.episodes.push_back(rec);
    }
    return result;
}

}  // namespace darrl
