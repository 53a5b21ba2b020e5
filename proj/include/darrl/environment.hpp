#pragma once

#include <memory>
#include <string>
#include <vector>

#include "darrl/cat.hpp"
#include "darrl/rng.hpp"

namespace darrl {

using ActionId = int;

struct EnvDescriptor {
    std::string name;
    std::vector<VariableSpec> variables;
    std::vector<std::string> actions;
    int horizon_hint = 100;

    bool discrete() const;
};

struct StepResult {
    State next_state;
    double reward = 0.0;
    bool done = false;
    /// Goal termination, as opposed to a pit, a collision or a timeout.
    bool success = false;
};

/// A seeded factored-state simulator. The environment holds the current
/// concrete state; randomness comes from the caller's engine so a run stays
/// reproducible from one seed.
class Environment {
public:
    virtual ~Environment() = default;

    virtual const EnvDescriptor& descriptor() const = 0;
    virtual State reset(Rng& rng) = 0;
    virtual StepResult step(ActionId action, Rng& rng) = 0;
    virtual const State& state() const = 0;
    virtual std::unique_ptr<Environment> clone() const = 0;

    std::size_t num_actions() const { return descriptor().actions.size(); }
};

/// One possible outcome of a (state, action) pair.
struct Transition {
    double probability = 0.0;
    StepResult result;
};

/// Exact dynamics for small discrete environments; used by planning oracles.
class TabularModel {
public:
    virtual ~TabularModel() = default;

    /// Every state the agent can occupy before termination.
    virtual std::vector<State> nonterminal_states() const = 0;
    virtual std::vector<Transition> transitions(const State& state, ActionId action) const = 0;
};

}  // namespace darrl
