#pragma once

// Benchmark simulators: grid worlds with pits (Wumpus), the four-room
// Office, single-passenger Taxi and the continuous Water World.
//
// Grid coordinates are 1-based, x grows east and y grows south, so (1, 1) is
// the north-west corner. Moves succeed with probability 1 - 2 * slip and
// otherwise veer to one of the two perpendicular directions.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "darrl/environment.hpp"

namespace darrl {

enum Move : ActionId { east = 0, west = 1, north = 2, south = 3 };

struct Cell2 {
    int x = 1;
    int y = 1;
    bool operator==(const Cell2&) const = default;
};

/// Destination of `move` from `from`, ignoring walls.
Cell2 shifted(Cell2 from, ActionId move);

/// Intended move plus the two perpendicular slips, with their probabilities.
std::array<std::pair<ActionId, double>, 3> slip_outcomes(ActionId move, double slip);

/// Samples the executed move for an intended one.
ActionId sample_move(ActionId move, double slip, Rng& rng);

// ---------------------------------------------------------------------------
// Grid world with obstacles, pits and a goal.

enum class Terrain : std::uint8_t { free, obstacle, pit, goal };

struct GridRewards {
    double step = -1.0;
    double bump = -2.0;
    double pit = -1000.0;
    double goal = 500.0;
};

struct GridLayout {
    int width = 0;
    int height = 0;
    std::vector<Terrain> cells;  // row-major, index (y - 1) * width + (x - 1)
    /// Fixed start cell; when empty every episode starts on a uniformly drawn
    /// free cell.
    std::optional<Cell2> start;

    Terrain at(Cell2 c) const { return cells[static_cast<std::size_t>((c.y - 1) * width + (c.x - 1))]; }
    Terrain& at(Cell2 c) { return cells[static_cast<std::size_t>((c.y - 1) * width + (c.x - 1))]; }
    bool inside(Cell2 c) const { return c.x >= 1 && c.x <= width && c.y >= 1 && c.y <= height; }
    /// Open cells reachable from `from` without crossing obstacles or pits.
    bool reachable(Cell2 from, Cell2 to) const;
};

class GridWorld final : public Environment, public TabularModel {
public:
    GridWorld(std::string name, GridLayout layout, GridRewards rewards, double slip, int horizon_hint);

    const EnvDescriptor& descriptor() const override { return descriptor_; }
    State reset(Rng& rng) override;
    StepResult step(ActionId action, Rng& rng) override;
    const State& state() const override { return state_; }
    std::unique_ptr<Environment> clone() const override { return std::make_unique<GridWorld>(*this); }

    std::vector<State> nonterminal_states() const override;
    std::vector<Transition> transitions(const State& state, ActionId action) const override;

    const GridLayout& layout() const { return layout_; }
    const GridRewards& rewards() const { return rewards_; }
    double slip() const { return slip_; }
    void place(Cell2 cell);

private:
    StepResult apply(Cell2 from, ActionId executed) const;

    EnvDescriptor descriptor_;
    GridLayout layout_;
    GridRewards rewards_;
    double slip_;
    std::vector<Cell2> start_cells_;
    State state_;
};

/// Seeded Wumpus layout: 8% obstacles and 4% pits, start in the north-west
/// corner, goal in the south-east corner, regenerated until the goal is
/// reachable. Rewards: -1 per step, -2 on a bump, -1000 in a pit, +500 at the
/// goal.
GridWorld wumpus_make(int size, std::uint64_t layout_seed, double slip);

/// The 4x4 example world: pit at (2,2), goal at (4,4), deterministic moves,
/// -1 per move, -10 in the pit, +10 at the goal. Episodes start on a random
/// free cell, or at (1,1) when `random_start` is false.
GridWorld example_grid(bool random_start = true);

// ---------------------------------------------------------------------------

/// Four rooms A (north-west), B (north-east), C (south-west), D (south-east)
/// separated by walls with one doorway at the middle of each wall segment.
/// Coffee sits at the centre of A, mail at the centre of B, the office at the
/// centre of D; the agent starts at the centre of C.
class OfficeWorld final : public Environment {
public:
    OfficeWorld(int size, double slip);

    const EnvDescriptor& descriptor() const override { return descriptor_; }
    State reset(Rng& rng) override;
    StepResult step(ActionId action, Rng& rng) override;
    const State& state() const override { return state_; }
    std::unique_ptr<Environment> clone() const override { return std::make_unique<OfficeWorld>(*this); }

    int size() const { return size_; }
    Cell2 coffee() const { return coffee_; }
    Cell2 mail() const { return mail_; }
    Cell2 office() const { return office_; }
    Cell2 start() const { return start_; }
    /// True when a wall separates `from` from its neighbour in direction `move`.
    bool blocked(Cell2 from, ActionId move) const;
    void place(const State& state);

    static constexpr double completion_reward = 1000.0;

private:
    int size_;
    double slip_;
    Cell2 coffee_, mail_, office_, start_;
    int door_offset_;
    EnvDescriptor descriptor_;
    State state_;
};

OfficeWorld office_make(int size, double slip = 0.1);

// ---------------------------------------------------------------------------

/// Single passenger taxi. Pick-up and drop-off sites are the four corners:
/// 0 = north-west, 1 = north-east, 2 = south-west, 3 = south-east. Passenger
/// location 4 means "in the taxi".
class TaxiWorld final : public Environment {
public:
    enum Action : ActionId { pickup = 4, dropoff = 5 };

    TaxiWorld(int size, double slip);

    const EnvDescriptor& descriptor() const override { return descriptor_; }
    State reset(Rng& rng) override;
    StepResult step(ActionId action, Rng& rng) override;
    const State& state() const override { return state_; }
    std::unique_ptr<Environment> clone() const override { return std::make_unique<TaxiWorld>(*this); }

    Cell2 site(int index) const;
    void place(const State& state);

    static constexpr double move_reward = -1.0;
    static constexpr double illegal_reward = -100.0;
    static constexpr double delivery_reward = 500.0;

private:
    int size_;
    double slip_;
    EnvDescriptor descriptor_;
    State state_;
};

TaxiWorld taxi_make(int size, double slip = 0.1);

// ---------------------------------------------------------------------------

struct WaterWorldParams {
    double box = 300.0;
    double radius = 10.0;
    double ball_speed = 4.0;
    double agent_speed = 6.0;
};

/// Agent, green ball and red ball in a square box. Balls drift at constant
/// speed and bounce elastically off the walls; the agent moves in the chosen
/// cardinal direction and is clamped to the box. Touching the green ball ends
/// the episode with +1000, the red ball with -1000. Ball velocities are hidden.
class WaterWorld final : public Environment {
public:
    explicit WaterWorld(WaterWorldParams params = {});

    const EnvDescriptor& descriptor() const override { return descriptor_; }
    State reset(Rng& rng) override;
    StepResult step(ActionId action, Rng& rng) override;
    const State& state() const override { return state_; }
    std::unique_ptr<Environment> clone() const override { return std::make_unique<WaterWorld>(*this); }

    const WaterWorldParams& params() const { return params_; }
    /// Sets positions (agent, green, red) and ball velocities directly.
    void place(const State& state, std::array<double, 2> green_velocity, std::array<double, 2> red_velocity);
    std::array<double, 2> green_velocity() const { return green_v_; }
    std::array<double, 2> red_velocity() const { return red_v_; }

    static constexpr double green_reward = 1000.0;
    static constexpr double red_reward = -1000.0;

private:
    void move_ball(double& x, double& y, std::array<double, 2>& v) const;

    WaterWorldParams params_;
    EnvDescriptor descriptor_;
    State state_;
    std::array<double, 2> green_v_{};
    std::array<double, 2> red_v_{};
};

WaterWorld waterworld_make();

}  // namespace darrl
