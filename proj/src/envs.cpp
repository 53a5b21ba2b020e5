#include "darrl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace darrl {

namespace {

const std::vector<std::string> kMoveNames = {"E", "W", "N", "S"};

std::vector<VariableSpec> grid_vars(int width, int height) {
    return {{"x", VarKind::integer, 1.0, static_cast<double>(width)},
            {"y", VarKind::integer, 1.0, static_cast<double>(height)}};
}

Cell2 cell_of(const State& s) { return {static_cast<int>(s[0]), static_cast<int>(s[1])}; }

void check_slip(double slip) {
    if (!(slip >= 0.0 && slip < 0.5)) {
        throw std::invalid_argument("slip probability must lie in [0, 0.5)");
    }
}

}  // namespace

bool EnvDescriptor::discrete() const {
    return std::all_of(variables.begin(), variables.end(),
                       [](const VariableSpec& v) { return v.kind == VarKind::integer; });
}

Cell2 shifted(Cell2 from, ActionId move) {
    switch (move) {
        case east: return {from.x + 1, from.y};
        case west: return {from.x - 1, from.y};
        case north: return {from.x, from.y - 1};
        case south: return {from.x, from.y + 1};
        default: throw std::invalid_argument("not a move action: " + std::to_string(move));
    }
}

std::array<std::pair<ActionId, double>, 3> slip_outcomes(ActionId move, double slip) {
    const bool horizontal = move == east || move == west;
    const ActionId left = horizontal ? north : east;
    const ActionId right = horizontal ? south : west;
    return {{{move, 1.0 - 2.0 * slip}, {left, slip}, {right, slip}}};
}

ActionId sample_move(ActionId move, double slip, Rng& rng) {
    if (slip <= 0.0) {
        return move;
    }
    const auto outcomes = slip_outcomes(move, slip);
    const double u = uniform01(rng);
    if (u < slip) return outcomes[1].first;
    if (u < 2.0 * slip) return outcomes[2].first;
    return move;
}

// ---------------------------------------------------------------------------

bool GridLayout::reachable(Cell2 from, Cell2 to) const {
    std::vector<char> seen(cells.size(), 0);
    std::deque<Cell2> frontier{from};
    seen[static_cast<std::size_t>((from.y - 1) * width + (from.x - 1))] = 1;
    while (!frontier.empty()) {
        const Cell2 c = frontier.front();
        frontier.pop_front();
        if (c == to) {
            return true;
        }
        for (ActionId m : {east, west, north, south}) {
            const Cell2 n = shifted(c, m);
            if (!inside(n)) continue;
            const auto idx = static_cast<std::size_t>((n.y - 1) * width + (n.x - 1));
            if (seen[idx] || at(n) == Terrain::obstacle || at(n) == Terrain::pit) continue;
            seen[idx] = 1;
            frontier.push_back(n);
        }
    }
    return false;
}

GridWorld::GridWorld(std::string name, GridLayout layout, GridRewards rewards, double slip, int horizon_hint)
    : layout_(std::move(layout)), rewards_(rewards), slip_(slip) {
    check_slip(slip);
    if (layout_.width < 1 || layout_.height < 1 ||
        layout_.cells.size() != static_cast<std::size_t>(layout_.width * layout_.height)) {
        throw std::invalid_argument("grid layout dimensions do not match its cell list");
    }
    for (int y = 1; y <= layout_.height; ++y) {
        for (int x = 1; x <= layout_.width; ++x) {
            if (layout_.at({x, y}) == Terrain::free) start_cells_.push_back({x, y});
        }
    }
    if (layout_.start) {
        if (!layout_.inside(*layout_.start) || layout_.at(*layout_.start) != Terrain::free) {
            throw std::invalid_argument("start cell must be a free cell inside the grid");
        }
    } else if (start_cells_.empty()) {
        throw std::invalid_argument("grid has no free cell to start from");
    }
    descriptor_.name = std::move(name);
    descriptor_.variables = grid_vars(layout_.width, layout_.height);
    descriptor_.actions = kMoveNames;
    descriptor_.horizon_hint = horizon_hint;
    const Cell2 s = layout_.start ? *layout_.start : start_cells_.front();
    state_ = {static_cast<double>(s.x), static_cast<double>(s.y)};
}

State GridWorld::reset(Rng& rng) {
    const Cell2 s = layout_.start ? *layout_.start : start_cells_[uniform_index(rng, start_cells_.size())];
    state_ = {static_cast<double>(s.x), static_cast<double>(s.y)};
    return state_;
}

void GridWorld::place(Cell2 cell) {
    if (!layout_.inside(cell) || layout_.at(cell) == Terrain::obstacle) {
        throw std::invalid_argument("cannot place the agent there");
    }
    state_ = {static_cast<double>(cell.x), static_cast<double>(cell.y)};
}

StepResult GridWorld::apply(Cell2 from, ActionId executed) const {
    const Cell2 to = shifted(from, executed);
    StepResult r;
    if (!layout_.inside(to) || layout_.at(to) == Terrain::obstacle) {
        r.next_state = {static_cast<double>(from.x), static_cast<double>(from.y)};
        r.reward = rewards_.bump;
        return r;
    }
    r.next_state = {static_cast<double>(to.x), static_cast<double>(to.y)};
    switch (layout_.at(to)) {
        case Terrain::pit:
            r.reward = rewards_.pit;
            r.done = true;
            break;
        case Terrain::goal:
            r.reward = rewards_.goal;
            r.done = true;
            r.success = true;
            break;
        default:
            r.reward = rewards_.step;
    }
    return r;
}

StepResult GridWorld::step(ActionId action, Rng& rng) {
    if (action < 0 || action >= static_cast<ActionId>(kMoveNames.size())) {
        throw std::invalid_argument("invalid grid action " + std::to_string(action));
    }
    StepResult r = apply(cell_of(state_), sample_move(action, slip_, rng));
    state_ = r.next_state;
    return r;
}

std::vector<State> GridWorld::nonterminal_states() const {
    std::vector<State> out;
    for (const Cell2& c : start_cells_) {
        out.push_back({static_cast<double>(c.x), static_cast<double>(c.y)});
    }
    return out;
}

std::vector<Transition> GridWorld::transitions(const State& state, ActionId action) const {
    std::vector<Transition> out;
    for (const auto& [move, p] : slip_outcomes(action, slip_)) {
        if (p > 0.0) {
            out.push_back({p, apply(cell_of(state), move)});
        }
    }
    return out;
}

GridWorld wumpus_make(int size, std::uint64_t layout_seed, double slip) {
    if (size < 4) {
        throw std::invalid_argument("wumpus world size must be at least 4");
    }
    check_slip(slip);
    const Cell2 start{1, 1};
    const Cell2 goal{size, size};
    const int cells = size * size;
    const int obstacles = static_cast<int>(std::lround(0.08 * cells));
    const int pits = static_cast<int>(std::lround(0.04 * cells));
    Rng rng(layout_seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        GridLayout layout{size, size, std::vector<Terrain>(static_cast<std::size_t>(cells), Terrain::free), start};
        layout.at(goal) = Terrain::goal;
        std::vector<Cell2> candidates;
        for (int y = 1; y <= size; ++y) {
            for (int x = 1; x <= size; ++x) {
                if (!(Cell2{x, y} == start) && !(Cell2{x, y} == goal)) candidates.push_back({x, y});
            }
        }
        // Partial Fisher-Yates: the first obstacles + pits entries are the draw.
        for (int k = 0; k < obstacles + pits; ++k) {
            const std::size_t j = static_cast<std::size_t>(k) + uniform_index(rng, candidates.size() - k);
            std::swap(candidates[static_cast<std::size_t>(k)], candidates[j]);
            layout.at(candidates[static_cast<std::size_t>(k)]) = k < obstacles ? Terrain::obstacle : Terrain::pit;
        }
        if (layout.reachable(start, goal)) {
            return GridWorld("wumpus", std::move(layout), GridRewards{}, slip, std::max(100, 20 * size));
        }
    }
    throw std::runtime_error("could not generate a connected wumpus layout in 100 attempts");
}

GridWorld example_grid(bool random_start) {
    GridLayout layout{4, 4, std::vector<Terrain>(16, Terrain::free), std::nullopt};
    if (!random_start) layout.start = Cell2{1, 1};
    layout.at({2, 2}) = Terrain::pit;
    layout.at({4, 4}) = Terrain::goal;
    GridRewards rewards{-1.0, -1.0, -10.0, 10.0};
    return GridWorld("example", std::move(layout), rewards, 0.0, 100);
}

// ---------------------------------------------------------------------------

OfficeWorld::OfficeWorld(int size, double slip) : size_(size), slip_(slip) {
    if (size < 4 || size % 2 != 0) {
        throw std::invalid_argument("office world size must be an even number >= 4");
    }
    check_slip(slip);
    const int half = size / 2;
    door_offset_ = (half + 1) / 2;
    const int d = door_offset_;
    coffee_ = {d, d};
    mail_ = {half + d, d};
    office_ = {half + d, half + d};
    start_ = {d, half + d};
    descriptor_.name = "office";
    descriptor_.variables = grid_vars(size, size);
    descriptor_.variables.push_back({"has_coffee", VarKind::integer, 0.0, 1.0});
    descriptor_.variables.push_back({"has_mail", VarKind::integer, 0.0, 1.0});
    descriptor_.actions = kMoveNames;
    descriptor_.horizon_hint = std::max(100, 28 * size);
    state_ = {static_cast<double>(start_.x), static_cast<double>(start_.y), 0.0, 0.0};
}

bool OfficeWorld::blocked(Cell2 from, ActionId move) const {
    const Cell2 to = shifted(from, move);
    if (to.x < 1 || to.x > size_ || to.y < 1 || to.y > size_) {
        return true;
    }
    const int half = size_ / 2;
    const int d = door_offset_;
    if (from.x != to.x && std::min(from.x, to.x) == half) {
        const int door_y = from.y <= half ? d : half + d;
        return from.y != door_y;
    }
    if (from.y != to.y && std::min(from.y, to.y) == half) {
        const int door_x = from.x <= half ? d : half + d;
        return from.x != door_x;
    }
    return false;
}

State OfficeWorld::reset(Rng&) {
    state_ = {static_cast<double>(start_.x), static_cast<double>(start_.y), 0.0, 0.0};
    return state_;
}

void OfficeWorld::place(const State& state) {
    if (state.size() != 4) {
        throw std::invalid_argument("office state has four components");
    }
    state_ = state;
}

StepResult OfficeWorld::step(ActionId action, Rng& rng) {
    if (action < 0 || action > south) {
        throw std::invalid_argument("invalid office action " + std::to_string(action));
    }
    const ActionId executed = sample_move(action, slip_, rng);
    Cell2 pos = cell_of(state_);
    if (!blocked(pos, executed)) {
        pos = shifted(pos, executed);
    }
    state_[0] = pos.x;
    state_[1] = pos.y;
    if (pos == coffee_) state_[2] = 1.0;
    if (pos == mail_) state_[3] = 1.0;
    StepResult r;
    if (pos == office_ && state_[2] == 1.0 && state_[3] == 1.0) {
        r.reward = completion_reward;
        r.done = true;
        r.success = true;
    }
    r.next_state = state_;
    return r;
}

OfficeWorld office_make(int size, double slip) { return OfficeWorld(size, slip); }

// ---------------------------------------------------------------------------

TaxiWorld::TaxiWorld(int size, double slip) : size_(size), slip_(slip) {
    if (size < 5) {
        throw std::invalid_argument("taxi world size must be at least 5");
    }
    check_slip(slip);
    descriptor_.name = "taxi";
    descriptor_.variables = grid_vars(size, size);
    descriptor_.variables[0].name = "taxi_x";
    descriptor_.variables[1].name = "taxi_y";
    descriptor_.variables.push_back({"passenger", VarKind::integer, 0.0, 4.0});
    descriptor_.variables.push_back({"destination", VarKind::integer, 0.0, 3.0});
    descriptor_.actions = {"E", "W", "N", "S", "Pickup", "Dropoff"};
    descriptor_.horizon_hint = 50 * size;
    state_ = {1.0, 1.0, 0.0, 3.0};
}

Cell2 TaxiWorld::site(int index) const {
    switch (index) {
        case 0: return {1, 1};
        case 1: return {size_, 1};
        case 2: return {1, size_};
        case 3: return {size_, size_};
        default: throw std::out_of_range("taxi site index must be 0..3");
    }
}

State TaxiWorld::reset(Rng& rng) {
    const auto x = static_cast<double>(1 + uniform_index(rng, static_cast<std::size_t>(size_)));
    const auto y = static_cast<double>(1 + uniform_index(rng, static_cast<std::size_t>(size_)));
    const auto passenger = static_cast<int>(uniform_index(rng, 4));
    int destination = static_cast<int>(uniform_index(rng, 3));
    if (destination >= passenger) ++destination;
    state_ = {x, y, static_cast<double>(passenger), static_cast<double>(destination)};
    return state_;
}

void TaxiWorld::place(const State& state) {
    if (state.size() != 4) {
        throw std::invalid_argument("taxi state has four components");
    }
    state_ = state;
}

StepResult TaxiWorld::step(ActionId action, Rng& rng) {
    StepResult r;
    const Cell2 pos = cell_of(state_);
    const int passenger = static_cast<int>(state_[2]);
    const int destination = static_cast<int>(state_[3]);
    switch (action) {
        case east:
        case west:
        case north:
        case south: {
            const Cell2 to = shifted(pos, sample_move(action, slip_, rng));
            if (to.x >= 1 && to.x <= size_ && to.y >= 1 && to.y <= size_) {
                state_[0] = to.x;
                state_[1] = to.y;
            }
            r.reward = move_reward;
            break;
        }
        case pickup:
            if (passenger < 4 && pos == site(passenger)) {
                state_[2] = 4.0;
                r.reward = move_reward;
            } else {
                r.reward = illegal_reward;
            }
            break;
        case dropoff:
            if (passenger == 4 && pos == site(destination)) {
                state_[2] = destination;
                r.reward = delivery_reward;
                r.done = true;
                r.success = true;
            } else {
                r.reward = illegal_reward;
            }
            break;
        default:
            throw std::invalid_argument("invalid taxi action " + std::to_string(action));
    }
    r.next_state = state_;
    return r;
}

TaxiWorld taxi_make(int size, double slip) { return TaxiWorld(size, slip); }

// ---------------------------------------------------------------------------

WaterWorld::WaterWorld(WaterWorldParams params) : params_(params) {
    if (!(params_.box > 0.0 && params_.radius > 0.0 && params_.ball_speed >= 0.0 && params_.agent_speed > 0.0)) {
        throw std::invalid_argument("water world parameters must be positive");
    }
    descriptor_.name = "waterworld";
    for (const char* name : {"agent_x", "agent_y", "green_x", "green_y", "red_x", "red_y"}) {
        descriptor_.variables.push_back({name, VarKind::real, 0.0, params_.box});
    }
    descriptor_.actions = kMoveNames;
    descriptor_.horizon_hint = 100;
    const double c = params_.box / 2.0;
    state_ = {c, c, c / 2.0, c / 2.0, 1.5 * c, 1.5 * c};
}

State WaterWorld::reset(Rng& rng) {
    const double b = params_.box;
    const double clearance = 4.0 * params_.radius;
    auto draw = [&] { return uniform01(rng) * b; };
    state_[0] = draw();
    state_[1] = draw();
    for (std::size_t ball : {2u, 4u}) {
        do {
            state_[ball] = draw();
            state_[ball + 1] = draw();
        } while (std::hypot(state_[ball] - state_[0], state_[ball + 1] - state_[1]) < clearance);
    }
    constexpr double two_pi = 6.283185307179586;
    for (auto* v : {&green_v_, &red_v_}) {
        const double angle = uniform01(rng) * two_pi;
        *v = {params_.ball_speed * std::cos(angle), params_.ball_speed * std::sin(angle)};
    }
    return state_;
}

void WaterWorld::place(const State& state, std::array<double, 2> green_velocity, std::array<double, 2> red_velocity) {
    if (state.size() != 6) {
        throw std::invalid_argument("water world state has six components");
    }
    state_ = state;
    green_v_ = green_velocity;
    red_v_ = red_velocity;
}

void WaterWorld::move_ball(double& x, double& y, std::array<double, 2>& v) const {
    const double b = params_.box;
    x += v[0];
    y += v[1];
    if (x < 0.0) { x = -x; v[0] = -v[0]; }
    if (x > b) { x = 2.0 * b - x; v[0] = -v[0]; }
    if (y < 0.0) { y = -y; v[1] = -v[1]; }
    if (y > b) { y = 2.0 * b - y; v[1] = -v[1]; }
}

StepResult WaterWorld::step(ActionId action, Rng&) {
    const double s = params_.agent_speed;
    double dx = 0.0, dy = 0.0;
    switch (action) {
        case east: dx = s; break;
        case west: dx = -s; break;
        case north: dy = -s; break;
        case south: dy = s; break;
        default: throw std::invalid_argument("invalid water world action " + std::to_string(action));
    }
    state_[0] = std::clamp(state_[0] + dx, 0.0, params_.box);
    state_[1] = std::clamp(state_[1] + dy, 0.0, params_.box);
    move_ball(state_[2], state_[3], green_v_);
    move_ball(state_[4], state_[5], red_v_);
    const double touch = 2.0 * params_.radius;
    StepResult r;
    if (std::hypot(state_[4] - state_[0], state_[5] - state_[1]) < touch) {
        r.reward = red_reward;
        r.done = true;
    } else if (std::hypot(state_[2] - state_[0], state_[3] - state_[1]) < touch) {
        r.reward = green_reward;
        r.done = true;
        r.success = true;
    }
    r.next_state = state_;
    return r;
}

WaterWorld waterworld_make() { return WaterWorld(); }

}  // namespace darrl
