#include "darrl/cat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace darrl {

namespace {

bool integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

Interval root_interval(const VariableSpec& spec) {
    if (spec.kind == VarKind::integer) {
        return Interval::integer(spec.lo, spec.hi);
    }
    return Interval::real(spec.lo, spec.hi, true);
}

void check_same_dims(const Abstraction& a, const Abstraction& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("abstractions differ in dimensionality");
    }
}

// Children of `parent` must tile its split interval with no gap or overlap and
// copy every other interval.
void check_partition(const CatNode& parent, std::vector<const CatNode*> children) {
    const std::size_t var = *parent.split_var;
    const Interval& whole = parent.abstraction[var];
    std::sort(children.begin(), children.end(), [var](const CatNode* a, const CatNode* b) {
        return a->abstraction[var].lo < b->abstraction[var].lo;
    });
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("node " + std::to_string(parent.id) + ": " + what);
    };
    for (const CatNode* child : children) {
        if (child->abstraction.size() != parent.abstraction.size()) {
            fail("child dimensionality mismatch");
        }
        for (std::size_t k = 0; k < parent.abstraction.size(); ++k) {
            if (k != var && !(child->abstraction[k] == parent.abstraction[k])) {
                fail("child changes a variable other than the split variable");
            }
        }
        const Interval& iv = child->abstraction[var];
        if (iv.kind != whole.kind) {
            fail("child interval kind mismatch");
        }
        if (iv.kind == VarKind::integer ? !(integral(iv.lo) && integral(iv.hi) && iv.lo <= iv.hi)
                                        : !(iv.lo < iv.hi)) {
            fail("empty or malformed child interval");
        }
    }
    if (children.front()->abstraction[var].lo != whole.lo) {
        fail("children do not start at the parent's lower bound");
    }
    for (std::size_t c = 1; c < children.size(); ++c) {
        const Interval& prev = children[c - 1]->abstraction[var];
        const Interval& next = children[c]->abstraction[var];
        const bool contiguous = whole.kind == VarKind::integer ? next.lo == prev.hi + 1.0
                                                              : next.lo == prev.hi && !prev.closed_hi;
        if (!contiguous) {
            fail("children overlap or leave a gap");
        }
    }
    const Interval& last = children.back()->abstraction[var];
    if (last.hi != whole.hi || last.closed_hi != whole.closed_hi) {
        fail("children do not end at the parent's upper bound");
    }
}

}  // namespace

void VariableSpec::validate() const {
    if (!(lo <= hi)) {
        throw std::invalid_argument("variable '" + name + "': lo > hi");
    }
    if (kind == VarKind::integer && !(integral(lo) && integral(hi))) {
        throw std::invalid_argument("variable '" + name + "': integer bounds must be integral");
    }
    if (kind == VarKind::real && !(lo < hi)) {
        throw std::invalid_argument("variable '" + name + "': real range must have lo < hi");
    }
}

bool Interval::contains(double v) const {
    if (kind == VarKind::integer) {
        return lo <= v && v <= hi;
    }
    return lo <= v && (v < hi || (closed_hi && v == hi));
}

bool Interval::subset_of(const Interval& other) const {
    if (kind != other.kind || lo < other.lo || hi > other.hi) {
        return false;
    }
    if (kind == VarKind::real && hi == other.hi && closed_hi && !other.closed_hi) {
        return false;
    }
    return true;
}

std::string Interval::to_string() const {
    const bool closed = kind == VarKind::integer || closed_hi;
    return "[" + format_number(lo) + "," + format_number(hi) + (closed ? "]" : ")");
}

bool contains(const Abstraction& theta, const State& state) {
    if (theta.size() != state.size()) {
        return false;
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!theta[i].contains(state[i])) {
            return false;
        }
    }
    return true;
}

std::string to_string(const Abstraction& theta) {
    std::string out;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += theta[i].to_string();
    }
    return out;
}

bool splittable(const Abstraction& theta, std::size_t i, int f, const SplitLimits& limits) {
    if (i >= theta.size() || f < 2) {
        return false;
    }
    const Interval& iv = theta[i];
    if (iv.kind == VarKind::integer) {
        return iv.width() >= f;
    }
    return iv.width() >= f * limits.min_real_width && iv.width() > 0.0;
}

std::vector<Abstraction> f_split(const Abstraction& theta, std::size_t i, int f,
                                 const SplitLimits& limits) {
    if (f < 2) {
        throw std::invalid_argument("split factor must be at least 2");
    }
    if (i >= theta.size()) {
        throw std::out_of_range("split variable index out of range");
    }
    if (!splittable(theta, i, f, limits)) {
        throw std::invalid_argument("interval " + theta[i].to_string() + " is too narrow for a " +
                                    std::to_string(f) + "-split");
    }
    const Interval& iv = theta[i];
    std::vector<Abstraction> parts(static_cast<std::size_t>(f), theta);
    if (iv.kind == VarKind::integer) {
        const auto width = static_cast<long long>(iv.width());
        const long long base = width / f;
        const long long extra = width % f;
        double lo = iv.lo;
        for (int x = 0; x < f; ++x) {
            const long long w = base + (x < extra ? 1 : 0);
            parts[x][i] = Interval::integer(lo, lo + static_cast<double>(w - 1));
            lo += static_cast<double>(w);
        }
    } else {
        const double step = (iv.hi - iv.lo) / f;
        for (int x = 0; x < f; ++x) {
            const double lo = iv.lo + x * step;
            const bool last = x == f - 1;
            const double hi = last ? iv.hi : iv.lo + (x + 1) * step;
            parts[x][i] = Interval::real(lo, hi, last && iv.closed_hi);
        }
    }
    return parts;
}

bool is_refinement(const Abstraction& theta_b, const Abstraction& theta_a) {
    check_same_dims(theta_b, theta_a);
    for (std::size_t i = 0; i < theta_a.size(); ++i) {
        if (!theta_b[i].subset_of(theta_a[i])) {
            return false;
        }
    }
    return true;
}

bool is_direct_refinement(const Abstraction& theta_b, const Abstraction& theta_a, int f) {
    check_same_dims(theta_b, theta_a);
    if (f < 2) {
        throw std::invalid_argument("split factor must be at least 2");
    }
    std::optional<std::size_t> changed;
    for (std::size_t k = 0; k < theta_a.size(); ++k) {
        if (!(theta_b[k] == theta_a[k])) {
            if (changed) {
                return false;
            }
            changed = k;
        }
    }
    if (!changed) {
        return false;
    }
    const Interval& b = theta_b[*changed];
    const Interval& a = theta_a[*changed];
    if (!b.subset_of(a)) {
        return false;
    }
    if (a.kind == VarKind::integer) {
        const auto wa = static_cast<long long>(a.width());
        const auto wb = static_cast<long long>(b.width());
        return wb == wa / f || wb == (wa + f - 1) / f;
    }
    return std::abs(b.width() * f - a.width()) <= 1e-9 * a.width();
}

const char* to_string(Fineness f) {
    switch (f) {
        case Fineness::strictly_finer: return "strictly_finer";
        case Fineness::finer: return "finer";
        case Fineness::not_finer: return "not_finer";
    }
    return "unknown";
}

Cat::Cat(std::vector<VariableSpec> specs, SplitLimits limits)
    : specs_(std::move(specs)), limits_(limits) {
    if (specs_.empty()) {
        throw std::invalid_argument("a tree needs at least one state variable");
    }
    if (!(limits_.min_real_width > 0.0)) {
        throw std::invalid_argument("min_real_width must be positive");
    }
    CatNode root;
    root.id = 0;
    for (const auto& spec : specs_) {
        spec.validate();
        root.abstraction.push_back(root_interval(spec));
    }
    nodes_.push_back(std::move(root));
    leaves_ = {0};
}

void Cat::check_state(const State& state) const {
    if (state.size() != specs_.size()) {
        throw std::invalid_argument("state has " + std::to_string(state.size()) +
                                    " components, tree has " + std::to_string(specs_.size()));
    }
    if (!contains(nodes_.front().abstraction, state)) {
        throw std::out_of_range("state lies outside the root abstraction");
    }
}

NodeId Cat::find_abstract(const State& state) const {
    check_state(state);
    NodeId current = root();
    while (!nodes_[current].is_leaf()) {
        const CatNode& node = nodes_[current];
        const double v = state[*node.split_var];
        auto it = std::find_if(node.children.begin(), node.children.end(), [&](NodeId c) {
            return nodes_[c].abstraction[*node.split_var].contains(v);
        });
        if (it == node.children.end()) {
            throw std::logic_error("children of node " + std::to_string(current) +
                                   " do not cover the state");
        }
        current = *it;
    }
    return current;
}

std::vector<NodeId> Cat::refine_leaf(NodeId leaf, std::size_t i, int f) {
    if (leaf >= nodes_.size()) {
        throw std::out_of_range("no node with id " + std::to_string(leaf));
    }
    if (!nodes_[leaf].is_leaf()) {
        throw std::invalid_argument("node " + std::to_string(leaf) + " is not a leaf");
    }
    auto parts = f_split(nodes_[leaf].abstraction, i, f, limits_);
    std::vector<NodeId> created;
    created.reserve(parts.size());
    for (auto& part : parts) {
        CatNode child;
        child.id = nodes_.size();
        child.abstraction = std::move(part);
        child.parent = leaf;
        created.push_back(child.id);
        nodes_.push_back(std::move(child));
    }
    CatNode& parent = nodes_[leaf];
    parent.children = created;
    parent.split_var = i;
    parent.split_factor = f;
    // New ids are the largest in the arena, so appending keeps the list sorted.
    leaves_.erase(std::find(leaves_.begin(), leaves_.end(), leaf));
    leaves_.insert(leaves_.end(), created.begin(), created.end());
    return created;
}

void Cat::rebuild_leaves() {
    leaves_.clear();
    for (const auto& node : nodes_) {
        if (node.is_leaf()) {
            leaves_.push_back(node.id);
        }
    }
}

Cat Cat::from_nodes(std::vector<VariableSpec> specs, SplitLimits limits, std::vector<CatNode> nodes) {
    Cat cat(std::move(specs), limits);
    if (nodes.empty()) {
        throw std::invalid_argument("tree document has no nodes");
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        CatNode& node = nodes[k];
        if (node.id != k) {
            throw std::invalid_argument("node ids must be 0..n-1 in order");
        }
        if (node.abstraction.size() != cat.num_vars()) {
            throw std::invalid_argument("node " + std::to_string(k) + " has wrong dimensionality");
        }
        node.children.clear();
    }
    if (nodes[0].parent || !(nodes[0].abstraction == cat.nodes_[0].abstraction)) {
        throw std::invalid_argument("root must have no parent and span every variable's range");
    }
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        if (!nodes[k].parent || *nodes[k].parent >= k) {
            throw std::invalid_argument("node " + std::to_string(k) +
                                        " must have a parent with a smaller id");
        }
        nodes[*nodes[k].parent].children.push_back(k);
    }
    for (const auto& node : nodes) {
        if (node.is_leaf()) {
            if (node.split_var || node.split_factor) {
                throw std::invalid_argument("leaf " + std::to_string(node.id) + " carries split metadata");
            }
            continue;
        }
        if (!node.split_var || !node.split_factor || *node.split_var >= cat.num_vars() ||
            *node.split_factor != static_cast<int>(node.children.size()) || *node.split_factor < 2) {
            throw std::invalid_argument("node " + std::to_string(node.id) + " has inconsistent split metadata");
        }
        std::vector<const CatNode*> children;
        for (NodeId c : node.children) {
            children.push_back(&nodes[c]);
        }
        check_partition(node, std::move(children));
    }
    cat.nodes_ = std::move(nodes);
    cat.rebuild_leaves();
    return cat;
}

Cat make_cat(std::vector<VariableSpec> specs, SplitLimits limits) {
    return Cat(std::move(specs), limits);
}

NodeId find_abstract_linear(const Cat& cat, const State& state) {
    if (state.size() != cat.num_vars()) {
        throw std::invalid_argument("state dimensionality mismatch");
    }
    for (NodeId leaf : cat.leaves()) {
        if (contains(cat.node(leaf).abstraction, state)) {
            return leaf;
        }
    }
    throw std::out_of_range("state lies outside the root abstraction");
}

Fineness compare_fineness(const Cat& cat_a, const Cat& cat_b) {
    if (cat_a.specs() != cat_b.specs()) {
        throw std::invalid_argument("trees are defined over different variables");
    }
    bool proper = false;
    for (NodeId la : cat_a.leaves()) {
        const Abstraction& a = cat_a.node(la).abstraction;
        auto home = std::find_if(cat_b.leaves().begin(), cat_b.leaves().end(), [&](NodeId lb) {
            return is_refinement(a, cat_b.node(lb).abstraction);
        });
        if (home == cat_b.leaves().end()) {
            return Fineness::not_finer;
        }
        if (!(a == cat_b.node(*home).abstraction)) {
            proper = true;
        }
    }
    return proper ? Fineness::strictly_finer : Fineness::finer;
}

}  // namespace darrl
