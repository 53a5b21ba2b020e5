#pragma once

// Conditional abstraction trees: axis-aligned boxes over the state variables,
// refined top-down by splitting one variable's interval at a time. Leaves are
// the abstract states seen by the learner.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace darrl {

using State = std::vector<double>;
using NodeId = std::size_t;

enum class VarKind { integer, real };

struct VariableSpec {
    std::string name;
    VarKind kind = VarKind::integer;
    double lo = 0.0;
    double hi = 0.0;

    /// Throws std::invalid_argument when lo > hi, or when an integer
    /// variable has a non-integral bound.
    void validate() const;

    bool operator==(const VariableSpec&) const = default;
};

/// One variable's range inside an abstraction.
///
/// Integer intervals are closed, [lo, hi]. Real intervals are half-open,
/// [lo, hi), unless `closed_hi` is set; only the interval touching the
/// variable's global upper bound is closed so that every point has exactly
/// one home.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    VarKind kind = VarKind::integer;
    bool closed_hi = false;

    static Interval integer(double lo, double hi) { return {lo, hi, VarKind::integer, true}; }
    static Interval real(double lo, double hi, bool closed_hi = false) {
        return {lo, hi, VarKind::real, closed_hi};
    }

    /// Number of values (integer) or length (real).
    double width() const { return kind == VarKind::integer ? hi - lo + 1.0 : hi - lo; }
    bool contains(double v) const;
    /// Set inclusion, honoring the open/closed upper end of real intervals.
    bool subset_of(const Interval& other) const;
    std::string to_string() const;

    bool operator==(const Interval&) const = default;
};

using Abstraction = std::vector<Interval>;

bool contains(const Abstraction& theta, const State& state);
std::string to_string(const Abstraction& theta);

/// Splitting limits shared by every real-valued variable of a tree.
struct SplitLimits {
    double min_real_width = 1.0;

    bool operator==(const SplitLimits&) const = default;
};

/// True if interval `i` of `theta` can be cut into `f` non-empty parts.
bool splittable(const Abstraction& theta, std::size_t i, int f, const SplitLimits& limits = {});

/// f-split refinement of `theta` on variable `i`.
///
/// Integer intervals are cut into f contiguous parts whose widths differ by at
/// most one, wider parts first; with f = 2 this coincides with the boundary
/// rule l1 = l + floor((h - l) / 2), e.g. [1,5] -> [1,3], [4,5]. Real
/// intervals are cut into f equal half-open parts; the last part inherits the
/// parent's closedness.
std::vector<Abstraction> f_split(const Abstraction& theta, std::size_t i, int f,
                                 const SplitLimits& limits = {});

/// theta_b refines theta_a: every interval of b lies inside the matching
/// interval of a. Reflexive and transitive.
bool is_refinement(const Abstraction& theta_b, const Abstraction& theta_a);

/// theta_b is one f-split step below theta_a: exactly one variable shrinks,
/// by factor f (integer widths: floor or ceil of |a| / f; real widths: ratio
/// f within 1e-9), and all other variables are unchanged.
bool is_direct_refinement(const Abstraction& theta_b, const Abstraction& theta_a, int f);

struct CatNode {
    NodeId id = 0;
    Abstraction abstraction;
    std::optional<NodeId> parent;
    std::vector<NodeId> children;
    std::optional<std::size_t> split_var;
    std::optional<int> split_factor;

    bool is_leaf() const { return children.empty(); }
    bool operator==(const CatNode&) const = default;
};

enum class Fineness { strictly_finer, finer, not_finer };

const char* to_string(Fineness f);

/// Node ids are arena indices and never reused, so tables keyed on them stay
/// valid across refinements.
class Cat {
public:
    explicit Cat(std::vector<VariableSpec> specs, SplitLimits limits = {});

    const std::vector<VariableSpec>& specs() const { return specs_; }
    const SplitLimits& limits() const { return limits_; }
    std::size_t num_vars() const { return specs_.size(); }

    NodeId root() const { return 0; }
    const CatNode& node(NodeId id) const { return nodes_.at(id); }
    const std::vector<CatNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    /// Leaf ids in ascending order.
    const std::vector<NodeId>& leaves() const { return leaves_; }
    std::size_t leaf_count() const { return leaves_.size(); }
    bool is_leaf(NodeId id) const { return nodes_.at(id).is_leaf(); }

    /// Top-down descent from the root to the leaf containing `state`.
    NodeId find_abstract(const State& state) const;

    /// Replaces leaf `leaf` by the f-split of its abstraction on variable
    /// `i`. Returns the new leaf ids in split order.
    std::vector<NodeId> refine_leaf(NodeId leaf, std::size_t i, int f);

    /// Rebuilds a tree from a full node list. Checks ids, topology and the
    /// partition invariant; throws std::invalid_argument on any violation.
    static Cat from_nodes(std::vector<VariableSpec> specs, SplitLimits limits,
                          std::vector<CatNode> nodes);

    bool operator==(const Cat&) const = default;

private:
    void rebuild_leaves();
    void check_state(const State& state) const;

    std::vector<VariableSpec> specs_;
    SplitLimits limits_;
    std::vector<CatNode> nodes_;
    std::vector<NodeId> leaves_;
};

/// Single-node tree whose root spans every variable's global range.
Cat make_cat(std::vector<VariableSpec> specs, SplitLimits limits = {});

inline NodeId find_abstract(const Cat& cat, const State& state) { return cat.find_abstract(state); }

inline std::vector<NodeId> refine_leaf(Cat& cat, NodeId leaf, std::size_t i, int f) {
    return cat.refine_leaf(leaf, i, f);
}

/// Reference lookup: scan every leaf for the inclusion condition.
NodeId find_abstract_linear(const Cat& cat, const State& state);

/// Leaf-wise comparison of the abstract MDPs induced by two trees over the
/// same variables. `finer` when every leaf of a refines (or equals) some leaf
/// of b; `strictly_finer` when additionally the leaf sets differ.
Fineness compare_fineness(const Cat& cat_a, const Cat& cat_b);

}  // namespace darrl
