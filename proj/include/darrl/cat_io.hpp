#pragma once

#include <string>

#include "darrl/cat.hpp"

namespace darrl {

// Tree document (JSON):
//
//   {
//     "format": "darrl-cat", "version": 1, "min_real_width": 1.0,
//     "specs": [{"name": "x", "kind": "integer", "lo": 1, "hi": 4}, ...],
//     "nodes": [{"id": 0, "intervals": [[1, 4], [1, 4]], "parent": null,
//                "split_var": 0, "split_factor": 2}, ...]
//   }
//
// Nodes are listed in id order; children are implied by parent links. Real
// intervals are written as [lo, hi] and are half-open unless hi is the
// variable's global upper bound.

std::string serialize_cat(const Cat& cat);

/// Throws std::invalid_argument on malformed documents and on trees that
/// break the partition invariant.
Cat deserialize_cat(const std::string& document);

/// Graphviz digraph, one node per tree node labeled with its interval list;
/// leaves are filled.
std::string cat_to_dot(const Cat& cat);

/// Parses a tree document and renders it as DOT.
std::string export_cat_dot(const std::string& document);

}  // namespace darrl
