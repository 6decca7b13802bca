#pragma once

#include "flsa/path_common.hpp"

#include <stdexcept>
#include <vector>

namespace flsa {

/// Compact record of the full 1-D solution path. Leaves 0..n-1 are the input
/// coefficients at lambda2 = 0; each fusion adds an internal node holding the
/// lambda2 of the event, the common value there and the slope of the merged
/// interval. Nodes cover contiguous index ranges [lo, hi].
struct PathTree {
  struct Node {
    double lambda;  // lambda2 at which this fused interval came into existence
    double beta;    // its coefficient value at that lambda2
    double slope;   // d beta / d lambda2 on the following segment
    int left = -1, right = -1, parent = -1;
    int lo = 0, hi = 0;
  };

  int leaf_count = 0;
  int root = -1;
  // large-page-friendly storage; nodes[0..leaf_count) are leaves
  std::vector<Node, detail::big_block_allocator<Node>> nodes;

  bool complete() const { return root >= 0; }
  int internal_count() const {
    return static_cast<int>(nodes.size()) - leaf_count;
  }
};

/// Single-coefficient lookup: climb from the leaf until the parent segment
/// starts past lambda2, then extend the stopping segment linearly.
inline double eval_path_leaf(const PathTree& tree, int leaf, double lambda2) {
  int v = leaf;
  while (tree.nodes[v].parent >= 0 &&
         tree.nodes[tree.nodes[v].parent].lambda <= lambda2)
    v = tree.nodes[v].parent;
  const auto& node = tree.nodes[v];
  return node.beta + node.slope * (lambda2 - node.lambda);
}

/// Whole-vector retrieval. Walks down from the root and fills each active
/// interval in one go, which costs O(n) rather than n separate climbs.
inline Vector eval_path(const PathTree& tree, double lambda2) {
  if (!(lambda2 >= 0.0))
    throw std::invalid_argument("eval_path: lambda2 must be >= 0");
  if (!tree.complete()) throw std::invalid_argument("eval_path: incomplete path");

  Vector beta(tree.leaf_count);
  std::vector<int> stack = {tree.root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    const auto& node = tree.nodes[v];
    if (node.lambda <= lambda2) {
      double value = node.beta + node.slope * (lambda2 - node.lambda);
      beta.segment(node.lo, node.hi - node.lo + 1).setConstant(value);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return beta;
}

}  // namespace flsa
