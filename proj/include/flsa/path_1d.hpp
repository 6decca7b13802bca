#pragma once

#include "flsa/path_common.hpp"
#include "flsa/path_tree.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace flsa {

/// Hitting time of two adjacent intervals whose trajectories are anchored at
/// (lambda_ref, beta_ref, slope), evaluated at lambda_now. Follows the strict
/// contract: candidates at or before lambda_now are discarded.
inline std::optional<double> hitting_time_1d(const Anchor& left,
                                             const Anchor& right,
                                             double lambda_now) {
  return hitting_time(left.eval(lambda_now), left.slope,
                      right.eval(lambda_now), right.slope, lambda_now);
}

namespace detail_1d {

// Hot per-interval state, exactly half a cache line. The rarely-touched
// index range and tree handle live in a parallel cold array.
struct Interval {
  double beta_ref, lambda_ref, slope;
  int left = -1, right = -1;  // neighbor interval slots

  double eval(double lambda2) const {
    return beta_ref + slope * (lambda2 - lambda_ref);
  }
};
struct IntervalCold {
  int lo, hi;
  int tree_node;
};

/// Indexed 4-ary min-heap over interval boundaries, keyed by the left slot of
/// each adjacent pair. Keys are updated eagerly whenever a boundary changes,
/// so the queue never holds stale entries and never exceeds one entry per
/// live boundary. Values and keys live in separate arrays: the sift scans
/// only read values, which halves their cache traffic.
class BoundaryQueue {
 public:
  explicit BoundaryQueue(int max_keys) : pos_(max_keys, -1) {}

  bool empty() const { return lambda_.empty(); }
  double top_lambda() const { return lambda_.front(); }
  int top_key() const { return key_.front(); }

  void pop() { remove_at(0); }

  /// Bulk load (Floyd heap construction), O(n).
  void build(std::vector<double> lambdas, std::vector<int> keys) {
    lambda_.assign(lambdas.begin(), lambdas.end());
    key_.assign(keys.begin(), keys.end());
    for (size_t i = 0; i < key_.size(); ++i) pos_[key_[i]] = static_cast<int>(i);
    if (lambda_.empty()) return;
    for (int i = static_cast<int>(lambda_.size()) / 4; i >= 0; --i) sift_down(i);
  }

  void set(int key, double lambda) {
    grow(key);
    int i = pos_[key];
    if (i < 0) {
      lambda_.push_back(lambda);
      key_.push_back(key);
      sift_up(static_cast<int>(lambda_.size()) - 1);
    } else if (lambda < lambda_[i]) {
      lambda_[i] = lambda;
      sift_up(i);
    } else {
      lambda_[i] = lambda;
      sift_down(i);
    }
  }

  void erase(int key) {
    if (key < static_cast<int>(pos_.size()) && pos_[key] >= 0)
      remove_at(pos_[key]);
  }

  /// Hands old_key's entry (if any) to new_key without re-ordering; any entry
  /// already under new_key is dropped. The value is expected to be refreshed
  /// by a subsequent set().
  void rename(int old_key, int new_key) {
    grow(new_key);
    erase(new_key);
    if (old_key >= static_cast<int>(pos_.size()) || pos_[old_key] < 0) return;
    int i = pos_[old_key];
    pos_[old_key] = -1;
    key_[i] = new_key;
    pos_[new_key] = i;
  }

 private:
  void grow(int key) {
    if (key >= static_cast<int>(pos_.size())) pos_.resize(key + 64, -1);
  }
  void remove_at(int i) {
    pos_[key_[i]] = -1;
    double moved_lambda = lambda_.back();
    int moved_key = key_.back();
    lambda_.pop_back();
    key_.pop_back();
    if (i == static_cast<int>(lambda_.size())) return;
    lambda_[i] = moved_lambda;
    key_[i] = moved_key;
    pos_[moved_key] = i;
    sift_down(i);
    sift_up(i);
  }
  void place(int i, double lambda, int key) {
    lambda_[i] = lambda;
    key_[i] = key;
    pos_[key] = i;
  }
  void sift_up(int i) {
    double* lam = lambda_.data();
    double e_lambda = lam[i];
    int e_key = key_[i];
    while (i > 0) {
      int parent = (i - 1) >> 2;
      if (lam[parent] <= e_lambda) break;
      place(i, lam[parent], key_[parent]);
      i = parent;
    }
    place(i, e_lambda, e_key);
  }
  void sift_down(int i) {
    double* lam = lambda_.data();
    const int n = static_cast<int>(lambda_.size());
    double e_lambda = lam[i];
    int e_key = key_[i];
    while (true) {
      int first = 4 * i + 1;
      if (first >= n) break;
      int best = first;
      double best_lambda = lam[first];
      int last = std::min(first + 4, n);
      for (int c = first + 1; c < last; ++c)
        if (lam[c] < best_lambda) {
          best = c;
          best_lambda = lam[c];
        }
      if (e_lambda <= best_lambda) break;
      place(i, best_lambda, key_[best]);
      i = best;
    }
    place(i, e_lambda, e_key);
  }

  std::vector<double, detail::big_block_allocator<double>> lambda_;
  std::vector<int, detail::big_block_allocator<int>> key_;
  std::vector<int, detail::big_block_allocator<int>> pos_;
};

/// Parent links, filled after the event loop. Writing them inline would
/// scatter stores across the whole node array; bucketing the (child, parent)
/// pairs by child range first keeps every pass near-sequential.
inline void fill_parents(PathTree& tree) {
  const int total = static_cast<int>(tree.nodes.size());
  const int buckets = 256;
  const int shift = [&] {
    int s = 0;
    while ((total >> s) > buckets) ++s;
    return s;
  }();
  std::vector<std::pair<int, int>> pairs;  // (child, parent)
  pairs.reserve(2 * (total - tree.leaf_count));
  for (int v = tree.leaf_count; v < total; ++v) {
    pairs.push_back({tree.nodes[v].left, v});
    pairs.push_back({tree.nodes[v].right, v});
  }
  std::vector<int> count(buckets + 1, 0);
  for (const auto& [child, parent] : pairs) ++count[(child >> shift) + 1];
  for (int b = 0; b < buckets; ++b) count[b + 1] += count[b];
  std::vector<std::pair<int, int>> sorted(pairs.size());
  for (const auto& pr : pairs) sorted[count[pr.first >> shift]++] = pr;
  for (const auto& [child, parent] : sorted) tree.nodes[child].parent = parent;
}

}  // namespace detail_1d

/// Exact solution path of the 1-D signal approximator for lambda1 = 0 and all
/// lambda2 >= 0. Runs in O(n log n): each fusion touches a constant number of
/// boundaries in the indexed event queue. A fusion keeps the left
/// constituent's slot, so the interval table never grows past the initial
/// interval count.
inline PathTree solve_path_1d(const Vector& y) {
  require_finite(y, "solve_path_1d");
  const int n = static_cast<int>(y.size());

  PathTree tree;
  tree.leaf_count = n;
  tree.nodes.reserve(2 * n - 1);
  for (int k = 0; k < n; ++k)
    tree.nodes.push_back({0.0, y[k], 0.0, -1, -1, -1, k, k});

  // parent links are filled in one sequential pass at the end
  auto make_tree_node = [&](double lambda, double beta, int child_a, int child_b,
                            int lo, int hi) {
    tree.nodes.push_back({lambda, beta, 0.0, child_a, child_b, -1, lo, hi});
    return static_cast<int>(tree.nodes.size()) - 1;
  };

  std::vector<detail_1d::Interval, detail::big_block_allocator<detail_1d::Interval>> iv;
  std::vector<detail_1d::IntervalCold, detail::big_block_allocator<detail_1d::IntervalCold>> cold;
  iv.reserve(n);
  cold.reserve(n);

  // Runs of tied input values are fused from the start: equal at lambda2 = 0
  // means equal on the whole path.
  for (int k = 0; k < n;) {
    int end = k;
    while (end + 1 < n && tol::beta_tie(y[end + 1], y[k])) ++end;
    int node = k;
    for (int j = k + 1; j <= end; ++j)
      node = make_tree_node(0.0, y[k], node, j, k, j);
    int slot = static_cast<int>(iv.size());
    iv.push_back({y[k], 0.0, 0.0, slot - 1, -1});
    cold.push_back({k, end, node});
    if (slot > 0) iv[slot - 1].right = slot;
    k = end + 1;
  }

  auto interval_slope = [&](int slot, double lambda2) {
    const detail_1d::Interval& s = iv[slot];
    auto sign_vs = [&](int nb) {
      double diff = s.eval(lambda2) - iv[nb].eval(lambda2);
      return diff > 0.0 ? 1 : -1;
    };
    int sgn = 0;
    if (s.left >= 0) sgn += sign_vs(s.left);
    if (s.right >= 0) sgn += sign_vs(s.right);
    int size = cold[slot].hi - cold[slot].lo + 1;
    return -static_cast<double>(sgn) / size;
  };

  for (int slot = 0; slot < static_cast<int>(iv.size()); ++slot) {
    iv[slot].slope = interval_slope(slot, 0.0);
    tree.nodes[cold[slot].tree_node].slope = iv[slot].slope;
  }

  detail_1d::BoundaryQueue queue(static_cast<int>(iv.size()));
  auto refresh_boundary = [&](int a, double lambda_now) {
    if (a < 0) return;
    int b = iv[a].right;
    if (b < 0) {
      queue.erase(a);
      return;
    }
    auto h = detail::approaching_hit(iv[a].eval(lambda_now), iv[a].slope,
                                     iv[b].eval(lambda_now), iv[b].slope,
                                     lambda_now);
    if (h)
      queue.set(a, *h);
    else
      queue.erase(a);
  };
  {
    std::vector<double> lambdas;
    std::vector<int> keys;
    lambdas.reserve(iv.size());
    keys.reserve(iv.size());
    for (size_t a = 0; a + 1 < iv.size(); ++a) {
      int b = iv[a].right;
      auto h = detail::approaching_hit(iv[a].beta_ref, iv[a].slope,
                                       iv[b].beta_ref, iv[b].slope, 0.0);
      if (h) {
        lambdas.push_back(*h);
        keys.push_back(static_cast<int>(a));
      }
    }
    queue.build(std::move(lambdas), std::move(keys));
  }

  // Merges the right neighbor of `slot` into `slot` at the given value. The
  // event of the boundary beyond `right` moves under `slot`'s key; its value
  // is refreshed once the cascade settles.
  auto absorb_right = [&](int slot, double lambda, double value) {
    int right = iv[slot].right;
    queue.rename(right, slot);
    cold[slot].tree_node =
        make_tree_node(lambda, value, cold[slot].tree_node, cold[right].tree_node,
                       cold[slot].lo, cold[right].hi);
    cold[slot].hi = cold[right].hi;
    iv[slot].beta_ref = value;
    iv[slot].lambda_ref = lambda;
    iv[slot].right = iv[right].right;
    if (iv[slot].right >= 0) iv[iv[slot].right].left = slot;
  };

  int live = static_cast<int>(iv.size());
  while (live > 1) {
    if (queue.empty())
      throw internal_error("solve_path_1d: no pending event with several intervals");
    const double lambda = queue.top_lambda();
    int slot = queue.top_key();
    queue.pop();
    if (!queue.empty()) __builtin_prefetch(&iv[queue.top_key()]);

    double value = 0.5 * (iv[slot].eval(lambda) + iv[iv[slot].right].eval(lambda));
    absorb_right(slot, lambda, value);
    --live;

    // Ties at the same breakpoint cascade immediately: a triple meeting fuses
    // in two steps before any slope is derived for the merged interval.
    while (true) {
      int left = iv[slot].left;
      if (left >= 0 && tol::beta_tie(iv[left].eval(lambda), iv[slot].beta_ref)) {
        double merged = 0.5 * (iv[left].eval(lambda) + iv[slot].beta_ref);
        absorb_right(left, lambda, merged);
        slot = left;
        --live;
        continue;
      }
      int right = iv[slot].right;
      if (right >= 0 && tol::beta_tie(iv[right].eval(lambda), iv[slot].beta_ref)) {
        double merged = 0.5 * (iv[slot].beta_ref + iv[right].eval(lambda));
        absorb_right(slot, lambda, merged);
        --live;
        continue;
      }
      break;
    }

    iv[slot].slope = interval_slope(slot, lambda);
    tree.nodes[cold[slot].tree_node].slope = iv[slot].slope;
    refresh_boundary(iv[slot].left, lambda);
    refresh_boundary(slot, lambda);
  }

  if (tree.internal_count() != n - 1)
    throw internal_error("solve_path_1d: fusion count differs from n - 1");
  tree.root = static_cast<int>(tree.nodes.size()) - 1;
  detail_1d::fill_parents(tree);
  return tree;
}

/// Distinct fusion values of a completed path, ascending.
inline std::vector<double> breakpoints(const PathTree& tree) {
  std::vector<double> out;
  for (int v = tree.leaf_count; v < static_cast<int>(tree.nodes.size()); ++v)
    out.push_back(tree.nodes[v].lambda);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Feasibility report for a candidate 1-D solution: reconstructs the chain
/// subgradients by forward recursion and measures how far they leave the
/// admissible box, disagree with the plateau signs, or miss the free boundary.
struct SubgradientReport {
  double bound_violation = 0.0;     // max(|tau| - lambda2, 0)
  double sign_violation = 0.0;      // |tau - lambda2 * sign| on strict steps
  double boundary_residual = 0.0;   // |tau| beyond the last node

  double worst() const {
    return std::max({bound_violation, sign_violation, boundary_residual});
  }
  bool feasible(double tolerance) const { return worst() <= tolerance; }
};

inline SubgradientReport check_subgradient_1d(const Vector& y, const Vector& beta,
                                              double lambda2) {
  if (y.size() != beta.size())
    throw std::invalid_argument("check_subgradient_1d: size mismatch");
  const int n = static_cast<int>(y.size());
  SubgradientReport report;
  double tau = 0.0;
  for (int k = 0; k < n; ++k) {
    tau += y[k] - beta[k];
    if (k == n - 1) {
      report.boundary_residual = std::abs(tau);
      break;
    }
    report.bound_violation =
        std::max(report.bound_violation, std::abs(tau) - lambda2);
    if (!tol::beta_tie(beta[k], beta[k + 1])) {
      double want = beta[k] > beta[k + 1] ? lambda2 : -lambda2;
      report.sign_violation =
          std::max(report.sign_violation, std::abs(tau - want));
    }
  }
  report.bound_violation = std::max(report.bound_violation, 0.0);
  return report;
}

}  // namespace flsa
