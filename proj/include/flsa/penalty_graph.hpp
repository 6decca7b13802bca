#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flsa {

/// Undirected graph over coefficient indices 0..n-1 whose edges carry the
/// difference penalty. Immutable after construction and safe to share.
class PenaltyGraph {
 public:
  struct Edge {
    int k, l;  // stored once with k < l
  };
  struct Neighbor {
    int node;
    int edge;  // index into edges()
  };

  PenaltyGraph() = default;
  PenaltyGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    build_adjacency();
  }

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  std::span<const Neighbor> neighbors(int k) const {
    return {adj_.data() + adj_start_[k],
            adj_.data() + adj_start_[k + 1]};
  }
  int degree(int k) const { return adj_start_[k + 1] - adj_start_[k]; }
  int max_degree() const { return max_degree_; }

 private:
  void build_adjacency() {
    adj_start_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
      ++adj_start_[e.k + 1];
      ++adj_start_[e.l + 1];
    }
    for (int v = 0; v < n_; ++v) adj_start_[v + 1] += adj_start_[v];
    adj_.resize(edges_.size() * 2);
    std::vector<int> cursor(adj_start_.begin(), adj_start_.end() - 1);
    for (int e = 0; e < edge_count(); ++e) {
      adj_[cursor[edges_[e].k]++] = {edges_[e].l, e};
      adj_[cursor[edges_[e].l]++] = {edges_[e].k, e};
    }
    max_degree_ = 0;
    for (int v = 0; v < n_; ++v) max_degree_ = std::max(max_degree_, degree(v));
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<Neighbor> adj_;
  std::vector<int> adj_start_{0};
  int max_degree_ = 0;
};

/// Chain 0-1-...-(n-1): the 1-D difference penalty.
inline PenaltyGraph chain_graph(int n) {
  if (n < 1) throw std::invalid_argument("chain_graph: n must be >= 1");
  std::vector<PenaltyGraph::Edge> edges;
  edges.reserve(n > 0 ? n - 1 : 0);
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return PenaltyGraph(n, std::move(edges));
}

/// rows x cols grid with 4-neighborhood; node (r,c) has index r*cols + c.
inline PenaltyGraph grid_graph(int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("grid_graph: dimensions must be >= 1");
  std::vector<PenaltyGraph::Edge> edges;
  edges.reserve(static_cast<size_t>(rows) * (cols - 1) +
                static_cast<size_t>(rows - 1) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      int v = r * cols + c;
      if (c + 1 < cols) edges.push_back({v, v + 1});
      if (r + 1 < rows) edges.push_back({v, v + cols});
    }
  return PenaltyGraph(rows * cols, std::move(edges));
}

/// Builds a graph from arbitrary pairs: normalizes orientation, removes
/// duplicates, rejects self-loops and out-of-range endpoints.
inline PenaltyGraph from_edge_list(int n,
                                   std::span<const std::pair<int, int>> pairs) {
  if (n < 0) throw std::invalid_argument("from_edge_list: negative node count");
  std::vector<PenaltyGraph::Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw std::invalid_argument("from_edge_list: endpoint out of range in (" +
                                  std::to_string(a) + ", " + std::to_string(b) +
                                  ")");
    if (a == b)
      throw std::invalid_argument("from_edge_list: self-loop (" +
                                  std::to_string(a) + ", " + std::to_string(b) +
                                  ")");
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
    return std::tie(x.k, x.l) < std::tie(y.k, y.l);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const auto& x, const auto& y) {
                            return x.k == y.k && x.l == y.l;
                          }),
              edges.end());
  return PenaltyGraph(n, std::move(edges));
}

inline PenaltyGraph from_edge_list(int n,
                                   const std::vector<std::pair<int, int>>& p) {
  return from_edge_list(n, std::span<const std::pair<int, int>>(p));
}

}  // namespace flsa
