#pragma once

#include "flsa/path_common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace flsa {

/// Sentinel for an edge with no capacity bound. IEEE infinity saturates under
/// the arithmetic below, so residuals of unbounded arcs stay unbounded.
inline constexpr double unbounded = std::numeric_limits<double>::infinity();

struct FlowResult {
  double value = 0.0;
  bool saturated = false;
  /// Interior nodes reachable from the source by an augmenting path in the
  /// final residual graph (the source itself is implicit).
  std::vector<int> reachable;
  /// Net flow per edge id, positive in the direction the edge was added.
  std::vector<double> flow;

  bool is_reachable(int node) const {
    return std::find(reachable.begin(), reachable.end(), node) != reachable.end();
  }
};

/// Directed-capacity flow network on interior nodes 0..m-1 plus an implicit
/// source and sink. Each undirected edge is stored once with a capacity per
/// direction; source/sink edges have zero back-capacity by construction.
class FlowNetwork {
 public:
  explicit FlowNetwork(int interior_count) : interior_(interior_count) {
    if (interior_count < 0)
      throw std::invalid_argument("FlowNetwork: negative node count");
    head_.assign(interior_count + 2, -1);
  }

  int interior_count() const { return interior_; }
  int source() const { return interior_; }
  int sink() const { return interior_ + 1; }

  /// Adds the undirected pair (u,v) with capacity cap_uv in direction u->v and
  /// cap_vu back. Returns an edge id usable with FlowResult::flow.
  int add_edge(int u, int v, double cap_uv, double cap_vu) {
    check_endpoint(u);
    check_endpoint(v);
    if (u == v) throw std::invalid_argument("FlowNetwork: self-loop");
    if (!(cap_uv >= 0.0) || !(cap_vu >= 0.0))
      throw std::invalid_argument("FlowNetwork: negative capacity");
    int id = static_cast<int>(arcs_.size() / 2);
    push_arc(u, v, cap_uv);
    push_arc(v, u, cap_vu);
    return id;
  }

  int add_source_edge(int node, double cap) { return add_edge(source(), node, cap, 0.0); }
  int add_sink_edge(int node, double cap) { return add_edge(node, sink(), cap, 0.0); }

  int edge_count() const { return static_cast<int>(arcs_.size() / 2); }
  double capacity(int edge, bool forward = true) const {
    return arcs_[2 * edge + (forward ? 0 : 1)].cap;
  }
  std::pair<int, int> endpoints(int edge) const {
    return {tails_[2 * edge], arcs_[2 * edge].to};
  }

 private:
  friend FlowResult max_flow(const FlowNetwork&);
  friend double min_cut_value_bruteforce(const FlowNetwork&);
  friend double conservation_gap(const FlowNetwork&, const FlowResult&);
  friend void detail_fix_open_edge_flows(const FlowNetwork&, FlowResult&);

  struct Arc {
    int to;
    int next;    // next arc with the same tail, -1 terminates
    double cap;  // may be `unbounded`
  };

  void check_endpoint(int v) const {
    if (v < 0 || v > sink())
      throw std::invalid_argument("FlowNetwork: endpoint out of range");
  }
  void push_arc(int from, int to, double cap) {
    arcs_.push_back({to, head_[from], cap});
    head_[from] = static_cast<int>(arcs_.size()) - 1;
    tails_.push_back(from);
  }

  int interior_;
  std::vector<Arc> arcs_;  // arc 2e and its reverse 2e+1
  std::vector<int> tails_;
  std::vector<int> head_;
};

/// Flows on (unbounded, unbounded) edges cancel out of the residual
/// bookkeeping. Reconstruct a conservation-consistent completion by routing
/// each node's imbalance through a spanning forest of the open-edge subgraph;
/// non-forest open edges carry zero. Any circulation difference from the
/// solver's actual flow is immaterial: the completion has the same value,
/// saturation and residual reachability.
inline void detail_fix_open_edge_flows(const FlowNetwork& net, FlowResult& result) {
  const int m = net.interior_count();
  std::vector<std::vector<std::pair<int, int>>> open_adj(m);  // (edge, other)
  std::vector<double> imbalance(m, 0.0);  // net inflow minus outflow so far
  bool any_open = false;
  for (int e = 0; e < net.edge_count(); ++e) {
    auto [u, v] = net.endpoints(e);
    bool open = !std::isfinite(net.arcs_[2 * e].cap) &&
                !std::isfinite(net.arcs_[2 * e + 1].cap);
    if (open) {
      open_adj[u].push_back({e, v});
      open_adj[v].push_back({e, u});
      result.flow[e] = 0.0;
      any_open = true;
    } else {
      if (u < m) imbalance[u] -= result.flow[e];
      if (v < m) imbalance[v] += result.flow[e];
    }
  }
  if (!any_open) return;

  // Iterative DFS per forest component; children push their subtree imbalance
  // up through the tree edge that discovered them.
  std::vector<int> parent_edge(m, -1), parent_node(m, -1), order;
  std::vector<char> visited(m, 0);
  order.reserve(m);
  for (int root = 0; root < m; ++root) {
    if (visited[root] || open_adj[root].empty()) continue;
    visited[root] = 1;
    std::vector<int> stack = {root};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      order.push_back(u);
      for (auto [e, w] : open_adj[u]) {
        if (visited[w]) continue;
        visited[w] = 1;
        parent_edge[w] = e;
        parent_node[w] = u;
        stack.push_back(w);
      }
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (parent_edge[v] < 0) continue;  // component root
    int e = parent_edge[v];
    auto [a, b] = net.endpoints(e);
    double toward_parent = imbalance[v];  // excess inflow leaves via the tree edge
    result.flow[e] = (a == v) ? toward_parent : -toward_parent;
    imbalance[v] = 0.0;
    imbalance[parent_node[v]] += toward_parent;
  }
}

/// Maximum flow by shortest augmenting paths (BFS) on an explicit residual
/// graph. Integer-valued capacities stay exact throughout, so saturation and
/// reachability decisions on such networks do not depend on the tolerance.
inline FlowResult max_flow(const FlowNetwork& net) {
  const int n_nodes = net.interior_count() + 2;
  const int r = net.source(), s = net.sink();
  std::vector<double> residual(net.arcs_.size());
  for (size_t a = 0; a < net.arcs_.size(); ++a) residual[a] = net.arcs_[a].cap;

  std::vector<int> parent_arc(n_nodes, -1);
  std::vector<char> seen(n_nodes, 0);
  std::vector<int> fifo;
  fifo.reserve(n_nodes);

  FlowResult result;
  while (true) {
    std::fill(seen.begin(), seen.end(), 0);
    fifo.clear();
    fifo.push_back(r);
    seen[r] = 1;
    bool found = false;
    for (size_t qi = 0; qi < fifo.size() && !found; ++qi) {
      int u = fifo[qi];
      for (int a = net.head_[u]; a != -1; a = net.arcs_[a].next) {
        int v = net.arcs_[a].to;
        if (seen[v] || !(residual[a] > 0.0)) continue;
        seen[v] = 1;
        parent_arc[v] = a;
        if (v == s) {
          found = true;
          break;
        }
        fifo.push_back(v);
      }
    }
    if (!found) break;

    double push = unbounded;
    for (int v = s; v != r; v = net.tails_[parent_arc[v]])
      push = std::min(push, residual[parent_arc[v]]);
    // Source capacities are finite by construction, so push is finite.
    if (!std::isfinite(push))
      throw internal_error("max_flow: unbounded augmenting path");
    for (int v = s; v != r; v = net.tails_[parent_arc[v]]) {
      int a = parent_arc[v];
      residual[a] -= push;
      residual[a ^ 1] += push;
    }
    result.value += push;
  }

  // seen[] is the residual reachability of the last (failed) BFS.
  for (int v = 0; v < net.interior_count(); ++v)
    if (seen[v]) result.reachable.push_back(v);

  result.flow.resize(net.edge_count());
  for (int e = 0; e < net.edge_count(); ++e) {
    if (std::isfinite(net.arcs_[2 * e].cap))
      result.flow[e] = net.arcs_[2 * e].cap - residual[2 * e];
    else if (std::isfinite(net.arcs_[2 * e + 1].cap))
      result.flow[e] = residual[2 * e + 1] - net.arcs_[2 * e + 1].cap;
    else
      result.flow[e] = 0.0;  // resolved below from conservation
  }
  detail_fix_open_edge_flows(net, result);

  result.saturated = true;
  for (int a = net.head_[r]; a != -1; a = net.arcs_[a].next) {
    double cap = net.arcs_[a].cap;
    if (residual[a] > tol::flow * std::max(1.0, std::abs(cap))) {
      result.saturated = false;
      break;
    }
  }
  return result;
}

/// Exhaustive minimum r/s-cut, the verification oracle for max_flow. Cuts
/// crossed by an unbounded arc are unbounded themselves.
inline double min_cut_value_bruteforce(const FlowNetwork& net) {
  const int m = net.interior_count();
  if (m > 20)
    throw std::invalid_argument("min_cut_value_bruteforce: more than 20 nodes");
  double best = unbounded;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    auto source_side = [&](int v) {
      if (v == net.source()) return true;
      if (v == net.sink()) return false;
      return (mask >> v & 1u) != 0;
    };
    double cut = 0.0;
    for (size_t a = 0; a < net.arcs_.size(); ++a) {
      if (source_side(net.tails_[a]) && !source_side(net.arcs_[a].to))
        cut += net.arcs_[a].cap;
    }
    best = std::min(best, cut);
  }
  return best;
}

/// Max over interior nodes of the absolute net-flow imbalance.
inline double conservation_gap(const FlowNetwork& net, const FlowResult& result) {
  std::vector<double> bal(net.interior_count(), 0.0);
  for (int e = 0; e < net.edge_count(); ++e) {
    auto [u, v] = net.endpoints(e);
    if (u < net.interior_count()) bal[u] -= result.flow[e];
    if (v < net.interior_count()) bal[v] += result.flow[e];
  }
  double worst = 0.0;
  for (double b : bal) worst = std::max(worst, std::abs(b));
  return worst;
}

}  // namespace flsa
