#pragma once

#include "flsa/maxflow.hpp"
#include "flsa/path_common.hpp"
#include "flsa/penalty_graph.hpp"
#include "flsa/soft_threshold.hpp"

#include <functional>
#include <vector>

namespace flsa {

/// Fixed-point solver for a single (lambda1, lambda2), fully independent of
/// the path engines. Works on the dual of the lambda1 = 0 problem: one box
/// variable z_e in [-lambda2, lambda2] per penalty edge, objective
/// 0.5 * |y - D^T z|^2, plain projected gradient with the safe step
/// 1 / (2 max_degree). Deterministic given its inputs.
struct OracleOptions {
  double tol = 1e-8;
  long max_iters = 10'000'000;
  /// Optional per-iteration observer (iteration, dual objective).
  std::function<void(long, double)> trace;
};

inline Vector oracle_solve(const Vector& y, const PenaltyGraph& graph,
                           double lambda2, double lambda1,
                           const OracleOptions& opt = {}) {
  require_finite(y, "oracle_solve");
  if (y.size() != graph.node_count())
    throw std::invalid_argument("oracle_solve: signal/graph size mismatch");
  if (!(lambda2 >= 0.0) || !(lambda1 >= 0.0))
    throw std::invalid_argument("oracle_solve: penalties must be >= 0");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("oracle_solve: tol must be > 0");

  const int m = graph.edge_count();
  if (m == 0 || lambda2 == 0.0) return soft_threshold(y, lambda1);

  const double step = 1.0 / (2.0 * graph.max_degree());
  Vector z = Vector::Zero(m);
  Vector beta = y;  // beta = y - D^T z throughout
  Vector grad(m);

  auto primal_objective = [&]() {
    double obj = 0.5 * (y - beta).squaredNorm();
    for (int e = 0; e < m; ++e)
      obj += lambda2 * std::abs(beta[graph.edge(e).k] - beta[graph.edge(e).l]);
    return obj;
  };

  double prev_obj = primal_objective();
  bool converged = false;
  for (long it = 0; it < opt.max_iters; ++it) {
    // Unit-step natural-map residual; zero exactly when the fixed signs and
    // box constraints of the stationarity system hold at this beta.
    double residual = 0.0;
    for (int e = 0; e < m; ++e) {
      grad[e] = -(beta[graph.edge(e).k] - beta[graph.edge(e).l]);
      double moved = std::clamp(z[e] - grad[e], -lambda2, lambda2);
      residual = std::max(residual, std::abs(moved - z[e]));
    }
    if (opt.trace) opt.trace(it, 0.5 * beta.squaredNorm());
    if (it % 100 == 0) {
      double obj = primal_objective();
      if (std::abs(prev_obj - obj) < opt.tol && residual < opt.tol) {
        converged = true;
        break;
      }
      prev_obj = obj;
    }
    for (int e = 0; e < m; ++e)
      z[e] = std::clamp(z[e] - step * grad[e], -lambda2, lambda2);
    beta = y;
    for (int e = 0; e < m; ++e) {
      beta[graph.edge(e).k] -= z[e];
      beta[graph.edge(e).l] += z[e];
    }
  }
  if (!converged) {
    double residual = 0.0;
    for (int e = 0; e < m; ++e) {
      double g = -(beta[graph.edge(e).k] - beta[graph.edge(e).l]);
      residual = std::max(residual,
                          std::abs(std::clamp(z[e] - g, -lambda2, lambda2) - z[e]));
    }
    throw convergence_error("oracle_solve: no convergence within the iteration cap",
                            residual);
  }
  return soft_threshold(beta, lambda1);
}

struct KktReport {
  double max_infeasibility = 0.0;
};

/// Residual of the stationarity system for a candidate beta. Edges with a
/// strict step contribute their fixed sign; what remains per plateau is a
/// flow-feasibility problem with box capacities, solved by the max-flow
/// engine. plateau_tol decides which neighbors count as one plateau; it must
/// exceed the accuracy of the solver that produced beta.
inline KktReport check_kkt(const Vector& y, const PenaltyGraph& graph,
                           const Vector& beta, double lambda2,
                           double plateau_tol = 1e-5) {
  if (y.size() != graph.node_count() || beta.size() != y.size())
    throw std::invalid_argument("check_kkt: size mismatch");
  const int n = graph.node_count();
  const double scale = std::max(1.0, beta.cwiseAbs().maxCoeff());

  std::vector<int> plateau(n, -1);
  int plateau_count = 0;
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (plateau[v] >= 0) continue;
    plateau[v] = plateau_count;
    stack.push_back(v);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const auto& nb : graph.neighbors(u)) {
        if (plateau[nb.node] >= 0) continue;
        if (std::abs(beta[u] - beta[nb.node]) > plateau_tol * scale) continue;
        plateau[nb.node] = plateau_count;
        stack.push_back(nb.node);
      }
    }
    ++plateau_count;
  }

  // Demand q_k: what the plateau-internal subgradients must supply at node k
  // once every strict edge has contributed its fixed sign.
  Vector demand = y - beta;
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    if (plateau[edge.k] == plateau[edge.l]) continue;
    double sign = beta[edge.k] > beta[edge.l] ? 1.0 : -1.0;
    demand[edge.k] -= lambda2 * sign;
    demand[edge.l] += lambda2 * sign;
  }

  std::vector<std::vector<int>> members(plateau_count);
  for (int v = 0; v < n; ++v) members[plateau[v]].push_back(v);

  KktReport report;
  std::vector<int> local(n, -1);
  for (int p = 0; p < plateau_count; ++p) {
    const auto& nodes = members[p];
    for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<int>(i);
    FlowNetwork net(static_cast<int>(nodes.size()));
    double supply = 0.0, take = 0.0;
    for (int v : nodes) {
      if (demand[v] > 0.0) {
        net.add_source_edge(local[v], demand[v]);
        supply += demand[v];
      } else if (demand[v] < 0.0) {
        net.add_sink_edge(local[v], -demand[v]);
        take += -demand[v];
      }
    }
    for (int v : nodes)
      for (const auto& nb : graph.neighbors(v))
        if (v < nb.node && plateau[nb.node] == p)
          net.add_edge(local[v], local[nb.node], lambda2, lambda2);
    FlowResult flow = max_flow(net);
    double deficit = std::max(supply - flow.value, take - flow.value);
    report.max_infeasibility = std::max(report.max_infeasibility, deficit);
  }
  return report;
}

}  // namespace flsa
