#pragma once

#include "flsa/maxflow.hpp"
#include "flsa/path_common.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace flsa {

/// Snapshot of one fused set at a fixed lambda2, with members renumbered
/// 0..size-1. external_sign_sum[k] is the sum of the +-1 orientation signs of
/// the penalty edges leaving node k toward other sets.
struct SetProblem {
  double lambda2 = 0.0;
  int size = 0;
  std::vector<std::array<int, 2>> intra_edges;
  std::vector<double> tau;            // per intra edge, value at lambda2
  std::vector<int> external_sign_sum; // per node
};

/// Trajectory slope of the whole set: minus the total boundary orientation
/// divided by the set size.
inline double set_slope(const SetProblem& set) {
  std::int64_t total = 0;
  for (int m : set.external_sign_sum) total += m;
  return -static_cast<double>(total) / set.size;
}

/// Per-node pushes: the demand each member places on the internal subgradient
/// flows. Sums to zero exactly because the slope absorbs the average.
inline Vector set_pushes(const SetProblem& set) {
  std::int64_t total = 0;
  for (int m : set.external_sign_sum) total += m;
  Vector p(set.size);
  for (int k = 0; k < set.size; ++k) {
    // p_k = -m_k - slope, kept as the exact rational (total - m_k*size)/size
    std::int64_t num = total - static_cast<std::int64_t>(set.external_sign_sum[k]) * set.size;
    p[k] = static_cast<double>(num) / set.size;
  }
  return p;
}

namespace detail_set {

// Certification network. When scaled, every capacity is multiplied by the
// set size, which turns the pushes into exact integers.
inline FlowNetwork certification_network(const SetProblem& set, bool scaled) {
  FlowNetwork net(set.size);
  const double s = scaled ? static_cast<double>(set.size) : 1.0;
  std::int64_t total = 0;
  for (int m : set.external_sign_sum) total += m;

  for (size_t e = 0; e < set.intra_edges.size(); ++e) {
    auto [k, l] = set.intra_edges[e];
    double cap_fwd = unbounded, cap_bwd = unbounded;
    double tolerance = tol::tau_bound(set.lambda2);
    if (set.tau[e] >= set.lambda2 - tolerance) cap_fwd = s;
    if (set.tau[e] <= -set.lambda2 + tolerance) cap_bwd = s;
    if (std::abs(set.tau[e]) > set.lambda2 + tolerance)
      throw internal_error("fused set: subgradient value outside its bound");
    net.add_edge(k, l, cap_fwd, cap_bwd);
  }
  for (int k = 0; k < set.size; ++k) {
    std::int64_t num = total - static_cast<std::int64_t>(set.external_sign_sum[k]) * set.size;
    if (num == 0) continue;
    double cap = scaled ? static_cast<double>(num) : static_cast<double>(num) / set.size;
    if (num > 0)
      net.add_source_edge(k, cap);
    else
      net.add_sink_edge(k, -cap);
  }
  return net;
}

}  // namespace detail_set

/// Max-flow instance of a set exactly as constructed in the derivation:
/// source edges carry the positive pushes, sink edges the negative ones, and
/// intra-set edges are capped at 1 only in the direction where the
/// subgradient already sits on its bound.
inline FlowNetwork build_flow_network(const SetProblem& set) {
  return detail_set::certification_network(set, /*scaled=*/false);
}

struct Certified {
  std::vector<double> rates;  // d tau / d lambda2 per intra edge
};
struct Split {
  std::vector<int> reachable;  // local ids on the source side, never empty
};
using CertifyOutcome = std::variant<Certified, Split>;

/// Decides whether the set survives as one block past this lambda2. A flow
/// saturating every source edge certifies the set and fixes the subgradient
/// rates; otherwise the residual-reachable members split away from the rest.
/// Solved in size-scaled integer units, so the decision is exact.
inline CertifyOutcome certify_or_split(const SetProblem& set) {
  if (set.intra_edges.empty()) {
    Vector p = set_pushes(set);
    for (int k = 0; k < set.size; ++k)
      if (p[k] != 0.0)
        throw internal_error("certify_or_split: unbalanced push on an edgeless set");
    return Certified{{}};
  }
  FlowNetwork net = detail_set::certification_network(set, /*scaled=*/true);
  FlowResult flow = max_flow(net);
  if (flow.saturated) {
    Certified out;
    out.rates.resize(set.intra_edges.size());
    for (size_t e = 0; e < set.intra_edges.size(); ++e)
      out.rates[e] = flow.flow[static_cast<int>(e)] / set.size;
    return out;
  }
  Split split;
  split.reachable = std::move(flow.reachable);
  if (split.reachable.empty() ||
      static_cast<int>(split.reachable.size()) == set.size)
    throw internal_error("certify_or_split: degenerate split side");
  return split;
}

/// Re-certification after a subgradient value reaches its bound. The previous
/// rates still satisfy the push identity, so only the excess of the edges
/// whose capacity just tightened is rerouted through the residual network.
/// This keeps consecutive flows close together, which independent re-solves
/// do not, and those can otherwise alternate between equivalent maxima and
/// shatter the path into a cascade of micro-events. If the excess cannot be
/// rerouted, no saturated flow exists at all (pseudoflow feasibility does not
/// depend on the starting point) and the stuck side splits off.
inline CertifyOutcome recertify_or_split(const SetProblem& set,
                                         std::span<const double> prev_rates) {
  const double s = static_cast<double>(set.size);
  const double tolerance = tol::tau_bound(set.lambda2);
  FlowNetwork net(set.size);
  std::vector<double> base(set.intra_edges.size());
  std::vector<double> surplus(set.size, 0.0), deficit(set.size, 0.0);
  bool any_excess = false;
  for (size_t e = 0; e < set.intra_edges.size(); ++e) {
    auto [k, l] = set.intra_edges[e];
    double cap_fwd = unbounded, cap_bwd = unbounded;
    if (set.tau[e] >= set.lambda2 - tolerance) cap_fwd = s;
    if (set.tau[e] <= -set.lambda2 + tolerance) cap_bwd = s;
    if (std::abs(set.tau[e]) > set.lambda2 + tolerance)
      throw internal_error("fused set: subgradient value outside its bound");
    double flow = static_cast<double>(std::llround(prev_rates[e] * s));
    if (flow > cap_fwd) {
      surplus[k] += flow - cap_fwd;
      deficit[l] += flow - cap_fwd;
      flow = cap_fwd;
      any_excess = true;
    } else if (-flow > cap_bwd) {
      surplus[l] += -flow - cap_bwd;
      deficit[k] += -flow - cap_bwd;
      flow = -cap_bwd;
      any_excess = true;
    }
    base[e] = flow;
    net.add_edge(k, l, cap_fwd - flow, cap_bwd + flow);
  }
  if (!any_excess) {
    Certified out;
    out.rates.assign(prev_rates.begin(), prev_rates.end());
    return out;
  }
  for (int k = 0; k < set.size; ++k) {
    if (surplus[k] > 0.0) net.add_source_edge(k, surplus[k]);
    if (deficit[k] > 0.0) net.add_sink_edge(k, deficit[k]);
  }
  FlowResult reroute = max_flow(net);
  if (reroute.saturated) {
    Certified out;
    out.rates.resize(set.intra_edges.size());
    for (size_t e = 0; e < set.intra_edges.size(); ++e)
      out.rates[e] = (base[e] + reroute.flow[static_cast<int>(e)]) / s;
    return out;
  }
  Split split;
  split.reachable = std::move(reroute.reachable);
  if (split.reachable.empty() ||
      static_cast<int>(split.reachable.size()) == set.size)
    throw internal_error("recertify_or_split: degenerate split side");
  return split;
}

struct SetViolation {
  double lambda;
  int edge;  // index into intra_edges
};

/// Earliest lambda2 at which a certified rate pushes some subgradient value
/// out of its box. Nothing if every rate is within the unit band.
inline std::optional<SetViolation> violation_time(const SetProblem& set,
                                                  std::span<const double> rates,
                                                  double lambda_now) {
  std::optional<SetViolation> best;
  for (size_t e = 0; e < set.intra_edges.size(); ++e) {
    auto v = edge_violation_time(set.tau[e], rates[e], lambda_now);
    if (v && (!best || *v < best->lambda))
      best = SetViolation{*v, static_cast<int>(e)};
  }
  return best;
}

}  // namespace flsa
