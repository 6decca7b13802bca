#pragma once

#include "flsa/path_common.hpp"
#include "flsa/soft_threshold.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace flsa {

enum class EventKind { fuse, split, recert };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::fuse: return "fuse";
    case EventKind::split: return "split";
    case EventKind::recert: return "recert";
  }
  return "?";
}

/// Piecewise-linear trajectories for an arbitrary penalty graph: one anchor
/// list per node (a new anchor whenever the node's set changes slope) plus the
/// log of fuse/split/recert events.
struct GeneralPathStore {
  struct Event {
    double lambda;
    EventKind kind;
    int set_a;
    int set_b;  // -1 for recertifications
  };

  int n = 0;
  std::vector<std::vector<Anchor>> anchors;
  std::vector<Event> events;
  double terminal_lambda = 0.0;

  int fuse_count() const { return count(EventKind::fuse); }
  int split_count() const { return count(EventKind::split); }

  /// Distinct event values, ascending.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    out.reserve(events.size());
    for (const auto& ev : events) out.push_back(ev.lambda);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  int count(EventKind kind) const {
    int c = 0;
    for (const auto& ev : events) c += (ev.kind == kind);
    return c;
  }
};

inline double eval_general_node(const GeneralPathStore& store, int node,
                                double lambda2) {
  const auto& list = store.anchors[node];
  auto it = std::upper_bound(
      list.begin(), list.end(), lambda2,
      [](double l, const Anchor& a) { return l < a.lambda; });
  if (it == list.begin())
    throw internal_error("eval_general: node has no anchor at lambda2 = 0");
  return std::prev(it)->eval(lambda2);
}

inline Vector eval_general(const GeneralPathStore& store, double lambda2) {
  if (!(lambda2 >= 0.0))
    throw std::invalid_argument("eval_general: lambda2 must be >= 0");
  Vector beta(store.n);
  for (int k = 0; k < store.n; ++k) beta[k] = eval_general_node(store, k, lambda2);
  return beta;
}

inline Vector eval_general_with_l1(const GeneralPathStore& store, double lambda2,
                                   double lambda1) {
  return soft_threshold(eval_general(store, lambda2), lambda1);
}

}  // namespace flsa
