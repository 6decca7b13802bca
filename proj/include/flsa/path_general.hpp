#pragma once

#include "flsa/fused_set.hpp"
#include "flsa/path_common.hpp"
#include "flsa/path_store.hpp"
#include "flsa/penalty_graph.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <vector>

namespace flsa {

struct GeneralOptions {
  /// Sets of at least this many members are exempt from split checks and
  /// their internal subgradients are no longer tracked (the approximate
  /// algorithm). The default never freezes anything.
  int split_cap = std::numeric_limits<int>::max();
  /// Re-checks partition, connectivity, subgradient bounds and conservation
  /// after every breakpoint. Meant for tests; quadratic-ish.
  bool validate = false;
};

namespace detail_general {

struct QEvent {
  enum Type : int { hit = 0, viol = 1 };
  double lambda;
  int type;
  int a;  // set slot
  int b;  // hit: second slot, viol: offending edge id
  std::uint32_t va, vb;
};
struct QLater {
  bool operator()(const QEvent& x, const QEvent& y) const {
    return x.lambda > y.lambda;
  }
};

class Engine {
 public:
  Engine(const Vector& y, const PenaltyGraph& graph, const GeneralOptions& opt)
      : y_(y), g_(graph), opt_(opt) {
    require_finite(y_, "solve_path_general");
    if (y_.size() != g_.node_count())
      throw std::invalid_argument("solve_path_general: signal/graph size mismatch");
    if (opt_.split_cap < 1)
      throw std::invalid_argument("solve_path_general: split cap must be >= 1");
  }

  GeneralPathStore run() {
    init();
    const long breakpoint_guard = 100L * g_.node_count() + 1000;
    long breakpoints_done = 0;
    while (!heap_.empty()) {
      QEvent top = heap_.top();
      if (!event_valid(top)) {
        heap_.pop();
        continue;
      }
      double lambda = top.lambda;
      std::vector<QEvent> batch;
      while (!heap_.empty() && heap_.top().lambda <= lambda + tol::event) {
        batch.push_back(heap_.top());
        heap_.pop();
      }
      process_breakpoint(lambda, batch);
      if (++breakpoints_done > breakpoint_guard)
        throw internal_error("solve_path_general: breakpoint count exceeds guard");
    }
    if (opt_.validate) check_terminal();
    store_.n = g_.node_count();
    return std::move(store_);
  }

 private:
  struct EdgeState {
    int t = 0;  // orientation sign(beta_k - beta_l) while between sets
    bool internal = false;
    double tau = 0.0;  // anchored at the owning set's lambda_ref
    double rate = 0.0;
  };

  struct SetRec {
    std::vector<int> members;
    std::vector<int> intra;
    std::vector<int> boundary;
    double beta_ref = 0.0, lambda_ref = 0.0, slope = 0.0;
    std::uint32_t ver_geom = 0, ver_rates = 0;
    bool alive = true;
    bool frozen = false;

    int size() const { return static_cast<int>(members.size()); }
    double eval(double lambda2) const {
      return beta_ref + slope * (lambda2 - lambda_ref);
    }
  };

  // ---- initialization -----------------------------------------------------

  void init() {
    const int n = g_.node_count();
    edges_.assign(g_.edge_count(), {});
    sets_.clear();
    sets_.reserve(2 * n);
    node_set_.resize(n);
    store_.anchors.assign(n, {});
    component_.assign(n, -1);
    label_components();

    for (int k = 0; k < n; ++k) {
      SetRec s;
      s.members = {k};
      s.beta_ref = y_[k];
      for (const auto& nb : g_.neighbors(k)) s.boundary.push_back(nb.edge);
      s.frozen = (1 >= opt_.split_cap);
      node_set_[k] = k;
      sets_.push_back(std::move(s));
    }
    std::vector<QEvent> initial_touches;
    for (int e = 0; e < g_.edge_count(); ++e) {
      const auto& edge = g_.edge(e);
      if (tol::beta_tie(y_[edge.k], y_[edge.l])) {
        edges_[e].t = 0;
        initial_touches.push_back(
            {0.0, QEvent::hit, node_set_[edge.k], node_set_[edge.l], 0, 0});
      } else {
        edges_[e].t = y_[edge.k] > y_[edge.l] ? 1 : -1;
      }
    }
    for (int s = 0; s < n; ++s) sets_[s].slope = slope_of(s);
    mark_all_changed_ = true;
    process_breakpoint(0.0, initial_touches);
    mark_all_changed_ = false;
  }

  void label_components() {
    int c = 0;
    std::vector<int> stack;
    for (int v = 0; v < g_.node_count(); ++v) {
      if (component_[v] >= 0) continue;
      stack.push_back(v);
      component_[v] = c;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const auto& nb : g_.neighbors(u))
          if (component_[nb.node] < 0) {
            component_[nb.node] = c;
            stack.push_back(nb.node);
          }
      }
      ++c;
    }
    component_count_ = c;
  }

  // ---- breakpoint fixed point ----------------------------------------------

  void process_breakpoint(double lambda, const std::vector<QEvent>& batch) {
    touches_.clear();
    viols_.clear();
    changed_geom_.clear();
    cert_queue_.clear();
    split_guard_.clear();

    if (mark_all_changed_) {
      for (int s = 0; s < static_cast<int>(sets_.size()); ++s) {
        mark_changed(s);
        request_cert(s, /*from_violation=*/false);
      }
    }
    for (const QEvent& ev : batch) {
      if (!event_valid(ev)) continue;
      if (ev.type == QEvent::hit)
        touches_.push_back({ev.a, ev.b});
      else
        viols_.push_back(ev);
    }

    const long guard = 4L * g_.node_count() + 64;
    long iters = 0;
    while (true) {
      if (++iters > guard)
        throw internal_error("solve_path_general: fuse/split loop exceeds guard");
      if (!touches_.empty()) {
        auto [a, b] = touches_.front();
        touches_.pop_front();
        handle_touch(a, b, lambda);
        continue;
      }
      if (!viols_.empty()) {
        QEvent ev = viols_.front();
        viols_.pop_front();
        if (!event_valid(ev)) continue;
        advance_set(ev.a, lambda);
        request_cert(ev.a, /*from_violation=*/true);
        continue;
      }
      if (!cert_queue_.empty()) {
        int s = cert_queue_.back();
        cert_queue_.pop_back();
        if (!sets_[s].alive || !needs_cert_lookup(s)) continue;
        certify(s, lambda);
        continue;
      }
      break;
    }

    finalize_breakpoint(lambda);
    if (opt_.validate) validate_state(lambda);
  }

  void handle_touch(int a, int b, double lambda) {
    if (a == b) return;
    if (!sets_[a].alive || !sets_[b].alive) return;  // re-discovered if real
    if (!tol::beta_tie(sets_[a].eval(lambda), sets_[b].eval(lambda))) return;
    if (should_fuse(a, b, lambda)) fuse(a, b, lambda);
  }

  /// A touching pair stays apart only if its recorded orientation is uniform
  /// and the upper set separates strictly upward; any tied or mixed
  /// orientation, or a non-separating slope order, forces the fusion.
  bool should_fuse(int a, int b, double lambda) {
    (void)lambda;
    int seen = 0;  // +1, -1, or 2 for mixed/tied
    for (int e : sets_[a].boundary) {
      const auto& edge = g_.edge(e);
      int other = node_set_[edge.k] == a ? node_set_[edge.l] : node_set_[edge.k];
      if (other != b) continue;
      int t_from_a = node_set_[edge.k] == a ? edges_[e].t : -edges_[e].t;
      if (t_from_a == 0) return true;
      if (seen == 0)
        seen = t_from_a;
      else if (seen != t_from_a)
        return true;
    }
    if (seen == 0)
      throw internal_error("should_fuse: sets share no edge");
    int upper = seen > 0 ? a : b;
    int lower = seen > 0 ? b : a;
    // strict separation: slope_upper > slope_lower, exact in integers
    std::int64_t nu = slope_numerator(upper), nl = slope_numerator(lower);
    bool separates =
        nu * static_cast<std::int64_t>(sets_[lower].size()) >
        nl * static_cast<std::int64_t>(sets_[upper].size());
    return !separates;
  }

  void fuse(int a, int b, double lambda) {
    if (split_guard_.count(guard_key(a, sets_[a].ver_geom, b, sets_[b].ver_geom)))
      throw internal_error("solve_path_general: split pair re-fused at one breakpoint");
    advance_set(a, lambda);
    advance_set(b, lambda);
    double value = 0.5 * (sets_[a].beta_ref + sets_[b].beta_ref);
    int big = sets_[a].size() >= sets_[b].size() ? a : b;
    int small = big == a ? b : a;

    std::vector<int> cross;
    for (int e : sets_[small].boundary) {
      const auto& edge = g_.edge(e);
      int other = node_set_[edge.k] == small ? node_set_[edge.l] : node_set_[edge.k];
      if (other != big) continue;
      cross.push_back(e);
      edges_[e].internal = true;
      edges_[e].tau = edges_[e].t * lambda;
      edges_[e].rate = 0.0;
    }
    for (int v : sets_[small].members) node_set_[v] = big;

    SetRec& dst = sets_[big];
    SetRec& src = sets_[small];
    dst.members.insert(dst.members.end(), src.members.begin(), src.members.end());
    dst.intra.insert(dst.intra.end(), src.intra.begin(), src.intra.end());
    dst.intra.insert(dst.intra.end(), cross.begin(), cross.end());
    std::vector<int> boundary;
    boundary.reserve(dst.boundary.size() + src.boundary.size());
    for (int e : dst.boundary)
      if (!edges_[e].internal) boundary.push_back(e);
    for (int e : src.boundary)
      if (!edges_[e].internal) boundary.push_back(e);
    dst.boundary = std::move(boundary);
    dst.beta_ref = value;
    dst.lambda_ref = lambda;
    dst.slope = slope_of(big);
    dst.frozen = dst.frozen || src.frozen || dst.size() >= opt_.split_cap;
    ++dst.ver_geom;
    ++dst.ver_rates;
    src.alive = false;
    ++src.ver_geom;
    ++src.ver_rates;
    src.members.clear();
    src.intra.clear();
    src.boundary.clear();

    store_.events.push_back({lambda, EventKind::fuse, a, b});
    mark_changed(big);
    request_cert(big, /*from_violation=*/false);
    discover_touches(big, lambda);
  }

  void certify(int s, double lambda) {
    advance_set(s, lambda);
    SetRec& rec = sets_[s];
    if (rec.frozen) {
      clear_cert(s);
      return;
    }
    SetProblem problem = build_problem(s);
    CertifyOutcome outcome;
    if (cert_from_violation_lookup(s)) {
      prev_rates_.clear();
      for (int e : rec.intra) prev_rates_.push_back(edges_[e].rate);
      outcome = recertify_or_split(problem, prev_rates_);
    } else {
      outcome = certify_or_split(problem);
    }
    if (auto* ok = std::get_if<Certified>(&outcome)) {
      for (size_t i = 0; i < rec.intra.size(); ++i)
        edges_[rec.intra[i]].rate = ok->rates[i];
      ++rec.ver_rates;
      if (cert_from_violation_lookup(s))
        store_.events.push_back({lambda, EventKind::recert, s, -1});
      clear_cert(s);
      if (auto v = violation_time(problem, ok->rates, lambda))
        heap_.push({v->lambda, QEvent::viol, s, rec.intra[v->edge],
                    rec.ver_rates, 0});
    } else {
      auto& split = std::get<Split>(outcome);
      std::vector<int> upper_nodes(split.reachable.size());
      for (size_t i = 0; i < split.reachable.size(); ++i)
        upper_nodes[i] = rec.members[split.reachable[i]];
      clear_cert(s);  // the split supersedes a recertification
      apply_split(s, upper_nodes, lambda);
    }
  }

  /// Splits a set into the residual-reachable side and the rest, then breaks
  /// both sides into connected components so every resulting set is valid.
  void apply_split(int s, const std::vector<int>& upper_nodes, double lambda) {
    std::vector<int> members = std::move(sets_[s].members);
    std::vector<int> old_intra = std::move(sets_[s].intra);
    std::vector<int> old_boundary = std::move(sets_[s].boundary);
    for (int v : upper_nodes) upper_flag_resize(v) = 1;

    // connected components of each side
    std::vector<std::vector<int>> comps;
    for (int v : members) comp_of_node_resize(v) = -1;
    for (int v : members) {
      if (comp_of_node_[v] >= 0) continue;
      comps.emplace_back();
      std::vector<int> stack = {v};
      comp_of_node_[v] = static_cast<int>(comps.size()) - 1;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        comps.back().push_back(u);
        for (const auto& nb : g_.neighbors(u)) {
          if (node_set_[nb.node] != s || comp_of_node_[nb.node] >= 0) continue;
          if (upper_flag_[nb.node] != upper_flag_[u]) continue;
          comp_of_node_[nb.node] = comp_of_node_[u];
          stack.push_back(nb.node);
        }
      }
    }

    size_t keeper = 0;
    for (size_t c = 1; c < comps.size(); ++c)
      if (comps[c].size() > comps[keeper].size()) keeper = c;

    std::vector<int> comp_slot(comps.size());
    for (size_t c = 0; c < comps.size(); ++c) {
      int slot;
      if (c == keeper) {
        slot = s;
      } else {
        slot = static_cast<int>(sets_.size());
        sets_.emplace_back();
      }
      comp_slot[c] = slot;
      SetRec& rec = sets_[slot];
      rec.members = std::move(comps[c]);
      rec.intra.clear();
      rec.boundary.clear();
      rec.beta_ref = sets_[s].beta_ref;
      rec.lambda_ref = lambda;
      rec.alive = true;
      for (int v : rec.members) node_set_[v] = slot;
    }

    for (int e : old_intra) {
      const auto& edge = g_.edge(e);
      int sk = node_set_[edge.k], sl = node_set_[edge.l];
      if (sk == sl) {
        sets_[sk].intra.push_back(e);
        continue;
      }
      edges_[e].internal = false;
      edges_[e].t = upper_flag_[edge.k] ? 1 : -1;
      if (opt_.validate &&
          std::abs(edges_[e].tau - edges_[e].t * lambda) > tol::tau_bound(lambda))
        throw internal_error("apply_split: severed edge not at its bound");
      sets_[sk].boundary.push_back(e);
      sets_[sl].boundary.push_back(e);
    }
    for (int e : old_boundary) {
      const auto& edge = g_.edge(e);
      int inside = node_set_[edge.k];
      if (!set_contains_edge_endpoint(s, comp_slot, edge.k))
        inside = node_set_[edge.l];
      sets_[inside].boundary.push_back(e);
    }

    for (size_t c = 0; c < comps.size(); ++c) {
      SetRec& rec = sets_[comp_slot[c]];
      rec.slope = slope_of(comp_slot[c]);
      rec.frozen = rec.size() >= opt_.split_cap;
      ++rec.ver_geom;
      ++rec.ver_rates;
      mark_changed(comp_slot[c]);
      request_cert(comp_slot[c], /*from_violation=*/false);
    }
    for (size_t c = 0; c < comps.size(); ++c)
      for (size_t d = 0; d < comps.size(); ++d) {
        bool c_upper = upper_flag_[sets_[comp_slot[c]].members.front()];
        bool d_upper = upper_flag_[sets_[comp_slot[d]].members.front()];
        if (c_upper && !d_upper) {
          split_guard_.insert(guard_key(comp_slot[c], sets_[comp_slot[c]].ver_geom,
                                        comp_slot[d], sets_[comp_slot[d]].ver_geom));
          store_.events.push_back(
              {lambda, EventKind::split, comp_slot[c], comp_slot[d]});
        }
      }

    for (int v : members) upper_flag_[v] = 0;
    for (size_t c = 0; c < comps.size(); ++c)
      discover_touches(comp_slot[c], lambda);
  }

  void discover_touches(int s, double lambda) {
    neighbor_scratch_.clear();
    for (int e : sets_[s].boundary) {
      const auto& edge = g_.edge(e);
      int other = node_set_[edge.k] == s ? node_set_[edge.l] : node_set_[edge.k];
      neighbor_scratch_.push_back(other);
    }
    std::sort(neighbor_scratch_.begin(), neighbor_scratch_.end());
    neighbor_scratch_.erase(
        std::unique(neighbor_scratch_.begin(), neighbor_scratch_.end()),
        neighbor_scratch_.end());
    for (int nb : neighbor_scratch_)
      if (tol::beta_tie(sets_[s].eval(lambda), sets_[nb].eval(lambda)))
        touches_.push_back({s, nb});
  }

  void finalize_breakpoint(double lambda) {
    store_.terminal_lambda = std::max(store_.terminal_lambda, lambda);
    std::sort(changed_geom_.begin(), changed_geom_.end());
    changed_geom_.erase(std::unique(changed_geom_.begin(), changed_geom_.end()),
                        changed_geom_.end());
    for (int s : changed_geom_) {
      if (!sets_[s].alive) continue;
      if (needs_cert_lookup(s) && !sets_[s].frozen)
        throw internal_error("finalize: live set missing certification");
      for (int v : sets_[s].members)
        store_.anchors[v].push_back({lambda, sets_[s].beta_ref, sets_[s].slope});
    }
    for (int s : changed_geom_) {
      if (!sets_[s].alive) continue;
      neighbor_scratch_.clear();
      for (int e : sets_[s].boundary) {
        const auto& edge = g_.edge(e);
        int other =
            node_set_[edge.k] == s ? node_set_[edge.l] : node_set_[edge.k];
        neighbor_scratch_.push_back(other);
      }
      std::sort(neighbor_scratch_.begin(), neighbor_scratch_.end());
      neighbor_scratch_.erase(
          std::unique(neighbor_scratch_.begin(), neighbor_scratch_.end()),
          neighbor_scratch_.end());
      for (int nb : neighbor_scratch_) {
        if (changed_lookup(nb) && nb < s) continue;  // pushed from the other side
        auto h = detail::approaching_hit(sets_[s].eval(lambda), sets_[s].slope,
                                         sets_[nb].eval(lambda), sets_[nb].slope,
                                         lambda);
        if (h)
          heap_.push({*h, QEvent::hit, s, nb, sets_[s].ver_geom,
                      sets_[nb].ver_geom});
      }
    }
    for (int s : changed_geom_) changed_flag_[s] = 0;
    for (int s : cert_flagged_) {
      needs_cert_flag_[s] = 0;
      cert_violation_flag_[s] = 0;
    }
    cert_flagged_.clear();
  }

  // ---- bookkeeping helpers -------------------------------------------------

  bool event_valid(const QEvent& ev) const {
    if (ev.type == QEvent::hit)
      return sets_[ev.a].alive && sets_[ev.b].alive &&
             sets_[ev.a].ver_geom == ev.va && sets_[ev.b].ver_geom == ev.vb;
    return sets_[ev.a].alive && sets_[ev.a].ver_rates == ev.va;
  }

  void advance_set(int s, double lambda) {
    SetRec& rec = sets_[s];
    if (rec.lambda_ref == lambda) return;
    rec.beta_ref = rec.eval(lambda);
    if (!rec.frozen) {
      double tolerance = tol::tau_bound(lambda);
      for (int e : rec.intra) {
        EdgeState& st = edges_[e];
        st.tau += st.rate * (lambda - rec.lambda_ref);
        if (st.tau > lambda) {
          if (st.tau > lambda + tolerance)
            throw internal_error("advance_set: subgradient left its bound");
          st.tau = lambda;
        } else if (st.tau < -lambda) {
          if (st.tau < -lambda - tolerance)
            throw internal_error("advance_set: subgradient left its bound");
          st.tau = -lambda;
        }
      }
    }
    rec.lambda_ref = lambda;
  }

  std::int64_t slope_numerator(int s) const {
    std::int64_t total = 0;
    for (int e : sets_[s].boundary) {
      const auto& edge = g_.edge(e);
      total += node_set_[edge.k] == s ? edges_[e].t : -edges_[e].t;
    }
    return -total;
  }
  double slope_of(int s) const {
    return static_cast<double>(slope_numerator(s)) / sets_[s].size();
  }

  SetProblem build_problem(int s) {
    const SetRec& rec = sets_[s];
    SetProblem problem;
    problem.lambda2 = rec.lambda_ref;
    problem.size = rec.size();
    for (int i = 0; i < rec.size(); ++i) local_of_resize(rec.members[i]) = i;
    problem.intra_edges.reserve(rec.intra.size());
    problem.tau.reserve(rec.intra.size());
    for (int e : rec.intra) {
      const auto& edge = g_.edge(e);
      problem.intra_edges.push_back({local_of_[edge.k], local_of_[edge.l]});
      problem.tau.push_back(edges_[e].tau);
    }
    problem.external_sign_sum.assign(rec.size(), 0);
    for (int e : rec.boundary) {
      const auto& edge = g_.edge(e);
      bool k_inside = node_set_[edge.k] == s;
      int inside = k_inside ? edge.k : edge.l;
      problem.external_sign_sum[local_of_[inside]] +=
          k_inside ? edges_[e].t : -edges_[e].t;
    }
    return problem;
  }

  void mark_changed(int s) {
    if (static_cast<size_t>(s) >= changed_flag_.size())
      changed_flag_.resize(sets_.size() + 16, 0);
    if (!changed_flag_[s]) {
      changed_flag_[s] = 1;
      changed_geom_.push_back(s);
    }
  }
  bool changed_lookup(int s) const {
    return static_cast<size_t>(s) < changed_flag_.size() && changed_flag_[s];
  }
  void request_cert(int s, bool from_violation) {
    if (static_cast<size_t>(s) >= needs_cert_flag_.size()) {
      needs_cert_flag_.resize(sets_.size() + 16, 0);
      cert_violation_flag_.resize(sets_.size() + 16, 0);
    }
    if (!needs_cert_flag_[s]) {
      needs_cert_flag_[s] = 1;
      cert_flagged_.push_back(s);
    }
    cert_queue_.push_back(s);  // pops re-check the flag, duplicates are cheap
    if (from_violation) cert_violation_flag_[s] = 1;
  }
  bool needs_cert_lookup(int s) const {
    return static_cast<size_t>(s) < needs_cert_flag_.size() && needs_cert_flag_[s];
  }
  bool cert_from_violation_lookup(int s) const {
    return static_cast<size_t>(s) < cert_violation_flag_.size() &&
           cert_violation_flag_[s];
  }
  void clear_cert(int s) {
    if (static_cast<size_t>(s) < needs_cert_flag_.size()) {
      needs_cert_flag_[s] = 0;
      cert_violation_flag_[s] = 0;
    }
  }

  int& local_of_resize(int v) {
    if (static_cast<size_t>(v) >= local_of_.size()) local_of_.resize(g_.node_count(), -1);
    return local_of_[v];
  }
  char& upper_flag_resize(int v) {
    if (upper_flag_.size() < static_cast<size_t>(g_.node_count()))
      upper_flag_.assign(g_.node_count(), 0);
    return upper_flag_[v];
  }
  int& comp_of_node_resize(int v) {
    if (comp_of_node_.size() < static_cast<size_t>(g_.node_count()))
      comp_of_node_.assign(g_.node_count(), -1);
    return comp_of_node_[v];
  }
  bool set_contains_edge_endpoint(int old_slot, const std::vector<int>& comp_slots,
                                  int node) const {
    (void)old_slot;
    int s = node_set_[node];
    return std::find(comp_slots.begin(), comp_slots.end(), s) != comp_slots.end();
  }

  static std::array<std::uint64_t, 2> guard_key(int a, std::uint32_t va, int b,
                                                std::uint32_t vb) {
    auto pack = [](int s, std::uint32_t v) {
      return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 32) | v;
    };
    std::uint64_t x = pack(a, va), y = pack(b, vb);
    return {std::min(x, y), std::max(x, y)};
  }

  // ---- validation ----------------------------------------------------------

  void validate_state(double lambda) {
    const int n = g_.node_count();
    std::vector<char> seen(n, 0);
    int covered = 0;
    for (int s = 0; s < static_cast<int>(sets_.size()); ++s) {
      if (!sets_[s].alive) continue;
      for (int v : sets_[s].members) {
        if (node_set_[v] != s || seen[v])
          throw internal_error("validate: membership is not a partition");
        seen[v] = 1;
        ++covered;
      }
      check_connected(s);
    }
    if (covered != n) throw internal_error("validate: nodes left unassigned");

    for (int e = 0; e < g_.edge_count(); ++e) {
      const auto& st = edges_[e];
      const auto& edge = g_.edge(e);
      bool same = node_set_[edge.k] == node_set_[edge.l];
      if (same != st.internal)
        throw internal_error("validate: edge interiority out of sync");
      if (!same && st.t == 0)
        throw internal_error("validate: unresolved orientation after startup");
      if (same) {
        int s = node_set_[edge.k];
        if (sets_[s].frozen) continue;
        double tau = st.tau + st.rate * (lambda - sets_[s].lambda_ref);
        if (std::abs(tau) > lambda + 1e-8)
          throw internal_error("validate: subgradient outside its box");
      }
    }

    std::vector<double> mass(component_count_, 0.0), want(component_count_, 0.0);
    for (int v = 0; v < n; ++v) {
      mass[component_[v]] += sets_[node_set_[v]].eval(lambda);
      want[component_[v]] += y_[v];
    }
    for (int c = 0; c < component_count_; ++c)
      if (std::abs(mass[c] - want[c]) > 1e-8 * std::max(1.0, std::abs(want[c])))
        throw internal_error("validate: component mass drifted");
  }

  void check_connected(int s) {
    const auto& members = sets_[s].members;
    if (members.size() <= 1) return;
    for (int v : members) comp_of_node_resize(v) = -1;
    std::vector<int> stack = {members.front()};
    comp_of_node_[members.front()] = 0;
    size_t reached = 0;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      ++reached;
      for (const auto& nb : g_.neighbors(u)) {
        if (node_set_[nb.node] != s || comp_of_node_[nb.node] == 0) continue;
        comp_of_node_[nb.node] = 0;
        stack.push_back(nb.node);
      }
    }
    for (int v : members) comp_of_node_[v] = -1;
    if (reached != members.size())
      throw internal_error("validate: fused set is disconnected");
  }

  void check_terminal() {
    int live = 0;
    for (const auto& rec : sets_)
      live += rec.alive ? 1 : 0;
    if (live != component_count_)
      throw internal_error("solve_path_general: finished with stray sets");
  }

  // ---- data ----------------------------------------------------------------

  const Vector& y_;
  const PenaltyGraph& g_;
  GeneralOptions opt_;

  std::vector<EdgeState> edges_;
  std::vector<SetRec> sets_;
  std::vector<int> node_set_;
  std::vector<int> component_;
  int component_count_ = 0;

  std::priority_queue<QEvent, std::vector<QEvent>, QLater> heap_;
  std::deque<std::pair<int, int>> touches_;
  std::deque<QEvent> viols_;
  std::vector<int> changed_geom_;
  std::vector<char> changed_flag_;
  std::vector<int> cert_queue_;
  std::vector<int> cert_flagged_;
  std::vector<char> needs_cert_flag_;
  std::vector<char> cert_violation_flag_;
  std::set<std::array<std::uint64_t, 2>> split_guard_;
  std::vector<int> neighbor_scratch_;
  std::vector<double> prev_rates_;
  std::vector<int> local_of_;
  std::vector<char> upper_flag_;
  std::vector<int> comp_of_node_;
  bool mark_all_changed_ = false;

  GeneralPathStore store_;
};

}  // namespace detail_general

/// Full lambda2 solution path over an arbitrary penalty graph. With the
/// default options the stored path is exact; a finite split_cap yields the
/// faster approximation that stops split-checking large sets.
inline GeneralPathStore solve_path_general(const Vector& y, const PenaltyGraph& graph,
                                           GeneralOptions opt = {}) {
  detail_general::Engine engine(y, graph, opt);
  return engine.run();
}

}  // namespace flsa
