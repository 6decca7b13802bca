#pragma once

// Shared helpers for the unit and acceptance suites.

#include "flsa/flsa.hpp"

#include <random>
#include <utility>
#include <vector>

namespace testsupport {

inline flsa::Vector random_signal(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  flsa::Vector y(n);
  for (int i = 0; i < n; ++i) y[i] = gauss(rng);
  return y;
}

/// Random small flow network: interior nodes with arbitrary directed
/// capacities plus a handful of source/sink attachments. With integer_caps
/// every capacity is a whole number in [0, 5]; otherwise uniform reals.
inline flsa::FlowNetwork random_network(int interior, std::uint64_t seed,
                                        bool integer_caps) {
  std::mt19937_64 rng(seed);
  auto cap = [&]() -> double {
    if (integer_caps) return double(rng() % 6);
    return std::uniform_real_distribution<double>(0.0, 5.0)(rng);
  };
  flsa::FlowNetwork net(interior);
  for (int a = 0; a < interior; ++a)
    for (int b = a + 1; b < interior; ++b)
      if (rng() % 100 < 45) {
        double fwd = rng() % 8 == 0 ? flsa::unbounded : cap();
        double bwd = rng() % 8 == 0 ? flsa::unbounded : cap();
        net.add_edge(a, b, fwd, bwd);
      }
  int sources = 1 + int(rng() % 3), sinks = 1 + int(rng() % 3);
  for (int i = 0; i < sources; ++i) net.add_source_edge(int(rng() % interior), cap());
  for (int i = 0; i < sinks; ++i) net.add_sink_edge(int(rng() % interior), cap());
  return net;
}

/// Row-major flatten matching grid_graph node numbering.
inline flsa::Vector flatten(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd t = m.transpose();
  return Eigen::Map<flsa::Vector>(t.data(), t.size());
}

inline std::vector<double> midpoints(const std::vector<double>& breakpoints) {
  std::vector<double> out;
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
    out.push_back(0.5 * (breakpoints[i] + breakpoints[i + 1]));
  if (!breakpoints.empty()) out.push_back(breakpoints.back() * 1.1 + 0.1);
  return out;
}

}  // namespace testsupport
