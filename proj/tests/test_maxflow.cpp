#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flsa/maxflow.hpp"
#include "support.hpp"

using namespace flsa;

TEST_CASE("single augmenting path saturates") {
  FlowNetwork net(2);
  net.add_source_edge(0, 1.0);
  net.add_edge(0, 1, 1.0, unbounded);
  net.add_sink_edge(1, 1.0);
  auto r = max_flow(net);
  CHECK(r.value == 1.0);
  CHECK(r.saturated);
  CHECK(r.reachable.empty());
}

TEST_CASE("bottleneck leaves the source side reachable") {
  FlowNetwork net(2);
  net.add_source_edge(0, 2.0);
  net.add_edge(0, 1, 1.0, unbounded);
  net.add_sink_edge(1, 2.0);
  auto r = max_flow(net);
  CHECK(r.value == 1.0);
  CHECK_FALSE(r.saturated);
  REQUIRE(r.reachable.size() == 1);
  CHECK(r.reachable[0] == 0);
}

TEST_CASE("unbounded edge hides every cut but one") {
  FlowNetwork net(2);
  net.add_source_edge(0, 3.0);
  net.add_edge(0, 1, unbounded, unbounded);
  net.add_sink_edge(1, 50.0);
  CHECK(min_cut_value_bruteforce(net) == 3.0);
  CHECK(max_flow(net).value == 3.0);
}

TEST_CASE("brute-force cut enumeration rejects oversized networks") {
  FlowNetwork net(21);
  CHECK_THROWS_AS(min_cut_value_bruteforce(net), std::invalid_argument);
}

TEST_CASE("random networks agree with the exhaustive minimum cut") {
  SUBCASE("integer capacities match exactly") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      auto net = testsupport::random_network(2 + int(seed % 7), seed, true);
      auto r = max_flow(net);
      CHECK(r.value == min_cut_value_bruteforce(net));
      CHECK(conservation_gap(net, r) == 0.0);
    }
  }
  SUBCASE("real capacities match to 1e-9") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      auto net = testsupport::random_network(2 + int(seed % 7), seed + 9000, false);
      auto r = max_flow(net);
      CHECK(r.value == doctest::Approx(min_cut_value_bruteforce(net)).epsilon(1e-9));
      CHECK(conservation_gap(net, r) <= 1e-12);
    }
  }
}

TEST_CASE("saturation implies saturated sink edges") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    // balanced source/sink totals, the shape the path engine produces
    std::mt19937_64 rng(seed);
    int interior = 3 + int(rng() % 5);
    FlowNetwork net(interior);
    std::vector<int> sink_edges;
    double total = 1.0 + double(rng() % 4);
    net.add_source_edge(0, total);
    sink_edges.push_back(net.add_sink_edge(interior - 1, total));
    for (int a = 0; a < interior; ++a)
      for (int b = a + 1; b < interior; ++b)
        if (rng() % 100 < 60) net.add_edge(a, b, double(rng() % 5), double(rng() % 5));
    auto r = max_flow(net);
    if (!r.saturated) continue;
    for (int e : sink_edges)
      CHECK(r.flow[e] == doctest::Approx(net.capacity(e)).epsilon(1e-12));
  }
}

TEST_CASE("network validation") {
  FlowNetwork net(2);
  CHECK_THROWS_AS(net.add_edge(0, 0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(net.add_edge(0, 7, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(net.add_edge(0, 1, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(FlowNetwork(-1), std::invalid_argument);
}
