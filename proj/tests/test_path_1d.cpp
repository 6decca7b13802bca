#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flsa/oracle.hpp"
#include "flsa/path_1d.hpp"
#include "flsa/soft_threshold.hpp"
#include "support.hpp"

using namespace flsa;

TEST_CASE("two-point closed form") {
  Vector y(2);
  y << 0.0, 3.0;
  auto tree = solve_path_1d(y);
  auto bp = breakpoints(tree);
  REQUIRE(bp.size() == 1);
  CHECK(bp[0] == doctest::Approx(1.5).epsilon(1e-15));

  Vector mid = eval_path(tree, 1.0);
  CHECK(mid[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mid[1] == doctest::Approx(2.0).epsilon(1e-15));

  Vector fused = eval_path(tree, 9.0);
  CHECK(fused[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(fused[1] == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("constant signal fuses immediately") {
  Vector y = Vector::Constant(6, 2.5);
  auto tree = solve_path_1d(y);
  CHECK(breakpoints(tree) == std::vector<double>{0.0});
  CHECK(tree.internal_count() == 5);
  for (double l : {0.0, 0.3, 10.0}) {
    Vector b = eval_path(tree, l);
    for (int k = 0; k < 6; ++k) CHECK(b[k] == 2.5);
  }
}

TEST_CASE("evaluation endpoints") {
  auto y = testsupport::random_signal(40, 7);
  auto tree = solve_path_1d(y);
  Vector at_zero = eval_path(tree, 0.0);
  for (int k = 0; k < 40; ++k) CHECK(at_zero[k] == y[k]);

  double last = breakpoints(tree).back();
  Vector flat = eval_path(tree, last * 2 + 1);
  for (int k = 0; k < 40; ++k)
    CHECK(flat[k] == doctest::Approx(y.mean()).epsilon(1e-12));

  CHECK_THROWS_AS(eval_path(tree, -0.5), std::invalid_argument);
  CHECK(eval_path_leaf(tree, 3, 0.0) == y[3]);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(solve_path_1d(Vector{}), std::invalid_argument);
  Vector bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_path_1d(bad), std::invalid_argument);
  CHECK(solve_path_1d(Vector::Constant(1, 4.0)).leaf_count == 1);
}

TEST_CASE("hitting time contract") {
  Anchor left{0.0, 0.0, 1.0}, right{0.0, 3.0, -1.0};
  auto h = hitting_time_1d(left, right, 0.0);
  REQUIRE(h.has_value());
  CHECK(*h == doctest::Approx(1.5).epsilon(1e-15));

  // touching with diverging slopes: they separate, no candidate
  CHECK_FALSE(hitting_time_1d({0.0, 1.0, 1.0}, {0.0, 1.0, -1.0}, 0.0).has_value());
  // parallel trajectories never meet
  CHECK_FALSE(hitting_time_1d({0.0, 0.0, 0.5}, {0.0, 3.0, 0.5}, 0.0).has_value());
  // moving apart: the formula lands before lambda_now and is discarded
  CHECK_FALSE(hitting_time_1d({2.0, 5.0, 1.0}, {2.0, 4.0, -1.0}, 2.0).has_value());
}

TEST_CASE("soft thresholding") {
  CHECK(soft_threshold(2.0, 0.5) == 1.5);
  CHECK(soft_threshold(-0.3, 0.5) == 0.0);
  CHECK(soft_threshold(-2.0, 0.5) == -1.5);
  Vector v(3);
  v << 2.0, -0.3, 0.0;
  Vector t = soft_threshold(v, 0.5);
  CHECK(t[0] == 1.5);
  CHECK(t[1] == 0.0);
  CHECK(t[2] == 0.0);
  Vector id = soft_threshold(v, 0.0);
  for (int k = 0; k < 3; ++k) CHECK(id[k] == v[k]);
  CHECK_THROWS_AS(soft_threshold(v, -0.1), std::invalid_argument);
}

TEST_CASE("ties cascade at one breakpoint") {
  Vector y(3);
  y << 0.0, 1.0, 2.0;
  auto tree = solve_path_1d(y);
  auto bp = breakpoints(tree);
  REQUIRE(bp.size() == 1);
  CHECK(bp[0] == doctest::Approx(1.0).epsilon(1e-15));
  Vector before = eval_path(tree, 0.5);
  CHECK(before[0] == doctest::Approx(0.5));
  CHECK(before[1] == doctest::Approx(1.0));
  CHECK(before[2] == doctest::Approx(1.5));
  Vector after = eval_path(tree, 1.0);
  for (int k = 0; k < 3; ++k) CHECK(after[k] == doctest::Approx(1.0));
}

TEST_CASE("path structure invariants over random instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    int n = 2 + int(seed % 50);
    auto y = testsupport::random_signal(n, 1000 + seed);
    auto tree = solve_path_1d(y);

    // monotone fusion: n-1 events, lambda non-decreasing toward the root
    CHECK(tree.internal_count() == n - 1);
    for (const auto& node : tree.nodes)
      if (node.parent >= 0)
        CHECK(tree.nodes[node.parent].lambda >= node.lambda);

    auto bp = breakpoints(tree);
    std::vector<double> grid = {0.0};
    grid.insert(grid.end(), bp.begin(), bp.end());
    grid.push_back(bp.back() * 1.25);

    for (size_t i = 0; i + 1 < grid.size(); ++i) {
      double a = grid[i], b = grid[i + 1];
      Vector at_a = eval_path(tree, a);
      Vector at_m = eval_path(tree, 0.5 * (a + b));
      Vector at_b = eval_path(tree, b);

      // piecewise linearity: the midpoint interpolates its segment ends
      Vector lerp = 0.5 * (at_a + at_b);
      CHECK((at_m - lerp).cwiseAbs().maxCoeff() <= 1e-9);

      // mass conservation
      CHECK(at_m.sum() == doctest::Approx(y.sum()).epsilon(1e-9));

      // order preservation strictly inside a segment
      Vector at_q = eval_path(tree, a + 0.75 * (b - a));
      for (int k = 0; k + 1 < n; ++k) {
        double d1 = at_m[k] - at_m[k + 1], d2 = at_q[k] - at_q[k + 1];
        if (std::abs(d1) > 1e-9 && std::abs(d2) > 1e-9) CHECK(d1 * d2 > 0.0);
      }

      // stationarity at the segment midpoint
      CHECK(check_subgradient_1d(y, at_m, 0.5 * (a + b)).worst() <= 1e-9);
    }
  }
}

TEST_CASE("subgradient report on hand cases") {
  Vector y(4);
  y << 0.0, 1.0, 2.0, 3.0;  // strictly monotone

  SUBCASE("beta = y cannot be stationary for positive lambda2") {
    auto report = check_subgradient_1d(y, y, 0.5);
    CHECK(report.sign_violation >= 0.25);
  }
  SUBCASE("the grand mean is stationary for large lambda2") {
    Vector flat = Vector::Constant(4, y.mean());
    auto tree = solve_path_1d(y);
    double beyond = breakpoints(tree).back() + 1.0;
    CHECK(check_subgradient_1d(y, flat, beyond).worst() <= 1e-12);
  }
  SUBCASE("size mismatch") {
    CHECK_THROWS_AS(check_subgradient_1d(y, Vector::Zero(3), 0.1),
                    std::invalid_argument);
  }
}

TEST_CASE("path matches the independent solver on small instances") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    int n = 2 + int(seed % 7);
    auto y = testsupport::random_signal(n, 40 + seed);
    auto tree = solve_path_1d(y);
    auto graph = chain_graph(n);
    double last = breakpoints(tree).back();
    for (double frac : {0.15, 0.5, 0.9, 1.1}) {
      double l = last * frac;
      Vector path_beta = eval_path(tree, l);
      Vector oracle_beta = oracle_solve(y, graph, l, 0.0);
      CHECK((path_beta - oracle_beta).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
}

TEST_CASE("thresholded path matches the penalized solver") {
  auto y = testsupport::random_signal(12, 99);
  auto tree = solve_path_1d(y);
  auto graph = chain_graph(12);
  for (double l1 : {0.0, 0.2, 0.7}) {
    Vector path_beta = soft_threshold(eval_path(tree, 0.4), l1);
    Vector oracle_beta = oracle_solve(y, graph, 0.4, l1);
    CHECK((path_beta - oracle_beta).cwiseAbs().maxCoeff() <= 1e-6);
  }
}
