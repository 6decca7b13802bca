#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flsa/oracle.hpp"
#include "flsa/path_1d.hpp"
#include "support.hpp"

using namespace flsa;

TEST_CASE("degenerate penalties") {
  Vector y(4);
  y << 2.0, -0.3, 0.7, -1.5;
  auto g = chain_graph(4);

  SUBCASE("lambda2 = 0 reduces to plain soft-thresholding") {
    Vector b = oracle_solve(y, g, 0.0, 0.5);
    Vector want = soft_threshold(y, 0.5);
    for (int k = 0; k < 4; ++k) CHECK(b[k] == want[k]);
  }
  SUBCASE("constant input is a fixed point") {
    Vector c = Vector::Constant(5, 3.0);
    Vector b = oracle_solve(c, chain_graph(5), 1.0, 0.25);
    for (int k = 0; k < 5; ++k) CHECK(b[k] == doctest::Approx(2.75).epsilon(1e-12));
  }
}

TEST_CASE("two-point closed form") {
  Vector y(2);
  y << 0.0, 3.0;
  Vector b = oracle_solve(y, chain_graph(2), 1.0, 0.0);
  CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(b[1] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("deterministic output") {
  auto y = testsupport::random_signal(20, 5);
  auto g = chain_graph(20);
  Vector a = oracle_solve(y, g, 0.7, 0.1);
  Vector b = oracle_solve(y, g, 0.7, 0.1);
  for (int k = 0; k < 20; ++k) CHECK(a[k] == b[k]);
}

TEST_CASE("dual objective never increases") {
  auto y = testsupport::random_signal(24, 9);
  auto g = chain_graph(24);
  double prev = std::numeric_limits<double>::infinity();
  long calls = 0;
  OracleOptions opt;
  opt.trace = [&](long, double obj) {
    CHECK(obj <= prev + 1e-12);
    prev = obj;
    ++calls;
  };
  oracle_solve(y, g, 0.5, 0.0, opt);
  CHECK(calls > 10);
}

TEST_CASE("iteration cap raises a convergence error") {
  auto y = testsupport::random_signal(30, 2);
  OracleOptions opt;
  opt.max_iters = 3;
  CHECK_THROWS_AS(oracle_solve(y, chain_graph(30), 0.8, 0.0, opt),
                  convergence_error);
}

TEST_CASE("argument validation") {
  Vector y(3);
  y << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(oracle_solve(y, chain_graph(4), 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_solve(y, chain_graph(3), -0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_solve(y, chain_graph(3), 0.1, -0.2), std::invalid_argument);
  OracleOptions opt;
  opt.tol = 0.0;
  CHECK_THROWS_AS(oracle_solve(y, chain_graph(3), 0.1, 0.0, opt),
                  std::invalid_argument);
}

TEST_CASE("stationarity checker") {
  Vector y(2);
  y << 0.0, 3.0;
  auto g = chain_graph(2);

  SUBCASE("the optimum passes, a perturbation is flagged") {
    Vector star(2);
    star << 1.0, 2.0;
    CHECK(check_kkt(y, g, star, 1.0).max_infeasibility <= 1e-12);
    Vector off = star;
    off[0] += 0.1;
    CHECK(check_kkt(y, g, off, 1.0).max_infeasibility >= 0.09);
  }

  SUBCASE("solver output self-check stays within 10x tolerance") {
    auto yr = testsupport::random_signal(25, 77);
    auto gr = chain_graph(25);
    for (double l : {0.2, 0.6, 1.5}) {
      Vector b = oracle_solve(yr, gr, l, 0.0);
      CHECK(check_kkt(yr, gr, b, l).max_infeasibility <= 1e-7);
    }
  }

  SUBCASE("path output at segment midpoints") {
    auto yr = testsupport::random_signal(30, 31);
    auto tree = solve_path_1d(yr);
    auto gr = chain_graph(30);
    for (double l : testsupport::midpoints(breakpoints(tree)))
      CHECK(check_kkt(yr, gr, eval_path(tree, l), l).max_infeasibility <= 1e-6);
  }
}
