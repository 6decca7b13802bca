// Command-line front end for the fused-lasso signal approximator path solvers.

#include "flsa/flsa.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using flsa::Vector;

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_invalid = 2,
  exit_io = 3,
  exit_parse = 4,
  exit_verify = 5,
  exit_convergence = 6,
  exit_internal = 7,
};

struct GraphSpec {
  enum Kind { chain, grid, edgelist } kind = chain;
  int n = -1;           // chain=N
  int rows = -1, cols = -1;
  std::string path;     // edgelist=FILE
};

GraphSpec parse_graph_spec(const std::string& text) {
  GraphSpec spec;
  auto eq = text.find('=');
  std::string head = text.substr(0, eq);
  std::string arg = eq == std::string::npos ? "" : text.substr(eq + 1);
  if (head == "chain") {
    spec.kind = GraphSpec::chain;
    if (!arg.empty()) spec.n = std::stoi(arg);
  } else if (head == "grid") {
    spec.kind = GraphSpec::grid;
    if (!arg.empty()) {
      auto x = arg.find('x');
      if (x == std::string::npos)
        throw CLI::ValidationError("--graph", "grid wants ROWSxCOLS");
      spec.rows = std::stoi(arg.substr(0, x));
      spec.cols = std::stoi(arg.substr(x + 1));
    }
  } else if (head == "edgelist") {
    spec.kind = GraphSpec::edgelist;
    if (arg.empty()) throw CLI::ValidationError("--graph", "edgelist wants a file");
    spec.path = arg;
  } else {
    throw CLI::ValidationError("--graph", "expected chain|grid=RxC|edgelist=FILE");
  }
  return spec;
}

std::vector<double> parse_lambda2(const std::string& text) {
  std::vector<double> out;
  auto colons = std::count(text.begin(), text.end(), ':');
  if (colons == 2) {
    auto c1 = text.find(':'), c2 = text.find(':', c1 + 1);
    double lo = std::stod(text.substr(0, c1));
    double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    long count = std::stol(text.substr(c2 + 1));
    if (count < 1) throw CLI::ValidationError("--lambda2", "count must be >= 1");
    for (long i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * i / double(count - 1));
  } else {
    size_t start = 0;
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      std::string field = text.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!field.empty()) out.push_back(std::stod(field));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (out.empty()) throw CLI::ValidationError("--lambda2", "no values given");
  for (double l : out)
    if (!(l >= 0.0)) throw CLI::ValidationError("--lambda2", "values must be >= 0");
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

struct LoadedProblem {
  flsa::PenaltyGraph graph;
  Vector y;
  bool is_chain = false;
};

LoadedProblem load_problem(const GraphSpec& spec, const std::string& input) {
  LoadedProblem p;
  if (input.empty())
    throw std::invalid_argument("this mode needs --input FILE");
  switch (spec.kind) {
    case GraphSpec::chain: {
      p.y = flsa::read_signal(input);
      if (spec.n > 0 && spec.n != p.y.size())
        throw std::invalid_argument("--graph chain=N disagrees with input length");
      p.graph = flsa::chain_graph(static_cast<int>(p.y.size()));
      p.is_chain = true;
      break;
    }
    case GraphSpec::grid: {
      Eigen::MatrixXd m = flsa::read_matrix(input);
      int rows = spec.rows > 0 ? spec.rows : static_cast<int>(m.rows());
      int cols = spec.cols > 0 ? spec.cols : static_cast<int>(m.cols());
      if (rows * cols != m.rows() * m.cols())
        throw std::invalid_argument("--graph grid=RxC disagrees with input shape");
      // row-major flatten: node (r, c) -> r*cols + c
      Eigen::MatrixXd t = m.transpose();
      p.y = Eigen::Map<Vector>(t.data(), t.size());
      p.graph = flsa::grid_graph(rows, cols);
      break;
    }
    case GraphSpec::edgelist: {
      p.graph = flsa::read_edge_list(spec.path);
      p.y = flsa::read_signal(input);
      if (p.y.size() != p.graph.node_count())
        throw std::invalid_argument("signal length differs from graph node count");
      break;
    }
  }
  return p;
}

struct PathResult {
  std::optional<flsa::PathTree> tree;
  std::optional<flsa::GeneralPathStore> store;

  Vector eval(double lambda2) const {
    return tree ? flsa::eval_path(*tree, lambda2) : flsa::eval_general(*store, lambda2);
  }
};

PathResult solve(const LoadedProblem& p, int cap) {
  PathResult r;
  if (p.is_chain)
    r.tree = flsa::solve_path_1d(p.y);
  else
    r.store = flsa::solve_path_general(
        p.y, p.graph,
        {.split_cap = cap > 0 ? cap : std::numeric_limits<int>::max()});
  return r;
}

std::ostream& open_sink(const std::string& output, std::ofstream& file) {
  if (output.empty() || output == "-") return std::cout;
  file = flsa::open_output(output);
  return file;
}

void emit_solutions(std::ostream& out, const std::string& format,
                    const std::vector<double>& lambdas,
                    const std::vector<Vector>& betas, double lambda1) {
  if (format == "json") {
    nlohmann::json doc;
    doc["lambda1"] = lambda1;
    doc["lambda2"] = lambdas;
    for (const auto& b : betas)
      doc["beta"].push_back(std::vector<double>(b.data(), b.data() + b.size()));
    out << doc.dump(2) << '\n';
  } else if (lambdas.size() == 1) {
    flsa::write_beta_csv(out, betas.front());
  } else {
    flsa::write_solution_csv(out, lambdas, betas);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Exact and approximate solution paths for the fused lasso signal approximator"};
  std::string graph_text = "chain";
  std::string input, output, format = "csv", mode = "solve", lambda2_text;
  double lambda1 = 0.0;
  int cap = 0;
  unsigned long long seed = 0;

  app.add_option("--graph", graph_text, "chain[=N] | grid[=RxC] | edgelist=FILE");
  app.add_option("--input", input, "signal file (one value per line or CSV)");
  app.add_option("--lambda2", lambda2_text, "list v1,v2,... or range lo:hi:count");
  app.add_option("--lambda1", lambda1, "sparsity penalty, applied by soft-thresholding");
  app.add_option("--cap", cap, "size cap K for the approximate algorithm (0 = exact)");
  app.add_option("--mode", mode, "solve | path-dump | simulate | bench | verify")
      ->check(CLI::IsMember({"solve", "path-dump", "simulate", "bench", "verify"}));
  app.add_option("--seed", seed, "simulator seed");
  app.add_option("--format", format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", output, "output path (default stdout)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_usage;
  }

  GraphSpec spec = parse_graph_spec(graph_text);
  std::ofstream sink_file;

  if (mode == "simulate") {
    std::ostream& out = open_sink(output, sink_file);
    if (spec.kind == GraphSpec::chain) {
      if (spec.n < 1)
        throw std::invalid_argument("simulate needs --graph chain=N");
      flsa::write_signal(out, flsa::simulate_1d(spec.n, seed));
    } else if (spec.kind == GraphSpec::grid) {
      if (spec.rows < 1 || spec.rows != spec.cols)
        throw std::invalid_argument("simulate needs --graph grid=NxN (square)");
      flsa::write_matrix_csv(out, flsa::simulate_2d(spec.rows, seed));
    } else {
      throw std::invalid_argument("simulate supports chain and grid graphs");
    }
    return exit_ok;
  }

  LoadedProblem problem = load_problem(spec, input);

  if (mode == "path-dump") {
    if (problem.is_chain) {
      std::ostream& out = open_sink(output, sink_file);
      flsa::write_path_tree_csv(out, flsa::solve_path_1d(problem.y));
    } else {
      if (output.empty() || output == "-")
        throw std::invalid_argument("path-dump on a general graph needs --output FILE");
      auto store = flsa::solve_path_general(
          problem.y, problem.graph,
          {.split_cap = cap > 0 ? cap : std::numeric_limits<int>::max()});
      auto anchors = flsa::open_output(output);
      flsa::write_anchors_csv(anchors, store);
      auto events = flsa::open_output(output + ".events.csv");
      flsa::write_events_csv(events, store);
    }
    return exit_ok;
  }

  if (lambda2_text.empty())
    throw std::invalid_argument("this mode needs --lambda2");
  std::vector<double> lambdas = parse_lambda2(lambda2_text);

  if (mode == "solve") {
    PathResult path = solve(problem, cap);
    std::vector<Vector> betas;
    betas.reserve(lambdas.size());
    for (double l : lambdas)
      betas.push_back(flsa::soft_threshold(path.eval(l), lambda1));
    std::ostream& out = open_sink(output, sink_file);
    emit_solutions(out, format, lambdas, betas, lambda1);
    return exit_ok;
  }

  if (mode == "bench") {
    Timer total;
    Timer solve_timer;
    PathResult path = solve(problem, cap);
    double solve_s = solve_timer.seconds();
    Timer eval_timer;
    std::vector<Vector> betas;
    for (double l : lambdas)
      betas.push_back(flsa::soft_threshold(path.eval(l), lambda1));
    double eval_s = eval_timer.seconds();
    std::ostream& out = open_sink(output, sink_file);
    out << "phase,seconds\n";
    out << "solve," << flsa::format_value(solve_s) << '\n';
    out << "eval," << flsa::format_value(eval_s) << '\n';
    out << "total," << flsa::format_value(total.seconds()) << '\n';
    out << "# n=" << problem.y.size() << " edges=" << problem.graph.edge_count()
        << " lambdas=" << lambdas.size() << '\n';
    return exit_ok;
  }

  // verify: compare the path solver against the independent fixed-point solver
  double tolerance = 1e-5;
  if (const char* env = std::getenv("FLSA_TOL")) tolerance = std::atof(env);
  PathResult path = solve(problem, cap);
  double worst = 0.0;
  std::ostream& out = open_sink(output, sink_file);
  out << "lambda2,sup_error\n";
  for (double l : lambdas) {
    Vector a = flsa::soft_threshold(path.eval(l), lambda1);
    Vector o = flsa::oracle_solve(problem.y, problem.graph, l, lambda1);
    double err = (a - o).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    out << flsa::format_value(l) << ',' << flsa::format_value(err) << '\n';
  }
  out << "# max sup-norm error = " << flsa::format_value(worst) << " (tolerance "
      << flsa::format_value(tolerance) << ")\n";
  return worst <= tolerance ? exit_ok : exit_verify;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const flsa::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_parse_error() ? exit_parse : exit_io;
  } catch (const flsa::convergence_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_convergence;
  } catch (const flsa::internal_error& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return exit_internal;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  }
}
