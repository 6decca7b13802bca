#pragma once

#include "flsa/path_common.hpp"
#include "flsa/path_store.hpp"
#include "flsa/path_tree.hpp"
#include "flsa/penalty_graph.hpp"

#include <Eigen/Core>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace flsa {

/// I/O and parse failures, carrying the file and 1-based line when known.
class io_error : public std::runtime_error {
 public:
  io_error(const std::string& file, int line, const std::string& what)
      : std::runtime_error(line > 0 ? file + ":" + std::to_string(line) + ": " + what
                                    : file + ": " + what),
        parse_(line > 0) {}
  bool is_parse_error() const { return parse_; }

 private:
  bool parse_;
};

namespace detail_io {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (start <= line.size()) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, const std::string& file, int line) {
  field = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw io_error(file, line, "bad number '" + std::string(field) + "'");
  return value;
}

inline long parse_int(std::string_view field, const std::string& file, int line) {
  field = trim(field);
  long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw io_error(file, line, "bad integer '" + std::string(field) + "'");
  return value;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path, 0, "cannot open for reading");
  return in;
}

}  // namespace detail_io

/// One value per line, or comma-separated values with any number per line.
inline Vector read_signal(const std::string& path) {
  auto in = detail_io::open_input(path);
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail_io::trim(line).empty()) continue;
    for (auto field : detail_io::split_fields(line)) {
      if (detail_io::trim(field).empty()) continue;
      values.push_back(detail_io::parse_double(field, path, lineno));
    }
  }
  if (values.empty()) throw io_error(path, 0, "no values found");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

/// Rectangular CSV matrix, row-major.
inline Eigen::MatrixXd read_matrix(const std::string& path) {
  auto in = detail_io::open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail_io::trim(line).empty()) continue;
    std::vector<double> row;
    for (auto field : detail_io::split_fields(line))
      row.push_back(detail_io::parse_double(field, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size())
      throw io_error(path, lineno, "ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(path, 0, "no rows found");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return m;
}

/// Edge-list format: a "n m" header line, then m lines "k l" (0-based).
inline PenaltyGraph read_edge_list(const std::string& path) {
  auto in = detail_io::open_input(path);
  std::string line;
  int lineno = 0;
  long n = -1, m = -1;
  std::vector<std::pair<int, int>> pairs;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = detail_io::trim(line);
    if (sv.empty()) continue;
    std::istringstream fields{std::string(sv)};
    if (n < 0) {
      if (!(fields >> n >> m) || n < 0 || m < 0)
        throw io_error(path, lineno, "expected header 'n m'");
      continue;
    }
    long a, b;
    if (!(fields >> a >> b)) throw io_error(path, lineno, "expected edge 'k l'");
    pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  if (n < 0) throw io_error(path, 0, "missing header");
  if (static_cast<long>(pairs.size()) != m)
    throw io_error(path, 0, "edge count differs from header");
  try {
    return from_edge_list(static_cast<int>(n), pairs);
  } catch (const std::invalid_argument& err) {
    throw io_error(path, 0, err.what());
  }
}

// ---- writers ---------------------------------------------------------------

/// Full-precision float formatting; 17 significant digits round-trip doubles.
inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error(path, 0, "cannot open for writing");
  return out;
}

/// Single-penalty solution block.
inline void write_beta_csv(std::ostream& out, const Vector& beta) {
  out << "node,beta\n";
  for (Index k = 0; k < beta.size(); ++k)
    out << k << ',' << format_value(beta[k]) << '\n';
}

/// Long-format solution: one row per (lambda2, node), plot-ready.
inline void write_solution_csv(std::ostream& out, const std::vector<double>& lambdas,
                               const std::vector<Vector>& betas) {
  out << "lambda2,node,beta\n";
  for (size_t i = 0; i < lambdas.size(); ++i)
    for (Index k = 0; k < betas[i].size(); ++k)
      out << format_value(lambdas[i]) << ',' << k << ','
          << format_value(betas[i][k]) << '\n';
}

/// Fusion-tree dump, one row per internal node in creation order.
inline void write_path_tree_csv(std::ostream& out, const PathTree& tree) {
  out << "lambda,child_left,child_right,beta_at_creation,slope\n";
  for (int v = tree.leaf_count; v < static_cast<int>(tree.nodes.size()); ++v) {
    const auto& node = tree.nodes[v];
    out << format_value(node.lambda) << ',' << node.left << ',' << node.right << ','
        << format_value(node.beta) << ',' << format_value(node.slope) << '\n';
  }
}

/// Per-node trajectory anchors of a general path.
inline void write_anchors_csv(std::ostream& out, const GeneralPathStore& store) {
  out << "node,lambda,beta,slope\n";
  for (int k = 0; k < store.n; ++k)
    for (const auto& anchor : store.anchors[k])
      out << k << ',' << format_value(anchor.lambda) << ','
          << format_value(anchor.beta) << ',' << format_value(anchor.slope) << '\n';
}

inline void write_events_csv(std::ostream& out, const GeneralPathStore& store) {
  out << "lambda,kind,set_a,set_b\n";
  for (const auto& ev : store.events)
    out << format_value(ev.lambda) << ',' << to_string(ev.kind) << ',' << ev.set_a
        << ',' << ev.set_b << '\n';
}

inline void write_signal(std::ostream& out, const Vector& y) {
  for (Index k = 0; k < y.size(); ++k) out << format_value(y[k]) << '\n';
}

inline void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_value(m(r, c));
    }
    out << '\n';
  }
}

/// Reads a tree dump written by write_path_tree_csv back into a PathTree,
/// given the original signal; used for the offline-interpolation round trip.
/// The dump covers internal nodes only, so the startup slopes of untied
/// leaves are rebuilt from the signal with the solver's own arithmetic.
inline PathTree read_path_tree_csv(const std::string& path, const Vector& y) {
  auto in = detail_io::open_input(path);
  PathTree tree;
  tree.leaf_count = static_cast<int>(y.size());
  for (int k = 0; k < tree.leaf_count; ++k)
    tree.nodes.push_back({0.0, y[k], 0.0, -1, -1, -1, k, k});

  std::vector<std::pair<int, int>> runs;  // maximal tied stretches
  for (int k = 0; k < tree.leaf_count;) {
    int end = k;
    while (end + 1 < tree.leaf_count && tol::beta_tie(y[end + 1], y[k])) ++end;
    runs.push_back({k, end});
    k = end + 1;
  }
  for (size_t r = 0; r < runs.size(); ++r) {
    if (runs[r].first != runs[r].second) continue;  // covered by a lambda=0 node
    int k = runs[r].first;
    int sgn = 0;
    if (r > 0) sgn += y[k] > y[runs[r - 1].first] ? 1 : -1;
    if (r + 1 < runs.size()) sgn += y[k] > y[runs[r + 1].first] ? 1 : -1;
    tree.nodes[k].slope = -static_cast<double>(sgn);
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = detail_io::trim(line);
    if (sv.empty() || lineno == 1) continue;  // header
    auto fields = detail_io::split_fields(sv);
    if (fields.size() != 5) throw io_error(path, lineno, "expected 5 fields");
    int left = static_cast<int>(detail_io::parse_int(fields[1], path, lineno));
    int right = static_cast<int>(detail_io::parse_int(fields[2], path, lineno));
    if (left < 0 || right < 0 || left >= static_cast<int>(tree.nodes.size()) ||
        right >= static_cast<int>(tree.nodes.size()))
      throw io_error(path, lineno, "child index out of range");
    PathTree::Node node;
    node.lambda = detail_io::parse_double(fields[0], path, lineno);
    node.beta = detail_io::parse_double(fields[3], path, lineno);
    node.slope = detail_io::parse_double(fields[4], path, lineno);
    node.left = left;
    node.right = right;
    node.lo = tree.nodes[left].lo;
    node.hi = tree.nodes[right].hi;
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);
    tree.nodes[left].parent = id;
    tree.nodes[right].parent = id;
  }
  if (tree.internal_count() != tree.leaf_count - 1)
    throw io_error(path, 0, "tree dump is incomplete");
  tree.root = static_cast<int>(tree.nodes.size()) - 1;
  return tree;
}

}  // namespace flsa
