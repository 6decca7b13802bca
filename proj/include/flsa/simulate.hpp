#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace flsa {

/// Blocky three-level test data: a zero background, axis-aligned rectangles
/// repainted to 1 or 2 until each level covers roughly 20% (within five
/// percentage points), then centered Gaussian noise with sigma 0.2 on top.
/// Deterministic for a fixed seed. Rectangle sides are drawn uniformly from
/// [max(1, n/20), max(1, n/4)], a convention the generator documents rather
/// than inherits.
namespace detail_sim {

inline constexpr double noise_sigma = 0.2;
inline constexpr double target_share = 0.20;
inline constexpr double share_band = 0.05;
inline constexpr int max_paint_attempts = 10'000;

template <typename Paint>
void paint_until_balanced(int rows, int cols, std::mt19937_64& rng,
                          Eigen::MatrixXd& field, Paint paint) {
  const double cells = static_cast<double>(rows) * cols;
  auto share = [&](double value) {
    return (field.array() == value).count() / cells;
  };
  auto within_band = [&]() {
    return std::abs(share(1.0) - target_share) <= share_band &&
           std::abs(share(2.0) - target_share) <= share_band;
  };
  int attempts = 0;
  while (!within_band() && attempts++ < max_paint_attempts) {
    double value = share(1.0) <= share(2.0) ? 1.0 : 2.0;
    if (share(value) > target_share + share_band) value = value == 1.0 ? 2.0 : 1.0;
    paint(value, rng, field);
  }
  // Tiny fields cannot match the band; the best-effort paint is kept.
}

inline int side_length(int n, std::mt19937_64& rng) {
  int lo = std::max(1, n / 20), hi = std::max(1, n / 4);
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace detail_sim

inline Eigen::MatrixXd simulate_2d(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_2d: n must be >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd field = Eigen::MatrixXd::Zero(n, n);
  detail_sim::paint_until_balanced(
      n, n, rng, field,
      [n](double value, std::mt19937_64& r, Eigen::MatrixXd& f) {
        int h = std::min(detail_sim::side_length(n, r), n);
        int w = std::min(detail_sim::side_length(n, r), n);
        int top = std::uniform_int_distribution<int>(0, n - h)(r);
        int left = std::uniform_int_distribution<int>(0, n - w)(r);
        f.block(top, left, h, w).setConstant(value);
      });
  std::normal_distribution<double> noise(0.0, detail_sim::noise_sigma);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) field(r, c) += noise(rng);
  return field;
}

inline Eigen::VectorXd simulate_1d(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_1d: n must be >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd field = Eigen::MatrixXd::Zero(1, n);
  detail_sim::paint_until_balanced(
      1, n, rng, field,
      [n](double value, std::mt19937_64& r, Eigen::MatrixXd& f) {
        int w = std::min(detail_sim::side_length(n, r), n);
        int left = std::uniform_int_distribution<int>(0, n - w)(r);
        f.block(0, left, 1, w).setConstant(value);
      });
  std::normal_distribution<double> noise(0.0, detail_sim::noise_sigma);
  Eigen::VectorXd out(n);
  for (int c = 0; c < n; ++c) out[c] = field(0, c) + noise(rng);
  return out;
}

/// Noiseless stage of the generators, for tests of the level proportions.
inline Eigen::MatrixXd simulate_2d_noiseless(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_2d: n must be >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd field = Eigen::MatrixXd::Zero(n, n);
  detail_sim::paint_until_balanced(
      n, n, rng, field,
      [n](double value, std::mt19937_64& r, Eigen::MatrixXd& f) {
        int h = std::min(detail_sim::side_length(n, r), n);
        int w = std::min(detail_sim::side_length(n, r), n);
        int top = std::uniform_int_distribution<int>(0, n - h)(r);
        int left = std::uniform_int_distribution<int>(0, n - w)(r);
        f.block(top, left, h, w).setConstant(value);
      });
  return field;
}

}  // namespace flsa
