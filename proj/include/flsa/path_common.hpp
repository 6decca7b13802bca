#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace flsa {

using Vector = Eigen::VectorXd;
using Index = int;

/// Thrown when a runtime invariant of the path engines is broken. Seeing this
/// means a bug in the solver, not bad user input.
class internal_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Thrown by iterative solvers that hit their iteration cap.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

namespace tol {

// Two event values are treated as one breakpoint when within this window.
inline constexpr double event = 1e-12;

// Relative saturation tolerance for max-flow source/sink edges.
inline constexpr double flow = 1e-9;

/// Scaled tolerance for deciding that a subgradient value sits on the
/// +-lambda2 bound.
inline double tau_bound(double lambda2) {
  return 1e-9 * std::max(1.0, lambda2);
}

/// True when two coefficient values are indistinguishable at a breakpoint.
/// Both path engines share this so chain runs produce identical events.
inline bool beta_tie(double a, double b) {
  return std::abs(a - b) <= 1e-11 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace tol

inline void require_finite(const Vector& y, const char* who) {
  if (y.size() == 0)
    throw std::invalid_argument(std::string(who) + ": empty input");
  if (!y.allFinite())
    throw std::invalid_argument(std::string(who) + ": non-finite input value");
}

/// One linear segment of a coefficient trajectory: beta(l) = beta + slope*(l - lambda)
/// valid until the next anchor.
struct Anchor {
  double lambda;
  double beta;
  double slope;

  double eval(double lambda2) const { return beta + slope * (lambda2 - lambda); }
};

/// Value of lambda2 at which two adjacent trajectories meet, if they are
/// approaching at all. beta_* are evaluated at lambda_now. Returns nothing
/// when the slopes are equal or the meeting point is not strictly ahead.
inline std::optional<double> hitting_time(double beta_i, double slope_i,
                                          double beta_j, double slope_j,
                                          double lambda_now) {
  if (slope_i == slope_j) return std::nullopt;
  double h = lambda_now + (beta_i - beta_j) / (slope_j - slope_i);
  if (!(h > lambda_now)) return std::nullopt;
  return h;
}

namespace detail {

/// Allocator that asks the kernel for transparent huge pages on multi-MB
/// blocks. Large solves touch their tables at random; 4 KB pages then spend a
/// noticeable share of time in TLB walks. Falls back to plain allocation on
/// platforms without the hint.
template <typename T>
struct big_block_allocator {
  using value_type = T;
  big_block_allocator() = default;
  template <typename U>
  big_block_allocator(const big_block_allocator<U>&) {}

  static constexpr std::size_t huge_threshold = std::size_t{4} << 20;
  static constexpr std::size_t huge_align = std::size_t{2} << 20;

  T* allocate(std::size_t n);
  void deallocate(T* p, std::size_t n);

  template <typename U>
  bool operator==(const big_block_allocator<U>&) const { return true; }
};

// Engine-side variant: keeps a meet that rounds onto lambda_now itself, so a
// pending fusion cannot be lost to floating-point underflow of the gap.
inline std::optional<double> approaching_hit(double beta_i, double slope_i,
                                             double beta_j, double slope_j,
                                             double lambda_now) {
  double gap = beta_i - beta_j;
  double closing = slope_j - slope_i;
  if (gap == 0.0 || closing == 0.0) return std::nullopt;
  double q = gap / closing;
  if (q <= 0.0) return std::nullopt;  // moving apart
  return lambda_now + q;
}

}  // namespace detail

/// First lambda2 > lambda_now at which tau(l) = tau + rate*(l - lambda_now)
/// leaves [-l, l]. Only rates faster than the bound itself can violate.
inline std::optional<double> edge_violation_time(double tau, double rate,
                                                 double lambda_now) {
  double speed = std::abs(rate);
  if (speed <= 1.0) return std::nullopt;
  double target = rate > 0.0 ? lambda_now : -lambda_now;
  return lambda_now + std::abs(target - tau) / (speed - 1.0);
}

}  // namespace flsa

#if defined(__linux__)
#include <sys/mman.h>
#endif
#include <cstdlib>
#include <new>

namespace flsa::detail {

template <typename T>
T* big_block_allocator<T>::allocate(std::size_t n) {
  std::size_t bytes = n * sizeof(T);
#if defined(__linux__)
  if (bytes >= huge_threshold) {
    std::size_t padded = (bytes + huge_align - 1) / huge_align * huge_align;
    void* p = std::aligned_alloc(huge_align, padded);
    if (!p) throw std::bad_alloc();
    ::madvise(p, padded, MADV_HUGEPAGE);  // advisory, failure is fine
    return static_cast<T*>(p);
  }
#endif
  return static_cast<T*>(::operator new(bytes));
}

template <typename T>
void big_block_allocator<T>::deallocate(T* p, std::size_t n) {
  std::size_t bytes = n * sizeof(T);
#if defined(__linux__)
  if (bytes >= huge_threshold) {
    std::free(p);
    return;
  }
#endif
  ::operator delete(p);
}

}  // namespace flsa::detail
