#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "pairstat/errors.hpp"

namespace pairstat {

/// Closed interval [lo, hi]; either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static constexpr Interval whole_line() { return {}; }
  static constexpr Interval from(double lo) {
    return {lo, std::numeric_limits<double>::infinity()};
  }
  static constexpr Interval up_to(double hi) {
    return {-std::numeric_limits<double>::infinity(), hi};
  }

  bool empty() const noexcept { return !(lo < hi); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Uniform inclusive grid x_i = x_min + i dx, i = 0..n-1.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (n < 2) throw ConfigurationError("Grid1D: need at least 2 points");
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
      throw ConfigurationError("Grid1D: require finite x_min < x_max");
    }
    dx_ = (x_max - x_min) / static_cast<double>(n - 1);
  }

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return dx_; }
  double extent() const noexcept { return x_max_ - x_min_; }

  double x(std::size_t i) const noexcept {
    // Mirror-exact for symmetric grids: x(i) == -x(n-1-i) bit for bit.
    const double half = 0.5 * static_cast<double>(n_ - 1);
    const double centre = 0.5 * (x_min_ + x_max_);
    return centre + (static_cast<double>(i) - half) * dx_;
  }

  /// x_min == -x_max up to roundoff.
  bool symmetric() const noexcept {
    return std::abs(x_min_ + x_max_) <= 1e-12 * extent();
  }

  std::size_t mirror(std::size_t i) const noexcept { return n_ - 1 - i; }

  /// Index of the grid point nearest to x, clamped to the grid.
  std::size_t nearest_index(double x) const noexcept {
    if (!(x > x_min_)) return 0;
    if (!(x < x_max_)) return n_ - 1;
    const double pos = (x - x_min_) / dx_;
    const auto i = static_cast<std::size_t>(std::llround(pos));
    return i < n_ ? i : n_ - 1;
  }

  bool contains(double x) const noexcept { return x >= x_min_ && x <= x_max_; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
    return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
  }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_ = 0;
};

}  // namespace pairstat
