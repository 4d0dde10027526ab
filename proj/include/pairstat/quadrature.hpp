#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

#include "pairstat/grid.hpp"
#include "pairstat/wavefunction.hpp"

namespace pairstat {

/// Grid index range [first, last] covering an interval after clipping to the grid
/// and snapping finite ends to the nearest node.
struct SnappedRange {
  std::size_t first = 0;
  std::size_t last = 0;
  double snap_distance = 0;  // largest |node - requested end| over finite, in-grid ends

  bool empty() const noexcept { return last <= first; }
};

inline SnappedRange snap(const Grid1D& grid, Interval interval) {
  SnappedRange r;
  if (interval.empty() || interval.hi <= grid.x_min() || interval.lo >= grid.x_max()) {
    return r;
  }
  r.first = grid.nearest_index(interval.lo);
  r.last = grid.nearest_index(interval.hi);
  if (grid.contains(interval.lo)) {
    r.snap_distance = std::max(r.snap_distance, std::abs(grid.x(r.first) - interval.lo));
  }
  if (grid.contains(interval.hi)) {
    r.snap_distance = std::max(r.snap_distance, std::abs(grid.x(r.last) - interval.hi));
  }
  if (r.last < r.first) r.last = r.first;
  return r;
}

/// Composite Simpson over nodes first..last of f(i) with spacing dx. An odd number
/// of intervals closes with a three-eighths panel; a single interval is trapezoidal.
template <class F>
auto simpson(std::size_t first, std::size_t last, double dx, F&& f) -> decltype(f(first)) {
  using V = decltype(f(first));
  if (last <= first) return V{};
  const std::size_t m = last - first;
  if (m == 1) return V(0.5 * dx) * (f(first) + f(last));

  std::size_t simpson_end = (m % 2 == 0) ? last : last - 3;
  V sum{};
  if (simpson_end > first) {
    V odd{}, even{};
    for (std::size_t i = first + 1; i < simpson_end; i += 2) odd += f(i);
    for (std::size_t i = first + 2; i < simpson_end; i += 2) even += f(i);
    sum = V(dx / 3.0) * (f(first) + f(simpson_end) + V(4.0) * odd + V(2.0) * even);
  }
  if (simpson_end != last) {
    const std::size_t j = simpson_end;
    sum += V(3.0 * dx / 8.0) * (f(j) + V(3.0) * f(j + 1) + V(3.0) * f(j + 2) + f(j + 3));
  }
  return sum;
}

struct Overlap {
  Amplitude value;
  double snap_distance = 0;
};

/// Quadrature of psi_a psi_b* over the interval, with the endpoint snap reported.
inline Overlap overlap(const WavefunctionSample& a, const WavefunctionSample& b,
                       Interval interval) {
  require_compatible(a, b);
  const SnappedRange r = snap(a.grid(), interval);
  const auto va = a.values();
  const auto vb = b.values();
  const Amplitude v = simpson(r.first, r.last, a.grid().spacing(),
                              [&](std::size_t i) { return va[i] * std::conj(vb[i]); });
  return {v, r.snap_distance};
}

inline Amplitude inner_product(const WavefunctionSample& a, const WavefunctionSample& b,
                               Interval interval = Interval::whole_line()) {
  return overlap(a, b, interval).value;
}

inline double norm_squared(const WavefunctionSample& psi,
                           Interval interval = Interval::whole_line()) {
  const SnappedRange r = snap(psi.grid(), interval);
  const auto v = psi.values();
  return simpson(r.first, r.last, psi.grid().spacing(),
                 [&](std::size_t i) { return std::norm(v[i]); });
}

}  // namespace pairstat
