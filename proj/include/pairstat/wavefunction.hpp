#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "pairstat/errors.hpp"
#include "pairstat/grid.hpp"

namespace pairstat {

using Amplitude = std::complex<double>;

/// Single-particle amplitude sampled on a grid at one instant. Immutable; copies
/// share the sample buffer.
class WavefunctionSample {
 public:
  WavefunctionSample(Grid1D grid, std::vector<Amplitude> values, double time)
      : grid_(grid),
        values_(std::make_shared<const std::vector<Amplitude>>(std::move(values))),
        time_(time) {
    if (values_->size() != grid_.size()) {
      throw ConfigurationError("WavefunctionSample: value count does not match grid");
    }
    if (!(time >= 0)) throw ConfigurationError("WavefunctionSample: time must be >= 0");
  }

  template <class F>
  static WavefunctionSample tabulate(const Grid1D& grid, double time, F&& f) {
    std::vector<Amplitude> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = Amplitude(f(grid.x(i)));
    return WavefunctionSample(grid, std::move(values), time);
  }

  const Grid1D& grid() const noexcept { return grid_; }
  double time() const noexcept { return time_; }
  std::size_t size() const noexcept { return values_->size(); }
  std::span<const Amplitude> values() const noexcept { return *values_; }
  Amplitude operator[](std::size_t i) const noexcept { return (*values_)[i]; }

 private:
  Grid1D grid_;
  std::shared_ptr<const std::vector<Amplitude>> values_;
  double time_;
};

inline void require_compatible(const WavefunctionSample& a, const WavefunctionSample& b) {
  if (!(a.grid() == b.grid())) throw ConfigurationError("wavefunctions live on different grids");
  if (a.time() != b.time()) throw ConfigurationError("wavefunctions sampled at different times");
}

}  // namespace pairstat
