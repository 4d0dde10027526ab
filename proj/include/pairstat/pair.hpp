#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string_view>

#include "pairstat/errors.hpp"
#include "pairstat/wavefunction.hpp"

namespace pairstat {

enum class Statistics { Boson, Fermion };

constexpr std::string_view to_string(Statistics s) {
  return s == Statistics::Boson ? "boson" : "fermion";
}

/// Symmetrized two-body amplitude from the four one-body values a_ij = psi_i(x_j).
template <class T>
std::complex<T> symmetrize(std::complex<T> a11, std::complex<T> a22, std::complex<T> a12,
                           std::complex<T> a21, Statistics kind) {
  const T inv_sqrt2 = std::numbers::sqrt2_v<T> / T(2);
  const std::complex<T> direct = a11 * a22;
  const std::complex<T> exchange = a12 * a21;
  return inv_sqrt2 * (kind == Statistics::Boson ? direct + exchange : direct - exchange);
}

/// delta = 2 Re{psi1(x1) psi2(x2) psi1*(x2) psi2*(x1)} from the same four values.
template <class T>
T density_difference(std::complex<T> a11, std::complex<T> a22, std::complex<T> a12,
                     std::complex<T> a21) {
  return T(2) * std::real(a11 * a22 * std::conj(a12) * std::conj(a21));
}

class PairState {
 public:
  PairState(WavefunctionSample psi1, WavefunctionSample psi2, Statistics kind)
      : psi1_(std::move(psi1)), psi2_(std::move(psi2)), kind_(kind) {
    require_compatible(psi1_, psi2_);
  }

  const WavefunctionSample& psi1() const noexcept { return psi1_; }
  const WavefunctionSample& psi2() const noexcept { return psi2_; }
  Statistics kind() const noexcept { return kind_; }
  const Grid1D& grid() const noexcept { return psi1_.grid(); }

  Amplitude amplitude(std::size_t i1, std::size_t i2) const {
    check(i1, i2);
    return symmetrize(psi1_[i1], psi2_[i2], psi1_[i2], psi2_[i1], kind_);
  }

  double joint_density(std::size_t i1, std::size_t i2) const { return std::norm(amplitude(i1, i2)); }

 private:
  void check(std::size_t i1, std::size_t i2) const {
    if (i1 >= grid().size() || i2 >= grid().size()) {
      throw ConfigurationError("PairState: grid index out of range");
    }
  }

  WavefunctionSample psi1_;
  WavefunctionSample psi2_;
  Statistics kind_;
};

inline Amplitude pair_amplitude(const PairState& pair, std::size_t i1, std::size_t i2) {
  return pair.amplitude(i1, i2);
}

inline double density_difference(const WavefunctionSample& psi1, const WavefunctionSample& psi2,
                                  std::size_t i1, std::size_t i2) {
  require_compatible(psi1, psi2);
  if (i1 >= psi1.size() || i2 >= psi1.size()) {
    throw ConfigurationError("density_difference: grid index out of range");
  }
  return density_difference(psi1[i1], psi2[i2], psi1[i2], psi2[i1]);
}

enum class SymmetryClass { Even, Odd, NoParity };

constexpr std::string_view to_string(SymmetryClass s) {
  switch (s) {
    case SymmetryClass::Even: return "even";
    case SymmetryClass::Odd: return "odd";
    default: return "none";
  }
}

inline constexpr double kParityTolerance = 1e-8;

inline SymmetryClass classify_parity(const WavefunctionSample& psi,
                                     double tol = kParityTolerance) {
  const Grid1D& g = psi.grid();
  if (!g.symmetric()) throw ConfigurationError("classify_parity: grid not symmetric about 0");
  double peak = 0, even_dev = 0, odd_dev = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Amplitude v = psi[i];
    const Amplitude m = psi[g.mirror(i)];
    peak = std::max(peak, std::abs(v));
    even_dev = std::max(even_dev, std::abs(v - m));
    odd_dev = std::max(odd_dev, std::abs(v + m));
  }
  if (peak == 0) return SymmetryClass::Even;
  if (even_dev < tol * peak) return SymmetryClass::Even;
  if (odd_dev < tol * peak) return SymmetryClass::Odd;
  return SymmetryClass::NoParity;
}

}  // namespace pairstat
