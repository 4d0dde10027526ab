#pragma once

// Infinite-well eigenstates and their exact free evolution after the walls are
// removed at t = 0. Each boxed plane wave e^{iqx} on |x| < a evolves into two
// shutter terms, e^{iqa} M(x-a, q, t) - e^{-iqa} M(x+a, q, t), so a cosine or
// sine mode is a sum of four Moshinsky functions.
//
// Branch convention: sqrt(i t) = sqrt(t) e^{i pi/4}.

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <string>

#include "pairstat/errors.hpp"
#include "pairstat/faddeeva.hpp"
#include "pairstat/grid.hpp"
#include "pairstat/wavefunction.hpp"

namespace pairstat {

struct WellSpec {
  double a = 0.5;

  WellSpec() = default;
  explicit WellSpec(double half_width) : a(half_width) {
    if (!(half_width > 0) || !std::isfinite(half_width)) {
      throw ConfigurationError("WellSpec: half-width must be positive and finite");
    }
  }
};

enum class Parity { Even, Odd };

struct ModeSpec {
  double k = std::numbers::pi;
  Parity parity = Parity::Even;

  /// cos((2m+1) pi x / 2a), m >= 0.
  static ModeSpec even(int m, const WellSpec& well) {
    if (m < 0) throw ConfigurationError("ModeSpec::even: index must be >= 0");
    return {(2 * m + 1) * std::numbers::pi / (2 * well.a), Parity::Even};
  }

  /// sin(m pi x / a), m >= 1.
  static ModeSpec odd(int m, const WellSpec& well) {
    if (m < 1) throw ConfigurationError("ModeSpec::odd: index must be >= 1");
    return {m * std::numbers::pi / well.a, Parity::Odd};
  }
};

inline void validate(const ModeSpec& mode, const WellSpec& well) {
  constexpr double tol = 1e-9;
  if (!(mode.k > 0) || !std::isfinite(mode.k)) {
    throw ConfigurationError("mode wavenumber must be positive and finite");
  }
  const double edge = mode.parity == Parity::Even ? std::cos(mode.k * well.a)
                                                  : std::sin(mode.k * well.a);
  if (std::abs(edge) > tol) {
    throw ConfigurationError("mode k = " + std::to_string(mode.k) +
                             " does not vanish at the well edges");
  }
}

/// Moshinsky shutter function M(x, k, t) = 1/2 e^{ikx - ik^2 t} erfc((x - 2kt) / (2 sqrt(it))).
///
/// Evaluated as 1/2 e^{ix^2/4t} w(i u) with u = (x - 2kt) / (2 sqrt(it)), switching
/// to e^{i(kx - k^2 t)} - 1/2 e^{ix^2/4t} w(-i u) for x < 2kt so that w is only
/// taken in the first quadrant.
template <std::floating_point T>
std::complex<T> moshinsky_M(T x, T k, T t) {
  if (!(t > 0)) throw DomainError("moshinsky_M: requires t > 0");
  if (!std::isfinite(x) || !std::isfinite(k) || !std::isfinite(t)) {
    throw DomainError("moshinsky_M: non-finite argument");
  }
  const T xi = (x - 2 * k * t) / (2 * std::sqrt(t));
  const T c = xi * std::numbers::sqrt2_v<T> / 2;
  const T quad = x * x / (4 * t);
  const std::complex<T> spread(std::cos(quad), std::sin(quad));
  if (xi >= 0) return T(0.5) * spread * faddeeva_w(std::complex<T>(c, c));
  const T plane = k * x - k * k * t;
  return std::complex<T>(std::cos(plane), std::sin(plane)) -
         T(0.5) * spread * faddeeva_w(std::complex<T>(-c, -c));
}

/// Eigenstate value a^{-1/2} cos(kx) or a^{-1/2} sin(kx) inside the well, 0 outside.
inline double eigenstate_amplitude(const ModeSpec& mode, const WellSpec& well, double x) {
  if (!(std::abs(x) < well.a)) return 0;
  const double norm = 1 / std::sqrt(well.a);
  return norm * (mode.parity == Parity::Even ? std::cos(mode.k * x) : std::sin(mode.k * x));
}

/// Fourier transform of the boxed eigenstate, integral psi(x) e^{-ikx} dx over |x| < a.
inline std::complex<double> eigenstate_spectrum(const ModeSpec& mode, const WellSpec& well, double k) {
  const double a = well.a;
  // integral_{-a}^{a} cos(p x) dx = 2 sin(pa)/p, continued to 2a at p = 0.
  auto cos_integral = [a](double p) {
    return std::abs(p * a) < 1e-8 ? 2 * a : 2 * std::sin(p * a) / p;
  };
  const double minus = cos_integral(mode.k - k);
  const double plus = cos_integral(mode.k + k);
  const double norm = 0.5 / std::sqrt(a);
  if (mode.parity == Parity::Even) return norm * (minus + plus);
  return std::complex<double>(0, -norm * (minus - plus));
}

/// Released amplitude at (x, t > 0), computed in precision T.
template <std::floating_point T>
std::complex<T> released_amplitude(const ModeSpec& mode, const WellSpec& well, T x, T t) {
  if (!(t > 0)) throw DomainError("released_amplitude: requires t > 0");
  const T a = well.a;
  const T k = mode.k;
  const T norm = 1 / std::sqrt(a);
  const std::complex<T> e_plus(std::cos(k * a), std::sin(k * a));
  const std::complex<T> e_minus = std::conj(e_plus);

  // Boxed e^{iqx}: e^{iqa} M(x-a, q) - e^{-iqa} M(x+a, q).
  const std::complex<T> up = e_plus * moshinsky_M(x - a, k, t) - e_minus * moshinsky_M(x + a, k, t);
  const std::complex<T> down =
      e_minus * moshinsky_M(x - a, -k, t) - e_plus * moshinsky_M(x + a, -k, t);

  if (mode.parity == Parity::Even) return norm * T(0.5) * (up + down);
  return norm * std::complex<T>(0, T(-0.5)) * (up - down);
}

inline WavefunctionSample well_eigenstate(const ModeSpec& mode, const WellSpec& well,
                                          const Grid1D& grid) {
  validate(mode, well);
  return WavefunctionSample::tabulate(
      grid, 0.0, [&](double x) { return eigenstate_amplitude(mode, well, x); });
}

inline WavefunctionSample released_state(const ModeSpec& mode, const WellSpec& well, double t,
                                         const Grid1D& grid) {
  if (!(t > 0)) throw DomainError("released_state: requires t > 0; use well_eigenstate at t = 0");
  validate(mode, well);
  return WavefunctionSample::tabulate(
      grid, t, [&](double x) { return released_amplitude<double>(mode, well, x, t); });
}

/// Eigenstate at t = 0, exact released state for t > 0.
inline WavefunctionSample exact_state(const ModeSpec& mode, const WellSpec& well, double t,
                                      const Grid1D& grid) {
  if (t < 0) throw DomainError("exact_state: requires t >= 0");
  return t == 0 ? well_eigenstate(mode, well, grid) : released_state(mode, well, t, grid);
}

}  // namespace pairstat
