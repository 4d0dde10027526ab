#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) and the complex erfc built on it.
//
// The first quadrant is split into three zones by the ellipse
// rho^2 = (x/6.3)^2 + (y/4.4)^2:
//   rho^2 < 0.085264   power series of erf(iz), multiplied by exp(-z^2)
//   rho^2 >= 1         Laplace continued fraction, evaluated backward
//   otherwise          continued fraction shifted by ih, corrected by a
//                      truncated Taylor sum in h (Gautschi's scheme)
// The other quadrants follow from w(-conj z) = conj w(z) and
// w(-z) = 2 exp(-z^2) - w(z).
//
// Term counts are tuned per floating type; the long double tuning is used by
// the short-time pair evaluations, where the released amplitude is a
// near-total cancellation of four shutter terms.

#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <numbers>

#include "pairstat/errors.hpp"

namespace pairstat {

template <std::floating_point T>
struct FaddeevaTuning;

template <>
struct FaddeevaTuning<float> {
  static constexpr double kapn_base = 7, kapn_slope = 34;
  static constexpr double nu_base = 16, nu_slope = 26;
  static constexpr double cf_base = 3, cf_scale = 1442;
};

template <>
struct FaddeevaTuning<double> {
  static constexpr double kapn_base = 7, kapn_slope = 34;
  static constexpr double nu_base = 16, nu_slope = 26;
  static constexpr double cf_base = 3, cf_scale = 1442;
};

template <>
struct FaddeevaTuning<long double> {
  static constexpr double kapn_base = 10, kapn_slope = 46;
  static constexpr double nu_base = 24, nu_slope = 40;
  static constexpr double cf_base = 6, cf_scale = 2600;
};

namespace detail {

// Number of terms so that |z|^(2N) / N! drops below the working epsilon.
template <std::floating_point T>
int series_terms(T modulus_sq) {
  const T eps = std::numeric_limits<T>::epsilon() * T(0.01);
  T term = 1;
  int n = 0;
  while (n < 200) {
    ++n;
    term *= modulus_sq / T(n);
    if (term < eps && n > 4) break;
  }
  return n;
}

// w(x + iy) for x >= 0, y >= 0.
template <std::floating_point T>
std::complex<T> faddeeva_first_quadrant(T x, T y) {
  using Tune = FaddeevaTuning<T>;
  constexpr T two_over_sqrt_pi = T(2) * std::numbers::inv_sqrtpi_v<T>;

  const T xs = x / T(6.3);
  const T ys = y / T(4.4);
  const T rho_sq = xs * xs + ys * ys;

  if (rho_sq < T(0.085264)) {
    // w = exp(-z^2) [1 + (2i/sqrt(pi)) z S],  S = sum (z^2)^n / (n! (2n+1))
    const std::complex<T> z(x, y);
    const std::complex<T> z2 = z * z;
    const int n_max = series_terms<T>(std::norm(z));
    std::complex<T> s = T(1) / T(2 * n_max + 1);
    for (int n = n_max; n >= 1; --n) {
      s = s * z2 / T(n) + T(1) / T(2 * n - 1);
    }
    const std::complex<T> bracket =
        T(1) + std::complex<T>(0, two_over_sqrt_pi) * z * s;
    std::complex<T> result = std::exp(-z2) * bracket;
    if (y == 0) result.real(std::exp(-x * x));
    return result;
  }

  T h = 0;
  int kapn = 0;
  int nu = 0;
  if (rho_sq >= 1) {
    nu = static_cast<int>(Tune::cf_base +
                          Tune::cf_scale / (26 * std::sqrt(double(rho_sq)) + 77));
  } else {
    const T q = (1 - ys) * std::sqrt(1 - rho_sq);
    h = T(1.88) * q;
    kapn = static_cast<int>(std::lround(Tune::kapn_base + Tune::kapn_slope * double(q)));
    nu = static_cast<int>(std::lround(Tune::nu_base + Tune::nu_slope * double(q)));
  }

  const T h2 = 2 * h;
  T lambda = h > 0 ? std::pow(h2, T(kapn)) : T(0);
  T rx = 0, ry = 0, sx = 0, sy = 0;
  for (int n = nu; n >= 0; --n) {
    const T np1 = T(n + 1);
    T tx = y + h + np1 * rx;
    const T ty = x - np1 * ry;
    const T c = T(0.5) / (tx * tx + ty * ty);
    rx = c * tx;
    ry = c * ty;
    if (h > 0 && n <= kapn) {
      tx = lambda + sx;
      const T sx_next = rx * tx - ry * sy;
      sy = ry * tx + rx * sy;
      sx = sx_next;
      lambda /= h2;
    }
  }

  std::complex<T> result = h > 0 ? std::complex<T>(two_over_sqrt_pi * sx, two_over_sqrt_pi * sy)
                                 : std::complex<T>(two_over_sqrt_pi * rx, two_over_sqrt_pi * ry);
  if (y == 0) result.real(std::exp(-x * x));
  return result;
}

// exp(-z^2) with the real exponent formed as (y-x)(y+x).
template <std::floating_point T>
std::complex<T> exp_minus_square(std::complex<T> z) {
  const T x = z.real(), y = z.imag();
  const T magnitude = std::exp((y - x) * (y + x));
  const T phase = -2 * x * y;
  return {magnitude * std::cos(phase), magnitude * std::sin(phase)};
}

}  // namespace detail

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for any finite z.
/// Relative accuracy is a few ulp times 1e3 in double; see tests for bounds.
template <std::floating_point T>
std::complex<T> faddeeva_w(std::complex<T> z) {
  const T x = z.real(), y = z.imag();
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw DomainError("faddeeva_w: argument must be finite");
  }
  const T ax = std::abs(x), ay = std::abs(y);
  const std::complex<T> wq = detail::faddeeva_first_quadrant(ax, ay);

  if (y >= 0) return x >= 0 ? wq : std::conj(wq);

  // -z lies in the upper half plane; reflect through w(z) = 2 exp(-z^2) - w(-z).
  const std::complex<T> w_neg = x <= 0 ? wq : std::conj(wq);
  return T(2) * detail::exp_minus_square(z) - w_neg;
}

/// Complementary error function for complex argument via erfc(z) = exp(-z^2) w(iz)
/// on Re z >= 0 and erfc(z) = 2 - erfc(-z) otherwise.
template <std::floating_point T>
std::complex<T> erfc_complex(std::complex<T> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("erfc_complex: argument must be finite");
  }
  if (z.real() < 0) return T(2) - erfc_complex(-z);
  const std::complex<T> iz(-z.imag(), z.real());
  return detail::exp_minus_square(z) * faddeeva_w(iz);
}

}  // namespace pairstat
