#pragma once

// Short-time behaviour of released well modes far outside the trap.
//
// For x^2/t large, a released sine mode behaves as
//   -cos(ka) 2 a^{-1/2} sqrt(-i/pi) (t^{3/2}/x^2) k [F1 + (k^2 t^2/x^2) F2]
// with F1, F2 the antisymmetric combinations of the two edge waves, and a
// cosine mode as the same expression with -sin(ka) and the symmetric
// combinations G1, G2. The pair forms below are for the cosine pair
// k2 = 3 k1 = 3 pi / 2a, whose leading Boson amplitude is O(t^3) and whose
// Fermion amplitude starts only at O(t^5).
//
// Exact reference values are computed in long double: far from the trap the
// released amplitude is a cancellation of four shutter terms by ~x^2/t, and the
// Fermion amplitude cancels by another ~(kt/x)^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "pairstat/errors.hpp"
#include "pairstat/exact.hpp"
#include "pairstat/pair.hpp"

namespace pairstat {

struct RegimeThresholds {
  double x_sq_over_t = 40;  // x^2 >= 40 t, i.e. x^2/4t >= 10
  double a_sq_over_t = 10;  // a^2 >= 10 t
  double far_field = 10;    // |x| >= 10 a
  double near_limit = 4;    // |x| < 4 a is outside the regime, 4a..10a borderline
};

struct AsymptoticRegime {
  double x = 0;
  double t = 0;
  double a = 0;
  bool short_time = false;  // x^2/t large
  bool narrow_trap = false; // a >> sqrt(t)
  bool far_field = false;   // x >> a
  bool borderline = false;  // x only moderately larger than a

  bool valid() const noexcept { return short_time && narrow_trap && (far_field || borderline); }

  std::string describe() const {
    std::string s;
    auto add = [&](const char* flag) {
      if (!s.empty()) s += '|';
      s += flag;
    };
    if (!short_time) add("x2_over_t_small");
    if (!narrow_trap) add("sqrt_t_not_small");
    if (borderline) add("x_borderline");
    if (!far_field && !borderline) add("x_near_trap");
    return s.empty() ? "ok" : s;
  }
};

inline AsymptoticRegime classify_regime(double x, double t, double a,
                                        const RegimeThresholds& th = {}) {
  AsymptoticRegime r{x, t, a};
  const double ax = std::abs(x);
  r.short_time = x * x >= th.x_sq_over_t * t;
  r.narrow_trap = a * a >= th.a_sq_over_t * t;
  r.far_field = ax >= th.far_field * a;
  r.borderline = !r.far_field && ax >= th.near_limit * a;
  return r;
}

namespace detail {

template <std::floating_point T>
void check_edge_args(T x, T t, T a) {
  if (!(t > 0)) throw DomainError("short-time forms require t > 0");
  if (x == a || x == -a) throw SingularityError("short-time forms are singular at x = +-a");
}

template <std::floating_point T>
std::complex<T> expi(T phase) {
  return {std::cos(phase), std::sin(phase)};
}

// x^{2p} {e^{i(x+a)^2/4t}/(x+a)^{2p} + sign e^{i(x-a)^2/4t}/(x-a)^{2p}}
template <std::floating_point T>
std::complex<T> edge_pair(T x, T t, T a, int power, T sign) {
  check_edge_args(x, t, a);
  const T xp = x + a, xm = x - a;
  const T rp = std::pow(x / xp, T(power));
  const T rm = std::pow(x / xm, T(power));
  return rp * expi(xp * xp / (4 * t)) + sign * rm * expi(xm * xm / (4 * t));
}

}  // namespace detail

/// F1(x) = x^2 {e^{i(x+a)^2/4t}/(x+a)^2 - e^{i(x-a)^2/4t}/(x-a)^2}.
template <std::floating_point T>
std::complex<T> f1(T x, T t, T a) {
  return detail::edge_pair(x, t, a, 2, T(-1));
}

/// F2(x) = 4 x^4 {e^{i(x+a)^2/4t}/(x+a)^4 - e^{i(x-a)^2/4t}/(x-a)^4}.
template <std::floating_point T>
std::complex<T> f2(T x, T t, T a) {
  return T(4) * detail::edge_pair(x, t, a, 4, T(-1));
}

/// x >> a limit of F1: 2i e^{i(x^2+a^2)/4t} sin(xa/2t).
template <std::floating_point T>
std::complex<T> f1_far(T x, T t, T a) {
  if (!(t > 0)) throw DomainError("short-time forms require t > 0");
  return std::complex<T>(0, 2) * detail::expi((x * x + a * a) / (4 * t)) * std::sin(x * a / (2 * t));
}

template <std::floating_point T>
std::complex<T> f2_far(T x, T t, T a) {
  return T(4) * f1_far(x, t, a);
}

/// Symmetric counterpart of F1 for cosine modes.
template <std::floating_point T>
std::complex<T> g1(T x, T t, T a) {
  return detail::edge_pair(x, t, a, 2, T(1));
}

template <std::floating_point T>
std::complex<T> g2(T x, T t, T a) {
  return T(4) * detail::edge_pair(x, t, a, 4, T(1));
}

/// x >> a limit of G1: 2 e^{i(x^2+a^2)/4t} cos(xa/2t).
template <std::floating_point T>
std::complex<T> g1_far(T x, T t, T a) {
  if (!(t > 0)) throw DomainError("short-time forms require t > 0");
  return T(2) * detail::expi((x * x + a * a) / (4 * t)) * std::cos(x * a / (2 * t));
}

template <std::floating_point T>
std::complex<T> g2_far(T x, T t, T a) {
  return T(4) * g1_far(x, t, a);
}

struct ShortTimeValue {
  std::complex<double> amplitude;
  std::vector<AsymptoticRegime> regimes;

  bool in_regime() const {
    return std::all_of(regimes.begin(), regimes.end(), [](const auto& r) { return r.valid(); });
  }
};

namespace detail {

// 2 a^{-1/2} sqrt(-i/pi)
template <std::floating_point T>
std::complex<T> single_prefactor(T a) {
  const std::complex<T> root_minus_i(std::numbers::sqrt2_v<T> / 2, -std::numbers::sqrt2_v<T> / 2);
  return T(2) / std::sqrt(a) * std::numbers::inv_sqrtpi_v<T> * root_minus_i;
}

}  // namespace detail

/// Two-term short-time amplitude of a released mode, in the basis matching its parity.
template <std::floating_point T>
std::complex<T> short_time_amplitude(const ModeSpec& mode, const WellSpec& well, T x, T t) {
  const T a = well.a, k = mode.k;
  const bool even = mode.parity == Parity::Even;
  const T edge = even ? -std::sin(k * a) : -std::cos(k * a);
  const std::complex<T> lead = even ? g1(x, t, a) : f1(x, t, a);
  const std::complex<T> next = even ? g2(x, t, a) : f2(x, t, a);
  return edge * detail::single_prefactor(a) * (std::pow(t, T(1.5)) / (x * x)) * k *
         (lead + (k * k * t * t / (x * x)) * next);
}

/// The two-term expansion exactly as written for both parities, with F1/F2.
template <std::floating_point T>
std::complex<T> short_time_amplitude_literal(const ModeSpec& mode, const WellSpec& well, T x, T t) {
  const T a = well.a, k = mode.k;
  return detail::single_prefactor(a) * (std::pow(t, T(1.5)) / (x * x)) * k *
         (f1(x, t, a) + (k * k * t * t / (x * x)) * f2(x, t, a));
}

inline ShortTimeValue short_time_single(const ModeSpec& mode, double x, double t,
                                        const WellSpec& well = {},
                                        const RegimeThresholds& th = {}) {
  validate(mode, well);
  return {short_time_amplitude<double>(mode, well, x, t), {classify_regime(x, t, well.a, th)}};
}

/// Constants of the pair forms for the k2 = 3 k1 cosine pair.
inline constexpr double kBosonPairConstant = 24;        // with G1(x1) G1(x2)
inline constexpr double kBosonFarConstant = 96;         // with cos cos
inline constexpr double kFermionPairConstant = 96;      // with the G1/G2 cross terms
inline constexpr double kFermionFarConstant = 1536;     // with cos cos
inline constexpr double kRatioFarConstant = 256;        // (4 t k1)^4

template <std::floating_point T>
std::complex<T> pair_expansion(Statistics kind, T x1, T x2, T t, const WellSpec& well) {
  const T a = well.a;
  const T k1 = std::numbers::pi_v<T> / (2 * a);
  const T inv_sqrt2 = std::numbers::sqrt2_v<T> / 2;
  const T x12_sq = (x1 * x2) * (x1 * x2);
  const std::complex<T> i(0, 1);
  if (kind == Statistics::Boson) {
    return i * (T(kBosonPairConstant) / (std::numbers::pi_v<T> * a)) * inv_sqrt2 * t * t * t / x12_sq *
           k1 * k1 * g1(x1, t, a) * g1(x2, t, a);
  }
  const std::complex<T> cross =
      -g1(x2, t, a) * g2(x1, t, a) / (x1 * x1) + g1(x1, t, a) * g2(x2, t, a) / (x2 * x2);
  return i * (T(kFermionPairConstant) / (std::numbers::pi_v<T> * a)) * inv_sqrt2 *
         std::pow(t, T(5)) / x12_sq * std::pow(k1, T(4)) * cross;
}

/// x1, x2 >> a limit of pair_expansion.
template <std::floating_point T>
std::complex<T> pair_far_field(Statistics kind, T x1, T x2, T t, const WellSpec& well) {
  if (!(t > 0)) throw DomainError("short-time forms require t > 0");
  const T a = well.a;
  const T k1 = std::numbers::pi_v<T> / (2 * a);
  const T inv_sqrt2 = std::numbers::sqrt2_v<T> / 2;
  const T x12_sq = (x1 * x2) * (x1 * x2);
  const std::complex<T> phase = detail::expi((x1 * x1 + x2 * x2 + 2 * a * a) / (4 * t));
  const T cc = std::cos(x1 * a / (2 * t)) * std::cos(x2 * a / (2 * t));
  const std::complex<T> i(0, 1);
  if (kind == Statistics::Boson) {
    return i * (T(kBosonFarConstant) / (std::numbers::pi_v<T> * a)) * inv_sqrt2 * t * t * t / x12_sq *
           k1 * k1 * phase * cc;
  }
  return i * (T(kFermionFarConstant) / (std::numbers::pi_v<T> * a)) * inv_sqrt2 *
         std::pow(t, T(5)) / x12_sq * std::pow(k1, T(4)) * phase * cc *
         (1 / (x2 * x2) - 1 / (x1 * x1));
}

inline ShortTimeValue short_time_pair(Statistics kind, double x1, double x2, double t,
                                      const WellSpec& well = {}, const RegimeThresholds& th = {}) {
  return {pair_expansion<double>(kind, x1, x2, t, well),
          {classify_regime(x1, t, well.a, th), classify_regime(x2, t, well.a, th)}};
}

/// Fermion/Boson density ratio in the form (2 t k1)^4 (1/x2^2 - 1/x1^2)^2.
inline double density_ratio(double x1, double x2, double t, double k1) {
  if (x1 == 0 || x2 == 0) throw DomainError("density_ratio: coordinates must be nonzero");
  const double d = 1 / (x2 * x2) - 1 / (x1 * x1);
  return std::pow(2 * t * k1, 4) * d * d;
}

/// Far-field ratio implied by pair_far_field: (4 t k1)^4 (1/x2^2 - 1/x1^2)^2.
inline double density_ratio_far_field(double x1, double x2, double t, double k1) {
  return (kRatioFarConstant / 16) * density_ratio(x1, x2, t, k1);
}

/// |Fermion|^2 / |Boson|^2 from the G-form expansions (no far-field step).
inline double density_ratio_expansion(double x1, double x2, double t, const WellSpec& well = {}) {
  if (x1 == 0 || x2 == 0) throw DomainError("density_ratio: coordinates must be nonzero");
  using L = long double;
  const L f = std::norm(pair_expansion<L>(Statistics::Fermion, x1, x2, t, well));
  const L b = std::norm(pair_expansion<L>(Statistics::Boson, x1, x2, t, well));
  return static_cast<double>(f / b);
}

/// The cosine pair k1 = pi/2a, k2 = 3 k1.
inline std::pair<ModeSpec, ModeSpec> same_parity_pair(const WellSpec& well) {
  return {ModeSpec::even(0, well), ModeSpec::even(1, well)};
}

/// Joint density of the released pair from the exact shutter solution, in long double.
inline long double exact_pair_density(Statistics kind, const ModeSpec& m1, const ModeSpec& m2,
                                      const WellSpec& well, double x1, double x2, double t) {
  using L = long double;
  const auto a11 = released_amplitude<L>(m1, well, x1, t);
  const auto a22 = released_amplitude<L>(m2, well, x2, t);
  const auto a12 = released_amplitude<L>(m1, well, x2, t);
  const auto a21 = released_amplitude<L>(m2, well, x1, t);
  return std::norm(symmetrize<L>(a11, a22, a12, a21, kind));
}

struct EnvelopeWindow {
  double t_min = 1e-4;
  double t_max = 1e-3;
  int bins = 20;
  int samples_per_bin = 200;
};

struct EnvelopePoint {
  double t;
  double value;
};

/// Upper envelope: per log-spaced bin in t, the maximum over samples uniform in 1/t.
/// Bins with any sample rejected by `usable` or non-positive maxima are dropped.
template <class F, class Usable>
std::vector<EnvelopePoint> upper_envelope(F&& density, Usable&& usable, const EnvelopeWindow& w) {
  if (!(w.t_min > 0) || !(w.t_max > w.t_min) || w.bins < 1 || w.samples_per_bin < 1) {
    throw ConfigurationError("envelope window: need 0 < t_min < t_max and positive counts");
  }
  std::vector<EnvelopePoint> out;
  const double span = std::log(w.t_max / w.t_min);
  for (int b = 0; b < w.bins; ++b) {
    const double lo = w.t_min * std::exp(span * b / w.bins);
    const double hi = w.t_min * std::exp(span * (b + 1) / w.bins);
    EnvelopePoint best{0, -1};
    bool ok = true;
    for (int s = 0; s < w.samples_per_bin && ok; ++s) {
      const double u = 1 / hi + (1 / lo - 1 / hi) * (s + 0.5) / w.samples_per_bin;
      const double t = 1 / u;
      if (!usable(t)) {
        ok = false;
        break;
      }
      const double v = static_cast<double>(density(t));
      if (!std::isfinite(v)) {
        ok = false;
        break;
      }
      if (v > best.value) best = {t, v};
    }
    if (ok && best.value > 0) out.push_back(best);
  }
  return out;
}

struct ExponentFit {
  double exponent = 0;
  double intercept = 0;
  std::size_t samples = 0;
  double rms_residual = 0;
};

inline constexpr std::size_t kMinEnvelopeSamples = 8;

inline ExponentFit fit_power_law(const std::vector<EnvelopePoint>& pts) {
  if (pts.size() < kMinEnvelopeSamples) {
    throw InsufficientDataError("exponent fit: " + std::to_string(pts.size()) +
                                " usable envelope samples, need " +
                                std::to_string(kMinEnvelopeSamples));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (const auto& p : pts) {
    const double lx = std::log(p.t), ly = std::log(p.value);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  ExponentFit fit;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.exponent * sx) / n;
  fit.samples = pts.size();
  double ss = 0;
  for (const auto& p : pts) {
    const double r = std::log(p.value) - (fit.intercept + fit.exponent * std::log(p.t));
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

/// Envelope exponent of the exact pair density of the cosine pair at (x1, x2).
inline ExponentFit scaling_exponent_fit(Statistics kind, double x1, double x2,
                                        const EnvelopeWindow& window, const WellSpec& well = {},
                                        const RegimeThresholds& th = {}) {
  const auto [m1, m2] = same_parity_pair(well);
  auto density = [&](double t) { return exact_pair_density(kind, m1, m2, well, x1, x2, t); };
  auto usable = [&](double t) {
    return classify_regime(x1, t, well.a, th).valid() && classify_regime(x2, t, well.a, th).valid();
  };
  return fit_power_law(upper_envelope(density, usable, window));
}

/// Envelope exponent of the exact single-particle density at x.
inline ExponentFit single_scaling_exponent_fit(const ModeSpec& mode, double x,
                                               const EnvelopeWindow& window,
                                               const WellSpec& well = {},
                                               const RegimeThresholds& th = {}) {
  validate(mode, well);
  auto density = [&](double t) {
    return std::norm(released_amplitude<long double>(mode, well, x, t));
  };
  auto usable = [&](double t) { return classify_regime(x, t, well.a, th).valid(); };
  return fit_power_law(upper_envelope(density, usable, window));
}

/// Geometric mean over bins of envelope(numerator) / envelope(denominator).
template <class F, class G>
double envelope_ratio(F&& numerator, G&& denominator, const EnvelopeWindow& w) {
  auto always = [](double) { return true; };
  const auto num = upper_envelope(numerator, always, w);
  const auto den = upper_envelope(denominator, always, w);
  if (num.empty() || num.size() != den.size()) {
    throw InsufficientDataError("envelope ratio: envelopes have no common bins");
  }
  double log_sum = 0;
  for (std::size_t i = 0; i < num.size(); ++i) log_sum += std::log(num[i].value / den[i].value);
  return std::exp(log_sum / static_cast<double>(num.size()));
}

struct PrefactorAudit {
  std::string name;
  double printed;   // constant as written in the closed-form expression
  double derived;   // constant from the expansion of the exact solution
  double fitted;    // derived constant times the measured exact/expansion calibration
};

/// Calibrates each closed-form constant against exact densities on the window at (x1, x2).
inline std::vector<PrefactorAudit> prefactor_audit(double x1, double x2,
                                                   const EnvelopeWindow& window,
                                                   const WellSpec& well = {}) {
  using L = long double;
  const auto [m1, m2] = same_parity_pair(well);
  const double k1 = m1.k;
  auto exact = [&](Statistics kind) {
    return [&, kind](double t) { return exact_pair_density(kind, m1, m2, well, x1, x2, t); };
  };
  auto expansion = [&](Statistics kind) {
    return [&, kind](double t) { return std::norm(pair_expansion<L>(kind, x1, x2, t, well)); };
  };
  auto far = [&](Statistics kind) {
    return [&, kind](double t) { return std::norm(pair_far_field<L>(kind, x1, x2, t, well)); };
  };
  // Amplitude calibration is the square root of the density calibration.
  auto calibrate = [&](auto num, auto den) { return std::sqrt(envelope_ratio(num, den, window)); };

  std::vector<PrefactorAudit> out;
  out.push_back({"single_mode_k1", 2, 2,
                 2 * calibrate([&](double t) { return std::norm(released_amplitude<L>(m1, well, x1, t)); },
                               [&](double t) {
                                 return std::norm(short_time_amplitude<L>(m1, well, x1, t));
                               })});
  out.push_back({"single_mode_k1_literal_basis", 2, 2,
                 2 * calibrate([&](double t) { return std::norm(released_amplitude<L>(m1, well, x1, t)); },
                               [&](double t) {
                                 return std::norm(short_time_amplitude_literal<L>(m1, well, x1, t));
                               })});
  out.push_back({"boson_pair", 2 * well.a, kBosonPairConstant,
                 kBosonPairConstant * calibrate(exact(Statistics::Boson), expansion(Statistics::Boson))});
  out.push_back({"boson_far_field", 384, kBosonFarConstant,
                 kBosonFarConstant * calibrate(exact(Statistics::Boson), far(Statistics::Boson))});
  out.push_back({"fermion_pair", 96, kFermionPairConstant,
                 kFermionPairConstant *
                     calibrate(exact(Statistics::Fermion), expansion(Statistics::Fermion))});
  out.push_back({"fermion_far_field", 1536, kFermionFarConstant,
                 kFermionFarConstant * calibrate(exact(Statistics::Fermion), far(Statistics::Fermion))});
  // Ratio constant c in c (t k1)^4 (1/x2^2 - 1/x1^2)^2.
  const double measured_ratio = envelope_ratio(
      exact(Statistics::Fermion),
      [&](double t) {
        return exact_pair_density(Statistics::Boson, m1, m2, well, x1, x2, t) *
               density_ratio(x1, x2, t, k1);
      },
      window);
  out.push_back({"density_ratio", 16, kRatioFarConstant, 16 * measured_ratio});
  return out;
}

}  // namespace pairstat
