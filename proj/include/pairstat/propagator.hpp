#pragma once

// Free evolution on a zero-padded periodic domain: forward DFT, multiply by
// e^{-i omega(k) t} with k_m = 2 pi m / L, inverse DFT. Probability found in the
// padding band at time t is reported as leakage.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pairstat/errors.hpp"
#include "pairstat/grid.hpp"
#include "pairstat/wavefunction.hpp"

namespace pairstat {

enum class DispersionKind { Quadratic, Relativistic };

class DispersionRelation {
 public:
  static DispersionRelation quadratic() { return DispersionRelation(DispersionKind::Quadratic, 0); }

  static DispersionRelation relativistic(double mass) {
    if (!(mass >= 0) || !std::isfinite(mass)) {
      throw ConfigurationError("relativistic dispersion: mass must be finite and >= 0");
    }
    return DispersionRelation(DispersionKind::Relativistic, mass);
  }

  DispersionKind kind() const noexcept { return kind_; }
  double mass() const noexcept { return mass_; }

  double omega(double k) const noexcept {
    return kind_ == DispersionKind::Quadratic ? k * k : std::sqrt(k * k + mass_ * mass_);
  }

  std::string label() const {
    if (kind_ == DispersionKind::Quadratic) return "quadratic";
    char buf[64];
    std::snprintf(buf, sizeof buf, "relativistic(m=%g)", mass_);
    return buf;
  }

 private:
  DispersionRelation(DispersionKind kind, double mass) : kind_(kind), mass_(mass) {}
  DispersionKind kind_;
  double mass_;
};

struct PropagationConfig {
  Grid1D grid;
  int padding_factor = 4;
  double leakage_budget = 1e-8;
};

/// Smallest m >= n with no prime factor above 7.
inline std::size_t next_fast_size(std::size_t n) {
  for (std::size_t m = n < 1 ? 1 : n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

namespace detail {

// FFTW's planner is not reentrant; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline FftwBuffer make_fftw_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer(p);
}

class FftwPlan {
 public:
  FftwPlan(std::size_t n, fftw_complex* buffer, int sign) {
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buffer, buffer, sign, FFTW_ESTIMATE);
    if (!plan_) throw Error("FFTW planning failed");
  }
  ~FftwPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;

  void execute(fftw_complex* buffer) const { fftw_execute_dft(plan_, buffer, buffer); }

 private:
  fftw_plan plan_;
};

}  // namespace detail

struct Propagated {
  WavefunctionSample psi;
  double leakage;
};

/// Holds the transform of one initial state so that many times can be evaluated.
/// evolve() is const and allocates its own workspace.
class SpectralPropagator {
 public:
  SpectralPropagator(const WavefunctionSample& psi0, DispersionRelation disp,
                     PropagationConfig cfg)
      : SpectralPropagator(disp, cfg, psi0.time()) {
    if (!(psi0.grid() == cfg.grid)) {
      throw ConfigurationError("propagate: initial state grid differs from configured grid");
    }
    psi0_ = psi0;
    const std::size_t n = cfg.grid.size();
    for (std::size_t j = 0; j < padded_; ++j) spectrum_[j][0] = spectrum_[j][1] = 0;
    for (std::size_t i = 0; i < n; ++i) {
      spectrum_[offset_ + i][0] = psi0[i].real();
      spectrum_[offset_ + i][1] = psi0[i].imag();
    }
    detail::FftwPlan(padded_, spectrum_.get(), FFTW_FORWARD).execute(spectrum_.get());
  }

  /// Starts from a continuous Fourier transform psi_hat(k) = integral psi(x) e^{-ikx} dx
  /// instead of grid samples, so that no sampling error of the initial state enters.
  template <class Spectrum>
  static SpectralPropagator from_spectrum(Spectrum&& psi_hat, double time0, DispersionRelation disp,
                                          PropagationConfig cfg) {
    SpectralPropagator p(disp, cfg, time0);
    const double x0 = cfg.grid.x_min() - static_cast<double>(p.offset_) * cfg.grid.spacing();
    for (std::size_t m = 0; m < p.padded_; ++m) {
      const double k = p.wavenumber(m);
      const std::complex<double> v =
          std::complex<double>(psi_hat(k)) * std::polar(1.0 / cfg.grid.spacing(), k * x0);
      p.spectrum_[m][0] = v.real();
      p.spectrum_[m][1] = v.imag();
    }
    return p;
  }

  std::size_t padded_size() const noexcept { return padded_; }

  /// Rescales the stored spectrum so the evolved state has unit grid norm sum |psi_j|^2 dx.
  void normalize() {
    double sum = 0;
    for (std::size_t m = 0; m < padded_; ++m) {
      sum += spectrum_[m][0] * spectrum_[m][0] + spectrum_[m][1] * spectrum_[m][1];
    }
    const double norm = sum * cfg_.grid.spacing() / static_cast<double>(padded_);
    if (!(norm > 0)) throw DomainError("propagate: cannot normalize a zero state");
    const double scale = 1 / std::sqrt(norm);
    for (std::size_t m = 0; m < padded_; ++m) {
      spectrum_[m][0] *= scale;
      spectrum_[m][1] *= scale;
    }
  }

  /// Removes the component along `other` (grid inner product, same configuration), then
  /// renormalizes. Band-limiting two orthogonal states leaves a small overlap behind.
  void orthogonalize(const SpectralPropagator& other) {
    if (other.padded_ != padded_ || !(other.cfg_.grid == cfg_.grid)) {
      throw ConfigurationError("orthogonalize: propagators use different grids");
    }
    std::complex<double> dot{};
    double other_norm = 0;
    for (std::size_t m = 0; m < padded_; ++m) {
      const std::complex<double> u(spectrum_[m][0], spectrum_[m][1]);
      const std::complex<double> v(other.spectrum_[m][0], other.spectrum_[m][1]);
      dot += u * std::conj(v);
      other_norm += std::norm(v);
    }
    if (!(other_norm > 0)) throw DomainError("orthogonalize: reference state is zero");
    const std::complex<double> c = dot / other_norm;
    for (std::size_t m = 0; m < padded_; ++m) {
      const std::complex<double> v(other.spectrum_[m][0], other.spectrum_[m][1]);
      spectrum_[m][0] -= (c * v).real();
      spectrum_[m][1] -= (c * v).imag();
    }
    normalize();
  }

  /// Evolved state on the base grid plus the fraction of probability in the padding.
  /// Throws TruncationError when that fraction exceeds the budget.
  Propagated evolve(double t) const {
    if (!(t >= 0) || !std::isfinite(t)) throw DomainError("propagate: requires finite t >= 0");
    if (t == 0 && psi0_) return {*psi0_, 0.0};

    const std::size_t n = cfg_.grid.size();
    const double scale = 1.0 / static_cast<double>(padded_);

    auto work = detail::make_fftw_buffer(padded_);
    for (std::size_t m = 0; m < padded_; ++m) {
      const double phase = -disp_.omega(wavenumber(m)) * t;
      const std::complex<double> f = std::polar(scale, phase);
      const std::complex<double> s(spectrum_[m][0], spectrum_[m][1]);
      const std::complex<double> v = s * f;
      work[m][0] = v.real();
      work[m][1] = v.imag();
    }
    detail::FftwPlan(padded_, work.get(), FFTW_BACKWARD).execute(work.get());

    double total = 0, band = 0;
    for (std::size_t j = 0; j < padded_; ++j) {
      const double p = work[j][0] * work[j][0] + work[j][1] * work[j][1];
      total += p;
      if (j < offset_ || j >= offset_ + n) band += p;
    }
    const double leakage = total > 0 ? band / total : 0;

    std::vector<Amplitude> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = {work[offset_ + i][0], work[offset_ + i][1]};
    if (leakage > cfg_.leakage_budget) {
      throw TruncationError("propagate: leaked probability " + std::to_string(leakage) +
                                " exceeds budget at t = " + std::to_string(t),
                            leakage);
    }
    return {WavefunctionSample(cfg_.grid, std::move(values), time0_ + t), leakage};
  }

 private:
  SpectralPropagator(DispersionRelation disp, PropagationConfig cfg, double time0)
      : disp_(disp), cfg_(cfg), time0_(time0) {
    if (cfg.padding_factor < 1) throw ConfigurationError("propagate: padding factor must be >= 1");
    if (!(cfg.leakage_budget >= 0)) throw ConfigurationError("propagate: leakage budget must be >= 0");
    const std::size_t n = cfg.grid.size();
    padded_ = next_fast_size(n * static_cast<std::size_t>(cfg.padding_factor));
    offset_ = (padded_ - n) / 2;
    spectrum_ = detail::make_fftw_buffer(padded_);
  }

  // k_m = 2 pi m / L with m folded into [-N/2, N/2).
  double wavenumber(std::size_t m) const noexcept {
    const double length = static_cast<double>(padded_) * cfg_.grid.spacing();
    const double index = m < (padded_ + 1) / 2 ? double(m) : double(m) - double(padded_);
    return 2 * std::numbers::pi / length * index;
  }

  std::optional<WavefunctionSample> psi0_;
  DispersionRelation disp_;
  PropagationConfig cfg_;
  double time0_ = 0;
  std::size_t padded_ = 0;
  std::size_t offset_ = 0;
  detail::FftwBuffer spectrum_;
};

inline Propagated propagate_with_leakage(const WavefunctionSample& psi0, DispersionRelation disp,
                                         double t, const PropagationConfig& cfg) {
  if (t == 0) {
    if (!(psi0.grid() == cfg.grid)) {
      throw ConfigurationError("propagate: initial state grid differs from configured grid");
    }
    return {psi0, 0.0};
  }
  return SpectralPropagator(psi0, disp, cfg).evolve(t);
}

inline WavefunctionSample propagate(const WavefunctionSample& psi0, DispersionRelation disp,
                                    double t, const PropagationConfig& cfg) {
  return propagate_with_leakage(psi0, disp, t, cfg).psi;
}

}  // namespace pairstat
