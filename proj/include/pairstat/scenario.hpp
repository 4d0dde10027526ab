#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pairstat/asymptotics.hpp"
#include "pairstat/errors.hpp"
#include "pairstat/exact.hpp"
#include "pairstat/propagator.hpp"
#include "pairstat/regions.hpp"

namespace pairstat {

enum class Method { Auto, Exact, Spectral };

/// "same" -> cos(pi x/2a), cos(3 pi x/2a); "opposite" -> cos(3 pi x/2a), sin(pi x/a);
/// otherwise a comma list of even:M / odd:M tokens.
inline std::vector<ModeSpec> parse_modes(const std::string& text, const WellSpec& well) {
  if (text == "same") return {ModeSpec::even(0, well), ModeSpec::even(1, well)};
  if (text == "opposite") return {ModeSpec::even(1, well), ModeSpec::odd(1, well)};
  std::vector<ModeSpec> modes;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string token = text.substr(start, comma - start);
    const std::size_t colon = token.find(':');
    if (colon == std::string::npos) throw ConfigurationError("bad mode token '" + token + "'");
    const std::string kind = token.substr(0, colon);
    int index = 0;
    try {
      std::size_t used = 0;
      index = std::stoi(token.substr(colon + 1), &used);
      if (used != token.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigurationError("bad mode index in '" + token + "'");
    }
    if (kind == "even") {
      modes.push_back(ModeSpec::even(index, well));
    } else if (kind == "odd") {
      modes.push_back(ModeSpec::odd(index, well));
    } else {
      throw ConfigurationError("mode parity must be even or odd in '" + token + "'");
    }
    start = comma + 1;
  }
  return modes;
}

inline std::vector<double> linspace(double start, double end, int steps) {
  if (steps < 1) throw ConfigurationError("time steps must be >= 1");
  if (steps == 1) return {start};
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) v[i] = start + (end - start) * i / (steps - 1);
  v.back() = end;
  return v;
}

inline void validate_times(const std::vector<double>& times) {
  if (times.empty()) throw ConfigurationError("no time samples");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0) || !std::isfinite(times[i])) {
      throw ConfigurationError("time samples must be finite and >= 0");
    }
    if (i && !(times[i] > times[i - 1])) {
      throw ConfigurationError("time samples must be strictly increasing");
    }
  }
}

struct HeatmapSpec {
  double x_min = -1.5;
  double x_max = 1.5;
  std::size_t n = 512;
  std::size_t cap = 2048;
};

struct AsymptoticsSpec {
  double x1 = 3;
  double x2 = 4;
  EnvelopeWindow window;
  double single_x = 5;
};

struct ScenarioConfig {
  WellSpec well;
  std::string modes_text = "same";
  std::vector<ModeSpec> modes = parse_modes("same", WellSpec{});
  DispersionRelation dispersion = DispersionRelation::quadratic();
  std::vector<double> times{0.03};
  Grid1D grid{-400, 400, 256001};
  int padding = 4;
  double taper_start = 0.25;  // fraction of Nyquist; the taper reaches zero at twice this
  double leakage_budget = kDefaultLeakageBudget;
  IdentityTolerances tol;
  Method method = Method::Auto;
  std::filesystem::path out_dir = ".";
  int workers = 1;
  std::size_t output_stride = 1;
  HeatmapSpec heatmap;
  AsymptoticsSpec asymptotics;

  void validate() const {
    validate_times(times);
    if (modes.empty()) throw ConfigurationError("no modes selected");
    for (const auto& m : modes) pairstat::validate(m, well);
    if (workers < 1) throw ConfigurationError("workers must be >= 1");
    if (output_stride < 1) throw ConfigurationError("output stride must be >= 1");
    if (padding < 1) throw ConfigurationError("padding factor must be >= 1");
    if (!(taper_start > 0)) throw ConfigurationError("taper start must be positive");
    if (method == Method::Exact && dispersion.kind() != DispersionKind::Quadratic) {
      throw ConfigurationError("exact evolution exists only for the quadratic dispersion");
    }
  }

  Method resolved_method() const {
    if (method != Method::Auto) return method;
    return dispersion.kind() == DispersionKind::Quadratic ? Method::Exact : Method::Spectral;
  }
};

/// Raised-cosine window in |k| / k_Nyquist, 1 below `lo` and 0 above `hi`.
inline double spectral_taper(double k, double k_nyquist, double lo = 0.25, double hi = 0.5) {
  const double q = std::abs(k) / k_nyquist;
  if (q <= lo) return 1;
  if (q >= hi) return 0;
  return 0.5 * (1 + std::cos(std::numbers::pi * (q - lo) / (hi - lo)));
}

/// Evolves the configured modes to any requested time by the resolved method. The
/// spectral method starts from the analytic transform of each eigenstate, tapered between
/// taper_start and twice that fraction of the grid's Nyquist wavenumber, orthogonalized
/// in order and renormalized.
class Evolver {
 public:
  explicit Evolver(const ScenarioConfig& cfg) : cfg_(cfg), method_(cfg.resolved_method()) {
    if (method_ == Method::Spectral) {
      const PropagationConfig pc{cfg.grid, cfg.padding, cfg.leakage_budget};
      const double k_nyquist = std::numbers::pi / cfg.grid.spacing();
      for (const auto& m : cfg.modes) {
        auto p = SpectralPropagator::from_spectrum(
            [&](double k) {
              return eigenstate_spectrum(m, cfg.well, k) *
                     spectral_taper(k, k_nyquist, cfg.taper_start, 2 * cfg.taper_start);
            },
            0.0, cfg.dispersion, pc);
        p.normalize();
        for (const auto& q : propagators_) p.orthogonalize(*q);
        propagators_.push_back(std::make_unique<SpectralPropagator>(std::move(p)));
      }
    }
  }

  Method method() const noexcept { return method_; }

  struct Snapshot {
    std::vector<WavefunctionSample> states;
    double leakage = 0;  // padding-band probability for spectral runs, else grid leakage
  };

  Snapshot at(double t) const {
    Snapshot s;
    for (std::size_t j = 0; j < cfg_.modes.size(); ++j) {
      if (method_ == Method::Spectral && t > 0) {
        Propagated p = propagators_[j]->evolve(t);
        s.leakage = std::max(s.leakage, p.leakage);
        s.states.push_back(std::move(p.psi));
      } else {
        s.states.push_back(exact_state(cfg_.modes[j], cfg_.well, t, cfg_.grid));
        s.leakage = std::max(s.leakage, grid_leakage(s.states.back()));
      }
    }
    if (s.leakage > cfg_.leakage_budget) {
      throw TruncationError("leaked probability " + std::to_string(s.leakage) +
                                " exceeds budget at t = " + std::to_string(t),
                            s.leakage);
    }
    return s;
  }

  /// Amplitudes of every mode on another grid. Exact runs evaluate directly; spectral
  /// runs interpolate linearly from the simulation grid.
  std::vector<WavefunctionSample> on_grid(const Grid1D& target, double t) const {
    std::vector<WavefunctionSample> out;
    if (method_ == Method::Exact) {
      for (const auto& m : cfg_.modes) out.push_back(exact_state(m, cfg_.well, t, target));
      return out;
    }
    for (const auto& psi : at(t).states) {
      const Grid1D& g = psi.grid();
      out.push_back(WavefunctionSample::tabulate(target, t, [&](double x) {
        if (!g.contains(x)) return Amplitude{};
        const double pos = (x - g.x_min()) / g.spacing();
        const auto i = std::min(static_cast<std::size_t>(pos), g.size() - 2);
        const double f = pos - static_cast<double>(i);
        return (1 - f) * psi[i] + f * psi[i + 1];
      }));
    }
    return out;
  }

 private:
  const ScenarioConfig& cfg_;
  Method method_;
  std::vector<std::unique_ptr<SpectralPropagator>> propagators_;
};

/// Runs fn(i) for i in [0, count) on up to `workers` threads; rethrows the first failure.
template <class F>
void parallel_for(std::size_t count, int workers, F&& fn) {
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mutex);
        if (failure || next >= count) return;
        i = next++;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pairstat
