#pragma once

// Scenario runners behind the pairstat subcommands. Each writes its files under
// cfg.out_dir, prints a short summary to `log` and returns the process exit code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pairstat/asymptotics.hpp"
#include "pairstat/errors.hpp"
#include "pairstat/io.hpp"
#include "pairstat/pair.hpp"
#include "pairstat/quadrature.hpp"
#include "pairstat/regions.hpp"
#include "pairstat/scenario.hpp"

namespace pairstat {

enum ExitCode : int {
  kExitOk = 0,
  kExitIdentityFailure = 2,
  kExitConfiguration = 3,
  kExitTruncation = 4,
};

namespace detail {

inline std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

inline std::string indexed_name(const std::string& stem, std::size_t index, double t,
                                const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03zu_t", index);
  return stem + buf + time_tag(t) + ext;
}

inline std::string method_name(Method m) {
  return m == Method::Spectral ? "spectral" : "exact";
}

inline const char* pass_fail(bool ok) { return ok ? "pass" : "FAIL"; }

struct CheckRow {
  double t;
  IdentityCheck check;
};

// Identity checks of one pair time series plus the extra ones the tdp report carries.
struct SeriesResult {
  std::vector<TDPReport> reports;
  std::vector<CheckRow> checks;
};

inline constexpr double kHalfLineTolerance = 1e-7;
inline constexpr double kRotationTolerance = 1e-10;
inline constexpr std::size_t kRotationProbe = 256;

// max |delta(x2, -x1) + delta(x1, x2)| on a symmetric probe grid.
inline double rotation_flip_residual(const WavefunctionSample& psi1, const WavefunctionSample& psi2) {
  const Grid1D& g = psi1.grid();
  double worst = 0;
  for (std::size_t i1 = 0; i1 < g.size(); ++i1) {
    for (std::size_t i2 = 0; i2 < g.size(); ++i2) {
      const double d = density_difference(psi1, psi2, i1, i2);
      const double r = density_difference(psi1, psi2, i2, g.mirror(i1));
      worst = std::max(worst, std::abs(d + r));
    }
  }
  return worst;
}

inline SeriesResult run_series(const ScenarioConfig& cfg, bool rotation_probe) {
  if (cfg.modes.size() != 2) throw ConfigurationError("pair commands need exactly two modes");
  const Evolver evolver(cfg);
  const std::size_t n = cfg.times.size();
  std::vector<TDPReport> reports(n);
  std::vector<std::vector<IdentityCheck>> extra(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const double t = cfg.times[i];
    const auto snap = evolver.at(t);
    const auto& psi1 = snap.states[0];
    const auto& psi2 = snap.states[1];
    TDPReport r = tdp_regions(psi1, psi2, cfg.well, cfg.leakage_budget);
    r.leakage = std::max(r.leakage, snap.leakage);
    reports[i] = r;
    if (r.symmetry_pairing == SymmetryPairing::Same) {
      const HalfLineResiduals h = half_line_overlap(psi1, psi2, cfg.well);
      const double lit = std::abs(h.literal), half = std::abs(h.half_line);
      extra[i].push_back({"half_line_split_at_a", lit, kHalfLineTolerance, lit < kHalfLineTolerance});
      extra[i].push_back({"half_line_single_pass", half, kHalfLineTolerance, half < kHalfLineTolerance});
    }
    if (rotation_probe && r.symmetry_pairing == SymmetryPairing::Opposite) {
      const Grid1D probe(-cfg.heatmap.x_max, cfg.heatmap.x_max, kRotationProbe);
      const auto s = evolver.on_grid(probe, t);
      const double res = rotation_flip_residual(s[0], s[1]);
      extra[i].push_back({"rotation_flip", res, kRotationTolerance, res < kRotationTolerance});
    }
  });
  SeriesResult out;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : verify_identities(reports[i], cfg.tol)) out.checks.push_back({cfg.times[i], c});
    for (auto& c : extra[i]) out.checks.push_back({cfg.times[i], c});
  }
  out.reports = std::move(reports);
  return out;
}

}  // namespace detail

inline int cmd_evolve(const ScenarioConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Evolver evolver(cfg);
  const std::size_t n = cfg.times.size();
  std::vector<std::vector<double>> norms(n);
  std::vector<double> leakage(n);

  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const double t = cfg.times[i];
    const auto snap = evolver.at(t);
    leakage[i] = snap.leakage;
    std::vector<std::string> header{"x"};
    for (std::size_t j = 1; j <= snap.states.size(); ++j) {
      const std::string s = std::to_string(j);
      header.insert(header.end(), {"re_psi" + s, "im_psi" + s, "abs2_psi" + s});
    }
    io::CsvWriter csv(cfg.out_dir / detail::indexed_name("evolve", i, t, ".csv"), header);
    const Grid1D& g = cfg.grid;
    std::vector<double> row(header.size());
    for (std::size_t k = 0; k < g.size(); k += cfg.output_stride) {
      row[0] = g.x(k);
      for (std::size_t j = 0; j < snap.states.size(); ++j) {
        const Amplitude v = snap.states[j][k];
        row[1 + 3 * j] = v.real();
        row[2 + 3 * j] = v.imag();
        row[3 + 3 * j] = v.real() * v.real() + v.imag() * v.imag();
      }
      csv.row(row);
    }
    csv.close();
    for (const auto& psi : snap.states) norms[i].push_back(norm_squared(psi));
  });

  std::vector<std::string> header{"index", "t", "file", "leakage"};
  for (std::size_t j = 1; j <= cfg.modes.size(); ++j) header.push_back("norm_psi" + std::to_string(j));
  io::CsvWriter index(cfg.out_dir / "evolve_index.csv", header);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> cells{std::to_string(i), io::format_double(cfg.times[i]),
                                   detail::indexed_name("evolve", i, cfg.times[i], ".csv"),
                                   io::format_double(leakage[i])};
    for (double v : norms[i]) cells.push_back(io::format_double(v));
    index.row(cells);
  }
  index.close();
  log << "evolve: " << n << " snapshot(s), " << cfg.modes.size() << " mode(s), method "
      << detail::method_name(evolver.method()) << ", dispersion " << cfg.dispersion.label() << '\n';
  return kExitOk;
}

struct HeatmapResult {
  std::vector<double> density;  // row-major, row = x2 index
  double max = 0;
};

inline HeatmapResult joint_density_map(const PairState& pair) {
  const std::size_t n = pair.grid().size();
  HeatmapResult r;
  r.density.resize(n * n);
  for (std::size_t i2 = 0; i2 < n; ++i2) {
    for (std::size_t i1 = 0; i1 < n; ++i1) {
      const double v = pair.joint_density(i1, i2);
      r.density[i2 * n + i1] = v;
      r.max = std::max(r.max, v);
    }
  }
  return r;
}

inline int cmd_heatmap(const ScenarioConfig& cfg, const std::vector<Statistics>& kinds,
                       std::ostream& log) {
  cfg.validate();
  if (cfg.modes.size() != 2) throw ConfigurationError("heatmap needs exactly two modes");
  const HeatmapSpec& hs = cfg.heatmap;
  if (hs.n > hs.cap) {
    throw ConfigurationError("heatmap resolution " + std::to_string(hs.n) + " exceeds cap " +
                             std::to_string(hs.cap));
  }
  const Grid1D grid(hs.x_min, hs.x_max, hs.n);
  const Evolver evolver(cfg);
  std::size_t written = 0;

  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    const double t = cfg.times[i];
    const auto states = evolver.on_grid(grid, t);
    for (Statistics kind : kinds) {
      const HeatmapResult map = joint_density_map(PairState(states[0], states[1], kind));
      const std::string stem = "heatmap_" + std::string(to_string(kind));

      std::vector<std::string> header{"x2\\x1"};
      for (std::size_t k = 0; k < grid.size(); ++k) header.push_back(io::format_double(grid.x(k)));
      io::CsvWriter csv(cfg.out_dir / detail::indexed_name(stem, i, t, ".csv"), header);
      std::vector<double> row(grid.size() + 1);
      for (std::size_t i2 = 0; i2 < grid.size(); ++i2) {
        row[0] = grid.x(i2);
        std::copy_n(map.density.begin() + static_cast<std::ptrdiff_t>(i2 * grid.size()), grid.size(),
                    row.begin() + 1);
        csv.row(row);
      }
      csv.close();

      std::vector<std::uint8_t> pixels(map.density.size());
      for (std::size_t k = 0; k < pixels.size(); ++k) {
        pixels[k] = map.max > 0 ? static_cast<std::uint8_t>(std::lround(255.0 * map.density[k] / map.max)) : 0;
      }
      io::write_pgm(cfg.out_dir / detail::indexed_name(stem, i, t, ".pgm"), grid.size(), grid.size(), pixels);
      io::write_key_values(cfg.out_dir / detail::indexed_name(stem, i, t, ".meta"),
                           {{"kind", std::string(to_string(kind))},
                            {"t", io::format_double(t)},
                            {"x_min", io::format_double(grid.x_min())},
                            {"x_max", io::format_double(grid.x_max())},
                            {"n", std::to_string(grid.size())},
                            {"max_density", io::format_double(map.max)},
                            {"normalization", "per-panel-linear"},
                            {"orientation", "row=x2 ascending downward,col=x1 ascending rightward"},
                            {"method", detail::method_name(evolver.method())}});
      ++written;
    }
  }
  log << "heatmap: " << written << " map(s) of " << grid.size() << "x" << grid.size() << '\n';
  return kExitOk;
}

inline int cmd_tdp(const ScenarioConfig& cfg, std::ostream& log) {
  cfg.validate();
  const detail::SeriesResult series = detail::run_series(cfg, false);

  io::CsvWriter csv(cfg.out_dir / "tdp.csv", {"t", "delta_A", "delta_B", "delta_C", "delta_D",
                                               "leakage", "population_difference"});
  for (const TDPReport& r : series.reports) {
    csv.row({r.t, r.delta_A, r.delta_B, r.delta_C, r.delta_D, r.leakage, population_difference(r)});
  }
  csv.close();

  io::CsvWriter rep(cfg.out_dir / "tdp_identities.csv", {"t", "identity", "residual", "tolerance", "passed"});
  std::size_t failed = 0;
  for (const auto& [t, c] : series.checks) {
    rep.row({io::format_double(t), c.name, io::format_double(c.residual), io::format_double(c.tolerance),
             c.passed ? "1" : "0"});
    if (!c.passed) ++failed;
  }
  rep.close();

  log << "tdp: " << series.reports.size() << " time sample(s), pairing "
      << to_string(series.reports.front().symmetry_pairing) << ", " << series.checks.size()
      << " identity check(s), " << failed << " failed\n";
  return failed ? kExitIdentityFailure : kExitOk;
}

struct AsymptoticsCheck {
  std::string name;
  double value;
  double expected;
  double tolerance;
  bool passed;
};

inline constexpr double kRatioBandLow = 0.8;
inline constexpr double kRatioBandHigh = 1.25;

inline int cmd_asymptotics(const ScenarioConfig& cfg, std::ostream& log) {
  cfg.validate();
  const AsymptoticsSpec& as = cfg.asymptotics;
  const WellSpec& well = cfg.well;
  const EnvelopeWindow& w = as.window;
  for (double x : {as.x1, as.x2}) {
    if (!classify_regime(x, w.t_min, well.a).valid()) {
      throw ConfigurationError("asymptotic regime fails on the whole window at x = " + io::format_double(x));
    }
  }
  const auto [m1, m2] = same_parity_pair(well);
  const double k1 = m1.k;
  const double x1 = as.x1, x2 = as.x2;

  auto exact = [&](Statistics kind) {
    return [&, kind](double t) { return exact_pair_density(kind, m1, m2, well, x1, x2, t); };
  };
  auto always = [](double) { return true; };
  const auto env_b = upper_envelope(exact(Statistics::Boson), always, w);
  const auto env_f = upper_envelope(exact(Statistics::Fermion), always, w);
  const auto env_bp = upper_envelope(
      [&](double t) { return exact(Statistics::Boson)(t) * density_ratio(x1, x2, t, k1); }, always, w);
  const auto env_bf = upper_envelope(
      [&](double t) { return exact(Statistics::Boson)(t) * density_ratio_far_field(x1, x2, t, k1); },
      always, w);
  using L = long double;
  const auto env_eb = upper_envelope(
      [&](double t) { return std::norm(pair_expansion<L>(Statistics::Boson, x1, x2, t, well)); }, always, w);
  const auto env_ef = upper_envelope(
      [&](double t) { return std::norm(pair_expansion<L>(Statistics::Fermion, x1, x2, t, well)); }, always, w);

  io::CsvWriter csv(cfg.out_dir / "asymptotics.csv",
                    {"bin", "t_boson", "boson_envelope", "t_fermion", "fermion_envelope", "measured_ratio",
                     "measured_over_predicted", "measured_over_far_field", "expansion_ratio"});
  double band_lo = INFINITY, band_hi = 0;
  for (std::size_t b = 0; b < env_b.size(); ++b) {
    const double measured = env_f[b].value / env_b[b].value;
    const double over_pred = env_f[b].value / env_bp[b].value;
    const double over_far = env_f[b].value / env_bf[b].value;
    const double expansion = env_ef[b].value / env_eb[b].value;
    band_lo = std::min(band_lo, over_pred);
    band_hi = std::max(band_hi, over_pred);
    csv.row({double(b), env_b[b].t, env_b[b].value, env_f[b].t, env_f[b].value, measured, over_pred,
             over_far, expansion});
  }
  csv.close();

  const ExponentFit fb = scaling_exponent_fit(Statistics::Boson, x1, x2, w, well);
  const ExponentFit ff = scaling_exponent_fit(Statistics::Fermion, x1, x2, w, well);
  const ExponentFit fs = single_scaling_exponent_fit(m1, as.single_x, w, well);

  std::vector<AsymptoticsCheck> checks;
  auto within = [&](std::string name, double v, double expected, double tol) {
    checks.push_back({std::move(name), v, expected, tol, std::abs(v - expected) <= tol});
  };
  within("boson_exponent", fb.exponent, 6, 0.3);
  within("fermion_exponent", ff.exponent, 10, 0.5);
  within("single_exponent", fs.exponent, 3, 0.15);
  checks.push_back({"ratio_over_predicted_min", band_lo, kRatioBandLow, 0, band_lo >= kRatioBandLow});
  checks.push_back({"ratio_over_predicted_max", band_hi, kRatioBandHigh, 0, band_hi <= kRatioBandHigh});

  io::CsvWriter rep(cfg.out_dir / "asymptotics_report.csv", {"quantity", "value", "expected", "tolerance", "passed"});
  std::size_t failed = 0;
  for (const auto& c : checks) {
    rep.row({c.name, io::format_double(c.value), io::format_double(c.expected), io::format_double(c.tolerance),
             c.passed ? "1" : "0"});
    if (!c.passed) ++failed;
  }
  rep.close();

  io::CsvWriter audit(cfg.out_dir / "prefactor_audit.csv", {"constant", "printed", "derived", "fitted"});
  for (const auto& p : prefactor_audit(x1, x2, w, well)) {
    audit.row({p.name, io::format_double(p.printed), io::format_double(p.derived), io::format_double(p.fitted)});
  }
  audit.close();

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "asymptotics: boson exponent %.4f, fermion exponent %.4f, single exponent %.4f, "
                "ratio/predicted in [%.4g, %.4g], %zu check(s) failed\n",
                fb.exponent, ff.exponent, fs.exponent, band_lo, band_hi, failed);
  log << buf;
  return failed ? kExitIdentityFailure : kExitOk;
}

/// Full identity suite over both parity pairings and both dispersions.
inline int cmd_verify(const ScenarioConfig& base, double mass, std::ostream& log) {
  io::CsvWriter rep(base.out_dir / "verify_report.csv",
                    {"pairing", "dispersion", "t", "identity", "residual", "tolerance", "passed"});
  std::size_t total = 0, failed = 0;
  for (const char* pairing : {"same", "opposite"}) {
    for (const DispersionRelation& disp :
         {DispersionRelation::quadratic(), DispersionRelation::relativistic(mass)}) {
      ScenarioConfig cfg = base;
      cfg.modes_text = pairing;
      cfg.modes = parse_modes(pairing, cfg.well);
      cfg.dispersion = disp;
      cfg.method = Method::Auto;
      cfg.validate();
      const detail::SeriesResult series = detail::run_series(cfg, true);
      std::size_t group_failed = 0;
      for (const auto& [t, c] : series.checks) {
        rep.row({pairing, disp.label(), io::format_double(t), c.name, io::format_double(c.residual),
                 io::format_double(c.tolerance), c.passed ? "1" : "0"});
        if (!c.passed) ++group_failed;
      }
      total += series.checks.size();
      failed += group_failed;
      log << "verify: " << pairing << " parity, " << disp.label() << ": " << series.checks.size()
          << " check(s), " << group_failed << " failed\n";
    }
  }
  rep.close();
  log << "verify: " << total << " check(s), " << failed << " failed\n";
  return failed ? kExitIdentityFailure : kExitOk;
}

}  // namespace pairstat
