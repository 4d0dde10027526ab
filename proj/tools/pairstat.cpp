// pairstat: released-trap pair statistics scenarios from the command line.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "pairstat/commands.hpp"

namespace {

using namespace pairstat;

struct Options {
  double a = 0.5;
  std::string modes = "same";
  std::string dispersion = "quadratic";
  double mass = 1.0;
  std::vector<double> t;
  double t_start = 0, t_end = 0.1;
  int t_steps = 51;
  double grid_min = -400, grid_max = 400;
  std::size_t grid_n = 256001;
  int pad = 4;
  double taper = 0.25;
  double leakage_budget = kDefaultLeakageBudget;
  double tol = IdentityTolerances{}.relation;
  std::string out_dir = ".";
  int workers = 1;
  std::string method = "auto";
  std::string kind = "both";
  double heatmap_min = -1.5, heatmap_max = 1.5;
  std::size_t heatmap_n = 512;
  double x1 = 3, x2 = 4, single_x = 5;
  std::size_t stride = 1;
};

struct TimeFlags {
  CLI::Option* t;
  CLI::Option* start;
  CLI::Option* end;
  CLI::Option* steps;
};

std::vector<double> resolve_times(const Options& o, const TimeFlags& f, double start, double end,
                                  int steps, bool series) {
  if (f.t->count()) return o.t;
  const bool custom = f.start->count() || f.end->count() || f.steps->count();
  if (!series && !custom) return {0.03};
  return linspace(f.start->count() ? o.t_start : start, f.end->count() ? o.t_end : end,
                  f.steps->count() ? o.t_steps : steps);
}

ScenarioConfig build_config(const Options& o) {
  ScenarioConfig cfg;
  cfg.well = WellSpec(o.a);
  cfg.modes_text = o.modes;
  cfg.modes = parse_modes(o.modes, cfg.well);
  if (o.dispersion == "quadratic") {
    cfg.dispersion = DispersionRelation::quadratic();
  } else if (o.dispersion == "relativistic") {
    cfg.dispersion = DispersionRelation::relativistic(o.mass);
  } else {
    throw ConfigurationError("unknown dispersion '" + o.dispersion + "'");
  }
  cfg.grid = Grid1D(o.grid_min, o.grid_max, o.grid_n);
  cfg.padding = o.pad;
  cfg.taper_start = o.taper;
  cfg.leakage_budget = o.leakage_budget;
  cfg.tol.relation = o.tol;
  cfg.out_dir = o.out_dir;
  cfg.workers = o.workers;
  cfg.output_stride = o.stride;
  if (o.method == "auto") {
    cfg.method = Method::Auto;
  } else if (o.method == "exact") {
    cfg.method = Method::Exact;
  } else if (o.method == "spectral") {
    cfg.method = Method::Spectral;
  } else {
    throw ConfigurationError("unknown method '" + o.method + "'");
  }
  cfg.heatmap.x_min = o.heatmap_min;
  cfg.heatmap.x_max = o.heatmap_max;
  cfg.heatmap.n = o.heatmap_n;
  cfg.asymptotics.x1 = o.x1;
  cfg.asymptotics.x2 = o.x2;
  cfg.asymptotics.single_x = o.single_x;
  return cfg;
}

std::vector<Statistics> parse_kinds(const std::string& kind) {
  if (kind == "boson") return {Statistics::Boson};
  if (kind == "fermion") return {Statistics::Fermion};
  if (kind == "both") return {Statistics::Boson, Statistics::Fermion};
  throw ConfigurationError("unknown kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pair statistics of identical particles released from a 1D box trap"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  Options o;
  app.add_option("--a", o.a, "trap half-width")->capture_default_str();
  app.add_option("--modes", o.modes, "same | opposite | even:M,odd:M,...")->capture_default_str();
  app.add_option("--dispersion", o.dispersion, "quadratic | relativistic")->capture_default_str();
  app.add_option("--mass", o.mass, "mass of the relativistic dispersion")->capture_default_str();
  TimeFlags tf{};
  tf.t = app.add_option("--t", o.t, "explicit time samples")->delimiter(',');
  tf.start = app.add_option("--t-start", o.t_start, "first time sample");
  tf.end = app.add_option("--t-end", o.t_end, "last time sample");
  tf.steps = app.add_option("--t-steps", o.t_steps, "number of time samples");
  app.add_option("--grid-min", o.grid_min)->capture_default_str();
  app.add_option("--grid-max", o.grid_max)->capture_default_str();
  app.add_option("--grid-n", o.grid_n)->capture_default_str();
  app.add_option("--pad", o.pad, "zero-padding factor of the spectral propagator")->capture_default_str();
  app.add_option("--taper", o.taper, "spectral taper start as a fraction of Nyquist (>= 1 disables)")
      ->capture_default_str();
  app.add_option("--leakage-budget", o.leakage_budget)->capture_default_str();
  app.add_option("--tol", o.tol, "tolerance of the relation identities")->capture_default_str();
  app.add_option("--out-dir", o.out_dir)->capture_default_str();
  app.add_option("--workers", o.workers, "parallel time samples")->capture_default_str();
  app.add_option("--method", o.method, "auto | exact | spectral")->capture_default_str();
  app.add_option("--kind", o.kind, "boson | fermion | both")->capture_default_str();
  app.add_option("--heatmap-min", o.heatmap_min)->capture_default_str();
  app.add_option("--heatmap-max", o.heatmap_max)->capture_default_str();
  app.add_option("--heatmap-n", o.heatmap_n)->capture_default_str();
  app.add_option("--x1", o.x1)->capture_default_str();
  app.add_option("--x2", o.x2)->capture_default_str();
  app.add_option("--single-x", o.single_x, "position of the single-particle exponent fit")
      ->capture_default_str();
  app.add_option("--output-stride", o.stride, "write every n-th grid point in evolve files")
      ->capture_default_str();

  auto* evolve = app.add_subcommand("evolve", "write wavefunction snapshots");
  auto* heatmap = app.add_subcommand("heatmap", "write joint-density maps (CSV + graymap)");
  auto* tdp = app.add_subcommand("tdp", "write region population differences and identity checks");
  auto* asymptotics = app.add_subcommand("asymptotics", "fit short-time exponents and audit constants");
  auto* verify = app.add_subcommand("verify", "identity suite over both pairings and dispersions");
  for (auto* sub : {evolve, heatmap, tdp, asymptotics, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfiguration;
  }

  try {
    ScenarioConfig cfg = build_config(o);
    if (*evolve) {
      cfg.times = resolve_times(o, tf, 0, 0.1, 51, false);
      return cmd_evolve(cfg, std::cout);
    }
    if (*heatmap) {
      cfg.times = resolve_times(o, tf, 0, 0.1, 51, false);
      return cmd_heatmap(cfg, parse_kinds(o.kind), std::cout);
    }
    if (*tdp) {
      cfg.times = resolve_times(o, tf, 0, 0.1, 51, true);
      return cmd_tdp(cfg, std::cout);
    }
    if (*asymptotics) {
      auto& w = cfg.asymptotics.window;
      w.t_min = tf.start->count() ? o.t_start : 1e-4;
      w.t_max = tf.end->count() ? o.t_end : 1e-3;
      if (tf.steps->count()) w.bins = o.t_steps;
      return cmd_asymptotics(cfg, std::cout);
    }
    cfg.times = resolve_times(o, tf, 0, 0.1, 51, true);
    return cmd_verify(cfg, o.mass, std::cout);
  } catch (const TruncationError& e) {
    std::cerr << "pairstat: " << e.what() << '\n';
    return kExitTruncation;
  } catch (const Error& e) {
    std::cerr << "pairstat: " << e.what() << '\n';
    return kExitConfiguration;
  } catch (const std::exception& e) {
    std::cerr << "pairstat: " << e.what() << '\n';
    return 1;
  }
}
