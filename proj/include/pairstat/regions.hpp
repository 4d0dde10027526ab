#pragma once

// Scenario regions of the (x1, x2) plane for a trap of half-width a, with
// I = [-a, a], R = [a, inf), L = (-inf, -a]:
//   A  both trapped        I x I
//   B  same side           R x R, L x L
//   C  one trapped         I x R, I x L, R x I, L x I
//   D  opposite sides      R x L, L x R
// The integral of delta over r1 x r2 factorizes as 2 Re{J(r1) J(r2)*} with
// J(r) the overlap of psi1 psi2* over r.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "pairstat/errors.hpp"
#include "pairstat/exact.hpp"
#include "pairstat/pair.hpp"
#include "pairstat/quadrature.hpp"

namespace pairstat {

enum class RegionLabel { A, B, C, D };

inline constexpr std::array<RegionLabel, 4> kAllRegions{RegionLabel::A, RegionLabel::B,
                                                        RegionLabel::C, RegionLabel::D};

constexpr std::string_view to_string(RegionLabel r) {
  constexpr std::array<std::string_view, 4> names{"A", "B", "C", "D"};
  return names[static_cast<int>(r)];
}

enum class Segment { Left, Inside, Right };

struct Rectangle {
  Segment s1;
  Segment s2;
};

inline Interval segment_interval(Segment s, const WellSpec& well) {
  switch (s) {
    case Segment::Left: return Interval::up_to(-well.a);
    case Segment::Inside: return {-well.a, well.a};
    default: return Interval::from(well.a);
  }
}

inline std::vector<Rectangle> sub_rectangles(RegionLabel label) {
  using S = Segment;
  switch (label) {
    case RegionLabel::A: return {{S::Inside, S::Inside}};
    case RegionLabel::B: return {{S::Right, S::Right}, {S::Left, S::Left}};
    case RegionLabel::C:
      return {{S::Inside, S::Right}, {S::Inside, S::Left}, {S::Right, S::Inside}, {S::Left, S::Inside}};
    default: return {{S::Right, S::Left}, {S::Left, S::Right}};
  }
}

inline double tdp_from_overlaps(Amplitude j1, Amplitude j2) {
  return 2 * std::real(j1 * std::conj(j2));
}

/// Integral of delta over r1 x r2 via the factorized overlaps.
inline double tdp_rectangle(const WavefunctionSample& psi1, const WavefunctionSample& psi2,
                            Interval r1, Interval r2) {
  return tdp_from_overlaps(inner_product(psi1, psi2, r1), inner_product(psi1, psi2, r2));
}

enum class SymmetryPairing { Same, Opposite, None };

constexpr std::string_view to_string(SymmetryPairing p) {
  switch (p) {
    case SymmetryPairing::Same: return "same";
    case SymmetryPairing::Opposite: return "opposite";
    default: return "none";
  }
}

inline SymmetryPairing pairing_of(SymmetryClass c1, SymmetryClass c2) {
  if (c1 == SymmetryClass::NoParity || c2 == SymmetryClass::NoParity) return SymmetryPairing::None;
  return c1 == c2 ? SymmetryPairing::Same : SymmetryPairing::Opposite;
}

struct TDPReport {
  double t = 0;
  double delta_A = 0;
  double delta_B = 0;
  double delta_C = 0;
  double delta_D = 0;
  double leakage = 0;
  double snap_distance = 0;
  SymmetryPairing symmetry_pairing = SymmetryPairing::None;

  double delta(RegionLabel r) const {
    switch (r) {
      case RegionLabel::A: return delta_A;
      case RegionLabel::B: return delta_B;
      case RegionLabel::C: return delta_C;
      default: return delta_D;
    }
  }
};

/// Probability outside the grid for a state whose full-line norm is 1.
inline double grid_leakage(const WavefunctionSample& psi) {
  return std::max(0.0, 1.0 - norm_squared(psi));
}

inline constexpr double kDefaultLeakageBudget = 1e-8;

inline TDPReport tdp_regions(const WavefunctionSample& psi1, const WavefunctionSample& psi2,
                             const WellSpec& well, double leakage_budget = kDefaultLeakageBudget) {
  require_compatible(psi1, psi2);
  TDPReport report;
  report.t = psi1.time();
  report.leakage = std::max(grid_leakage(psi1), grid_leakage(psi2));
  if (report.leakage > leakage_budget) {
    throw TruncationError("tdp_regions: leaked probability " + std::to_string(report.leakage) +
                              " exceeds budget",
                          report.leakage);
  }
  report.symmetry_pairing = pairing_of(classify_parity(psi1), classify_parity(psi2));

  std::array<Amplitude, 3> j{};
  for (Segment s : {Segment::Left, Segment::Inside, Segment::Right}) {
    const Overlap o = overlap(psi1, psi2, segment_interval(s, well));
    j[static_cast<int>(s)] = o.value;
    report.snap_distance = std::max(report.snap_distance, o.snap_distance);
  }
  auto region_sum = [&](RegionLabel label) {
    double sum = 0;
    for (const Rectangle& r : sub_rectangles(label)) {
      sum += tdp_from_overlaps(j[static_cast<int>(r.s1)], j[static_cast<int>(r.s2)]);
    }
    return sum;
  };
  report.delta_A = region_sum(RegionLabel::A);
  report.delta_B = region_sum(RegionLabel::B);
  report.delta_C = region_sum(RegionLabel::C);
  report.delta_D = region_sum(RegionLabel::D);
  return report;
}

struct IdentityTolerances {
  double sum_zero = 1e-8;
  double sign = 1e-10;
  double relation = 1e-6;
  double vanishing = 1e-8;
};

struct IdentityCheck {
  std::string name;
  double residual;  // signed violation for inequalities, |lhs - rhs| for equalities
  double tolerance;
  bool passed;
};

inline std::vector<IdentityCheck> verify_identities(const TDPReport& r,
                                                    const IdentityTolerances& tol = {}) {
  std::vector<IdentityCheck> out;
  auto equality = [&](std::string name, double residual, double tolerance) {
    residual = std::abs(residual);
    out.push_back({std::move(name), residual, tolerance, residual < tolerance});
  };
  // Violation of x >= 0 is -x; passes while -x <= tolerance.
  auto nonnegative = [&](std::string name, double x) {
    out.push_back({std::move(name), -x, tol.sign, -x <= tol.sign});
  };

  equality("sum_zero", r.delta_A + r.delta_B + r.delta_C + r.delta_D, tol.sum_zero);
  nonnegative("delta_A_nonnegative", r.delta_A);
  nonnegative("delta_B_nonnegative", r.delta_B);
  nonnegative("delta_C_nonpositive", -r.delta_C);

  if (r.symmetry_pairing == SymmetryPairing::Same) {
    equality("delta_D_equals_delta_B", r.delta_D - r.delta_B, tol.relation);
    equality("delta_A_equals_B_plus_D", r.delta_A - (r.delta_B + r.delta_D), tol.relation);
    equality("delta_C_equals_minus_2A", r.delta_C + 2 * r.delta_A, tol.relation);
  } else if (r.symmetry_pairing == SymmetryPairing::Opposite) {
    equality("delta_A_vanishes", r.delta_A, tol.vanishing);
    equality("delta_C_vanishes", r.delta_C, tol.vanishing);
    equality("delta_D_equals_minus_B", r.delta_D + r.delta_B, tol.relation);
  }
  return out;
}

inline bool all_passed(const std::vector<IdentityCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
}

/// Mean Boson-minus-Fermion occupancy of the trap.
inline double population_difference(const TDPReport& r) { return 2 * r.delta_A + r.delta_C; }

struct HalfLineResiduals {
  Amplitude literal;    // overlap over [0, a] plus overlap over [a, inf)
  Amplitude half_line;  // overlap over [0, inf) in one pass
};

/// Split-at-a half-line overlap of a same-parity pair, evaluated both as the sum of
/// the two pieces and as one integral.
inline HalfLineResiduals half_line_overlap(const WavefunctionSample& psi1,
                                           const WavefunctionSample& psi2, const WellSpec& well) {
  const Amplitude inner = inner_product(psi2, psi1, {0.0, well.a});
  const Amplitude outer = inner_product(psi2, psi1, Interval::from(well.a));
  return {inner + outer, inner_product(psi2, psi1, Interval::from(0.0))};
}

}  // namespace pairstat
