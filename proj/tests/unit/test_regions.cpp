#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "pairstat/pairstat.hpp"
#include "test_support.hpp"

namespace pairstat {
namespace {

const WellSpec kWell{};

const Grid1D& wide_grid() {
  static const Grid1D g(-400, 400, 256001);
  return g;
}

TDPReport exact_report(const std::vector<ModeSpec>& modes, double t) {
  const auto a = exact_state(modes[0], kWell, t, wide_grid());
  const auto b = exact_state(modes[1], kWell, t, wide_grid());
  return tdp_regions(a, b, kWell);
}

std::set<std::string> names(const std::vector<IdentityCheck>& checks) {
  std::set<std::string> out;
  for (const auto& c : checks) out.insert(c.name);
  return out;
}

TEST(Regions, SubRectanglesTileThePlane) {
  std::set<std::pair<int, int>> cells;
  std::size_t total = 0;
  for (RegionLabel r : kAllRegions) {
    for (const Rectangle& q : sub_rectangles(r)) {
      cells.insert({int(q.s1), int(q.s2)});
      ++total;
    }
  }
  EXPECT_EQ(total, 9u);
  EXPECT_EQ(cells.size(), 9u);
  EXPECT_EQ(sub_rectangles(RegionLabel::A).size(), 1u);
  EXPECT_EQ(sub_rectangles(RegionLabel::B).size(), 2u);
  EXPECT_EQ(sub_rectangles(RegionLabel::C).size(), 4u);
  EXPECT_EQ(sub_rectangles(RegionLabel::D).size(), 2u);
}

TEST(Regions, SquareRectangleIsTwiceSquaredOverlap) {
  std::mt19937_64 rng(31);
  const Grid1D g(-4, 4, 1601);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = testing::random_smooth_state(g, rng);
    const auto b = testing::random_smooth_state(g, rng);
    const Interval r{-0.7, 1.3};
    const double v = tdp_rectangle(a, b, r, r);
    EXPECT_GE(v, 0);
    EXPECT_NEAR(v, 2 * std::norm(inner_product(a, b, r)), 1e-15);
  }
}

TEST(Regions, FactorizedRectangleMatchesBruteForce) {
  std::mt19937_64 rng(32);
  const Grid1D g(-3, 3, 601);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = testing::random_smooth_state(g, rng, 1.0);
    const auto b = testing::random_smooth_state(g, rng, 1.0);
    const double factorized = tdp_rectangle(a, b, {0, 1}, {-1, 0});
    const double brute = testing::brute_force_tdp(a, b, {0, 1}, {-1, 0});
    EXPECT_NEAR(factorized, brute, 1e-8);
  }
}

TEST(Regions, FactorizedRegionsMatchBruteForce) {
  std::mt19937_64 rng(33);
  const Grid1D g(-3, 3, 601);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = testing::random_smooth_state(g, rng, 1.0);
    const auto b = testing::random_smooth_state(g, rng, 1.0);
    const TDPReport r = tdp_regions(a, b, kWell, 1e-6);
    for (RegionLabel label : kAllRegions) {
      EXPECT_NEAR(r.delta(label), testing::brute_force_region(a, b, label, kWell), 1e-7) << to_string(label);
    }
  }
}

TEST(Regions, OrthogonalEigenstatesAtReleaseGiveZero) {
  const Grid1D g(-2, 2, 8001);
  for (const auto& modes : {std::vector{ModeSpec::even(0, kWell), ModeSpec::even(1, kWell)},
                            std::vector{ModeSpec::even(1, kWell), ModeSpec::odd(1, kWell)}}) {
    const auto a = well_eigenstate(modes[0], kWell, g);
    const auto b = well_eigenstate(modes[1], kWell, g);
    EXPECT_NEAR(tdp_rectangle(a, b, {-0.5, 0.5}, {-0.5, 0.5}), 0, 1e-20);
    const TDPReport r = tdp_regions(a, b, kWell);
    for (RegionLabel label : kAllRegions) EXPECT_NEAR(r.delta(label), 0, 1e-20);
    EXPECT_NEAR(population_difference(r), 0, 1e-20);
  }
}

TEST(Regions, SameParityIdentitiesAfterRelease) {
  const std::vector modes{ModeSpec::even(0, kWell), ModeSpec::even(1, kWell)};
  for (double t : {0.005, 0.03, 0.1}) {
    const TDPReport r = exact_report(modes, t);
    EXPECT_EQ(r.symmetry_pairing, SymmetryPairing::Same);
    EXPECT_NEAR(r.delta_D, r.delta_B, 1e-6);
    EXPECT_GT(r.delta_A, 0);
    EXPECT_NEAR(population_difference(r), r.delta_A - 2 * r.delta_B, 1e-6);
    EXPECT_NEAR(population_difference(r), 0, 1e-6);
    const auto checks = verify_identities(r);
    EXPECT_TRUE(all_passed(checks));
    EXPECT_EQ(names(checks), (std::set<std::string>{"sum_zero", "delta_A_nonnegative", "delta_B_nonnegative",
                                                    "delta_C_nonpositive", "delta_D_equals_delta_B",
                                                    "delta_A_equals_B_plus_D", "delta_C_equals_minus_2A"}));
  }
  const TDPReport r = exact_report(modes, 0.03);
  EXPECT_LT(std::abs(r.delta_A + r.delta_B + r.delta_C + r.delta_D), 1e-8);
}

TEST(Regions, OppositeParityIdentitiesAfterRelease) {
  const std::vector modes{ModeSpec::even(1, kWell), ModeSpec::odd(1, kWell)};
  for (double t : {0.01, 0.05}) {
    const TDPReport r = exact_report(modes, t);
    EXPECT_EQ(r.symmetry_pairing, SymmetryPairing::Opposite);
    EXPECT_LT(std::abs(r.delta_A), 1e-8);
    EXPECT_LT(std::abs(r.delta_C), 1e-8);
    EXPECT_NEAR(r.delta_D, -r.delta_B, 1e-6);
    EXPECT_NEAR(population_difference(r), r.delta_A, 1e-8);
    const auto checks = verify_identities(r);
    EXPECT_TRUE(all_passed(checks));
    EXPECT_EQ(names(checks), (std::set<std::string>{"sum_zero", "delta_A_nonnegative", "delta_B_nonnegative",
                                                    "delta_C_nonpositive", "delta_A_vanishes",
                                                    "delta_C_vanishes", "delta_D_equals_minus_B"}));
  }
}

TEST(Regions, HalfLineOverlapVanishesForSamePair) {
  const auto a = released_state(ModeSpec::even(0, kWell), kWell, 0.02, wide_grid());
  const auto b = released_state(ModeSpec::even(1, kWell), kWell, 0.02, wide_grid());
  const HalfLineResiduals h = half_line_overlap(a, b, kWell);
  EXPECT_LT(std::abs(h.literal), 1e-7);
  EXPECT_LT(std::abs(h.half_line), 1e-7);
}

TEST(Regions, IdentityChecksFlagViolations) {
  TDPReport r;
  r.symmetry_pairing = SymmetryPairing::Same;
  r.delta_A = -1e-6;
  r.delta_B = 0.1;
  r.delta_C = 0.2;
  r.delta_D = 0;
  const auto checks = verify_identities(r);
  EXPECT_FALSE(all_passed(checks));
  for (const auto& c : checks) {
    if (c.name == "delta_A_nonnegative") { EXPECT_FALSE(c.passed); }
    if (c.name == "delta_C_nonpositive") { EXPECT_FALSE(c.passed); }
    if (c.name == "sum_zero") { EXPECT_FALSE(c.passed); }
  }
  r.symmetry_pairing = SymmetryPairing::None;
  EXPECT_EQ(verify_identities(r).size(), 4u);
}

TEST(Regions, TruncatedStateIsRejected) {
  const Grid1D small(-2, 2, 4001);
  const auto a = released_state(ModeSpec::even(0, kWell), kWell, 0.1, small);
  const auto b = released_state(ModeSpec::even(1, kWell), kWell, 0.1, small);
  try {
    tdp_regions(a, b, kWell);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_GT(e.leaked(), 1e-8);
  }
  EXPECT_NO_THROW(tdp_regions(a, b, kWell, 1.0));
}

TEST(Regions, RandomPairsSatisfySumZeroAndSigns) {
  std::mt19937_64 rng(34);
  const Grid1D g(-6, 6, 2401);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testing::random_smooth_state(g, rng);
    auto b = testing::random_smooth_state(g, rng);
    // Gram-Schmidt b against a so the pair is orthonormal.
    const Amplitude c = inner_product(b, a);
    std::vector<Amplitude> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = b[i] - c * a[i];
    const double n = std::sqrt(norm_squared(WavefunctionSample(g, v, 0.0)));
    for (auto& x : v) x /= n;
    b = WavefunctionSample(g, std::move(v), 0.0);

    const TDPReport r = tdp_regions(a, b, kWell, 1e-6);
    EXPECT_LT(std::abs(r.delta_A + r.delta_B + r.delta_C + r.delta_D), 1e-8);
    EXPECT_GE(r.delta_A, -1e-10);
  }
}

}  // namespace
}  // namespace pairstat
