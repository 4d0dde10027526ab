#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "pairstat/pairstat.hpp"
#include "test_support.hpp"

namespace pairstat {
namespace {

using std::numbers::pi;

const WellSpec kWell{};

WavefunctionSample gaussian(const Grid1D& g, double sigma, double x0 = 0, double k0 = 0) {
  const double norm = std::pow(2 * pi * sigma * sigma, -0.25);
  return WavefunctionSample::tabulate(g, 0.0, [&](double x) {
    const double u = x - x0;
    return norm * std::exp(-u * u / (4 * sigma * sigma)) * std::polar(1.0, k0 * x);
  });
}

double variance(const WavefunctionSample& psi) {
  const Grid1D& g = psi.grid();
  auto moment = [&](int p) {
    return simpson(0, g.size() - 1, g.spacing(),
                   [&](std::size_t i) { return std::pow(g.x(i), p) * std::norm(psi[i]); });
  };
  const double m0 = moment(0), m1 = moment(1) / m0;
  return moment(2) / m0 - m1 * m1;
}

TEST(Dispersion, OmegaAndLabels) {
  EXPECT_EQ(DispersionRelation::quadratic().omega(3), 9);
  EXPECT_EQ(DispersionRelation::relativistic(0).omega(-3), 3);
  EXPECT_DOUBLE_EQ(DispersionRelation::relativistic(4).omega(3), 5);
  EXPECT_EQ(DispersionRelation::quadratic().label(), "quadratic");
  EXPECT_EQ(DispersionRelation::relativistic(10).label(), "relativistic(m=10)");
  EXPECT_THROW(DispersionRelation::relativistic(-1), ConfigurationError);
  EXPECT_THROW(DispersionRelation::relativistic(NAN), ConfigurationError);
}

TEST(Propagator, FastSizesAreSevenSmooth) {
  EXPECT_EQ(next_fast_size(1), 1u);
  EXPECT_EQ(next_fast_size(11), 12u);
  EXPECT_EQ(next_fast_size(1024), 1024u);
  EXPECT_EQ(next_fast_size(1025), 1029u);
  for (std::size_t n : {97ul, 1000003ul, 1048577ul}) {
    std::size_t m = next_fast_size(n), r = m;
    EXPECT_GE(m, n);
    for (std::size_t p : {2u, 3u, 5u, 7u}) while (r % p == 0) r /= p;
    EXPECT_EQ(r, 1u);
  }
}

TEST(Propagator, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(21);
  const Grid1D g(-10, 10, 1001);
  const auto psi = testing::random_smooth_state(g, rng);
  for (const auto& d : {DispersionRelation::quadratic(), DispersionRelation::relativistic(1)}) {
    const auto out = propagate(psi, d, 0.0, {g});
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(out[i], psi[i]);
    const SpectralPropagator p(psi, d, {g});
    const auto e = p.evolve(0.0).psi;
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(e[i], psi[i]);
  }
}

TEST(Propagator, FreeGaussianSpreading) {
  const Grid1D g(-60, 60, 12001);
  for (double sigma : {0.5, 1.0}) {
    const auto psi0 = gaussian(g, sigma);
    EXPECT_NEAR(variance(psi0), sigma * sigma, 1e-10);
    for (double t : {0.1, 0.5, 2.0}) {
      const auto psi = propagate(psi0, DispersionRelation::quadratic(), t, {g});
      EXPECT_NEAR(variance(psi), sigma * sigma + t * t / (sigma * sigma), 1e-6) << sigma << " " << t;
    }
  }
}

TEST(Propagator, GaussianMatchesClosedForm) {
  const Grid1D g(-40, 40, 8001);
  const double sigma = 0.7, k0 = 3, t = 0.4;
  const auto psi = propagate(gaussian(g, sigma, -2, k0), DispersionRelation::quadratic(), t, {g});
  // (2 pi s^2)^{-1/4} q^{-1/2} exp(-(x - x0 - 2 k0 t)^2 / (4 s^2 q) + i (k0 x - k0^2 t)), q = 1 + i t/s^2
  const std::complex<double> q(1, t / (sigma * sigma));
  double worst = 0;
  for (std::size_t i = 0; i < g.size(); i += 7) {
    const double x = g.x(i);
    const double u = x + 2 - 2 * k0 * t;
    const std::complex<double> want = std::pow(2 * pi * sigma * sigma, -0.25) / std::sqrt(q) *
                                      std::exp(-u * u / (4 * sigma * sigma * q) +
                                               std::complex<double>(0, k0 * x - k0 * k0 * t));
    worst = std::max(worst, std::abs(psi[i] - want));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Propagator, MasslessRelativisticPacketTranslates) {
  const Grid1D g(-30, 30, 6001);
  const double sigma = 0.8, k0 = 30, t = 5;
  const auto psi0 = gaussian(g, sigma, -5, k0);
  const auto psi = propagate(psi0, DispersionRelation::relativistic(0), t, {g});
  const auto shifted = WavefunctionSample::tabulate(g, t, [&](double x) {
    const double u = x - t + 5;
    return std::pow(2 * pi * sigma * sigma, -0.25) * std::exp(-u * u / (4 * sigma * sigma)) *
           std::polar(1.0, k0 * (x - t));
  });
  EXPECT_LT(testing::l2_distance(psi, shifted), 1e-9);
}

TEST(Propagator, UnitarityCompositionAndLinearity) {
  std::mt19937_64 rng(22);
  const Grid1D g(-100, 100, 10001);
  // Massless evolution has power-law tails that leave any finite window; see the translation test.
  for (const auto& d : {DispersionRelation::quadratic(), DispersionRelation::relativistic(0.5),
                        DispersionRelation::relativistic(3)}) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto a = testing::random_smooth_state(g, rng);
      const auto b = testing::random_smooth_state(g, rng);
      std::uniform_real_distribution<double> ut(0.01, 0.3);
      const double t1 = ut(rng), t2 = ut(rng);
      const PropagationConfig cfg{g};

      SCOPED_TRACE(d.label());
      const auto at = propagate(a, d, t1, cfg);
      EXPECT_NEAR(norm_squared(at), norm_squared(a), 1e-10);

      const auto two_step = propagate(at, d, t2, cfg);
      const auto one_step = propagate(a, d, t1 + t2, cfg);
      EXPECT_LT(testing::l2_distance(two_step, one_step), 1e-10);
      EXPECT_DOUBLE_EQ(two_step.time(), t1 + t2);

      const std::complex<double> ca(0.3, -1.1), cb(-0.7, 0.4);
      std::vector<Amplitude> mix(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) mix[i] = ca * a[i] + cb * b[i];
      const auto lhs = propagate(WavefunctionSample(g, mix, 0.0), d, t1, cfg);
      const auto bt = propagate(b, d, t1, cfg);
      std::vector<Amplitude> rhs(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = ca * at[i] + cb * bt[i];
      EXPECT_LT(testing::l2_distance(lhs, WavefunctionSample(g, rhs, t1)), 1e-12);

      EXPECT_LT(std::abs(inner_product(at, bt) - inner_product(a, b)), 1e-10);
    }
  }
}

TEST(Propagator, LeakageAboveBudgetThrows) {
  const Grid1D g(-10, 10, 2001);
  const auto psi0 = gaussian(g, 0.5, 0, 20);
  try {
    propagate(psi0, DispersionRelation::quadratic(), 0.4, {g});
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_GT(e.leaked(), 1e-8);
  }
  const auto ok = propagate_with_leakage(psi0, DispersionRelation::quadratic(), 0.4, {g, 4, 1.0});
  EXPECT_GT(ok.leakage, 0.5);
  const auto small = propagate_with_leakage(psi0, DispersionRelation::quadratic(), 0.01, {g});
  EXPECT_LT(small.leakage, 1e-12);
}

TEST(Propagator, ConfigurationErrors) {
  const Grid1D g(-10, 10, 201);
  const auto psi0 = gaussian(g, 1);
  EXPECT_THROW(propagate(psi0, DispersionRelation::quadratic(), 0.1, {Grid1D(-10, 10, 202)}), ConfigurationError);
  EXPECT_THROW(propagate(psi0, DispersionRelation::quadratic(), 0.1, {g, 0}), ConfigurationError);
  EXPECT_THROW(propagate(psi0, DispersionRelation::quadratic(), 0.1, {g, 4, -1}), ConfigurationError);
  EXPECT_THROW(propagate(psi0, DispersionRelation::quadratic(), -0.1, {g}), DomainError);
}

TEST(Propagator, AnalyticSpectrumReproducesReleasedState) {
  const Grid1D g(-80, 80, (1u << 18) + 1);
  const PropagationConfig cfg{g, 16, 1e-6};
  const auto m = ModeSpec::even(0, kWell);
  auto p = SpectralPropagator::from_spectrum([&](double k) { return eigenstate_spectrum(m, kWell, k); }, 0.0,
                                             DispersionRelation::quadratic(), cfg);
  const auto spectral = p.evolve(0.03).psi;
  const auto exact = released_state(m, kWell, 0.03, g);
  EXPECT_LT(testing::l2_distance(spectral, exact), 1e-6);
  EXPECT_NEAR(norm_squared(spectral), 1, 1e-6);
}

TEST(Propagator, OrthogonalizeRemovesOverlap) {
  const Grid1D g(-20, 20, 4001);
  const PropagationConfig cfg{g};
  auto a = SpectralPropagator::from_spectrum(
      [&](double k) { return eigenstate_spectrum(ModeSpec::even(0, kWell), kWell, k); }, 0.0,
      DispersionRelation::relativistic(1), cfg);
  auto b = SpectralPropagator::from_spectrum(
      [&](double k) {
        return eigenstate_spectrum(ModeSpec::even(1, kWell), kWell, k) +
               0.1 * eigenstate_spectrum(ModeSpec::even(0, kWell), kWell, k);
      },
      0.0, DispersionRelation::relativistic(1), cfg);
  a.normalize();
  b.normalize();
  b.orthogonalize(a);
  const auto pa = a.evolve(0.05).psi;
  const auto pb = b.evolve(0.05).psi;
  double dot_re = 0, dot_im = 0, nb = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto d = pa[i] * std::conj(pb[i]);
    dot_re += d.real();
    dot_im += d.imag();
    nb += std::norm(pb[i]);
  }
  EXPECT_LT(std::hypot(dot_re, dot_im) * g.spacing(), 1e-12);
  EXPECT_NEAR(nb * g.spacing(), 1, 1e-12);
  EXPECT_EQ(classify_parity(pb, 1e-10), SymmetryClass::Even);

  auto other = SpectralPropagator::from_spectrum([](double) { return 1.0; }, 0.0, DispersionRelation::quadratic(),
                                                 {Grid1D(-20, 20, 2001)});
  EXPECT_THROW(b.orthogonalize(other), ConfigurationError);
}

TEST(Propagator, ConcurrentEvolutionIsDeterministic) {
  std::mt19937_64 rng(23);
  const Grid1D g(-20, 20, 4001);
  const auto psi = testing::random_smooth_state(g, rng);
  const SpectralPropagator p(psi, DispersionRelation::quadratic(), {g});
  const auto ref = p.evolve(0.2).psi;
  std::vector<WavefunctionSample> out(8, ref);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = p.evolve(0.2).psi; });
  for (const auto& o : out) {
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(o[i], ref[i]);
  }
}

}  // namespace
}  // namespace pairstat
