#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

namespace robust_mc {
namespace {

TEST(GroundTruth, Spectrum) {
  RngStream rng(40, 0);
  EXPECT_EQ(make_ground_truth(10, 1, rng).sigma_star, std::vector<double>({1.0}));
  const GroundTruth gt = make_ground_truth(50, 5, rng);
  EXPECT_EQ(gt.sigma_star, std::vector<double>({5, 4, 3, 2, 1}));
  EXPECT_DOUBLE_EQ(gt.kappa, 5.0);
  EXPECT_THROW(make_ground_truth(3, 4, rng), ShapeError);
}

TEST(GroundTruth, OrthonormalAndConsistent) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed, 1);
    const GroundTruth gt = make_ground_truth(60, 4, rng);
    EXPECT_LE((gt.u_star.transpose() * gt.u_star - DenseMatrix::Identity(4, 4)).norm(), 1e-12);
    EXPECT_LE((gt.v_star.transpose() * gt.v_star - DenseMatrix::Identity(4, 4)).norm(), 1e-12);
    EXPECT_LE((gt.factors_star.product() - gt.m_star).norm(), 1e-12);
    EXPECT_LE(imbalance(gt.factors_star), 1e-12);
  }
}

TEST(GroundTruth, IncoherenceModerate) {
  RngStream rng(41, 0);
  const GroundTruth gt = make_ground_truth(200, 5, rng);
  EXPECT_GE(gt.mu, 1.0);
  EXPECT_LE(gt.mu, 10.0);
}

TEST(Sampling, FullObservationIsExact) {
  RngStream rng(42, 0);
  const GroundTruth gt = make_ground_truth(15, 2, rng);
  const ObservationSet obs = sample_observations(gt, 1.0, noise::None{}, rng);
  ASSERT_EQ(obs.size(), 225u);
  for (const Sample& s : obs.samples()) EXPECT_EQ(s.value, gt.m_star(s.i, s.j));
}

TEST(Sampling, InclusionFraction) {
  RngStream rng(43, 0);
  const GroundTruth gt = make_ground_truth(200, 2, rng);
  const ObservationSet obs = sample_observations(gt, 0.3, noise::None{}, rng);
  const double total = 200.0 * 200.0;
  const double sd = std::sqrt(total * 0.3 * 0.7);
  EXPECT_NEAR(static_cast<double>(obs.size()), 0.3 * total, 5 * sd);
}

TEST(Sampling, ReproducibleForSameStream) {
  RngStream a(44, 3), b(44, 3);
  const GroundTruth ga = make_ground_truth(30, 2, a), gb = make_ground_truth(30, 2, b);
  const ObservationSet oa = sample_observations(ga, 0.4, noise::StudentT{3.0, 0.1}, a);
  const ObservationSet ob = sample_observations(gb, 0.4, noise::StudentT{3.0, 0.1}, b);
  EXPECT_EQ(oa.fingerprint(), ob.fingerprint());
}

TEST(Noise, TrinomialMagnitudes) {
  RngStream rng(45, 0);
  const noise::Trinomial law{0.01, 2e-3};
  const double a = 2e-3 / 0.1;
  int nonzero = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double e = draw_noise(law, rng);
    ASSERT_TRUE(e == 0.0 || std::abs(std::abs(e) - a) <= 1e-15 * a) << e;
    nonzero += e != 0.0;
  }
  EXPECT_NEAR(nonzero / static_cast<double>(n), 0.01, 5 * std::sqrt(0.01 * 0.99 / n));
}

TEST(Noise, AsymTwoPointSupport) {
  RngStream rng(46, 0);
  const noise::AsymTwoPoint law{1e-4, 1e-3};
  const double hi = 1e-3 * std::sqrt((1 - 1e-4) / 1e-4), lo = -1e-3 * std::sqrt(1e-4 / (1 - 1e-4));
  for (int k = 0; k < 100000; ++k) {
    const double e = draw_noise(law, rng);
    ASSERT_TRUE(e == hi || e == lo);
  }
}

// Exhaustive check over the stated support: both discrete laws have mean 0 and variance sigma^2.
TEST(Noise, DiscreteLawsCentredWithUnitScale) {
  for (const NoiseModel m : {NoiseModel{noise::Trinomial{0.01, 0.3}}, NoiseModel{noise::AsymTwoPoint{1e-4, 0.3}},
                             NoiseModel{noise::AsymTwoPoint{0.25, 0.3}}}) {
    const auto support = discrete_support(m);
    ASSERT_TRUE(support);
    double mass = 0, mean = 0, second = 0;
    for (const auto& [x, w] : *support) {
      mass += w;
      mean += w * x;
      second += w * x * x;
    }
    EXPECT_NEAR(mass, 1.0, 1e-15) << noise_name(m);
    EXPECT_NEAR(mean, 0.0, 1e-15) << noise_name(m);
    EXPECT_NEAR(second, 0.09, 1e-14) << noise_name(m);
  }
  EXPECT_FALSE(discrete_support(noise::Gaussian{1.0}));
}

TEST(Noise, GaussianMoments) {
  RngStream rng(47, 0);
  const int n = 200000;
  double s = 0, ss = 0;
  for (int k = 0; k < n; ++k) {
    const double e = draw_noise(noise::Gaussian{2.0}, rng);
    s += e;
    ss += e * e;
  }
  EXPECT_NEAR(s / n, 0.0, 5 * 2.0 / std::sqrt(n));
  EXPECT_NEAR(ss / n, 4.0, 0.05 * 4.0);
}

TEST(Noise, StudentTScale) {
  RngStream rng(48, 0);
  const int n = 400000;
  double ss = 0;
  for (int k = 0; k < n; ++k) {
    const double e = draw_noise(noise::StudentT{6.0, 0.5}, rng);
    ss += e * e;
  }
  EXPECT_NEAR(ss / n, 0.25 * 6.0 / 4.0, 0.05 * 0.375);
}

TEST(Noise, ValidationAndNames) {
  RngStream rng(49, 0);
  EXPECT_THROW(draw_noise(noise::StudentT{2.0, 1.0}, rng), DomainError);
  EXPECT_THROW(draw_noise(noise::Trinomial{0.0, 1.0}, rng), DomainError);
  EXPECT_THROW(draw_noise(noise::Gaussian{-1.0}, rng), DomainError);
  EXPECT_EQ(noise_name(noise::StudentT{2.1, 1.0}), "student_t(2.1)");
  EXPECT_EQ(noise_name(noise::AsymTwoPoint{1e-4, 1.0}), "asym_two_point(0.0001)");
  EXPECT_EQ(noise_sigma(with_sigma(noise::Gaussian{1.0}, 3.0)), 3.0);
  EXPECT_EQ(draw_noise(noise::None{}, rng), 0.0);
}

}  // namespace
}  // namespace robust_mc
