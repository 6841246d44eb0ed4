#include <gtest/gtest.h>

#include <cmath>

#include "rieszcap/error.hpp"
#include "rieszcap/oracles.hpp"

using namespace rieszcap;
using namespace rieszcap::oracles;

namespace {

DiscreteMeasure square() {
  return DiscreteMeasure(2, {0, 0, 1, 0, 0, 1, 1, 1}, {0.1, 0.2, 0.3, 0.4}, 1.0);
}

}  // namespace

TEST(NaiveEnergies, CollinearAndHugeWindow) {
  const DiscreteMeasure mu(2, {0, 0, 1, 0, 2, 0}, {1.0, 1.0, 1.0}, 0.5);
  const KernelParams kp(0.5, 2);
  EXPECT_NEAR(naive_p_energy(mu, kp, TruncationWindow(0.5)), 6.0 * (std::sqrt(2.0) - 1.0), 1e-13);
  EXPECT_EQ(naive_p_energy(mu, kp, TruncationWindow(100.0)), 0.0);
  EXPECT_EQ(naive_riesz_l2(mu, kp, TruncationWindow(100.0)), 0.0);
  EXPECT_EQ(naive_ball_mass(mu, std::vector<double>{0.0, 0.0}, 1.0), 2.0);
}

TEST(Quadrature, SingleAtomAndBudget) {
  const DiscreteMeasure one(2, {1.0, 0.0}, {2.0}, 1.0);
  const auto exps = WolffExponents::for_alpha(0.5, 2);
  const std::vector<double> x{0.0, 0.0};
  EXPECT_NEAR(quadrature_wolff(one, x, exps, TruncationWindow(0.01)), 4.0, 1e-8 * 4.0);
  const auto mu = square();
  EXPECT_NEAR(quadrature_wolff(mu, x, exps, TruncationWindow(0.01)),
              wolff_potential(mu, x, exps, TruncationWindow(0.01)), 1e-8);
  QuadratureConfig tight;
  tight.max_subdivisions = 1;
  tight.rel_tolerance = 1e-14;
  EXPECT_THROW(quadrature_wolff(mu, x, exps, TruncationWindow(0.01), tight), ToleranceNotMetError);
}

TEST(MonteCarlo, WithinThreeStandardErrors) {
  const auto mu = square();
  const KernelParams kp(0.5, 2);
  const TruncationWindow w(0.5);
  const double exact = naive_double_sum(mu, kp, w);
  const auto est = mc_double_sum(mu, kp, w, 20000, 1234);
  EXPECT_GT(est.stderr_, 0.0);
  EXPECT_LE(std::abs(est.mean - exact), 3.0 * est.stderr_);
  EXPECT_NEAR(exact, ball_double_sum(mu, kp, w), 1e-12 * exact);
}

TEST(MonteCarlo, SeedDeterminismAndValidation) {
  const auto mu = square();
  const KernelParams kp(0.5, 2);
  const auto a = mc_double_sum(mu, kp, TruncationWindow(0.5), 5000, 9);
  const auto b = mc_double_sum(mu, kp, TruncationWindow(0.5), 5000, 9);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr_, b.stderr_);
  EXPECT_THROW(mc_double_sum(mu, kp, TruncationWindow(0.5), 10, 9), ArgumentError);
  EXPECT_EQ(mc_double_sum(mu, kp, TruncationWindow(100.0), 5000, 9).mean, 0.0);
}
