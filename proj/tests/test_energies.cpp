#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rieszcap/energies.hpp"
#include "rieszcap/error.hpp"
#include "rieszcap/oracles.hpp"
#include "rieszcap/parallel.hpp"

using namespace rieszcap;

namespace {

const double kSqrt2m1 = std::sqrt(2.0) - 1.0;

DiscreteMeasure three_collinear() {
  return DiscreteMeasure(2, {0, 0, 1, 0, 2, 0}, {1.0, 1.0, 1.0}, 0.5);
}

DiscreteMeasure two_atoms(double a = 1.0, double b = 1.0, double d = 1.0) {
  return DiscreteMeasure(2, {0, 0, d, 0}, {a, b}, 0.5 * d);
}

DiscreteMeasure cantor(double dim, unsigned depth) {
  CantorSpec s;
  s.lambda = CantorSpec::ratio_for_dimension(2, dim);
  s.depth = depth;
  return generate_cantor(s);
}

DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t n, std::size_t atoms) {
  std::uniform_real_distribution<double> u(0.0, 1.0), w(0.1, 1.0);
  std::vector<double> c(n * atoms), ws(atoms);
  for (auto& v : c) v = u(rng);
  for (auto& v : ws) v = w(rng);
  return DiscreteMeasure::with_natural_delta(n, c, ws);
}

/// Least-squares R^2 of y against x.
double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i], syy += y[i] * y[i];
  }
  const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  return cov * cov / (vx * vy);
}

}  // namespace

TEST(Window, Validation) {
  EXPECT_THROW(TruncationWindow(0.0), ArgumentError);
  EXPECT_THROW(TruncationWindow(1.0, 1.0), ArgumentError);
  const TruncationWindow w(0.5, 2.0);
  EXPECT_FALSE(w.contains(0.5));
  EXPECT_TRUE(w.contains(1.0));
  EXPECT_FALSE(w.contains(2.0));
}

TEST(PAlphaEnergy, CollinearTriple) {
  const auto mu = three_collinear();
  const KernelParams kp(0.5, 2);
  EXPECT_NEAR(p_alpha_energy(mu, kp, TruncationWindow(0.5)), 6.0 * kSqrt2m1, 1e-13);
  // At eps = 1 the two unit pairs drop out and no triple survives.
  EXPECT_EQ(p_alpha_energy(mu, kp, TruncationWindow(1.0)), 0.0);
  EXPECT_EQ(p_alpha_energy(two_atoms(), kp, TruncationWindow(0.5)), 0.0);
}

TEST(PAlphaEnergy, MatchesOracleAndDensity) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const auto mu = random_measure(rng, 1 + t % 3, 30);
    const KernelParams kp(0.3 + 0.03 * t, mu.dim());
    for (const TruncationWindow w :
         {TruncationWindow(mu.delta()), TruncationWindow(0.2 * mu.diameter()),
          TruncationWindow(0.1 * mu.diameter(), 0.7 * mu.diameter())}) {
      const double p = p_alpha_energy(mu, kp, w);
      EXPECT_NEAR(p, oracles::naive_p_energy(mu, kp, w), 1e-12 * std::max(1.0, p));
      const auto dens = atom_p_potentials(mu, kp, w);
      double integral = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        integral += mu.weight(i) * dens[i];
        EXPECT_NEAR(dens[i], pointwise_p_potential(mu, mu.atom(i), kp, w),
                    1e-12 * std::max(1.0, dens[i]));
      }
      EXPECT_NEAR(integral, p, 1e-12 * std::max(1.0, p));
    }
  }
}

TEST(PAlphaEnergy, ThreadCountDoesNotChangeBits) {
  const auto mu = cantor(1.0, 4);
  const KernelParams kp(0.5, 2);
  const auto w = TruncationWindow::for_measure(mu);
  set_thread_limit(1);
  const double one = p_alpha_energy(mu, kp, w);
  const auto dens_one = atom_p_potentials(mu, kp, w);
  set_thread_limit(4);
  const double four = p_alpha_energy(mu, kp, w);
  const auto dens_four = atom_p_potentials(mu, kp, w);
  set_thread_limit(0);
  EXPECT_EQ(one, four);
  EXPECT_EQ(dens_one, dens_four);
}

TEST(PAlphaEnergy, MonotoneInEpsAndScaling) {
  const auto mu = cantor(0.75, 3);
  const KernelParams kp(0.5, 2);
  double prev = INFINITY;
  for (double eps = mu.delta(); eps < mu.diameter(); eps *= 1.7) {
    const double p = p_alpha_energy(mu, kp, TruncationWindow(eps));
    EXPECT_LE(p, prev);
    prev = p;
  }
  const double lam = 10.0;
  const auto w = TruncationWindow::for_measure(mu);
  EXPECT_NEAR(p_alpha_energy(mu.dilated(lam), kp, w.scaled(lam)),
              std::pow(lam, -1.0) * p_alpha_energy(mu, kp, w), 1e-6 * p_alpha_energy(mu, kp, w));
}

TEST(PointwisePotential, Examples) {
  const DiscreteMeasure mu(2, {0, 0, 1, 0}, {1.0, 1.0}, 1.0);
  const KernelParams kp(0.5, 2);
  const std::vector<double> x{-1.0, 0.0};
  EXPECT_NEAR(pointwise_p_potential(mu, x, kp, TruncationWindow(0.1)), 2.0 * kSqrt2m1, 1e-14);
  EXPECT_NEAR(oracles::naive_pointwise_p(mu, x, kp, TruncationWindow(0.1)), 2.0 * kSqrt2m1,
              1e-14);
  // One visible atom is not enough.
  EXPECT_EQ(pointwise_p_potential(mu, x, kp, TruncationWindow(1.5)), 0.0);
}

TEST(RieszTransform, Examples) {
  const DiscreteMeasure one(2, {1.0, 0.0}, {2.0}, 1.0);
  const KernelParams kp(0.5, 2);
  const auto r = truncated_riesz_transform(one, std::vector<double>{0.0, 0.0}, kp,
                                           TruncationWindow(0.5));
  EXPECT_DOUBLE_EQ(r[0], 2.0);
  EXPECT_DOUBLE_EQ(r[1], 0.0);
  const DiscreteMeasure pair(2, {-1, 0, 1, 0}, {1.0, 1.0}, 1.0);
  const auto z = truncated_riesz_transform(pair, std::vector<double>{0.0, 0.0}, kp,
                                           TruncationWindow(0.5));
  EXPECT_EQ(z[0], 0.0);
  EXPECT_EQ(z[1], 0.0);
  EXPECT_NEAR(riesz_l2_energy(two_atoms(), kp, TruncationWindow(0.5)), 2.0, 1e-15);
  EXPECT_EQ(riesz_l2_energy(two_atoms(), kp, TruncationWindow(1.0)), 0.0);
}

TEST(RieszTransform, L2MatchesOracleAndSup) {
  std::mt19937_64 rng(32);
  const auto mu = random_measure(rng, 2, 40);
  const KernelParams kp(0.7, 2);
  const TruncationWindow w(mu.delta());
  const double e = riesz_l2_energy(mu, kp, w);
  EXPECT_NEAR(e, oracles::naive_riesz_l2(mu, kp, w), 1e-12 * e);
  EXPECT_GE(sup_riesz_l2_energy(mu, kp, w), e);
}

TEST(Decomposition, Examples) {
  const KernelParams kp(0.5, 2);
  const auto d = symmetrization_decomposition(two_atoms(), kp, TruncationWindow(0.5));
  EXPECT_NEAR(d.lhs, 6.0, 1e-14);
  EXPECT_EQ(d.p_part, 0.0);
  EXPECT_NEAR(d.residual, 6.0, 1e-14);
  std::mt19937_64 rng(33);
  for (int t = 0; t < 10; ++t) {
    const auto mu = random_measure(rng, 2, 25);
    const TruncationWindow w(0.1 * mu.diameter(), 0.7 * mu.diameter());
    const auto s = symmetrization_decomposition(mu, kp, w);
    EXPECT_NEAR(s.lhs, s.p_part + s.residual, 1e-10 * std::max(1.0, s.lhs));
    EXPECT_NEAR(s.lhs, 3.0 * riesz_l2_energy(mu, kp, w), 1e-10 * std::max(1.0, s.lhs));
    EXPECT_NEAR(s.p_part, p_alpha_energy(mu, kp, w), 1e-12 * std::max(1.0, s.p_part));
  }
}

TEST(Wolff, Exponents) {
  const auto e = WolffExponents::for_alpha(0.5, 2);
  EXPECT_NEAR(e.s(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(e.p(), 1.5);
  EXPECT_NEAR(e.trace(), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(e.dual_exp(), 2.0);
  EXPECT_NEAR(e.decay(), 1.0, 1e-15);
  EXPECT_THROW(WolffExponents(1.0, 1.0, 2), DomainError);
  EXPECT_THROW(WolffExponents(2.0, 2.0, 2), DomainError);
}

TEST(Wolff, SingleAtom) {
  const double a = 0.4, w = 3.0;
  const DiscreteMeasure one(2, {1.0, 0.0}, {w}, 1.0);
  const auto exps = WolffExponents::for_alpha(a, 2);
  const std::vector<double> x{0.0, 0.0};
  EXPECT_NEAR(wolff_potential(one, x, exps, TruncationWindow(0.01)), w * w / (2.0 * a), 1e-12);
  // Window entirely beyond the atom: tail only.
  EXPECT_NEAR(wolff_potential(one, x, exps, TruncationWindow(4.0)),
              w * w / (2.0 * a) * std::pow(4.0, -2.0 * a), 1e-12);
  // At the atom the potential stays finite for eps > 0.
  const double at = wolff_potential(one, std::vector<double>{1.0, 0.0}, exps, TruncationWindow(0.5));
  EXPECT_NEAR(at, w * w / (2.0 * a) * std::pow(0.5, -2.0 * a), 1e-12);
}

TEST(Wolff, TwoAtomHandFormula) {
  const double al = 0.5, a = 0.3, b = 0.7, d = 2.0, eps = 0.25;
  const auto mu = two_atoms(a, b, d);
  const double k = 2.0 * al;
  auto pot = [&](double self) {
    return (self * self * (std::pow(eps, -k) - std::pow(d, -k)) + (a + b) * (a + b) * std::pow(d, -k)) /
           k;
  };
  const double expected = a * pot(a) + b * pot(b);
  EXPECT_NEAR(wolff_energy(mu, WolffExponents::for_alpha(al, 2), TruncationWindow(eps)), expected,
              1e-13);
}

TEST(Wolff, OuterCutoffAndUnsupported) {
  const auto mu = two_atoms();
  const auto exps = WolffExponents::for_alpha(0.5, 2);
  const std::vector<double> x{0.0, 0.0};
  // [0.5, 2]: mass 1 on [0.5, 1), mass 2 on [1, 2].
  const double expected = (1.0 / 0.5 - 1.0) + 4.0 * (1.0 - 0.5);
  EXPECT_NEAR(wolff_potential(mu, x, exps, TruncationWindow(0.5, 2.0)), expected, 1e-13);
  EXPECT_THROW(wolff_potential(mu, x, WolffExponents(1.0, 2.0, 2), TruncationWindow(0.5)),
               UnsupportedExponentError);
  EXPECT_THROW(wolff_energy(mu, WolffExponents(1.0, 2.0, 2), TruncationWindow(0.5)),
               UnsupportedExponentError);
}

TEST(Wolff, MatchesQuadrature) {
  std::mt19937_64 rng(34);
  const auto exps = WolffExponents(0.7, 2.0, 2);
  for (int t = 0; t < 10; ++t) {
    const auto mu = random_measure(rng, 2, 20);
    const std::vector<double> x{0.5, 0.5};
    const TruncationWindow w(0.05);
    const double closed = wolff_potential(mu, x, exps, w);
    EXPECT_NEAR(closed, oracles::quadrature_wolff(mu, x, exps, w), 1e-8 * closed);
  }
}

TEST(Wolff, AffineGrowthAtCriticalDimension) {
  std::vector<double> depth, energy;
  for (unsigned m = 1; m <= 5; ++m) {
    const auto mu = cantor(0.5, m);
    depth.push_back(m);
    energy.push_back(
        wolff_energy(mu, WolffExponents::for_alpha(0.5, 2), TruncationWindow::for_measure(mu)));
  }
  EXPECT_GT(r_squared(depth, energy), 0.99);
  for (std::size_t i = 1; i < energy.size(); ++i) EXPECT_GT(energy[i], energy[i - 1]);
}

TEST(Wolff, GeometricConvergenceAboveCriticalDimension) {
  std::vector<double> energy;
  for (unsigned m = 1; m <= 5; ++m) {
    const auto mu = cantor(1.0, m);
    energy.push_back(
        wolff_energy(mu, WolffExponents::for_alpha(0.5, 2), TruncationWindow::for_measure(mu)));
  }
  for (std::size_t i = 2; i < energy.size(); ++i) {
    const double ratio = (energy[i] - energy[i - 1]) / (energy[i - 1] - energy[i - 2]);
    EXPECT_LT(std::abs(ratio), 1.0) << i;
  }
}

TEST(TolsaEnergy, SingleAtomAndSchwarz) {
  const DiscreteMeasure one(2, {0.0, 0.0}, {1.0}, 1.0);
  EXPECT_NEAR(tolsa_energy(one, KernelParams(0.5, 2), TruncationWindow(1.0)), 1.0, 1e-15);
  EXPECT_THROW(tolsa_energy(one, KernelParams(1.5, 2), TruncationWindow(1.0)), DomainError);

  const auto mu = cantor(0.75, 3);
  const KernelParams kp(0.5, 2);
  const auto w = TruncationWindow::for_measure(mu);
  const auto dens = atom_p_potentials(mu, kp, w);
  double root_part = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) root_part += mu.weight(i) * std::sqrt(dens[i]);
  EXPECT_LE(root_part, std::sqrt(mu.total_mass() * p_alpha_energy(mu, kp, w)) * (1 + 1e-12));
  const auto m = atom_maximal_functions(mu, 0.5, w);
  double max_part = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) max_part += mu.weight(i) * m[i];
  EXPECT_NEAR(tolsa_energy(mu, kp, w), max_part + root_part, 1e-12 * (max_part + root_part));
}

TEST(EnergyReport, AgreesWithComponents) {
  const auto mu = three_collinear();
  const TruncationWindow w(0.5);
  const auto r = energy_report(mu, 0.5, w);
  const KernelParams kp(0.5, 2);
  EXPECT_EQ(r.atoms, 3u);
  EXPECT_NEAR(r.p_alpha_energy, 6.0 * kSqrt2m1, 1e-13);
  EXPECT_DOUBLE_EQ(r.riesz_l2_energy, riesz_l2_energy(mu, kp, w));
  EXPECT_DOUBLE_EQ(r.wolff_energy, wolff_energy(mu, WolffExponents::for_alpha(0.5, 2), w));
  EXPECT_DOUBLE_EQ(r.e_alpha, tolsa_energy(mu, kp, w));
  EXPECT_GE(r.sup_riesz_l2, r.riesz_l2_energy);
}

TEST(BallDoubleSum, MatchesOracle) {
  std::mt19937_64 rng(35);
  const auto mu = random_measure(rng, 2, 40);
  const KernelParams kp(0.5, 2);
  const TruncationWindow w(mu.delta());
  const double s = ball_double_sum(mu, kp, w);
  EXPECT_NEAR(s, oracles::naive_double_sum(mu, kp, w), 1e-12 * s);
}
