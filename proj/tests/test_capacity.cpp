#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "rieszcap/capacity.hpp"
#include "rieszcap/error.hpp"

using namespace rieszcap;

namespace {

DiscreteMeasure cantor(double dim, unsigned depth) {
  CantorSpec s;
  s.lambda = CantorSpec::ratio_for_dimension(2, dim);
  s.depth = depth;
  return generate_cantor(s);
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Simplex, Projection) {
  const std::vector<double> on{0.2, 0.3, 0.5};
  const auto same = project_to_simplex(on);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(same[i], on[i], 1e-15);
  const auto corner = project_to_simplex(std::vector<double>{2.0, 0.0});
  EXPECT_DOUBLE_EQ(corner[0], 1.0);
  EXPECT_DOUBLE_EQ(corner[1], 0.0);
  const auto flat = project_to_simplex(std::vector<double>{0.5, 0.5, 0.5});
  for (double v : flat) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(7);
    for (auto& x : v) x = g(rng);
    const auto p = project_to_simplex(v);
    EXPECT_NEAR(sum(p), 1.0, 1e-12);
    for (double x : p) EXPECT_GE(x, 0.0);
  }
  EXPECT_THROW(project_to_simplex(std::vector<double>{}), ArgumentError);
}

TEST(OptimizerConfig, Validation) {
  OptimizerConfig c;
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.tolerance = 0.0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(WolffObjectiveTest, GradientMatchesFiniteDifferences) {
  const auto mu = cantor(1.0, 2);
  const WolffObjective obj(mu, WolffExponents::for_alpha(0.5, 2), TruncationWindow(mu.delta()));
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> w(mu.size());
  for (auto& x : w) x = u(rng) / mu.size();
  std::vector<double> g(w.size());
  const double e = obj.energy_and_gradient(w, g);
  EXPECT_DOUBLE_EQ(e, obj.energy(w));
  for (std::size_t i = 0; i < w.size(); i += 3) {
    const double h = 1e-6;
    auto wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    EXPECT_NEAR(g[i], (obj.energy(wp) - obj.energy(wm)) / (2 * h), 1e-5 * std::abs(g[i]));
  }
}

TEST(MinimizeWolff, SingleAtom) {
  const DiscreteMeasure one(2, {0.0, 0.0}, {5.0}, 1.0);
  const auto est = minimize_wolff_energy(one, WolffExponents::for_alpha(0.5, 2),
                                         TruncationWindow(1.0), {});
  EXPECT_EQ(est.witness.size(), 1u);
  EXPECT_DOUBLE_EQ(est.witness.weight(0), 1.0);
  // Self energy eps^(-2 alpha) / (2 alpha) = 1 at eps = 1.
  EXPECT_NEAR(est.value, 1.0, 1e-12);
  EXPECT_EQ(est.method, CapacityMethod::WolffEnergy);
}

TEST(MinimizeWolff, SymmetricPairFromRandomStart) {
  const DiscreteMeasure pair(2, {0, 0, 1, 0}, {0.9, 0.1}, 1.0);
  OptimizerConfig cfg;
  cfg.random_init = true;
  cfg.seed = 5;
  const auto est =
      minimize_wolff_energy(pair, WolffExponents::for_alpha(0.5, 2), TruncationWindow(0.1), cfg);
  EXPECT_NEAR(est.witness.weight(0), 0.5, 1e-6);
  EXPECT_NEAR(est.witness.weight(1), 0.5, 1e-6);
}

TEST(MinimizeWolff, RegularPolygonIsUniform) {
  const std::size_t k = 6;
  std::vector<double> c;
  for (std::size_t i = 0; i < k; ++i) {
    const double t = 2.0 * M_PI * i / k;
    c.push_back(std::cos(t));
    c.push_back(std::sin(t));
  }
  const auto mu = DiscreteMeasure::with_natural_delta(2, c, std::vector<double>(k, 1.0));
  const auto est = minimize_wolff_energy(mu, WolffExponents::for_alpha(0.4, 2),
                                         TruncationWindow(0.5 * mu.delta()), {});
  for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(est.witness.weight(i) * k, 1.0, 0.10);
}

TEST(MinimizeWolff, NeverWorseThanUniformBothStepRules) {
  const auto mu = cantor(0.75, 3);
  const auto exps = WolffExponents::for_alpha(0.5, 2);
  const TruncationWindow w(mu.delta());
  for (auto rule : {OptimizerConfig::StepRule::Backtracking, OptimizerConfig::StepRule::Fixed}) {
    OptimizerConfig cfg;
    cfg.step_rule = rule;
    const auto est = minimize_wolff_energy(mu, exps, w, cfg);
    EXPECT_LE(est.diagnostics.at("energy"), est.diagnostics.at("uniform_energy"));
    EXPECT_NEAR(est.witness.total_mass(), 1.0, 1e-12);
    EXPECT_NEAR(est.value, 1.0 / std::sqrt(est.diagnostics.at("energy")), 1e-12);
  }
}

TEST(GammaPlus, SingleAtomAndDilation) {
  const KernelParams kp(0.5, 2);
  const DiscreteMeasure one(2, {0.0, 0.0}, {1.0}, 1.0);
  EXPECT_NEAR(estimate_gamma_plus(one, kp, TruncationWindow(1.0), {}).value, 1.0, 1e-12);

  const auto mu = cantor(0.75, 3);
  const TruncationWindow w = TruncationWindow::for_measure(mu);
  const double base = estimate_gamma_plus(mu, kp, w, {}).value;
  const double lam = 3.0;
  const double big = estimate_gamma_plus(mu.dilated(lam), kp, w.scaled(lam), {}).value;
  EXPECT_NEAR(big, std::pow(lam, 0.5) * base, 1e-6 * big);
}

TEST(GammaPlus, DecreasesWithDepthAtCriticalDimension) {
  const KernelParams kp(0.5, 2);
  double prev = INFINITY;
  for (unsigned m = 1; m <= 4; ++m) {
    const auto mu = cantor(0.5, m);
    const double v = estimate_gamma_plus(mu, kp, TruncationWindow::for_measure(mu), {}).value;
    EXPECT_LT(v, prev) << m;
    prev = v;
  }
}

TEST(Chebyshev, Examples) {
  const DiscreteMeasure mu(1, {0.0, 1.0}, {0.5, 0.5}, 1.0);
  const std::vector<double> pot{1.0, 3.0};
  const auto all = chebyshev_restrict(mu, pot, 4.0);
  EXPECT_DOUBLE_EQ(all.retained_mass, 1.0);
  EXPECT_DOUBLE_EQ(all.energy, 2.0);
  const auto half = chebyshev_restrict(mu, pot, 2.0);
  EXPECT_DOUBLE_EQ(half.retained_mass, 0.5);
  ASSERT_EQ(half.kept.size(), 1u);
  EXPECT_EQ(half.kept[0], 0u);
  EXPECT_DOUBLE_EQ(half.restricted.total_mass(), 1.0);
  EXPECT_GE(half.retained_mass, 1.0 - half.energy / 2.0);
  const std::vector<double> flat{0.7, 0.7};
  EXPECT_DOUBLE_EQ(chebyshev_restrict(mu, flat, 1.4).retained_mass, 1.0);
  EXPECT_THROW(chebyshev_restrict(mu, std::vector<double>{3.0, 3.0}, 1.0), EmptyRestrictionError);
  EXPECT_THROW(chebyshev_restrict(mu.mass_scaled(2.0), pot, 4.0), ArgumentError);
  EXPECT_THROW(chebyshev_restrict(mu, std::vector<double>{1.0}, 4.0), ArgumentError);
}

TEST(Chebyshev, GrowthCheckBounds) {
  for (double dim : {0.5, 1.0}) {
    const auto mu = cantor(dim, 3);
    const auto g = chebyshev_growth_check(mu, 0.5, TruncationWindow::for_measure(mu));
    EXPECT_DOUBLE_EQ(g.threshold, 2.0 * g.energy);
    EXPECT_GE(g.retained_mass, 0.5);
    EXPECT_LE(g.max_wolff_on_f, g.wolff_bound * (1 + 1e-12));
    EXPECT_LE(g.growth_sq_scaled, g.growth_bound * (1 + 1e-12));
  }
}

TEST(Admissible, UnitAtomOnCircle) {
  const DiscreteMeasure one(2, {0.0, 0.0}, {1.0}, 1.0);
  const KernelParams kp(0.5, 2);
  std::vector<Point> circle;
  for (int i = 0; i < 8; ++i) {
    const double t = 2.0 * M_PI * i / 8.0;
    circle.push_back(Point{std::cos(t), std::sin(t)});
  }
  const auto est = admissible_lower_bound(one, kp, circle, TruncationWindow(0.5));
  EXPECT_NEAR(est.value, 1.0, 1e-12);
  EXPECT_EQ(est.method, CapacityMethod::AdmissibleLower);
  const auto probes = admissible_probe_points(one, TruncationWindow(0.25));
  EXPECT_EQ(probes.size(), 4u);
}

TEST(Comparability, DilationInvariantRatio) {
  const auto mu = cantor(0.75, 3);
  const auto w = TruncationWindow::for_measure(mu);
  const auto a = comparability_report(mu, 0.5, w, {});
  const auto b = comparability_report(mu.dilated(4.0), 0.5, w.scaled(4.0), {});
  EXPECT_GT(a.ratio, 0.0);
  EXPECT_NEAR(b.ratio, a.ratio, 1e-4 * a.ratio);
  EXPECT_NEAR(a.ratio, a.gamma_plus_proxy / a.csp_proxy, 1e-15);
}

TEST(Bilipschitz, RegistryAndExperiments) {
  const auto mu = cantor(0.75, 2);
  const auto w = TruncationWindow::for_measure(mu);
  const auto id = bilipschitz_experiment(mu, "identity", 0.5, w, {});
  EXPECT_EQ(id.ratio, 1.0);
  EXPECT_TRUE(id.within_bound);
  const auto d2 = bilipschitz_experiment(mu, "dilate2", 0.5, w, {});
  EXPECT_NEAR(d2.ratio, std::sqrt(2.0), 1e-4);
  const auto sh = bilipschitz_experiment(mu, "shear", 0.5, w, {});
  EXPECT_TRUE(sh.within_bound);
  EXPECT_THROW(find_bilipschitz_map("fold"), ArgumentError);
  EXPECT_THROW(bilipschitz_experiment(mu, "fold", 0.5, w, {}), ArgumentError);
  EXPECT_GE(bilipschitz_registry().size(), 5u);
}

TEST(Semiadditivity, UnionOfSeparatedCopies) {
  const auto a = cantor(0.75, 2);
  std::vector<double> shift{2.0, 0.0};
  const auto b = a.translated(shift);
  const auto r = semiadditivity_probe(a, b, 0.5, TruncationWindow::for_measure(a), {});
  EXPECT_LE(r.factor, 2.0);
  EXPECT_GT(r.factor, 0.0);
}
