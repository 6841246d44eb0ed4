#pragma once

// Slow reference implementations for tests and the verification battery.
// Nothing here calls into the summation code of the energies module; the
// only shared pieces are the pointwise kernel functions and ball masses
// counted from scratch.

#include <cstdint>
#include <span>

#include "rieszcap/energies.hpp"
#include "rieszcap/measure.hpp"

namespace rieszcap::oracles {

struct QuadratureConfig {
  double rel_tolerance = 1e-11;
  unsigned max_subdivisions = 2'000'000;
};

/// Ordered-triple loop over all index triples, no symmetry shortcut.
double naive_p_energy(const DiscreteMeasure& mu, const KernelParams& params,
                      const TruncationWindow& window);

/// Double loop: sum_i w_i |sum_j w_j k(x_j - x_i)|^2 over window pairs.
double naive_riesz_l2(const DiscreteMeasure& mu, const KernelParams& params,
                      const TruncationWindow& window);

/// Ordered pair loop of w_j w_k p_alpha(x, x_j, x_k).
double naive_pointwise_p(const DiscreteMeasure& mu, std::span<const double> x,
                         const KernelParams& params, const TruncationWindow& window);

/// Closed-ball mass by direct counting.
double naive_ball_mass(const DiscreteMeasure& mu, std::span<const double> x, double r);

/// Adaptive Simpson in log-radius over [eps, R_max], R_max = 2 x the largest
/// atom distance, plus the analytic tail. Throws ToleranceNotMetError when the
/// subdivision budget runs out.
double quadrature_wolff(const DiscreteMeasure& mu, std::span<const double> x,
                        const WolffExponents& exps, const TruncationWindow& window,
                        const QuadratureConfig& cfg = {});

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Monte-Carlo estimate of sum_{i != j} w_i w_j mu(B(x_i, d_ij)) / d_ij^(2 alpha)
/// over window pairs, sampling (i, j) proportionally to w_i w_j.
McEstimate mc_double_sum(const DiscreteMeasure& mu, const KernelParams& params,
                         const TruncationWindow& window, std::size_t samples, std::uint64_t seed);

/// Exact value of the same double sum by a plain double loop.
double naive_double_sum(const DiscreteMeasure& mu, const KernelParams& params,
                        const TruncationWindow& window);

}  // namespace rieszcap::oracles
