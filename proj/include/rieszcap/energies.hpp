#pragma once

// Energy and potential functionals of atomic measures: the symmetrization
// energy p_alpha(mu) and its pointwise density, truncated Riesz transforms
// and their L2(mu) energy, Wolff potentials and energies, and the potential
// U = M_alpha + sqrt(p-density) with its energy E_alpha.
//
// Every functional carries a TruncationWindow. Pairs of points interact only
// when their distance d satisfies eps < d < r_out (strict on both sides);
// radial integrals run over [eps, r_out].

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rieszcap/geometry.hpp"
#include "rieszcap/measure.hpp"

namespace rieszcap {

struct TruncationWindow {
  double eps = 0.0;
  double r_out = std::numeric_limits<double>::infinity();

  TruncationWindow() = default;
  explicit TruncationWindow(double eps_,
                            double r_out_ = std::numeric_limits<double>::infinity());

  /// Default window of a measure: eps = delta, no outer cutoff.
  static TruncationWindow for_measure(const DiscreteMeasure& mu);

  bool contains(double d) const noexcept { return d > eps && d < r_out; }
  bool has_outer() const noexcept { return r_out < std::numeric_limits<double>::infinity(); }
  TruncationWindow scaled(double lambda) const;
};

/// Wolff exponents (s, p) in R^n with 1 < p and 0 < s p <= n.
class WolffExponents {
 public:
  WolffExponents(double s, double p, std::size_t n);

  /// s = (2/3)(n - alpha), p = 3/2: trace exponent alpha, dual exponent 2.
  static WolffExponents for_alpha(double alpha, std::size_t n);

  double s() const noexcept { return s_; }
  double p() const noexcept { return p_; }
  std::size_t n() const noexcept { return n_; }
  /// n - s p, the power of r dividing the ball mass.
  double trace() const noexcept { return static_cast<double>(n_) - s_ * p_; }
  /// p' - 1 = 1 / (p - 1).
  double dual_exp() const noexcept { return 1.0 / (p_ - 1.0); }
  /// (n - sp)(p' - 1); the radial tail converges only when this is positive.
  double decay() const noexcept { return trace() * dual_exp(); }

 private:
  double s_, p_;
  std::size_t n_;
};

// --- Riesz transforms -----------------------------------------------------

/// Sum over atoms with |x_j - x| in the window of w_j k_alpha(x_j - x).
std::vector<double> truncated_riesz_transform(const DiscreteMeasure& mu,
                                              std::span<const double> x,
                                              const KernelParams& params,
                                              const TruncationWindow& window);

/// sum_i w_i |R_{alpha,eps} mu (x_i)|^2.
double riesz_l2_energy(const DiscreteMeasure& mu, const KernelParams& params,
                       const TruncationWindow& window);

/// Largest riesz_l2_energy over eps, 2 eps, 4 eps, ... up to the diameter.
double sup_riesz_l2_energy(const DiscreteMeasure& mu, const KernelParams& params,
                           const TruncationWindow& window);

// --- symmetrization energies ----------------------------------------------

/// Kernel values k(x_j - x_i) for i < j and window membership of every pair
/// of atoms. O(N^2) memory; shared by the triple sums.
class PairTable {
 public:
  PairTable(const DiscreteMeasure& support, const KernelParams& params,
            const TruncationWindow& window);

  std::size_t size() const noexcept { return count_; }
  std::size_t dim() const noexcept { return n_; }

  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    return i * count_ - i * (i + 1) / 2 + (j - i - 1);
  }
  const double* kernel(std::size_t i, std::size_t j) const noexcept {
    return kernels_.data() + index(i, j) * n_;
  }
  bool visible(std::size_t i, std::size_t j) const noexcept { return visible_[index(i, j)]; }
  /// Window flags for the pairs (i, j), (i, j + 1), ..., (i, size() - 1).
  const std::uint8_t* visible_row(std::size_t i, std::size_t j) const noexcept {
    return visible_.data() + index(i, j);
  }

 private:
  std::size_t count_;
  std::size_t n_;
  std::vector<double> kernels_;
  std::vector<std::uint8_t> visible_;
};

struct TripleSums {
  /// sum over ordered triples of distinct atoms in the window of
  /// w_i w_j w_k p_alpha(x_i, x_j, x_k).
  double total = 0.0;
  /// acc_k = sum over ordered pairs (i, j), i != j, both != k, of
  /// u_i w_j p_alpha(x_k, x_i, x_j) restricted to the window.
  std::vector<double> per_atom;
};

/// One pass over the unordered triples of `table`. With u = w, per_atom is
/// the p-density p_alpha^2(mu)(x_k) at every atom.
TripleSums triple_sums(const PairTable& table, std::span<const double> w,
                       std::span<const double> u, bool with_per_atom = true);

/// p_{alpha,eps}(mu): triple sum of p_alpha over the truncated set S_eps.
double p_alpha_energy(const DiscreteMeasure& mu, const KernelParams& params,
                      const TruncationWindow& window);

/// p_alpha^2(mu)(x): double sum of w_y w_z p_alpha(x, y, z) over ordered pairs
/// of distinct atoms y, z in the window of x and of each other.
double pointwise_p_potential(const DiscreteMeasure& mu, std::span<const double> x,
                             const KernelParams& params, const TruncationWindow& window);

/// pointwise_p_potential evaluated at every atom, in one triple pass.
std::vector<double> atom_p_potentials(const DiscreteMeasure& mu, const KernelParams& params,
                                      const TruncationWindow& window);

struct Decomposition {
  double lhs = 0.0;       // 3 * riesz_l2_energy
  double p_part = 0.0;    // p_alpha_energy
  double residual = 0.0;  // degenerate configurations, enumerated directly
};

/// 3 |R_eps mu|^2_{L2(mu)} split as p_{alpha,eps}(mu) plus the terms with
/// j = k or with x_j, x_k both visible from x_i but not from each other.
/// lhs == p_part + residual up to rounding.
Decomposition symmetrization_decomposition(const DiscreteMeasure& mu,
                                           const KernelParams& params,
                                           const TruncationWindow& window);

/// sum over i != j with |x_i - x_j| in the window of
/// w_i w_j mu(B(x_i, |x_j - x_i|)) / |x_j - x_i|^(2 alpha).
double ball_double_sum(const DiscreteMeasure& mu, const KernelParams& params,
                       const TruncationWindow& window);

// --- Wolff ----------------------------------------------------------------

/// Truncated Wolff potential: integral over [eps, r_out] of
/// (mu(B(x,r)) / r^(n-sp))^(p'-1) dr / r, evaluated piecewise in closed form.
/// Throws UnsupportedExponentError when (n-sp)(p'-1) <= 0.
double wolff_potential(const DiscreteMeasure& mu, std::span<const double> x,
                       const WolffExponents& exps, const TruncationWindow& window);
double wolff_potential(const BallProfile& profile, const WolffExponents& exps,
                       const TruncationWindow& window);

/// sum_i w_i W(x_i).
double wolff_energy(const DiscreteMeasure& mu, const WolffExponents& exps,
                    const TruncationWindow& window);
std::vector<double> atom_wolff_potentials(const DiscreteMeasure& mu, const WolffExponents& exps,
                                          const TruncationWindow& window);

// --- maximal function and E_alpha -----------------------------------------

/// M_alpha with the supremum over eps <= r <= r_out, at every atom.
std::vector<double> atom_maximal_functions(const DiscreteMeasure& mu, double alpha,
                                           const TruncationWindow& window);

/// E_alpha(mu) = sum_i w_i [M_alpha mu(x_i) + sqrt(p_alpha^2(mu)(x_i))].
/// Requires 0 < alpha < 1.
double tolsa_energy(const DiscreteMeasure& mu, const KernelParams& params,
                    const TruncationWindow& window);

struct EnergyReport {
  std::size_t n = 0;
  std::size_t atoms = 0;
  double alpha = 0.0;
  TruncationWindow window;
  double p_alpha_energy = 0.0;
  double riesz_l2_energy = 0.0;
  double sup_riesz_l2 = 0.0;
  double wolff_energy = 0.0;  // default exponents s = (2/3)(n - alpha), p = 3/2
  double max_m_alpha = 0.0;
  double e_alpha = 0.0;
};

/// All functionals at one window. Requires 0 < alpha < 1.
EnergyReport energy_report(const DiscreteMeasure& mu, double alpha,
                           const TruncationWindow& window);

}  // namespace rieszcap
