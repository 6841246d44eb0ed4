#pragma once

// Capacity proxies on a fixed atom support. Only the weights are optimized;
// the positions are the discretization of the set.
//
//   wolff-energy      1 / E_wolff(nu)^(p-1) for the Wolff-optimal probability nu
//   tolsa-energy      1 / E_alpha(nu), best over uniform, Wolff-optimal and an
//                     optional projected-subgradient refinement
//   admissible-lower  |mu| / max |R_{alpha,eps} mu| over probe points

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rieszcap/energies.hpp"
#include "rieszcap/measure.hpp"

namespace rieszcap {

struct OptimizerConfig {
  enum class StepRule { Fixed, Backtracking };

  unsigned max_iters = 500;
  StepRule step_rule = StepRule::Backtracking;
  /// Step used by StepRule::Fixed, relative to the current energy.
  double fixed_step = 0.25;
  /// Stop once |P(w - g/E) - w| falls below this (first-order stationarity).
  double stationarity = 1e-9;
  /// Also stop after three accepted steps in a row each lowering the energy
  /// by less than this fraction.
  double tolerance = 1e-14;
  std::uint64_t seed = 0;
  /// Start from random probability weights drawn with `seed` instead of uniform.
  bool random_init = false;
  /// Projected-subgradient steps on E_alpha after the Wolff route (0 = off).
  unsigned refine_iters = 0;

  void validate() const;
};

enum class CapacityMethod { TolsaEnergy, WolffEnergy, AdmissibleLower };
const char* to_string(CapacityMethod m);

struct CapacityEstimate {
  double value = 0.0;
  CapacityMethod method = CapacityMethod::WolffEnergy;
  DiscreteMeasure witness;
  TruncationWindow window;
  std::map<std::string, double> diagnostics;
};

/// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_to_simplex(std::span<const double> v);

/// Truncated Wolff energy of the probability weights w on a fixed support,
/// with its gradient. Requires p <= 2 so that the objective is C^1.
class WolffObjective {
 public:
  WolffObjective(const DiscreteMeasure& support, const WolffExponents& exps,
                 const TruncationWindow& window);

  std::size_t size() const noexcept { return count_; }
  double energy(std::span<const double> w) const;
  /// Writes the gradient into g and returns the energy.
  double energy_and_gradient(std::span<const double> w, std::span<double> g) const;
  /// Wolff potential of the weights at every atom.
  std::vector<double> potentials(std::span<const double> w) const;

 private:
  std::size_t count_;
  double q_;
  std::vector<std::uint32_t> order_;  // row i: atoms sorted by distance to atom i
  std::vector<double> pieces_;        // row i: radial integral of each constant-mass piece
};

/// E_alpha(w) = sum_i w_i [M_alpha(x_i) + sqrt(p-density(x_i))] on a fixed support.
class TolsaObjective {
 public:
  TolsaObjective(const DiscreteMeasure& support, const KernelParams& params,
                 const TruncationWindow& window);

  double energy(std::span<const double> w) const;
  /// A subgradient (M_alpha is a maximum of linear functions).
  double energy_and_subgradient(std::span<const double> w, std::span<double> g) const;

 private:
  std::size_t count_;
  double alpha_;
  double eps_;
  PairTable table_;
  std::vector<std::uint32_t> order_;
  std::vector<double> dist_;
  double r_out_;
};

/// Projected-gradient minimization of the truncated Wolff energy over
/// probability weights. value = 1 / E^(p-1).
CapacityEstimate minimize_wolff_energy(const DiscreteMeasure& support,
                                       const WolffExponents& exps,
                                       const TruncationWindow& window,
                                       const OptimizerConfig& cfg);

/// gamma_{alpha,+} proxy sup_nu 1/E_alpha(nu). Requires 0 < alpha < 1.
CapacityEstimate estimate_gamma_plus(const DiscreteMeasure& support, const KernelParams& params,
                                     const TruncationWindow& window, const OptimizerConfig& cfg);

struct ChebyshevRestriction {
  DiscreteMeasure restricted;  // renormalized to mass 1
  double retained_mass = 0.0;  // before renormalization
  double energy = 0.0;         // sum_i w_i potential_i
  std::vector<std::size_t> kept;
};

/// Keeps the atoms whose potential is <= t. mu must be a probability measure.
/// retained_mass >= 1 - energy / t.
ChebyshevRestriction chebyshev_restrict(const DiscreteMeasure& mu,
                                        std::span<const double> potentials, double t);

struct ChebyshevGrowthCheck {
  double energy = 0.0;          // E, truncated Wolff energy of mu
  double threshold = 0.0;       // t = 2E
  double retained_mass = 0.0;
  double max_wolff_on_f = 0.0;  // max over kept atoms of W_nu
  double wolff_bound = 0.0;     // t / retained_mass^2
  double growth_sq_scaled = 0.0;  // C (M_alpha nu)^2 maxed over kept atoms
  double growth_bound = 0.0;      // 18 E
};

/// Restricts mu at t = 2E for its truncated Wolff energy (default exponents)
/// and measures the follow-up bounds on nu = mu|F / mu(F).
ChebyshevGrowthCheck chebyshev_growth_check(const DiscreteMeasure& mu, double alpha,
                                            const TruncationWindow& window);

/// Atoms displaced by 2 eps along each +/- coordinate direction, dropping
/// probes closer than eps to an atom, followed by `extra`.
std::vector<Point> admissible_probe_points(const DiscreteMeasure& mu,
                                           const TruncationWindow& window,
                                           const std::vector<Point>& extra = {});

/// |mu| / b with b the largest component of R_{alpha,eps} mu over the probes.
/// Only an eps-resolution surrogate: the true sup norm is infinite for atoms.
CapacityEstimate admissible_lower_bound(const DiscreteMeasure& mu, const KernelParams& params,
                                        const std::vector<Point>& eval_points,
                                        const TruncationWindow& window);

struct ComparabilityReport {
  double gamma_plus_proxy = 0.0;
  double csp_proxy = 0.0;
  double ratio = 0.0;
  CapacityEstimate gamma_plus;
  CapacityEstimate csp;
};

/// Both proxies on one support and window; s = (2/3)(n - alpha), p = 3/2.
ComparabilityReport comparability_report(const DiscreteMeasure& support, double alpha,
                                         const TruncationWindow& window,
                                         const OptimizerConfig& cfg);

struct BilipschitzMap {
  std::string id;
  std::size_t required_dim = 0;  // 0: any dimension
  double distortion = 1.0;       // L
  double scale = 1.0;            // dilation factor applied to eps and delta
  void (*apply)(std::span<double>) = nullptr;
};

const std::vector<BilipschitzMap>& bilipschitz_registry();
/// Throws ArgumentError for an unknown id.
const BilipschitzMap& find_bilipschitz_map(const std::string& id);

struct BilipschitzResult {
  std::string map_id;
  double before = 0.0;  // gamma_plus proxy
  double after = 0.0;
  double ratio = 0.0;
  double csp_before = 0.0;
  double csp_after = 0.0;
  double bound = 0.0;
  bool within_bound = false;
};

BilipschitzResult bilipschitz_experiment(const DiscreteMeasure& support, const std::string& map_id,
                                         double alpha, const TruncationWindow& window,
                                         const OptimizerConfig& cfg,
                                         double bound = 5.0);

struct SemiadditivityResult {
  double proxy_first = 0.0;
  double proxy_second = 0.0;
  double proxy_union = 0.0;
  /// proxy_union / (proxy_first + proxy_second)
  double factor = 0.0;
};

/// gamma_plus proxies of two disjoint supports and of their union.
SemiadditivityResult semiadditivity_probe(const DiscreteMeasure& first,
                                          const DiscreteMeasure& second, double alpha,
                                          const TruncationWindow& window,
                                          const OptimizerConfig& cfg);

}  // namespace rieszcap
