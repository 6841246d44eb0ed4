#include "rieszcap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rieszcap/error.hpp"
#include "rieszcap/experiment_defaults.hpp"
#include "rieszcap/parallel.hpp"

namespace rieszcap {

namespace {

constexpr std::size_t kMaxChunks = 64;

std::size_t chunk_count(std::size_t n) { return std::max<std::size_t>(1, std::min(n, kMaxChunks)); }

double radial_piece(double a, double b, double kappa) {
  if (!(a < b)) return 0.0;
  const double fb = std::isinf(b) ? 0.0 : std::pow(b, -kappa);
  return (std::pow(a, -kappa) - fb) / kappa;
}

// Row i of the result lists every atom sorted by distance to atom i (the atom
// itself first); ties are broken by index.
void sorted_neighbors(const DiscreteMeasure& mu, std::vector<std::uint32_t>& order,
                      std::vector<double>& dist) {
  const std::size_t count = mu.size();
  order.assign(count * count, 0);
  dist.assign(count * count, 0.0);
  const std::size_t chunks = chunk_count(count);
  run_chunks(chunks, [&](std::size_t c) {
    std::vector<std::pair<double, std::uint32_t>> row(count);
    for (std::size_t i = c; i < count; i += chunks) {
      for (std::size_t j = 0; j < count; ++j) {
        row[j] = {distance(mu.atom(i), mu.atom(j)), static_cast<std::uint32_t>(j)};
      }
      std::sort(row.begin(), row.end());
      for (std::size_t t = 0; t < count; ++t) {
        order[i * count + t] = row[t].second;
        dist[i * count + t] = row[t].first;
      }
    }
  });
}

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::vector<double> random_weights(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& v : w) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = -std::log1p(-u);  // Exp(1): uniform on the simplex after normalization
    total += v;
  }
  for (auto& v : w) v /= total;
  return w;
}

double squared_norm_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iters < 1) throw ArgumentError("optimizer: max_iters must be >= 1");
  if (!(tolerance > 0.0)) throw ArgumentError("optimizer: tolerance must be positive");
  if (!(stationarity > 0.0)) throw ArgumentError("optimizer: stationarity must be positive");
  if (step_rule == StepRule::Fixed && !(fixed_step > 0.0)) {
    throw ArgumentError("optimizer: fixed step must be positive");
  }
}

const char* to_string(CapacityMethod m) {
  switch (m) {
    case CapacityMethod::TolsaEnergy: return "tolsa-energy";
    case CapacityMethod::WolffEnergy: return "wolff-energy";
    case CapacityMethod::AdmissibleLower: return "admissible-lower";
  }
  return "unknown";
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) throw ArgumentError("project_to_simplex: empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += sorted[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

// --- Wolff objective ------------------------------------------------------

WolffObjective::WolffObjective(const DiscreteMeasure& support, const WolffExponents& exps,
                               const TruncationWindow& window)
    : count_(support.size()), q_(exps.dual_exp()) {
  if (exps.n() != support.dim()) throw ArgumentError("WolffObjective: dimension mismatch");
  const double kappa = exps.decay();
  if (!(kappa > 0.0)) {
    throw UnsupportedExponentError("WolffObjective: (n - sp)(p' - 1) must be positive");
  }
  if (q_ < 1.0) throw UnsupportedExponentError("WolffObjective: optimizer requires p <= 2");
  std::vector<double> dist;
  sorted_neighbors(support, order_, dist);
  pieces_.assign(count_ * count_, 0.0);
  for (std::size_t i = 0; i < count_; ++i) {
    for (std::size_t t = 0; t < count_; ++t) {
      const double lo = std::max(window.eps, dist[i * count_ + t]);
      const double next = t + 1 < count_ ? dist[i * count_ + t + 1]
                                         : std::numeric_limits<double>::infinity();
      pieces_[i * count_ + t] = radial_piece(lo, std::min(window.r_out, next), kappa);
    }
  }
}

std::vector<double> WolffObjective::potentials(std::span<const double> w) const {
  if (w.size() != count_) throw ArgumentError("WolffObjective: weight length mismatch");
  std::vector<double> pot(count_, 0.0);
  const std::size_t chunks = chunk_count(count_);
  run_chunks(chunks, [&](std::size_t c) {
    for (std::size_t i = c; i < count_; i += chunks) {
      const std::uint32_t* ord = order_.data() + i * count_;
      const double* piece = pieces_.data() + i * count_;
      double mass = 0.0, s = 0.0;
      for (std::size_t t = 0; t < count_; ++t) {
        mass += w[ord[t]];
        if (piece[t] == 0.0 || mass <= 0.0) continue;
        s += (q_ == 2.0 ? mass * mass : std::pow(mass, q_)) * piece[t];
      }
      pot[i] = s;
    }
  });
  return pot;
}

double WolffObjective::energy(std::span<const double> w) const {
  const auto pot = potentials(w);
  double e = 0.0;
  for (std::size_t i = 0; i < count_; ++i) e += w[i] * pot[i];
  return e;
}

double WolffObjective::energy_and_gradient(std::span<const double> w, std::span<double> g) const {
  if (g.size() != count_) throw ArgumentError("WolffObjective: gradient length mismatch");
  const auto pot = potentials(w);
  const std::size_t chunks = chunk_count(count_);
  std::vector<std::vector<double>> parts(chunks);
  run_chunks(chunks, [&](std::size_t c) {
    auto& part = parts[c];
    part.assign(count_, 0.0);
    std::vector<double> mass(count_);
    for (std::size_t i = c; i < count_; i += chunks) {
      if (w[i] == 0.0) continue;
      const std::uint32_t* ord = order_.data() + i * count_;
      const double* piece = pieces_.data() + i * count_;
      double m = 0.0;
      for (std::size_t t = 0; t < count_; ++t) {
        m += w[ord[t]];
        mass[t] = m;
      }
      // d/dw_k of sum_t M_t^q I_t is q sum_{t >= pos(k)} M_t^(q-1) I_t.
      double suffix = 0.0;
      for (std::size_t t = count_; t-- > 0;) {
        if (piece[t] != 0.0) {
          suffix += (q_ == 2.0 ? mass[t] : std::pow(mass[t], q_ - 1.0)) * piece[t];
        }
        part[ord[t]] += q_ * w[i] * suffix;
      }
    }
  });
  double e = 0.0;
  for (std::size_t k = 0; k < count_; ++k) {
    e += w[k] * pot[k];
    g[k] = pot[k];
  }
  for (const auto& part : parts) {
    for (std::size_t k = 0; k < count_; ++k) g[k] += part[k];
  }
  return e;
}

// --- Tolsa objective ------------------------------------------------------

TolsaObjective::TolsaObjective(const DiscreteMeasure& support, const KernelParams& params,
                               const TruncationWindow& window)
    : count_(support.size()),
      alpha_(params.alpha()),
      eps_(window.eps),
      table_(support, params, window),
      r_out_(window.r_out) {
  params.require_unit_range();
  sorted_neighbors(support, order_, dist_);
}

namespace {

struct MaximalTerm {
  double value;
  double radius;
  std::size_t last;  // last sorted position inside the maximizing ball
};

MaximalTerm maximal_term(const double* dist, const std::uint32_t* ord, std::size_t count,
                         std::span<const double> w, double alpha, double eps, double r_out) {
  double mass = 0.0;
  std::size_t t = 0;
  for (; t < count && dist[t] <= eps; ++t) mass += w[ord[t]];
  MaximalTerm best{mass / std::pow(eps, alpha), eps, t == 0 ? 0 : t - 1};
  bool any_inside = t > 0;
  for (; t < count && dist[t] <= r_out; ++t) {
    mass += w[ord[t]];
    if (t + 1 < count && dist[t + 1] == dist[t]) continue;
    const double v = mass / std::pow(dist[t], alpha);
    if (v > best.value) {
      best = {v, dist[t], t};
      any_inside = true;
    }
  }
  if (!any_inside) best.last = static_cast<std::size_t>(-1);
  return best;
}

}  // namespace

double TolsaObjective::energy(std::span<const double> w) const {
  if (w.size() != count_) throw ArgumentError("TolsaObjective: weight length mismatch");
  const TripleSums sums = triple_sums(table_, w, w, true);
  double e = 0.0;
  for (std::size_t i = 0; i < count_; ++i) {
    if (w[i] == 0.0) continue;
    const auto m = maximal_term(dist_.data() + i * count_, order_.data() + i * count_, count_, w,
                                alpha_, eps_, r_out_);
    e += w[i] * (m.value + std::sqrt(std::max(sums.per_atom[i], 0.0)));
  }
  return e;
}

double TolsaObjective::energy_and_subgradient(std::span<const double> w,
                                              std::span<double> g) const {
  if (w.size() != count_ || g.size() != count_) {
    throw ArgumentError("TolsaObjective: length mismatch");
  }
  const TripleSums sums = triple_sums(table_, w, w, true);
  std::vector<double> coef(count_, 0.0);
  std::vector<double> root(count_, 0.0);
  for (std::size_t i = 0; i < count_; ++i) {
    root[i] = std::sqrt(std::max(sums.per_atom[i], 0.0));
    if (root[i] > 0.0) coef[i] = w[i] / (2.0 * root[i]);
  }
  const TripleSums cross = triple_sums(table_, w, coef, true);
  double e = 0.0;
  for (std::size_t k = 0; k < count_; ++k) g[k] = root[k] + 2.0 * cross.per_atom[k];
  for (std::size_t i = 0; i < count_; ++i) {
    const double* dist = dist_.data() + i * count_;
    const std::uint32_t* ord = order_.data() + i * count_;
    const auto m = maximal_term(dist, ord, count_, w, alpha_, eps_, r_out_);
    g[i] += m.value;
    e += w[i] * (m.value + root[i]);
    if (w[i] == 0.0 || m.last == static_cast<std::size_t>(-1)) continue;
    const double slope = w[i] / std::pow(m.radius, alpha_);
    for (std::size_t t = 0; t <= m.last; ++t) g[ord[t]] += slope;
  }
  return e;
}

// --- optimizers -----------------------------------------------------------

namespace {

/// |P(w - g/E) - w|: zero exactly at a stationary point on the simplex.
double gradient_map_norm(std::span<const double> w, std::span<const double> g, double energy,
                         std::vector<double>& scratch) {
  for (std::size_t k = 0; k < w.size(); ++k) scratch[k] = w[k] - g[k] / energy;
  return std::sqrt(squared_norm_diff(project_to_simplex(scratch), w));
}

}  // namespace

CapacityEstimate minimize_wolff_energy(const DiscreteMeasure& support,
                                       const WolffExponents& exps,
                                       const TruncationWindow& window,
                                       const OptimizerConfig& cfg) {
  cfg.validate();
  const WolffObjective objective(support, exps, window);
  const std::size_t count = support.size();
  std::vector<double> w = cfg.random_init ? random_weights(count, cfg.seed) : uniform_weights(count);
  std::vector<double> g(count), trial(count), shifted(count);

  const double uniform_energy = objective.energy(uniform_weights(count));
  double energy = objective.energy_and_gradient(w, g);
  unsigned iters = 0;
  bool converged = false;
  int stalled = 0;
  double step = 0.5;  // last accepted backtracking step
  double grad_map = gradient_map_norm(w, g, energy, shifted);
  for (; iters < cfg.max_iters && grad_map >= cfg.stationarity; ++iters) {
    // Steps are taken on g / E so that the iteration commutes with dilations
    // of the support (E and g scale by the same factor).
    double t = cfg.step_rule == OptimizerConfig::StepRule::Fixed ? cfg.fixed_step
                                                                 : std::min(2.0 * step, 1e6);
    bool accepted = false;
    double trial_energy = energy;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      for (std::size_t k = 0; k < count; ++k) shifted[k] = w[k] - t * g[k] / energy;
      trial = project_to_simplex(shifted);
      const double move = squared_norm_diff(trial, w);
      if (move == 0.0) break;
      trial_energy = objective.energy(trial);
      if (cfg.step_rule == OptimizerConfig::StepRule::Fixed) {
        accepted = trial_energy < energy;
        break;
      }
      double lin = 0.0;
      for (std::size_t k = 0; k < count; ++k) lin += g[k] * (trial[k] - w[k]);
      if (trial_energy <= energy + lin + energy / (2.0 * t) * move) {
        accepted = trial_energy <= energy;
        step = t;
        break;
      }
    }
    if (!accepted) {
      converged = true;  // stationary at machine resolution
      break;
    }
    const double decrease = (energy - trial_energy) / energy;
    w = trial;
    energy = objective.energy_and_gradient(w, g);
    stalled = decrease < cfg.tolerance ? stalled + 1 : 0;
    grad_map = gradient_map_norm(w, g, energy, shifted);
    if (grad_map < cfg.stationarity || stalled >= 3) {
      converged = true;
      ++iters;
      break;
    }
  }
  grad_map = gradient_map_norm(w, g, energy, shifted);
  if (grad_map < cfg.stationarity) converged = true;

  CapacityEstimate est{.value = 1.0 / std::pow(energy, exps.p() - 1.0),
                       .method = CapacityMethod::WolffEnergy,
                       .witness = support.with_weights(w),
                       .window = window,
                       .diagnostics = {}};
  est.diagnostics["iterations"] = iters;
  est.diagnostics["energy"] = energy;
  est.diagnostics["uniform_energy"] = uniform_energy;
  est.diagnostics["final_gradient_norm"] = grad_map;
  est.diagnostics["converged"] = converged ? 1.0 : 0.0;
  return est;
}

namespace {

CapacityEstimate gamma_plus_from(const DiscreteMeasure& support, const KernelParams& params,
                                 const TruncationWindow& window, const OptimizerConfig& cfg,
                                 const CapacityEstimate& wolff) {
  const TolsaObjective objective(support, params, window);
  const std::size_t count = support.size();
  const std::vector<double> uniform = uniform_weights(count);
  const double e_uniform = objective.energy(uniform);
  std::vector<double> witness(wolff.witness.weights().begin(), wolff.witness.weights().end());
  const double e_witness = witness == uniform ? e_uniform : objective.energy(witness);

  std::vector<double> best = e_witness < e_uniform ? witness : uniform;
  double e_best = std::min(e_witness, e_uniform);
  double chosen = e_witness < e_uniform ? 1.0 : 0.0;

  unsigned refined = 0;
  std::vector<double> g(count), shifted(count);
  for (; refined < cfg.refine_iters; ++refined) {
    const double e = objective.energy_and_subgradient(best, g);
    bool improved = false;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      for (std::size_t k = 0; k < count; ++k) shifted[k] = best[k] - t * g[k] / e;
      auto trial = project_to_simplex(shifted);
      const double et = objective.energy(trial);
      if (et < e_best) {
        best = std::move(trial);
        e_best = et;
        chosen = 2.0;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }

  CapacityEstimate est{.value = 1.0 / e_best,
                       .method = CapacityMethod::TolsaEnergy,
                       .witness = support.with_weights(best),
                       .window = window,
                       .diagnostics = {}};
  est.diagnostics["energy"] = e_best;
  est.diagnostics["uniform_energy"] = e_uniform;
  est.diagnostics["witness_energy"] = e_witness;
  est.diagnostics["chosen"] = chosen;
  est.diagnostics["refine_iterations"] = refined;
  est.diagnostics["iterations"] = wolff.diagnostics.at("iterations");
  return est;
}

}  // namespace

CapacityEstimate estimate_gamma_plus(const DiscreteMeasure& support, const KernelParams& params,
                                     const TruncationWindow& window, const OptimizerConfig& cfg) {
  params.require_unit_range();
  const auto wolff = minimize_wolff_energy(
      support, WolffExponents::for_alpha(params.alpha(), params.n()), window, cfg);
  return gamma_plus_from(support, params, window, cfg, wolff);
}

// --- Chebyshev ------------------------------------------------------------

ChebyshevRestriction chebyshev_restrict(const DiscreteMeasure& mu,
                                        std::span<const double> potentials, double t) {
  if (potentials.size() != mu.size()) {
    throw ArgumentError("chebyshev_restrict: one potential per atom required");
  }
  if (!(t > 0.0)) throw ArgumentError("chebyshev_restrict: t must be positive");
  if (std::abs(mu.total_mass() - 1.0) > 1e-9) {
    throw ArgumentError("chebyshev_restrict: measure must be a probability measure");
  }
  double energy = 0.0, retained = 0.0;
  std::vector<std::size_t> kept;
  std::vector<double> coords, weights;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    energy += mu.weight(i) * potentials[i];
    if (potentials[i] <= t) {
      kept.push_back(i);
      retained += mu.weight(i);
      coords.insert(coords.end(), mu.atom(i).begin(), mu.atom(i).end());
      weights.push_back(mu.weight(i));
    }
  }
  if (kept.empty() || !(retained > 0.0)) {
    throw EmptyRestrictionError("chebyshev_restrict: every atom exceeds the threshold");
  }
  for (double& w : weights) w /= retained;
  return {DiscreteMeasure(mu.dim(), std::move(coords), std::move(weights), mu.delta()), retained,
          energy, std::move(kept)};
}

ChebyshevGrowthCheck chebyshev_growth_check(const DiscreteMeasure& mu, double alpha,
                                            const TruncationWindow& window) {
  const KernelParams params(alpha, mu.dim());
  params.require_unit_range();
  const auto exps = WolffExponents::for_alpha(alpha, mu.dim());
  const auto pot = atom_wolff_potentials(mu, exps, window);
  double energy = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) energy += mu.weight(i) * pot[i];
  ChebyshevGrowthCheck out;
  out.energy = energy;
  out.threshold = 2.0 * energy;
  const auto restricted = chebyshev_restrict(mu, pot, out.threshold);
  out.retained_mass = restricted.retained_mass;
  out.wolff_bound = out.threshold / (restricted.retained_mass * restricted.retained_mass);
  // int_rho^{2 rho} r^(-2 alpha - 1) dr = C rho^(-2 alpha)
  const double c = (1.0 - std::pow(2.0, -2.0 * alpha)) / (2.0 * alpha);
  const auto& nu = restricted.restricted;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const BallProfile prof = ball_profile(nu, nu.atom(i));
    out.max_wolff_on_f = std::max(out.max_wolff_on_f, wolff_potential(prof, exps, window));
    // rho ranges over [eps, r_out / 2] so that [rho, 2 rho] lies in the window
    const double m = truncated_maximal_function(prof, alpha, window.eps, window.r_out / 2.0);
    out.growth_sq_scaled = std::max(out.growth_sq_scaled, c * m * m);
  }
  out.growth_bound = 18.0 * energy;
  return out;
}

// --- admissible lower bound -----------------------------------------------

std::vector<Point> admissible_probe_points(const DiscreteMeasure& mu,
                                           const TruncationWindow& window,
                                           const std::vector<Point>& extra) {
  const std::size_t n = mu.dim();
  std::vector<Point> out;
  std::vector<double> p(n);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t d = 0; d < n; ++d) {
      for (double sign : {1.0, -1.0}) {
        std::copy(mu.atom(i).begin(), mu.atom(i).end(), p.begin());
        p[d] += sign * 2.0 * window.eps;
        bool clear = true;
        for (std::size_t j = 0; j < mu.size() && clear; ++j) {
          clear = distance(p, mu.atom(j)) >= window.eps;
        }
        if (clear) out.emplace_back(p);
      }
    }
  }
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

CapacityEstimate admissible_lower_bound(const DiscreteMeasure& mu, const KernelParams& params,
                                        const std::vector<Point>& eval_points,
                                        const TruncationWindow& window) {
  if (eval_points.empty()) throw ArgumentError("admissible_lower_bound: no evaluation points");
  double b = 0.0;
  for (const auto& x : eval_points) {
    if (x.dim() != mu.dim()) throw ArgumentError("admissible_lower_bound: point dimension");
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (distance(x.coords(), mu.atom(j)) < window.eps) {
        throw ArgumentError("admissible_lower_bound: evaluation point within eps of an atom");
      }
    }
    for (double v : truncated_riesz_transform(mu, x.coords(), params, window)) {
      b = std::max(b, std::abs(v));
    }
  }
  if (!(b > 0.0)) {
    throw ArgumentError("admissible_lower_bound: transform vanishes at every evaluation point");
  }
  CapacityEstimate est{.value = mu.total_mass() / b,
                       .method = CapacityMethod::AdmissibleLower,
                       .witness = mu.mass_scaled(1.0 / b),
                       .window = window,
                       .diagnostics = {}};
  est.diagnostics["sup_component"] = b;
  est.diagnostics["eval_points"] = static_cast<double>(eval_points.size());
  return est;
}

// --- experiments ----------------------------------------------------------

ComparabilityReport comparability_report(const DiscreteMeasure& support, double alpha,
                                         const TruncationWindow& window,
                                         const OptimizerConfig& cfg) {
  const KernelParams params(alpha, support.dim());
  params.require_unit_range();
  auto csp = minimize_wolff_energy(support, WolffExponents::for_alpha(alpha, support.dim()),
                                   window, cfg);
  auto gamma = gamma_plus_from(support, params, window, cfg, csp);
  const double g = gamma.value, c = csp.value;
  return {g, c, g / c, std::move(gamma), std::move(csp)};
}

namespace {

void map_identity(std::span<double>) {}
void map_shear(std::span<double> x) { x[1] += 0.3 * std::sin(x[0]); }
void map_dilate2(std::span<double> x) {
  for (double& v : x) v *= 2.0;
}
void map_dilate_half(std::span<double> x) {
  for (double& v : x) v *= 0.5;
}
void map_rotate30(std::span<double> x) {
  const double c = std::sqrt(3.0) / 2.0, s = 0.5;
  const double a = x[0], b = x[1];
  x[0] = c * a - s * b;
  x[1] = s * a + c * b;
}

}  // namespace

const std::vector<BilipschitzMap>& bilipschitz_registry() {
  // Shear: the Jacobian [[1, 0], [c, 1]] with |c| <= 0.3 has largest singular
  // value (|c| + sqrt(c^2 + 4)) / 2, which also bounds the inverse.
  static const std::vector<BilipschitzMap> maps = {
      {"identity", 0, 1.0, 1.0, &map_identity},
      {"shear", 2, (0.3 + std::sqrt(0.09 + 4.0)) / 2.0, 1.0, &map_shear},
      {"rotate30", 2, 1.0, 1.0, &map_rotate30},
      {"dilate2", 0, 2.0, 2.0, &map_dilate2},
      {"dilate_half", 0, 2.0, 0.5, &map_dilate_half},
  };
  return maps;
}

const BilipschitzMap& find_bilipschitz_map(const std::string& id) {
  for (const auto& m : bilipschitz_registry()) {
    if (m.id == id) return m;
  }
  throw ArgumentError("unknown bilipschitz map '" + id + "'");
}

BilipschitzResult bilipschitz_experiment(const DiscreteMeasure& support, const std::string& map_id,
                                         double alpha, const TruncationWindow& window,
                                         const OptimizerConfig& cfg, double bound) {
  const BilipschitzMap& map = find_bilipschitz_map(map_id);
  if (map.required_dim != 0 && map.required_dim != support.dim()) {
    throw ArgumentError("bilipschitz map '" + map_id + "' needs dimension " +
                        std::to_string(map.required_dim));
  }
  // Pure dilations move delta exactly; other maps may shrink distances by L.
  const bool dilation = map.scale != 1.0;
  const double new_delta = dilation ? support.delta() * map.scale : support.delta() / map.distortion;
  const DiscreteMeasure image = support.mapped(map.apply, new_delta);
  const TruncationWindow image_window = window.scaled(map.scale);

  const auto before = comparability_report(support, alpha, window, cfg);
  const auto after = comparability_report(image, alpha, image_window, cfg);
  BilipschitzResult out;
  out.map_id = map_id;
  out.before = before.gamma_plus_proxy;
  out.after = after.gamma_plus_proxy;
  out.ratio = out.after / out.before;
  out.csp_before = before.csp_proxy;
  out.csp_after = after.csp_proxy;
  out.bound = bound;
  out.within_bound = out.ratio <= bound && out.ratio >= 1.0 / bound;
  return out;
}

SemiadditivityResult semiadditivity_probe(const DiscreteMeasure& first,
                                          const DiscreteMeasure& second, double alpha,
                                          const TruncationWindow& window,
                                          const OptimizerConfig& cfg) {
  const KernelParams params(alpha, first.dim());
  SemiadditivityResult out;
  out.proxy_first = estimate_gamma_plus(first.normalized(), params, window, cfg).value;
  out.proxy_second = estimate_gamma_plus(second.normalized(), params, window, cfg).value;
  const DiscreteMeasure both = measure_union(first, second).normalized();
  out.proxy_union = estimate_gamma_plus(both, params, window, cfg).value;
  out.factor = out.proxy_union / (out.proxy_first + out.proxy_second);
  return out;
}

}  // namespace rieszcap
