#include "rieszcap/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <tuple>

#include "json.hpp"
#include "rieszcap/capacity.hpp"
#include "rieszcap/energies.hpp"
#include "rieszcap/error.hpp"
#include "rieszcap/experiment_defaults.hpp"
#include "rieszcap/geometry.hpp"
#include "rieszcap/measure.hpp"
#include "rieszcap/measure_io.hpp"
#include "rieszcap/oracles.hpp"

namespace rieszcap {

namespace {

constexpr double kAlphas[] = {0.25, 0.5, 0.75};
constexpr double kDimFactors[] = {1.0, 1.2, 1.5};

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

std::string fmt(double v) { return format_real(v); }

class Tally {
 public:
  explicit Tally(SuiteResult& r) : r_(r) {}

  bool check(bool ok, const std::string& what) {
    ++r_.checks;
    if (!ok) {
      ++r_.failures;
      if (r_.message.empty()) r_.message = what;
    }
    return ok;
  }
  /// Checks rel_err(a, b) <= tol and keeps the worst error under `key`.
  bool close(double a, double b, double tol, const std::string& key, const std::string& what) {
    const double e = rel_err(a, b);
    worst(key, e);
    return check(e <= tol, what + ": " + fmt(a) + " vs " + fmt(b) + " (rel " + fmt(e) + ")");
  }
  void worst(const std::string& key, double v) {
    auto [it, fresh] = peaks_.emplace(key, v);
    if (!fresh) it->second = std::max(it->second, v);
  }
  void least(const std::string& key, double v) {
    auto [it, fresh] = lows_.emplace(key, v);
    if (!fresh) it->second = std::min(it->second, v);
  }
  void metric(const std::string& key, double v) { r_.metrics.emplace_back(key, v); }

  void flush() {
    for (const auto& [k, v] : peaks_) r_.metrics.emplace_back(k, v);
    for (const auto& [k, v] : lows_) r_.metrics.emplace_back(k, v);
    peaks_.clear();
    lows_.clear();
  }

 private:
  SuiteResult& r_;
  std::map<std::string, double> peaks_;
  std::map<std::string, double> lows_;
};

std::vector<double> random_point(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t n, std::size_t min_atoms,
                               std::size_t max_atoms) {
  std::uniform_int_distribution<std::size_t> count(min_atoms, max_atoms);
  std::uniform_real_distribution<double> coord(0.0, 1.0), weight(0.1, 1.0);
  const std::size_t k = count(rng);
  std::vector<double> coords(k * n), weights(k);
  for (auto& c : coords) c = coord(rng);
  for (auto& w : weights) w = weight(rng);
  return DiscreteMeasure::with_natural_delta(n, std::move(coords), std::move(weights));
}

std::size_t random_dim(std::mt19937_64& rng) {
  return std::uniform_int_distribution<std::size_t>(1, 3)(rng);
}

double random_alpha(std::mt19937_64& rng) {
  return kAlphas[std::uniform_int_distribution<std::size_t>(0, 2)(rng)];
}

/// Window with eps a random fraction of the diameter (or of 1 for one atom).
TruncationWindow random_window(std::mt19937_64& rng, const DiscreteMeasure& mu) {
  const double scale = mu.size() > 1 ? mu.diameter() : 1.0;
  std::uniform_real_distribution<double> frac(0.01, 0.6);
  const double eps = frac(rng) * scale;
  if (std::uniform_int_distribution<int>(0, 3)(rng) == 0)
    return TruncationWindow(eps, eps + (0.3 + frac(rng)) * scale);
  return TruncationWindow(eps);
}

DiscreteMeasure cantor(std::size_t n, double dim, unsigned depth) {
  CantorSpec spec;
  spec.n = n;
  spec.lambda = CantorSpec::ratio_for_dimension(n, dim);
  spec.depth = depth;
  return generate_cantor(spec);
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

struct FaultScope {
  double saved;
  explicit FaultScope(double scale) : saved(testing_hooks::p_alpha_fault_scale()) {
    testing_hooks::set_p_alpha_fault_scale(scale);
  }
  ~FaultScope() { testing_hooks::set_p_alpha_fault_scale(saved); }
  FaultScope(const FaultScope&) = delete;
  FaultScope& operator=(const FaultScope&) = delete;
};

// Shared between the sweep suites so that each proxy is computed once.
class Context {
 public:
  explicit Context(const VerifyConfig& cfg) : cfg(cfg) {}

  const VerifyConfig& cfg;
  OptimizerConfig opt;

  std::mt19937_64 rng(std::uint64_t salt) const { return std::mt19937_64(cfg.seed ^ (salt * 0x9e3779b97f4a7c15ULL)); }
  std::size_t scaled(std::size_t full, std::size_t quick) const { return cfg.quick ? quick : full; }
  unsigned max_depth() const { return cfg.quick ? 3u : 5u; }

  const ComparabilityReport& proxies(double alpha, double factor, unsigned depth) {
    const auto key = std::make_tuple(alpha, factor, depth);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      const auto mu = cantor(2, factor * alpha, depth);
      it = cache_.emplace(key, comparability_report(mu, alpha, TruncationWindow(mu.delta()), opt))
               .first;
    }
    return it->second;
  }

 private:
  std::map<std::tuple<double, double, unsigned>, ComparabilityReport> cache_;
};

// --- criterion 1 -------------------------------------------------------------

void suite_sandwich(Context& ctx, Tally& t) {
  auto rng = ctx.rng(1);
  const std::size_t samples = ctx.scaled(10000, 1000);
  constexpr double slack = 1e-12;
  std::size_t violations = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (double a : kAlphas) {
      const double lower = 2.0 - std::pow(2.0, a), upper = std::pow(2.0, 1.0 + a);
      for (std::size_t s = 0; s < samples; ++s) {
        const auto x1 = random_point(rng, n, -1.0, 1.0), x2 = random_point(rng, n, -1.0, 1.0),
                   x3 = random_point(rng, n, -1.0, 1.0);
        const double L = std::max({distance(x1, x2), distance(x2, x3), distance(x1, x3)});
        const double v = p_alpha(x1, x2, x3, a) * std::pow(L, 2.0 * a);
        t.least("min_scaled_over_lower", v / lower);
        t.worst("max_scaled_over_upper", v / upper);
        const bool ok = v >= lower * (1.0 - slack) && v <= upper * (1.0 + slack);
        if (!ok) ++violations;
        t.check(ok, "sandwich violated: n=" + std::to_string(n) + " alpha=" + fmt(a) +
                        " p*L^(2a)=" + fmt(v));
      }
      // Closed-form anchor: the collinear triple (0, e1, 2 e1).
      const auto p = p_alpha(Triple(Point::origin(n), Point::axis(n, 0), Point::axis(n, 0, 2.0)),
                             KernelParams(a, n));
      t.close(p, std::pow(2.0, 1.0 - a) - 1.0, 1e-12, "anchor_rel_err",
              "sandwich anchor (0,e1,2e1) n=" + std::to_string(n) + " alpha=" + fmt(a));
    }
  }
  t.metric("violations", static_cast<double>(violations));
}

// --- criterion 2 -------------------------------------------------------------

void suite_menger(Context& ctx, Tally& t) {
  auto rng = ctx.rng(2);
  const std::size_t samples = ctx.scaled(10000, 1000);
  const KernelParams one(1.0, 2);
  for (std::size_t s = 0; s < samples; ++s) {
    const Triple tr(Point(random_point(rng, 2, -1.0, 1.0)), Point(random_point(rng, 2, -1.0, 1.0)),
                    Point(random_point(rng, 2, -1.0, 1.0)));
    const double c2 = menger_curvature_sq(tr);
    const double e1 = std::abs(c2 - 2.0 * p_alpha(tr, one));
    const double e2 = std::abs(c2 - menger_permutation_sum(tr));
    t.worst("max_rel_err_2p1", e1 / c2);
    t.worst("max_rel_err_permutation_sum", e2 / c2);
    t.check(e1 <= 1e-10 * c2, "c^2 != 2 p_1 at sample " + std::to_string(s));
    t.check(e2 <= 1e-10 * c2, "c^2 != six-permutation sum at sample " + std::to_string(s));
  }
}

// --- criterion 3 -------------------------------------------------------------

void suite_decomposition(Context& ctx, Tally& t) {
  auto rng = ctx.rng(3);
  const std::size_t measures = ctx.scaled(200, 20);
  for (std::size_t m = 0; m < measures; ++m) {
    const std::size_t n = random_dim(rng);
    const auto mu = random_measure(rng, n, 2, 15);
    const KernelParams params(random_alpha(rng), n);
    const double diam = mu.diameter();
    const TruncationWindow windows[] = {TruncationWindow(0.5 * mu.min_distance()),
                                        TruncationWindow(0.2 * diam),
                                        TruncationWindow(0.1 * diam, 0.7 * diam)};
    for (const auto& w : windows) {
      const auto d = symmetrization_decomposition(mu, params, w);
      t.close(d.lhs, d.p_part + d.residual, 1e-10, "max_rel_err",
              "3|R mu|^2 != p + residual, measure " + std::to_string(m));
      t.close(d.lhs, 3.0 * riesz_l2_energy(mu, params, w), 1e-12, "max_rel_err_lhs",
              "lhs is not 3 riesz_l2_energy, measure " + std::to_string(m));
    }
  }
}

// --- criterion 4 -------------------------------------------------------------

void suite_wolff_quadrature(Context& ctx, Tally& t) {
  auto rng = ctx.rng(4);
  const std::size_t pairs = ctx.scaled(200, 20);
  for (std::size_t m = 0; m < pairs; ++m) {
    const std::size_t n = random_dim(rng);
    const auto mu = random_measure(rng, n, 1, 12);
    const auto w = random_window(rng, mu);
    std::vector<double> x;
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
      const auto a = mu.atom(std::uniform_int_distribution<std::size_t>(0, mu.size() - 1)(rng));
      x.assign(a.begin(), a.end());
    } else {
      x = random_point(rng, n, -0.2, 1.2);
    }
    const double dn = static_cast<double>(n);
    const WolffExponents exps[] = {WolffExponents::for_alpha(random_alpha(rng), n),
                                   WolffExponents(0.35 * dn, 2.0, n),
                                   WolffExponents(0.4 * dn, 1.25, n)};
    for (const auto& e : exps) {
      t.close(wolff_potential(mu, x, e, w), oracles::quadrature_wolff(mu, x, e, w), 1e-8,
              "max_rel_err",
              "closed form vs quadrature, pair " + std::to_string(m) + " s=" + fmt(e.s()) +
                  " p=" + fmt(e.p()));
    }
  }
}

// --- criterion 5 -------------------------------------------------------------

void suite_oracle_equivalence(Context& ctx, Tally& t) {
  auto rng = ctx.rng(5);
  const std::size_t measures = ctx.scaled(200, 20);
  for (std::size_t m = 0; m < measures; ++m) {
    const std::size_t n = random_dim(rng);
    const auto mu = random_measure(rng, n, 1, 20);
    const KernelParams params(random_alpha(rng), n);
    const auto w = random_window(rng, mu);
    const std::string tag = ", measure " + std::to_string(m);
    t.close(p_alpha_energy(mu, params, w), oracles::naive_p_energy(mu, params, w), 1e-12,
            "max_rel_err_p_energy", "p_alpha_energy vs naive" + tag);
    t.close(riesz_l2_energy(mu, params, w), oracles::naive_riesz_l2(mu, params, w), 1e-12,
            "max_rel_err_riesz_l2", "riesz_l2_energy vs naive" + tag);
    const auto x = random_point(rng, n, -0.2, 1.2);
    t.close(pointwise_p_potential(mu, x, params, w), oracles::naive_pointwise_p(mu, x, params, w),
            1e-12, "max_rel_err_pointwise_p", "pointwise_p_potential vs naive" + tag);
    const auto at_atoms = atom_p_potentials(mu, params, w);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      t.close(at_atoms[i], oracles::naive_pointwise_p(mu, mu.atom(i), params, w), 1e-12,
              "max_rel_err_atom_p", "atom_p_potentials vs naive" + tag);
    }
  }
}

// --- criterion 6 -------------------------------------------------------------

void suite_scaling(Context& ctx, Tally& t) {
  auto rng = ctx.rng(6);
  std::vector<DiscreteMeasure> family;
  family.push_back(cantor(2, 0.75, ctx.cfg.quick ? 2 : 3));
  for (int k = 0; k < (ctx.cfg.quick ? 1 : 3); ++k)
    family.push_back(random_measure(rng, random_dim(rng), 3, 12).normalized());
  constexpr double tol = 1e-6;
  for (std::size_t f = 0; f < family.size(); ++f) {
    const auto& mu = family[f];
    const std::size_t n = mu.dim();
    const TruncationWindow w(mu.size() > 1 ? 0.5 * mu.min_distance() : 1.0);
    for (double a : kAlphas) {
      const KernelParams params(a, n);
      const auto exps = WolffExponents::for_alpha(a, n);
      const double p0 = p_alpha_energy(mu, params, w), w0 = wolff_energy(mu, exps, w),
                   e0 = tolsa_energy(mu, params, w);
      const auto c0 = comparability_report(mu, a, w, ctx.opt);
      for (double lambda : {0.5, 2.0, 10.0}) {
        const auto nu = mu.dilated(lambda);
        const auto wl = w.scaled(lambda);
        const std::string tag = " (set " + std::to_string(f) + ", alpha=" + fmt(a) +
                                ", lambda=" + fmt(lambda) + ")";
        const double l2a = std::pow(lambda, -2.0 * a), la = std::pow(lambda, a);
        t.close(p_alpha_energy(nu, params, wl), p0 * l2a, tol, "max_rel_err_p_energy",
                "p energy scaling" + tag);
        t.close(wolff_energy(nu, exps, wl), w0 * l2a, tol, "max_rel_err_wolff",
                "Wolff energy scaling" + tag);
        t.close(tolsa_energy(nu, params, wl), e0 / la, tol, "max_rel_err_e_alpha",
                "E_alpha scaling" + tag);
        const auto c1 = comparability_report(nu, a, wl, ctx.opt);
        t.close(c1.gamma_plus_proxy, c0.gamma_plus_proxy * la, tol, "max_rel_err_gamma_plus",
                "gamma_plus proxy scaling" + tag);
        t.close(c1.csp_proxy, c0.csp_proxy * la, tol, "max_rel_err_csp",
                "C_sp proxy scaling" + tag);
      }
    }
  }
}

// --- criteria 7 and 9 --------------------------------------------------------

void suite_comparability_window(Context& ctx, Tally& t) {
  std::ofstream csv;
  if (!ctx.cfg.ratio_csv_path.empty()) {
    csv.open(ctx.cfg.ratio_csv_path);
    if (!csv) throw IoError("cannot write " + ctx.cfg.ratio_csv_path);
    csv << "set_id,n,alpha,dim,depth,eps,N_atoms,p_alpha,wolff,ratio\n";
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double a : kAlphas) {
    for (double f : kDimFactors) {
      for (unsigned m = 2; m <= ctx.max_depth(); ++m) {
        const auto mu = cantor(2, f * a, m);
        const TruncationWindow w(mu.delta());
        const double p = p_alpha_energy(mu, KernelParams(a, 2), w);
        const double wo = wolff_energy(mu, WolffExponents::for_alpha(a, 2), w);
        const double r = p / wo;
        t.check(std::isfinite(r) && r > 0.0, "non-positive energy ratio at alpha=" + fmt(a));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        if (csv) {
          csv << "cantor-a" << fmt(a) << "-d" << fmt(f * a) << "-m" << m << ",2," << fmt(a) << ","
              << fmt(f * a) << "," << m << "," << fmt(w.eps) << "," << mu.size() << "," << fmt(p)
              << "," << fmt(wo) << "," << fmt(r) << "\n";
        }
      }
    }
  }
  const double spread = hi / lo;
  t.metric("min_ratio", lo);
  t.metric("max_ratio", hi);
  t.metric("spread", spread);
  t.metric("threshold", defaults::kEnergyRatioSpread);
  t.check(spread < defaults::kEnergyRatioSpread,
          "p_alpha/wolff spread " + fmt(spread) + " >= " + fmt(defaults::kEnergyRatioSpread));
  if (csv) {
    csv.flush();
    if (!csv) throw IoError("failed writing " + ctx.cfg.ratio_csv_path);
  }
}

void suite_proxy_comparability(Context& ctx, Tally& t) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double a : kAlphas) {
    for (double f : kDimFactors) {
      for (unsigned m = 2; m <= ctx.max_depth(); ++m) {
        const double r = ctx.proxies(a, f, m).ratio;
        t.check(std::isfinite(r) && r > 0.0, "non-positive proxy ratio at alpha=" + fmt(a));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
  }
  const double spread = hi / lo;
  t.metric("min_ratio", lo);
  t.metric("max_ratio", hi);
  t.metric("spread", spread);
  t.metric("threshold", defaults::kProxyRatioSpread);
  t.check(spread < defaults::kProxyRatioSpread,
          "gamma_plus/csp spread " + fmt(spread) + " >= " + fmt(defaults::kProxyRatioSpread));
  for (double a : kAlphas) {
    const auto mu = cantor(2, 1.5 * a, 3);
    const TruncationWindow w(mu.delta());
    const double base = ctx.proxies(a, 1.5, 3).ratio;
    for (double lambda : {0.5, 2.0, 10.0}) {
      const auto rep = comparability_report(mu.dilated(lambda), a, w.scaled(lambda), ctx.opt);
      t.close(rep.ratio, base, 1e-4, "max_rel_err_dilation",
              "proxy ratio moved under dilation by " + fmt(lambda) + " at alpha=" + fmt(a));
    }
  }
}

// --- criterion 8 -------------------------------------------------------------

void suite_zero_capacity(Context& ctx, Tally& t) {
  const unsigned top = ctx.max_depth();
  for (double a : kAlphas) {
    std::vector<double> depth, energy, proxy;
    for (unsigned m = 1; m <= top; ++m) {
      const auto mu = cantor(2, a, m);
      depth.push_back(m);
      energy.push_back(wolff_energy(mu, WolffExponents::for_alpha(a, 2), TruncationWindow(mu.delta())));
      proxy.push_back(ctx.proxies(a, 1.0, m).gamma_plus_proxy);
    }
    const double r2 = r_squared(depth, energy);
    t.least("min_r2", r2);
    t.check(r2 > defaults::kAffineFitR2, "Wolff energy not affine in depth at alpha=" + fmt(a) +
                                             " (R^2 " + fmt(r2) + ")");
    for (std::size_t i = 1; i < proxy.size(); ++i) {
      t.check(proxy[i] < proxy[i - 1], "gamma_plus proxy not decreasing at alpha=" + fmt(a) +
                                           " depth " + std::to_string(i + 1));
    }
    t.metric("proxy_depth_" + std::to_string(top) + "_alpha_" + fmt(a), proxy.back());
    const double g0 = ctx.proxies(a, 1.5, top - 1).gamma_plus_proxy;
    const double g1 = ctx.proxies(a, 1.5, top).gamma_plus_proxy;
    const double change = std::abs(g1 - g0) / g0;
    t.worst("max_stabilization_change", change);
    t.check(change < defaults::kStabilizationChange,
            "proxy not stable for d = 1.5 alpha at alpha=" + fmt(a) + " (change " + fmt(change) + ")");
  }
}

// --- criterion 10 ------------------------------------------------------------

void suite_chebyshev(Context& ctx, Tally& t) {
  auto rng = ctx.rng(10);
  const std::size_t instances = ctx.scaled(100, 20);
  constexpr double slack = 1e-12;
  std::uniform_real_distribution<double> frac(0.2, 3.0);
  std::exponential_distribution<double> draw(1.0);
  for (std::size_t k = 0; k < instances; ++k) {
    const std::size_t n = random_dim(rng);
    const auto mu = random_measure(rng, n, 1, 30).normalized();
    std::vector<double> pot(mu.size());
    if (k % 2 == 0) {
      for (auto& v : pot) v = draw(rng);
    } else {
      pot = atom_wolff_potentials(mu, WolffExponents::for_alpha(random_alpha(rng), n),
                                  TruncationWindow(0.5 * std::min(mu.delta(), 1.0)));
    }
    double e = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) e += mu.weight(i) * pot[i];
    const std::string tag = " instance " + std::to_string(k);
    for (double t_val : {frac(rng) * e, 2.0 * e}) {
      const double bound = 1.0 - e / t_val;
      try {
        const auto r = chebyshev_restrict(mu, pot, t_val);
        t.least("min_margin", r.retained_mass - bound);
        t.check(r.retained_mass >= bound - slack, "retained mass below 1 - E/t" + tag);
        t.check(std::abs(r.restricted.total_mass() - 1.0) <= slack, "restriction not renormalized" + tag);
        if (t_val == 2.0 * e) {
          t.least("min_retained_at_2E", r.retained_mass);
          t.check(r.retained_mass >= 0.5 - slack, "retained mass below 1/2 at t = 2E" + tag);
        }
      } catch (const EmptyRestrictionError&) {
        t.check(bound <= 0.0, "empty restriction although 1 - E/t > 0" + tag);
      }
    }
  }
}

// --- criterion 11 ------------------------------------------------------------

DiscreteMeasure regular_polygon(std::size_t sides) {
  std::vector<double> coords;
  for (std::size_t i = 0; i < sides; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(sides);
    coords.push_back(std::cos(th));
    coords.push_back(std::sin(th));
  }
  return DiscreteMeasure::with_natural_delta(2, coords, std::vector<double>(sides, 1.0));
}

// Supports whose isometry group acts transitively on the atoms, so uniform
// weights are forced by symmetry. Corner Cantor sets of depth >= 2 are not of
// this kind: their outer atoms see different distances than the inner ones.
std::vector<DiscreteMeasure> transitive_supports() {
  std::vector<DiscreteMeasure> out;
  out.push_back(DiscreteMeasure(1, {0.0, 1.0}, {1.0, 1.0}, 1.0));
  for (std::size_t sides : {3u, 6u, 12u}) out.push_back(regular_polygon(sides));
  out.push_back(cantor(2, 1.0, 1));
  out.push_back(cantor(3, 1.0, 1));
  return out;
}

/// Index of the atom at `x`, or size() when there is none.
std::size_t find_atom(const DiscreteMeasure& mu, std::span<const double> x) {
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (distance(mu.atom(i), x) < 1e-9) return i;
  return mu.size();
}

void check_simplex(Tally& t, std::span<const double> w, const std::string& tag) {
  double sum = 0.0, lowest = 0.0;
  for (double v : w) {
    sum += v;
    lowest = std::min(lowest, v);
  }
  t.worst("max_simplex_defect", std::abs(sum - 1.0));
  t.check(std::abs(sum - 1.0) <= 1e-12 && lowest >= 0.0, "weights leave the simplex" + tag);
}

void suite_optimizer(Context& ctx, Tally& t) {
  const auto supports = transitive_supports();
  for (std::size_t s = 0; s < supports.size(); ++s) {
    const auto& mu = supports[s];
    for (double a : kAlphas) {
      const auto exps = WolffExponents::for_alpha(a, mu.dim());
      const TruncationWindow w(0.5 * mu.delta());
      const std::vector<double> uniform(mu.size(), 1.0 / static_cast<double>(mu.size()));
      const double e_uniform = WolffObjective(mu, exps, w).energy(uniform);
      for (int init = 0; init < 3; ++init) {
        OptimizerConfig cfg = ctx.opt;
        cfg.random_init = init > 0;
        cfg.seed = ctx.cfg.seed + static_cast<std::uint64_t>(init);
        const auto est = minimize_wolff_energy(mu, exps, w, cfg);
        const auto weights = est.witness.weights();
        const std::string tag = " (support " + std::to_string(s) + ", alpha=" + fmt(a) +
                                ", init " + std::to_string(init) + ")";
        double dev = 0.0;
        for (double v : weights)
          dev = std::max(dev, std::abs(v * static_cast<double>(mu.size()) - 1.0));
        t.worst("max_uniform_deviation", dev);
        t.check(dev < defaults::kSymmetricWeightDeviation, "optimized weights not near uniform" + tag);
        check_simplex(t, weights, tag);
        if (init == 0)
          t.check(est.diagnostics.at("energy") <= e_uniform, "optimized energy above uniform" + tag);
      }
    }
  }
  // Corner Cantor sets: the square's symmetry group permutes the atoms, so the
  // weights reached from the uniform start must be invariant under it, but
  // need not be uniform.
  const std::function<void(std::span<double>)> square_maps[] = {
      [](std::span<double> x) { x[0] = 1.0 - x[0]; },
      [](std::span<double> x) { x[1] = 1.0 - x[1]; },
      [](std::span<double> x) { std::swap(x[0], x[1]); }};
  for (double d : {1.0, 0.75}) {
    const auto mu = cantor(2, d, ctx.cfg.quick ? 2 : 3);
    for (double a : kAlphas) {
      const auto exps = WolffExponents::for_alpha(a, 2);
      const TruncationWindow w(mu.delta());
      const auto est = minimize_wolff_energy(mu, exps, w, ctx.opt);
      const auto weights = est.witness.weights();
      const std::string tag = " (Cantor d=" + fmt(d) + ", alpha=" + fmt(a) + ")";
      const double top = *std::max_element(weights.begin(), weights.end());
      for (const auto& g : square_maps) {
        for (std::size_t i = 0; i < mu.size(); ++i) {
          std::vector<double> y(mu.atom(i).begin(), mu.atom(i).end());
          g(y);
          const std::size_t j = find_atom(mu, y);
          if (!t.check(j < mu.size(), "symmetry image missing" + tag)) continue;
          t.worst("max_group_defect", std::abs(weights[i] - weights[j]) / top);
          t.check(std::abs(weights[i] - weights[j]) <= 1e-4 * top, "weights not group-invariant" + tag);
        }
      }
      check_simplex(t, weights, tag);
      t.check(est.diagnostics.at("energy") <= est.diagnostics.at("uniform_energy"),
              "optimized energy above uniform" + tag);
      t.worst("cantor_weight_spread_alpha_" + fmt(a) + "_d_" + fmt(d),
              top * static_cast<double>(mu.size()));
    }
  }
  // Asymmetric supports: uniform start, monotone descent.
  auto rng = ctx.rng(11);
  for (std::size_t k = 0; k < ctx.scaled(20, 5); ++k) {
    const std::size_t n = random_dim(rng);
    const auto mu = random_measure(rng, n, 2, 40);
    const auto exps = WolffExponents::for_alpha(random_alpha(rng), n);
    const TruncationWindow w(0.5 * mu.delta());
    const auto est = minimize_wolff_energy(mu, exps, w, ctx.opt);
    const std::string tag = " (random support " + std::to_string(k) + ")";
    t.check(est.diagnostics.at("energy") <= est.diagnostics.at("uniform_energy"),
            "optimized energy above uniform" + tag);
    check_simplex(t, est.witness.weights(), tag);
  }
}

// --- extra invariants --------------------------------------------------------

void rotate(std::span<double> x, double th, std::size_t a, std::size_t b) {
  const double c = std::cos(th), s = std::sin(th);
  const double xa = x[a], xb = x[b];
  x[a] = c * xa - s * xb;
  x[b] = s * xa + c * xb;
}

void suite_invariance(Context& ctx, Tally& t) {
  auto rng = ctx.rng(12);
  for (std::size_t k = 0; k < ctx.scaled(30, 5); ++k) {
    const std::size_t n = random_dim(rng);
    const auto mu = random_measure(rng, n, 3, 12);
    const double a = random_alpha(rng);
    const KernelParams params(a, n);
    const auto exps = WolffExponents::for_alpha(a, n);
    const auto w = random_window(rng, mu);
    const double th = std::uniform_real_distribution<double>(0.0, 6.0)(rng);
    const auto shift = random_point(rng, n, -3.0, 3.0);
    const auto moved = mu.mapped(
        [&](std::span<double> x) {
          if (n == 1) x[0] = -x[0];
          if (n >= 2) rotate(x, th, 0, 1);
          if (n == 3) rotate(x, 0.5 * th, 1, 2);
          for (std::size_t i = 0; i < n; ++i) x[i] += shift[i];
        },
        mu.delta() * (1.0 - 1e-9));
    std::vector<std::size_t> perm(mu.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> coords, weights;
    for (std::size_t i : perm) {
      const auto x = mu.atom(i);
      coords.insert(coords.end(), x.begin(), x.end());
      weights.push_back(mu.weight(i));
    }
    const DiscreteMeasure permuted(n, coords, weights, mu.delta());
    const std::string tag = " (measure " + std::to_string(k) + ")";
    const double p0 = p_alpha_energy(mu, params, w), r0 = riesz_l2_energy(mu, params, w),
                 w0 = wolff_energy(mu, exps, w), e0 = tolsa_energy(mu, params, w);
    for (const auto* nu : {&moved, &permuted}) {
      const char* what = nu == &moved ? "rigid motion" : "permutation";
      t.close(p_alpha_energy(*nu, params, w), p0, 1e-10, "max_rel_err", std::string(what) + " changed p energy" + tag);
      t.close(riesz_l2_energy(*nu, params, w), r0, 1e-10, "max_rel_err", std::string(what) + " changed riesz_l2" + tag);
      t.close(wolff_energy(*nu, exps, w), w0, 1e-10, "max_rel_err", std::string(what) + " changed Wolff energy" + tag);
      t.close(tolsa_energy(*nu, params, w), e0, 1e-10, "max_rel_err", std::string(what) + " changed E_alpha" + tag);
    }
    t.check(p0 >= 0.0 && r0 >= 0.0 && w0 > 0.0 && e0 > 0.0, "negative energy" + tag);
  }
}

void suite_window_monotonicity(Context& ctx, Tally& t) {
  auto rng = ctx.rng(13);
  for (std::size_t k = 0; k < ctx.scaled(30, 5); ++k) {
    const std::size_t n = random_dim(rng);
    const auto mu = random_measure(rng, n, 3, 15);
    const double a = random_alpha(rng);
    const KernelParams params(a, n);
    const auto exps = WolffExponents::for_alpha(a, n);
    double prev_p = std::numeric_limits<double>::infinity(), prev_w = prev_p, prev_e = prev_p;
    const std::string tag = " (measure " + std::to_string(k) + ")";
    for (double f : {0.05, 0.1, 0.2, 0.4, 0.8}) {
      const TruncationWindow w(f * mu.diameter());
      const double p = p_alpha_energy(mu, params, w), wo = wolff_energy(mu, exps, w),
                   e = tolsa_energy(mu, params, w);
      t.check(p <= prev_p, "p energy increased with eps" + tag);
      t.check(wo <= prev_w, "Wolff energy increased with eps" + tag);
      t.check(e <= prev_e * (1.0 + 1e-14), "E_alpha increased with eps" + tag);
      prev_p = p;
      prev_w = wo;
      prev_e = e;
    }
  }
}

void suite_growth(Context& ctx, Tally& t) {
  for (double a : kAlphas) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (unsigned m = 1; m <= ctx.max_depth(); ++m) {
      const auto mu = cantor(2, a, m);
      const double g = growth_constant(mu, a, atom_points(mu));
      lo = std::min(lo, g);
      hi = std::max(hi, g);
      const auto check = chebyshev_growth_check(mu.normalized(), a, TruncationWindow(mu.delta()));
      const std::string tag = " at alpha=" + fmt(a) + " depth " + std::to_string(m);
      t.check(check.retained_mass >= 0.5, "Chebyshev retained mass below 1/2" + tag);
      t.check(check.max_wolff_on_f <= check.wolff_bound * (1.0 + 1e-12),
              "Wolff potential of the restriction above t / mu(F)^2" + tag);
      t.check(check.growth_sq_scaled <= check.growth_bound * (1.0 + 1e-12),
              "growth bound C (M nu)^2 <= 18 E violated" + tag);
      t.worst("max_growth_over_18E", check.growth_sq_scaled / check.growth_bound);
    }
    t.metric("growth_spread_alpha_" + fmt(a), hi / lo);
    t.check(hi / lo < defaults::kGrowthSpread, "growth constant drifts with depth at alpha=" + fmt(a));
  }
}

void suite_semiadditivity(Context& ctx, Tally& t) {
  for (double a : kAlphas) {
    const auto block = cantor(2, 1.5 * a, ctx.cfg.quick ? 2 : 3);
    const TruncationWindow w(block.delta());
    for (double gap : {0.5, 2.0}) {
      const std::vector<double> shift = {1.0 + gap, 0.0};
      const auto r = semiadditivity_probe(block, block.translated(shift), a, w, ctx.opt);
      t.worst("max_factor", r.factor);
      t.check(r.factor <= defaults::kSemiadditivityFactor,
              "semiadditivity factor " + fmt(r.factor) + " at alpha=" + fmt(a));
    }
  }
  t.metric("threshold", defaults::kSemiadditivityFactor);
}

void suite_bilipschitz(Context& ctx, Tally& t) {
  const double a = 0.5;
  const auto mu = cantor(2, 0.75, ctx.cfg.quick ? 3 : 4);
  const TruncationWindow w(mu.delta());
  for (const auto& map : bilipschitz_registry()) {
    const auto r = bilipschitz_experiment(mu, map.id, a, w, ctx.opt, defaults::kBilipschitzBound);
    t.metric("ratio_" + map.id, r.ratio);
    if (map.id == "identity") {
      t.check(r.ratio == 1.0, "identity map changed the proxy");
    } else if (map.scale != 1.0) {
      t.close(r.ratio, std::pow(map.scale, a), 1e-4, "max_rel_err_dilation",
              "dilation " + map.id + " off the scaling law");
    } else {
      t.check(r.within_bound, "bilipschitz ratio for " + map.id + " outside the bound");
    }
  }
}

void suite_monte_carlo(Context& ctx, Tally& t) {
  const std::vector<DiscreteMeasure> fixtures = {
      DiscreteMeasure(1, {0.0, 1.0}, {0.3, 0.7}, 1.0),
      DiscreteMeasure(2, {0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0}, {1.0, 1.0, 1.0, 1.0}, 1.0),
      cantor(2, 0.75, 2)};
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    const auto& mu = fixtures[f];
    const KernelParams params(0.5, mu.dim());
    const TruncationWindow w(0.5 * mu.delta());
    const double exact = oracles::naive_double_sum(mu, params, w);
    t.close(ball_double_sum(mu, params, w), exact, 1e-12, "max_rel_err_ball_sum",
            "ball_double_sum vs naive, fixture " + std::to_string(f));
    const auto mc = oracles::mc_double_sum(mu, params, w, ctx.scaled(20000, 2000), ctx.cfg.seed + f);
    const double z = mc.stderr_ > 0.0 ? std::abs(mc.mean - exact) / mc.stderr_
                                      : (mc.mean == exact ? 0.0 : std::numeric_limits<double>::infinity());
    t.worst("max_z", z);
    t.check(z <= 4.0, "Monte-Carlo estimate off by " + fmt(z) + " stderr, fixture " + std::to_string(f));
  }
}

void suite_admissible(Context& ctx, Tally& t) {
  const DiscreteMeasure atom(2, {0.0, 0.0}, {1.0}, 1.0);
  std::vector<Point> circle;
  for (int k = 0; k < 16; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 16.0;
    circle.push_back(Point{std::cos(th), std::sin(th)});
  }
  const auto one = admissible_lower_bound(atom, KernelParams(0.5, 2), circle, TruncationWindow(0.5));
  t.close(one.value, 1.0, 1e-12, "max_rel_err_unit_atom", "single atom admissible bound");
  for (double a : kAlphas) {
    const auto mu = cantor(2, 1.5 * a, ctx.cfg.quick ? 2 : 3);
    const TruncationWindow w(mu.delta());
    const auto low = admissible_lower_bound(mu, KernelParams(a, 2), admissible_probe_points(mu, w), w);
    const double gp = ctx.proxies(a, 1.5, ctx.cfg.quick ? 2 : 3).gamma_plus_proxy;
    t.check(std::isfinite(low.value) && low.value > 0.0, "admissible bound not positive at alpha=" + fmt(a));
    t.metric("admissible_over_gamma_plus_alpha_" + fmt(a), low.value / gp);
  }
}

struct SuiteDef {
  const char* name;
  int criterion;
  void (*run)(Context&, Tally&);
};

constexpr SuiteDef kSuites[] = {
    {"sandwich", 1, suite_sandwich},
    {"menger", 2, suite_menger},
    {"decomposition", 3, suite_decomposition},
    {"wolff-quadrature", 4, suite_wolff_quadrature},
    {"oracle-equivalence", 5, suite_oracle_equivalence},
    {"scaling", 6, suite_scaling},
    {"comparability-window", 7, suite_comparability_window},
    {"zero-capacity-trend", 8, suite_zero_capacity},
    {"proxy-comparability", 9, suite_proxy_comparability},
    {"chebyshev", 10, suite_chebyshev},
    {"optimizer", 11, suite_optimizer},
    {"invariance", 0, suite_invariance},
    {"window-monotonicity", 0, suite_window_monotonicity},
    {"growth", 0, suite_growth},
    {"semiadditivity", 0, suite_semiadditivity},
    {"bilipschitz", 0, suite_bilipschitz},
    {"monte-carlo", 0, suite_monte_carlo},
    {"admissible-lower", 0, suite_admissible},
};

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

const SuiteResult* VerifyReport::first_failure() const {
  for (const auto& s : suites)
    if (!s.passed) return &s;
  return nullptr;
}

const SuiteResult* VerifyReport::find(const std::string& name) const {
  for (const auto& s : suites)
    if (s.name == name) return &s;
  return nullptr;
}

std::string VerifyReport::summary_json() const {
  using nlohmann::ordered_json;
  ordered_json list = ordered_json::array();
  std::size_t failed = 0;
  for (const auto& s : suites) {
    ordered_json metrics = ordered_json::object();
    for (const auto& [k, v] : s.metrics) metrics[k] = std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
    list.push_back({{"name", s.name},
                    {"criterion", s.criterion},
                    {"passed", s.passed},
                    {"checks", s.checks},
                    {"failures", s.failures},
                    {"metrics", metrics},
                    {"message", s.message}});
    if (!s.passed) ++failed;
  }
  ordered_json doc = {{"thresholds_version", defaults::kThresholdsVersion},
                      {"seed", seed},
                      {"mode", quick ? "quick" : "full"},
                      {"passed", passed()},
                      {"counts", {{"suites", suites.size()}, {"passed", suites.size() - failed}, {"failed", failed}}},
                      {"suites", list}};
  return doc.dump(2);
}

std::string VerifyReport::timings_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& s : suites) doc[s.name] = s.seconds;
  return doc.dump(2);
}

std::vector<std::string> verify_suite_names() {
  std::vector<std::string> out;
  for (const auto& s : kSuites) out.emplace_back(s.name);
  return out;
}

VerifyReport run_verify(const VerifyConfig& cfg) {
  for (const auto& name : cfg.suites) {
    const bool known = std::any_of(std::begin(kSuites), std::end(kSuites),
                                   [&](const SuiteDef& s) { return name == s.name; });
    if (!known) throw ArgumentError("unknown verify suite '" + name + "'");
  }
  FaultScope fault(cfg.p_alpha_fault_scale);
  Context ctx(cfg);
  VerifyReport report;
  report.seed = cfg.seed;
  report.quick = cfg.quick;
  for (const auto& def : kSuites) {
    if (!cfg.suites.empty() &&
        std::find(cfg.suites.begin(), cfg.suites.end(), def.name) == cfg.suites.end())
      continue;
    SuiteResult r;
    r.name = def.name;
    r.criterion = def.criterion;
    const auto start = std::chrono::steady_clock::now();
    Tally tally(r);
    try {
      def.run(ctx, tally);
      tally.flush();
    } catch (const std::exception& e) {
      tally.flush();
      ++r.failures;
      r.message = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.passed = r.failures == 0;
    report.suites.push_back(std::move(r));
  }
  return report;
}

}  // namespace rieszcap
