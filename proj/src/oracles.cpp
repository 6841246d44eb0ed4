#include "rieszcap/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "rieszcap/error.hpp"

namespace rieszcap::oracles {

double naive_p_energy(const DiscreteMeasure& mu, const KernelParams& params,
                      const TruncationWindow& window) {
  const std::size_t count = mu.size();
  auto in = [&](std::size_t a, std::size_t b) {
    return window.contains(distance(mu.atom(a), mu.atom(b)));
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i || !in(i, j)) continue;
      for (std::size_t k = 0; k < count; ++k) {
        if (k == i || k == j || !in(i, k) || !in(j, k)) continue;
        sum += mu.weight(i) * mu.weight(j) * mu.weight(k) *
               p_alpha(mu.atom(i), mu.atom(j), mu.atom(k), params.alpha());
      }
    }
  }
  return sum;
}

double naive_riesz_l2(const DiscreteMeasure& mu, const KernelParams& params,
                      const TruncationWindow& window) {
  double sum = 0.0;
  const std::size_t n = mu.dim();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::vector<double> r(n, 0.0);
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (j == i || !window.contains(distance(mu.atom(i), mu.atom(j)))) continue;
      std::vector<double> diff(n);
      for (std::size_t d = 0; d < n; ++d) diff[d] = mu.atom(j)[d] - mu.atom(i)[d];
      const auto k = riesz_kernel(diff, params.alpha());
      for (std::size_t d = 0; d < n; ++d) r[d] += mu.weight(j) * k[d];
    }
    double sq = 0.0;
    for (double v : r) sq += v * v;
    sum += mu.weight(i) * sq;
  }
  return sum;
}

double naive_pointwise_p(const DiscreteMeasure& mu, std::span<const double> x,
                         const KernelParams& params, const TruncationWindow& window) {
  double sum = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (!window.contains(distance(x, mu.atom(j)))) continue;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (k == j || !window.contains(distance(x, mu.atom(k))) ||
          !window.contains(distance(mu.atom(j), mu.atom(k)))) {
        continue;
      }
      sum += mu.weight(j) * mu.weight(k) * p_alpha(x, mu.atom(j), mu.atom(k), params.alpha());
    }
  }
  return sum;
}

double naive_ball_mass(const DiscreteMeasure& mu, std::span<const double> x, double r) {
  double m = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (distance(x, mu.atom(j)) <= r) m += mu.weight(j);
  }
  return m;
}

namespace {

struct SimpsonState {
  std::function<double(double)> f;
  std::function<double(double)> mass;
  unsigned budget;
  unsigned used = 0;
};

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// The integrand jumps where the ball mass changes; an interval is accepted
// only when its mass is constant (the integrand is then smooth) or when it
// is too narrow to matter.
double adaptive(SimpsonState& st, double a, double fa, double b, double fb, double m, double fm,
                double whole, double tol, int depth) {
  if (++st.used > st.budget) {
    throw ToleranceNotMetError("quadrature_wolff: subdivision budget exhausted");
  }
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = st.f(lm), frm = st.f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double err = left + right - whole;
  const bool smooth = st.mass(a) == st.mass(b);
  if (depth <= 0 || (b - a) < 1e-14 * std::max(1.0, std::abs(a)) ||
      (smooth && depth <= 196 && std::abs(err) <= 15.0 * tol)) {
    return left + right + err / 15.0;
  }
  return adaptive(st, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(st, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double quadrature_wolff(const DiscreteMeasure& mu, std::span<const double> x,
                        const WolffExponents& exps, const TruncationWindow& window,
                        const QuadratureConfig& cfg) {
  if (!(cfg.rel_tolerance > 0.0) || cfg.max_subdivisions < 1) {
    throw ArgumentError("quadrature config: tolerance and budget must be positive");
  }
  const double a_exp = exps.trace();
  const double q = exps.dual_exp();
  const double kappa = a_exp * q;
  if (!(kappa > 0.0)) throw UnsupportedExponentError("quadrature_wolff: decay must be positive");

  double far = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) far = std::max(far, distance(x, mu.atom(j)));
  const double total = mu.total_mass();
  const double r_max = std::min(window.r_out, std::max(2.0 * far, window.eps));

  auto tail = [&](double from) {
    if (!(from < window.r_out)) return 0.0;
    const double upper = window.has_outer() ? std::pow(window.r_out, -kappa) : 0.0;
    return std::pow(total, q) * (std::pow(from, -kappa) - upper) / kappa;
  };
  if (!(r_max > window.eps)) return tail(window.eps);

  SimpsonState st;
  st.mass = [&](double u) { return naive_ball_mass(mu, x, std::exp(u)); };
  st.f = [&](double u) {
    const double r = std::exp(u);
    const double m = naive_ball_mass(mu, x, r);
    if (m <= 0.0) return 0.0;
    return std::pow(m / std::pow(r, a_exp), q);
  };
  st.budget = cfg.max_subdivisions;

  const double lo = std::log(window.eps), hi = std::log(r_max);
  // Rough magnitude for the absolute tolerance.
  double rough = 0.0;
  const int grid = 256;
  for (int g = 0; g < grid; ++g) {
    const double u = lo + (hi - lo) * (g + 0.5) / grid;
    rough += st.f(u) * (hi - lo) / grid;
  }
  rough = std::max(rough, tail(r_max));
  const double tol = cfg.rel_tolerance * std::max(rough, 1e-300);

  const double fa = st.f(lo), fb = st.f(hi), mid = 0.5 * (lo + hi), fm = st.f(mid);
  const double body =
      adaptive(st, lo, fa, hi, fb, mid, fm, simpson(lo, fa, hi, fb, fm), tol, 200);
  return body + tail(r_max);
}

double naive_double_sum(const DiscreteMeasure& mu, const KernelParams& params,
                        const TruncationWindow& window) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (i == j) continue;
      const double d = distance(mu.atom(i), mu.atom(j));
      if (!window.contains(d)) continue;
      sum += mu.weight(i) * mu.weight(j) * naive_ball_mass(mu, mu.atom(i), d) /
             std::pow(d, 2.0 * params.alpha());
    }
  }
  return sum;
}

McEstimate mc_double_sum(const DiscreteMeasure& mu, const KernelParams& params,
                         const TruncationWindow& window, std::size_t samples,
                         std::uint64_t seed) {
  if (samples < 1000) throw ArgumentError("mc_double_sum: at least 1000 samples required");
  std::vector<double> cum(mu.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) cum[i] = (acc += mu.weight(i));
  std::mt19937_64 rng(seed);
  auto draw = [&] {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), mu.size() - 1);
  };
  double s = 0.0, s2 = 0.0;
  for (std::size_t t = 0; t < samples; ++t) {
    const std::size_t i = draw(), j = draw();
    double f = 0.0;
    if (i != j) {
      const double d = distance(mu.atom(i), mu.atom(j));
      if (window.contains(d)) {
        f = naive_ball_mass(mu, mu.atom(i), d) / std::pow(d, 2.0 * params.alpha());
      }
    }
    s += f;
    s2 += f * f;
  }
  const double ns = static_cast<double>(samples);
  const double mean = s / ns;
  const double var = std::max(s2 / ns - mean * mean, 0.0) * ns / (ns - 1.0);
  const double scale = acc * acc;
  return {scale * mean, scale * std::sqrt(var / ns)};
}

}  // namespace rieszcap::oracles
