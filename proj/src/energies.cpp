#include "rieszcap/energies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rieszcap/error.hpp"
#include "rieszcap/parallel.hpp"

namespace rieszcap {

namespace {

constexpr std::size_t kMaxChunks = 64;

std::size_t chunk_count(std::size_t n) { return std::max<std::size_t>(1, std::min(n, kMaxChunks)); }

void check_dim(const DiscreteMeasure& mu, std::size_t n, const char* what) {
  if (mu.dim() != n) throw ArgumentError(std::string(what) + ": dimension mismatch");
}

template <std::size_t D>
inline double dot(const double* a, const double* b, std::size_t n) {
  if constexpr (D == 0) {
    double s = 0.0;
    for (std::size_t d = 0; d < n; ++d) s += a[d] * b[d];
    return s;
  } else {
    double s = 0.0;
    for (std::size_t d = 0; d < D; ++d) s += a[d] * b[d];
    return s;
  }
}

// k(b - a) written into out; returns |b - a|.
inline double kernel_into(std::span<const double> a, std::span<const double> b, double alpha,
                          double* out) {
  double r2 = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    out[d] = b[d] - a[d];
    r2 += out[d] * out[d];
  }
  const double r = std::sqrt(r2);
  const double scale = 1.0 / std::pow(r, 1.0 + alpha);
  for (std::size_t d = 0; d < a.size(); ++d) out[d] *= scale;
  return r;
}

// Integral of r^(-kappa-1) over [a, b], b possibly infinite.
inline double radial_piece(double a, double b, double kappa) {
  if (!(a < b)) return 0.0;
  const double fa = std::pow(a, -kappa);
  const double fb = std::isinf(b) ? 0.0 : std::pow(b, -kappa);
  return (fa - fb) / kappa;
}

}  // namespace

// --- windows and exponents ------------------------------------------------

TruncationWindow::TruncationWindow(double eps_, double r_out_) : eps(eps_), r_out(r_out_) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ArgumentError("window: eps must be positive");
  if (!(r_out > eps)) throw ArgumentError("window: outer radius must exceed eps");
}

TruncationWindow TruncationWindow::for_measure(const DiscreteMeasure& mu) {
  return TruncationWindow(mu.delta());
}

TruncationWindow TruncationWindow::scaled(double lambda) const {
  return TruncationWindow(eps * lambda, has_outer() ? r_out * lambda : r_out);
}

WolffExponents::WolffExponents(double s, double p, std::size_t n) : s_(s), p_(p), n_(n) {
  if (n == 0) throw ArgumentError("wolff exponents: dimension must be positive");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("wolff exponents: need 1 < p < inf");
  const double sp = s * p;
  if (!(sp > 0.0) || sp > static_cast<double>(n) * (1.0 + 1e-15)) {
    throw DomainError("wolff exponents: need 0 < s p <= n");
  }
}

WolffExponents WolffExponents::for_alpha(double alpha, std::size_t n) {
  return WolffExponents(2.0 / 3.0 * (static_cast<double>(n) - alpha), 1.5, n);
}

// --- Riesz transforms -----------------------------------------------------

std::vector<double> truncated_riesz_transform(const DiscreteMeasure& mu,
                                              std::span<const double> x,
                                              const KernelParams& params,
                                              const TruncationWindow& window) {
  check_dim(mu, params.n(), "truncated_riesz_transform");
  if (x.size() != mu.dim()) throw ArgumentError("truncated_riesz_transform: point dimension");
  const std::size_t n = mu.dim();
  std::vector<double> out(n, 0.0), k(n);
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (!window.contains(distance(x, mu.atom(j)))) continue;
    kernel_into(x, mu.atom(j), params.alpha(), k.data());
    for (std::size_t d = 0; d < n; ++d) out[d] += mu.weight(j) * k[d];
  }
  return out;
}

double riesz_l2_energy(const DiscreteMeasure& mu, const KernelParams& params,
                       const TruncationWindow& window) {
  check_dim(mu, params.n(), "riesz_l2_energy");
  const std::size_t count = mu.size();
  std::vector<double> per_atom(count, 0.0);
  const std::size_t chunks = chunk_count(count);
  run_chunks(chunks, [&](std::size_t c) {
    for (std::size_t i = c; i < count; i += chunks) {
      const auto r = truncated_riesz_transform(mu, mu.atom(i), params, window);
      per_atom[i] = dot<0>(r.data(), r.data(), r.size());
    }
  });
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) total += mu.weight(i) * per_atom[i];
  return total;
}

double sup_riesz_l2_energy(const DiscreteMeasure& mu, const KernelParams& params,
                           const TruncationWindow& window) {
  const double diam = mu.diameter();
  double best = riesz_l2_energy(mu, params, window);
  TruncationWindow w = window;
  for (int k = 1; k < 64; ++k) {
    w.eps *= 2.0;
    if (w.eps >= diam || !(w.r_out > w.eps)) break;
    best = std::max(best, riesz_l2_energy(mu, params, w));
  }
  return best;
}

// --- pair table and triple sums -------------------------------------------

PairTable::PairTable(const DiscreteMeasure& support, const KernelParams& params,
                     const TruncationWindow& window)
    : count_(support.size()), n_(support.dim()) {
  check_dim(support, params.n(), "PairTable");
  const std::size_t pairs = count_ * (count_ - 1) / 2;
  kernels_.assign(pairs * n_, 0.0);
  visible_.assign(pairs, 0);
  for (std::size_t i = 0; i < count_; ++i) {
    for (std::size_t j = i + 1; j < count_; ++j) {
      const std::size_t idx = index(i, j);
      const double r =
          kernel_into(support.atom(i), support.atom(j), params.alpha(), kernels_.data() + idx * n_);
      visible_[idx] = window.contains(r) ? 1 : 0;
    }
  }
}

namespace {

template <std::size_t D>
void triple_chunk(const PairTable& t, std::span<const double> w, std::span<const double> u,
                  bool with_acc, std::size_t first, std::size_t stride, double& total,
                  std::vector<double>& acc) {
  const std::size_t count = t.size();
  const std::size_t n = t.dim();
  for (std::size_t i = first; i < count; i += stride) {
    for (std::size_t j = i + 1; j + 1 < count; ++j) {
      if (!t.visible(i, j)) continue;
      const double* a = t.kernel(i, j);
      const double* row_i = t.kernel(i, j + 1);
      const double* row_j = t.kernel(j, j + 1);
      const std::uint8_t* vis_i = t.visible_row(i, j + 1);
      const std::uint8_t* vis_j = t.visible_row(j, j + 1);
      double s1 = 0.0, s2 = 0.0;
      const double cij = u[i] * w[j] + u[j] * w[i];
      for (std::size_t k = j + 1; k < count; ++k) {
        const std::size_t off = k - j - 1;
        if (!(vis_i[off] & vis_j[off])) continue;
        const double* ki = row_i + off * n;
        const double* kj = row_j + off * n;
        const double p = dot<D>(a, ki, n) - dot<D>(a, kj, n) + dot<D>(ki, kj, n);
        s1 += w[k] * p;
        if (with_acc) {
          s2 += u[k] * p;
          acc[k] += cij * p;
        }
      }
      total += w[i] * w[j] * s1;
      if (with_acc) {
        acc[i] += u[j] * s1 + w[j] * s2;
        acc[j] += u[i] * s1 + w[i] * s2;
      }
    }
  }
}

}  // namespace

TripleSums triple_sums(const PairTable& table, std::span<const double> w,
                       std::span<const double> u, bool with_per_atom) {
  const std::size_t count = table.size();
  if (w.size() != count || u.size() != count) {
    throw ArgumentError("triple_sums: weight vector length mismatch");
  }
  const std::size_t chunks = chunk_count(count);
  std::vector<double> totals(chunks, 0.0);
  std::vector<std::vector<double>> accs(chunks);
  run_chunks(chunks, [&](std::size_t c) {
    if (with_per_atom) accs[c].assign(count, 0.0);
    switch (table.dim()) {
      case 1: triple_chunk<1>(table, w, u, with_per_atom, c, chunks, totals[c], accs[c]); break;
      case 2: triple_chunk<2>(table, w, u, with_per_atom, c, chunks, totals[c], accs[c]); break;
      case 3: triple_chunk<3>(table, w, u, with_per_atom, c, chunks, totals[c], accs[c]); break;
      default: triple_chunk<0>(table, w, u, with_per_atom, c, chunks, totals[c], accs[c]);
    }
  });
  TripleSums out;
  for (double t : totals) out.total += t;
  out.total *= 6.0;  // each unordered triple stands for its 6 orderings
  if (with_per_atom) {
    out.per_atom.assign(count, 0.0);
    for (const auto& a : accs) {
      for (std::size_t k = 0; k < count; ++k) out.per_atom[k] += a[k];
    }
  }
  return out;
}

double p_alpha_energy(const DiscreteMeasure& mu, const KernelParams& params,
                      const TruncationWindow& window) {
  const PairTable table(mu, params, window);
  return triple_sums(table, mu.weights(), mu.weights(), false).total;
}

std::vector<double> atom_p_potentials(const DiscreteMeasure& mu, const KernelParams& params,
                                      const TruncationWindow& window) {
  const PairTable table(mu, params, window);
  return triple_sums(table, mu.weights(), mu.weights(), true).per_atom;
}

double pointwise_p_potential(const DiscreteMeasure& mu, std::span<const double> x,
                             const KernelParams& params, const TruncationWindow& window) {
  params.require_unit_range();
  check_dim(mu, params.n(), "pointwise_p_potential");
  if (x.size() != mu.dim()) throw ArgumentError("pointwise_p_potential: point dimension");
  const std::size_t n = mu.dim();
  std::vector<std::size_t> seen;
  std::vector<double> from_x;  // k(x_j - x) for the visible atoms
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (!window.contains(distance(x, mu.atom(j)))) continue;
    seen.push_back(j);
    from_x.resize(seen.size() * n);
    kernel_into(x, mu.atom(j), params.alpha(), from_x.data() + (seen.size() - 1) * n);
  }
  std::vector<double> b(n);
  double sum = 0.0;
  for (std::size_t a = 0; a < seen.size(); ++a) {
    const double* ka = from_x.data() + a * n;
    for (std::size_t c = a + 1; c < seen.size(); ++c) {
      const std::size_t j = seen[a], k = seen[c];
      const double r = kernel_into(mu.atom(j), mu.atom(k), params.alpha(), b.data());
      if (!window.contains(r)) continue;
      const double* kc = from_x.data() + c * n;
      // p(x, x_j, x_k) with k(x - x_j) = -ka, k(x_j - x_k) = -b, k(x - x_k) = -kc
      const double p = dot<0>(ka, kc, n) - dot<0>(b.data(), ka, n) + dot<0>(kc, b.data(), n);
      sum += mu.weight(j) * mu.weight(k) * p;
    }
  }
  return 2.0 * sum;
}

// --- decomposition --------------------------------------------------------

Decomposition symmetrization_decomposition(const DiscreteMeasure& mu,
                                           const KernelParams& params,
                                           const TruncationWindow& window) {
  Decomposition out;
  out.lhs = 3.0 * riesz_l2_energy(mu, params, window);
  out.p_part = p_alpha_energy(mu, params, window);

  const std::size_t count = mu.size();
  const std::size_t n = mu.dim();
  const double alpha = params.alpha();
  // j = k: w_i w_j^2 |k(x_j - x_i)|^2 = w_i w_j^2 |x_j - x_i|^(-2 alpha).
  double diagonal = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      const double r = distance(mu.atom(i), mu.atom(j));
      if (!window.contains(r)) continue;
      diagonal += mu.weight(i) * mu.weight(j) * mu.weight(j) * std::pow(r, -2.0 * alpha);
    }
  }
  // j != k outside the window of each other, both inside the window of x_i.
  std::vector<std::pair<std::size_t, std::size_t>> excluded;
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t k = j + 1; k < count; ++k) {
      if (!window.contains(distance(mu.atom(j), mu.atom(k)))) excluded.emplace_back(j, k);
    }
  }
  double cross = 0.0;
  std::vector<double> kj(n), kk(n);
  for (const auto& [j, k] : excluded) {
    for (std::size_t i = 0; i < count; ++i) {
      if (i == j || i == k) continue;
      if (!window.contains(distance(mu.atom(i), mu.atom(j))) ||
          !window.contains(distance(mu.atom(i), mu.atom(k)))) {
        continue;
      }
      kernel_into(mu.atom(i), mu.atom(j), alpha, kj.data());
      kernel_into(mu.atom(i), mu.atom(k), alpha, kk.data());
      // ordered pairs (j, k) and (k, j) contribute equally
      cross += 2.0 * mu.weight(i) * mu.weight(j) * mu.weight(k) * dot<0>(kj.data(), kk.data(), n);
    }
  }
  out.residual = 3.0 * (diagonal + cross);
  return out;
}

double ball_double_sum(const DiscreteMeasure& mu, const KernelParams& params,
                       const TruncationWindow& window) {
  check_dim(mu, params.n(), "ball_double_sum");
  const std::size_t count = mu.size();
  std::vector<double> per_atom(count, 0.0);
  const std::size_t chunks = chunk_count(count);
  run_chunks(chunks, [&](std::size_t c) {
    for (std::size_t i = c; i < count; i += chunks) {
      const BallProfile prof = ball_profile(mu, mu.atom(i));
      double s = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        if (j == i) continue;
        const double r = distance(mu.atom(i), mu.atom(j));
        if (!window.contains(r)) continue;
        s += mu.weight(j) * prof.mass_at(r) / std::pow(r, 2.0 * params.alpha());
      }
      per_atom[i] = s;
    }
  });
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) total += mu.weight(i) * per_atom[i];
  return total;
}

// --- Wolff ----------------------------------------------------------------

double wolff_potential(const BallProfile& profile, const WolffExponents& exps,
                       const TruncationWindow& window) {
  const double kappa = exps.decay();
  if (!(kappa > 0.0)) {
    throw UnsupportedExponentError("wolff_potential: (n - sp)(p' - 1) must be positive");
  }
  const double q = exps.dual_exp();
  const auto& b = profile.breakpoints;
  double total = 0.0;
  for (std::size_t t = 0; t < b.size(); ++t) {
    const double m = profile.masses[t];
    if (m <= 0.0) continue;
    const double lo = std::max(window.eps, b[t]);
    const double hi = std::min(window.r_out, t + 1 < b.size() ? b[t + 1]
                                                              : std::numeric_limits<double>::infinity());
    if (!(lo < hi)) continue;
    total += std::pow(m, q) * radial_piece(lo, hi, kappa);
  }
  return total;
}

double wolff_potential(const DiscreteMeasure& mu, std::span<const double> x,
                       const WolffExponents& exps, const TruncationWindow& window) {
  if (exps.n() != mu.dim()) throw ArgumentError("wolff_potential: dimension mismatch");
  return wolff_potential(ball_profile(mu, x), exps, window);
}

std::vector<double> atom_wolff_potentials(const DiscreteMeasure& mu, const WolffExponents& exps,
                                          const TruncationWindow& window) {
  if (exps.n() != mu.dim()) throw ArgumentError("wolff_energy: dimension mismatch");
  if (!(exps.decay() > 0.0)) {
    throw UnsupportedExponentError("wolff_energy: (n - sp)(p' - 1) must be positive");
  }
  const std::size_t count = mu.size();
  std::vector<double> out(count, 0.0);
  const std::size_t chunks = chunk_count(count);
  run_chunks(chunks, [&](std::size_t c) {
    for (std::size_t i = c; i < count; i += chunks) {
      out[i] = wolff_potential(ball_profile(mu, mu.atom(i)), exps, window);
    }
  });
  return out;
}

double wolff_energy(const DiscreteMeasure& mu, const WolffExponents& exps,
                    const TruncationWindow& window) {
  const auto pot = atom_wolff_potentials(mu, exps, window);
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) total += mu.weight(i) * pot[i];
  return total;
}

// --- E_alpha --------------------------------------------------------------

std::vector<double> atom_maximal_functions(const DiscreteMeasure& mu, double alpha,
                                           const TruncationWindow& window) {
  const std::size_t count = mu.size();
  std::vector<double> out(count, 0.0);
  const std::size_t chunks = chunk_count(count);
  run_chunks(chunks, [&](std::size_t c) {
    for (std::size_t i = c; i < count; i += chunks) {
      out[i] = truncated_maximal_function(ball_profile(mu, mu.atom(i)), alpha, window.eps,
                                          window.r_out);
    }
  });
  return out;
}

double tolsa_energy(const DiscreteMeasure& mu, const KernelParams& params,
                    const TruncationWindow& window) {
  params.require_unit_range();
  const auto pp = atom_p_potentials(mu, params, window);
  const auto m = atom_maximal_functions(mu, params.alpha(), window);
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    total += mu.weight(i) * (m[i] + std::sqrt(std::max(pp[i], 0.0)));
  }
  return total;
}

EnergyReport energy_report(const DiscreteMeasure& mu, double alpha,
                           const TruncationWindow& window) {
  const KernelParams params(alpha, mu.dim());
  params.require_unit_range();
  EnergyReport rep;
  rep.n = mu.dim();
  rep.atoms = mu.size();
  rep.alpha = alpha;
  rep.window = window;

  const PairTable table(mu, params, window);
  const TripleSums sums = triple_sums(table, mu.weights(), mu.weights(), true);
  rep.p_alpha_energy = sums.total;
  rep.riesz_l2_energy = riesz_l2_energy(mu, params, window);
  rep.sup_riesz_l2 = sup_riesz_l2_energy(mu, params, window);
  rep.wolff_energy = wolff_energy(mu, WolffExponents::for_alpha(alpha, mu.dim()), window);
  const auto m = atom_maximal_functions(mu, alpha, window);
  rep.max_m_alpha = *std::max_element(m.begin(), m.end());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    rep.e_alpha += mu.weight(i) * (m[i] + std::sqrt(std::max(sums.per_atom[i], 0.0)));
  }
  return rep;
}

}  // namespace rieszcap
