#include "rieszcap/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rieszcap/error.hpp"

namespace rieszcap {

namespace {

// delta may exceed the computed minimum distance by rounding when both come
// from the same construction through different arithmetic.
constexpr double kDeltaSlack = 1e-12;

}  // namespace

double min_pairwise_distance(std::size_t n, std::span<const double> coords) {
  const std::size_t count = n == 0 ? 0 : coords.size() / n;
  double best = std::numeric_limits<double>::infinity();
  if (count < 2) return best;
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coords[a * n] < coords[b * n];
  });
  // Sweep along the first coordinate; pairs farther apart than the current
  // best in that coordinate alone cannot improve it.
  for (std::size_t a = 0; a < count; ++a) {
    const std::size_t i = order[a];
    for (std::size_t b = a + 1; b < count; ++b) {
      const std::size_t j = order[b];
      if (coords[j * n] - coords[i * n] >= best) break;
      const double d = distance(coords.subspan(i * n, n), coords.subspan(j * n, n));
      best = std::min(best, d);
    }
  }
  return best;
}

DiscreteMeasure::DiscreteMeasure(std::size_t n, std::vector<double> coords,
                                 std::vector<double> weights, double delta)
    : n_(n), coords_(std::move(coords)), weights_(std::move(weights)), delta_(delta) {
  if (n_ == 0) throw ArgumentError("measure dimension must be positive");
  if (weights_.empty()) throw ArgumentError("measure must have at least one atom");
  if (coords_.size() != weights_.size() * n_) {
    throw ArgumentError("measure coordinate count does not match atoms x dimension");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw DomainError("measure atom coordinate is not finite");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw DomainError("measure weights must be finite and nonnegative");
    }
    total_mass_ += w;
  }
  if (!(total_mass_ > 0.0)) throw DomainError("measure total mass must be positive");
  if (!(delta_ > 0.0) || !std::isfinite(delta_)) {
    throw DomainError("measure resolution delta must be positive and finite");
  }
  min_distance_ = min_pairwise_distance(n_, coords_);
  if (min_distance_ <= kCoincidenceDistance) throw DomainError("measure atoms coincide");
  if (delta_ > min_distance_ * (1.0 + kDeltaSlack)) {
    throw DomainError("measure resolution delta exceeds the minimum atom distance");
  }
}

DiscreteMeasure DiscreteMeasure::from_points(const std::vector<Point>& atoms,
                                             std::vector<double> weights, double delta) {
  if (atoms.empty()) throw ArgumentError("measure must have at least one atom");
  const std::size_t n = atoms.front().dim();
  std::vector<double> coords;
  coords.reserve(atoms.size() * n);
  for (const auto& p : atoms) {
    if (p.dim() != n) throw ArgumentError("measure atoms must share one dimension");
    coords.insert(coords.end(), p.coords().begin(), p.coords().end());
  }
  return DiscreteMeasure(n, std::move(coords), std::move(weights), delta);
}

DiscreteMeasure DiscreteMeasure::with_natural_delta(std::size_t n, std::vector<double> coords,
                                                    std::vector<double> weights,
                                                    double single_atom_delta) {
  if (n == 0) throw ArgumentError("measure dimension must be positive");
  double delta = min_pairwise_distance(n, coords);
  if (!std::isfinite(delta)) delta = single_atom_delta;
  return DiscreteMeasure(n, std::move(coords), std::move(weights), delta);
}

Point DiscreteMeasure::atom_point(std::size_t i) const {
  auto a = atom(i);
  return Point(std::vector<double>(a.begin(), a.end()));
}

double DiscreteMeasure::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) {
      best = std::max(best, squared_distance(atom(i), atom(j)));
    }
  }
  return std::sqrt(best);
}

DiscreteMeasure DiscreteMeasure::with_weights(std::vector<double> weights) const {
  return DiscreteMeasure(n_, coords_, std::move(weights), delta_);
}

DiscreteMeasure DiscreteMeasure::dilated(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError("dilation factor must be positive");
  }
  std::vector<double> c = coords_;
  for (double& v : c) v *= lambda;
  return DiscreteMeasure(n_, std::move(c), weights_, delta_ * lambda);
}

DiscreteMeasure DiscreteMeasure::translated(std::span<const double> shift) const {
  if (shift.size() != n_) throw ArgumentError("translation dimension mismatch");
  std::vector<double> c = coords_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += shift[i % n_];
  return DiscreteMeasure(n_, std::move(c), weights_, delta_);
}

DiscreteMeasure DiscreteMeasure::mass_scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("mass factor must be positive");
  std::vector<double> w = weights_;
  for (double& v : w) v *= c;
  return DiscreteMeasure(n_, coords_, std::move(w), delta_);
}

DiscreteMeasure DiscreteMeasure::normalized() const {
  std::vector<double> w = weights_;
  for (double& v : w) v /= total_mass_;
  return DiscreteMeasure(n_, coords_, std::move(w), delta_);
}

DiscreteMeasure DiscreteMeasure::mapped(const std::function<void(std::span<double>)>& map,
                                        double new_delta) const {
  std::vector<double> c = coords_;
  for (std::size_t i = 0; i < size(); ++i) map(std::span<double>(c.data() + i * n_, n_));
  return DiscreteMeasure(n_, std::move(c), weights_, new_delta);
}

DiscreteMeasure measure_union(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim()) throw ArgumentError("measure_union: dimension mismatch");
  std::vector<double> c(a.coords().begin(), a.coords().end());
  c.insert(c.end(), b.coords().begin(), b.coords().end());
  std::vector<double> w(a.weights().begin(), a.weights().end());
  w.insert(w.end(), b.weights().begin(), b.weights().end());
  return DiscreteMeasure(a.dim(), std::move(c), std::move(w), std::min(a.delta(), b.delta()));
}

std::vector<Point> atom_points(const DiscreteMeasure& mu) {
  std::vector<Point> out;
  out.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) out.push_back(mu.atom_point(i));
  return out;
}

// --- Cantor ---------------------------------------------------------------

double CantorSpec::ratio_for_dimension(std::size_t n, double dim) {
  if (n == 0 || !(dim > 0.0)) throw ArgumentError("similarity dimension must be positive");
  return std::pow(2.0, -static_cast<double>(n) / dim);
}

std::size_t CantorSpec::pieces() const { return std::size_t{1} << n; }

double CantorSpec::similarity_dimension() const {
  return static_cast<double>(n) * std::log(2.0) / std::log(1.0 / lambda);
}

std::size_t CantorSpec::atom_count() const {
  const std::size_t bits = n * depth;
  if (bits >= 63) return std::numeric_limits<std::size_t>::max();
  return std::size_t{1} << bits;
}

double CantorSpec::cell_side() const {
  double side = base;
  for (unsigned g = 0; g < depth; ++g) side *= lambda;
  return side;
}

void CantorSpec::validate() const {
  if (n == 0 || n > 16) throw ArgumentError("cantor: dimension must be in [1, 16]");
  if (!(lambda > 0.0 && lambda <= 0.5)) throw ArgumentError("cantor: ratio must lie in (0, 1/2]");
  if (!(base > 0.0) || !std::isfinite(base)) throw ArgumentError("cantor: base side must be positive");
  if (!offset.empty() && offset.size() != n) throw ArgumentError("cantor: offset dimension mismatch");
  if (atom_count() > max_atoms) {
    throw SizeError("cantor: " + std::to_string(pieces()) + "^" + std::to_string(depth) +
                    " atoms exceeds the cap of " + std::to_string(max_atoms));
  }
  if (!(cell_side() > 0.0)) throw ArgumentError("cantor: cell side underflows");
}

DiscreteMeasure generate_cantor(const CantorSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t pieces = spec.pieces();
  std::vector<double> corners(spec.offset.empty() ? std::vector<double>(n, 0.0) : spec.offset);
  double side = spec.base;
  for (unsigned g = 0; g < spec.depth; ++g) {
    const double child = side * spec.lambda;
    const double shift = side - child;
    const std::size_t count = corners.size() / n;
    std::vector<double> next;
    next.reserve(count * pieces * n);
    for (std::size_t c = 0; c < count; ++c) {
      for (std::size_t b = 0; b < pieces; ++b) {
        for (std::size_t d = 0; d < n; ++d) {
          next.push_back(corners[c * n + d] + (((b >> d) & 1u) ? shift : 0.0));
        }
      }
    }
    corners = std::move(next);
    side = child;
  }
  for (double& v : corners) v += 0.5 * side;
  const std::size_t count = corners.size() / n;
  std::vector<double> weights(count, 1.0 / static_cast<double>(count));
  return DiscreteMeasure(n, std::move(corners), std::move(weights), side);
}

// --- ball profiles --------------------------------------------------------

double BallProfile::mass_at(double r) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), r);
  if (it == breakpoints.begin()) return 0.0;
  return masses[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

BallProfile ball_profile(const DiscreteMeasure& mu, std::span<const double> x) {
  if (x.size() != mu.dim()) throw ArgumentError("ball_profile: dimension mismatch");
  std::vector<std::pair<double, double>> dw;
  dw.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    dw.emplace_back(distance(x, mu.atom(i)), mu.weight(i));
  }
  std::sort(dw.begin(), dw.end());
  BallProfile prof;
  prof.center.assign(x.begin(), x.end());
  double cum = 0.0;
  for (const auto& [d, w] : dw) {
    cum += w;
    if (!prof.breakpoints.empty() && prof.breakpoints.back() == d) {
      prof.masses.back() = cum;
    } else {
      prof.breakpoints.push_back(d);
      prof.masses.push_back(cum);
    }
  }
  return prof;
}

BallProfile ball_profile(const DiscreteMeasure& mu, const Point& x) {
  return ball_profile(mu, x.coords());
}

double maximal_function(const DiscreteMeasure& mu, std::span<const double> x, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("maximal_function: alpha must be positive");
  const BallProfile prof = ball_profile(mu, x);
  double best = 0.0;
  for (std::size_t j = 0; j < prof.breakpoints.size(); ++j) {
    const double r = prof.breakpoints[j];
    if (r <= kCoincidenceDistance) {
      if (prof.masses[j] > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    best = std::max(best, prof.masses[j] / std::pow(r, alpha));
  }
  return best;
}

double truncated_maximal_function(const BallProfile& profile, double alpha, double r_min,
                                  double r_max) {
  if (!(r_min > 0.0)) throw DomainError("truncated maximal function needs r_min > 0");
  double best = profile.mass_at(r_min) / std::pow(r_min, alpha);
  for (std::size_t j = 0; j < profile.breakpoints.size(); ++j) {
    const double r = profile.breakpoints[j];
    if (r <= r_min) continue;
    if (r > r_max) break;
    best = std::max(best, profile.masses[j] / std::pow(r, alpha));
  }
  return best;
}

double growth_constant(const DiscreteMeasure& mu, double alpha,
                       const std::vector<Point>& sample_points) {
  if (sample_points.empty()) throw ArgumentError("growth_constant: empty sample set");
  if (!(alpha > 0.0)) throw DomainError("growth_constant: alpha must be positive");
  double best = 0.0;
  for (const auto& x : sample_points) {
    best = std::max(best, truncated_maximal_function(ball_profile(mu, x), alpha, mu.delta()));
  }
  return best;
}

}  // namespace rieszcap
