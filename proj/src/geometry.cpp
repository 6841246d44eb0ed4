#include "rieszcap/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <string>

#include "rieszcap/error.hpp"

namespace rieszcap {

namespace {

std::atomic<double> g_fault_scale{1.0};

void check_coords(const std::vector<double>& coords) {
  if (coords.empty()) throw ArgumentError("point must have at least one coordinate");
  for (double c : coords) {
    if (!std::isfinite(c)) throw DomainError("point coordinate is not finite");
  }
}

// k(b - a) . k(c - a), accumulated in extended precision: the cyclic sum
// cancels heavily for nearly collinear triples when alpha is close to 1.
long double centered_term(std::span<const double> a, std::span<const double> b,
                          std::span<const double> c, double alpha) {
  long double ab2 = 0.0L, ac2 = 0.0L, dot = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double u = static_cast<long double>(b[i]) - a[i];
    const long double v = static_cast<long double>(c[i]) - a[i];
    ab2 += u * u;
    ac2 += v * v;
    dot += u * v;
  }
  const long double ab = std::sqrt(ab2);
  const long double ac = std::sqrt(ac2);
  if (ab <= kCoincidenceDistance || ac <= kCoincidenceDistance) {
    throw DomainError("p_alpha: coincident points");
  }
  const long double e = 1.0L + alpha;
  return dot / (std::pow(ab, e) * std::pow(ac, e));
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  check_coords(coords_);
}

Point::Point(std::initializer_list<double> coords) : coords_(coords) {
  check_coords(coords_);
}

Point Point::axis(std::size_t n, std::size_t axis, double scale) {
  std::vector<double> c(n, 0.0);
  c.at(axis) = scale;
  return Point(std::move(c));
}

Point Point::origin(std::size_t n) { return Point(std::vector<double>(n, 0.0)); }

KernelParams::KernelParams(double alpha, std::size_t n) : alpha_(alpha), n_(n) {
  if (n == 0) throw ArgumentError("ambient dimension must be positive");
  if (!(alpha > 0.0) || !(alpha < static_cast<double>(n))) {
    throw DomainError("alpha must satisfy 0 < alpha < n, got " + std::to_string(alpha));
  }
}

void KernelParams::require_unit_range() const {
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) {
    throw DomainError("operation requires 0 < alpha < 1, got " + std::to_string(alpha_));
  }
}

Triple::Triple(Point x1, Point x2, Point x3)
    : pts_{std::move(x1), std::move(x2), std::move(x3)} {
  if (pts_[1].dim() != pts_[0].dim() || pts_[2].dim() != pts_[0].dim()) {
    throw ArgumentError("triple points must share one dimension");
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (distance(pts_[i].coords(), pts_[j].coords()) <= kCoincidenceDistance) {
        throw DomainError("triple has coincident points");
      }
    }
  }
}

double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

std::vector<double> riesz_kernel(std::span<const double> x, double alpha) {
  const double r = euclidean_norm(x);
  if (r <= kCoincidenceDistance) throw DomainError("riesz_kernel: zero vector");
  const double scale = 1.0 / std::pow(r, 1.0 + alpha);
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> riesz_kernel(const Point& x, const KernelParams& params) {
  if (x.dim() != params.n()) throw ArgumentError("riesz_kernel: dimension mismatch");
  return riesz_kernel(x.coords(), params.alpha());
}

double largest_side(const Triple& t) {
  return std::max({distance(t[0].coords(), t[1].coords()),
                   distance(t[1].coords(), t[2].coords()),
                   distance(t[0].coords(), t[2].coords())});
}

double p_alpha(std::span<const double> x1, std::span<const double> x2,
               std::span<const double> x3, double alpha) {
  const long double s = centered_term(x1, x2, x3, alpha) +
                        centered_term(x2, x3, x1, alpha) +
                        centered_term(x3, x1, x2, alpha);
  return static_cast<double>(s) * g_fault_scale.load(std::memory_order_relaxed);
}

double p_alpha(const Triple& t, const KernelParams& params) {
  if (t.dim() != params.n()) throw ArgumentError("p_alpha: dimension mismatch");
  return p_alpha(t[0].coords(), t[1].coords(), t[2].coords(), params.alpha());
}

double p_alpha_six_permutation_sum(const Triple& t, const KernelParams& params) {
  static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                       {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  long double s = 0.0L;
  for (const auto& p : kPerms) {
    s += centered_term(t[p[0]].coords(), t[p[1]].coords(), t[p[2]].coords(),
                       params.alpha());
  }
  return static_cast<double>(s);
}

double menger_curvature_sq(const Triple& t) {
  if (t.dim() != 2) throw ArgumentError("menger_curvature_sq: points must be planar");
  const double a = distance(t[0].coords(), t[1].coords());
  const double b = distance(t[1].coords(), t[2].coords());
  const double c = distance(t[0].coords(), t[2].coords());
  const double scale = std::max({a, b, c});
  // Area from the cross product rather than Heron: Heron loses all relative
  // accuracy on needle-like triangles.
  const long double ux = static_cast<long double>(t[1][0]) - t[0][0];
  const long double uy = static_cast<long double>(t[1][1]) - t[0][1];
  const long double vx = static_cast<long double>(t[2][0]) - t[0][0];
  const long double vy = static_cast<long double>(t[2][1]) - t[0][1];
  const double area = static_cast<double>(0.5L * std::fabs(ux * vy - uy * vx));
  if (area < 1e-14 * scale * scale) return 0.0;
  // R = abc / (4 area)
  const double curv = 4.0 * area / (a * b * c);
  return curv * curv;
}

double menger_permutation_sum(const Triple& t) {
  if (t.dim() != 2) throw ArgumentError("menger_permutation_sum: points must be planar");
  static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                       {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::complex<long double> z[3];
  for (int i = 0; i < 3; ++i) z[i] = {t[i][0], t[i][1]};
  std::complex<long double> sum{0.0L, 0.0L};
  for (const auto& p : kPerms) {
    sum += 1.0L / ((z[p[0]] - z[p[2]]) * std::conj(z[p[1]] - z[p[2]]));
  }
  return static_cast<double>(sum.real());
}

namespace testing_hooks {
void set_p_alpha_fault_scale(double scale) { g_fault_scale.store(scale); }
double p_alpha_fault_scale() { return g_fault_scale.load(); }
}  // namespace testing_hooks

}  // namespace rieszcap
