#pragma once

// Pointwise kernel quantities: the vector Riesz kernel x/|x|^(1+alpha), the
// three-point symmetrization p_alpha, Menger curvature and the largest side
// of a triangle.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rieszcap {

/// Distances at or below this value are treated as coincident points.
inline constexpr double kCoincidenceDistance = 1e-300;

/// A location in R^n with finite coordinates, n >= 1.
class Point {
 public:
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  /// Unit vector e_axis in R^n scaled by `scale`.
  static Point axis(std::size_t n, std::size_t axis, double scale = 1.0);
  static Point origin(std::size_t n);

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

/// Exponent alpha and ambient dimension n of the Riesz kernel. Construction
/// enforces 0 < alpha < n.
class KernelParams {
 public:
  KernelParams(double alpha, std::size_t n);

  double alpha() const noexcept { return alpha_; }
  std::size_t n() const noexcept { return n_; }

  /// Throws DomainError unless 0 < alpha < 1 (positivity and capacity range).
  void require_unit_range() const;

 private:
  double alpha_;
  std::size_t n_;
};

/// Three pairwise distinct points of equal dimension.
class Triple {
 public:
  Triple(Point x1, Point x2, Point x3);

  const Point& operator[](std::size_t i) const { return pts_[i]; }
  std::size_t dim() const noexcept { return pts_[0].dim(); }

 private:
  Point pts_[3];
};

double euclidean_norm(std::span<const double> x);
double distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// k_alpha(x) = x / |x|^(1+alpha). Throws DomainError for x = 0.
std::vector<double> riesz_kernel(std::span<const double> x, double alpha);
std::vector<double> riesz_kernel(const Point& x, const KernelParams& params);

/// Largest of the three pairwise distances.
double largest_side(const Triple& t);

/// Cyclic sum over (1,2,3), (2,3,1), (3,1,2) of
/// k(x_b - x_a) . k(x_c - x_a). Half of the six-permutation sum.
double p_alpha(const Triple& t, const KernelParams& params);
double p_alpha(std::span<const double> x1, std::span<const double> x2,
               std::span<const double> x3, double alpha);

/// Sum of k(x_s2 - x_s1) . k(x_s3 - x_s1) over all six permutations s.
double p_alpha_six_permutation_sum(const Triple& t, const KernelParams& params);

/// Squared inverse circumradius of a planar triple; 0 when collinear.
double menger_curvature_sq(const Triple& t);

/// Sum over the six permutations of 1 / ((z_s1 - z_s3) conj(z_s2 - z_s3)),
/// taking z = x + iy. The imaginary parts cancel; the real part is returned.
double menger_permutation_sum(const Triple& t);

namespace testing_hooks {
/// Multiplies every p_alpha evaluation by `scale`. Only for mutation checks
/// of the verification battery; 1.0 restores normal behaviour.
void set_p_alpha_fault_scale(double scale);
double p_alpha_fault_scale();
}  // namespace testing_hooks

}  // namespace rieszcap
