#pragma once

// Atomic measures with an explicit resolution, the corner-Cantor generator,
// closed-ball mass profiles and the maximal function M_alpha.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rieszcap/geometry.hpp"

namespace rieszcap {

/// Weighted atom cloud in R^n. Immutable after construction.
///
/// Invariants enforced by the constructor: atoms pairwise distinct, weights
/// nonnegative with positive total, and 0 < delta <= minimum pairwise atom
/// distance (delta is the scale below which the atomization is meaningless).
class DiscreteMeasure {
 public:
  /// `coords` holds size()*n values, atom-major.
  DiscreteMeasure(std::size_t n, std::vector<double> coords, std::vector<double> weights,
                  double delta);

  static DiscreteMeasure from_points(const std::vector<Point>& atoms,
                                     std::vector<double> weights, double delta);

  /// Builds a measure whose delta is the minimum pairwise atom distance (or
  /// `single_atom_delta` when there is only one atom).
  static DiscreteMeasure with_natural_delta(std::size_t n, std::vector<double> coords,
                                            std::vector<double> weights,
                                            double single_atom_delta = 1.0);

  std::size_t dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double delta() const noexcept { return delta_; }
  double total_mass() const noexcept { return total_mass_; }
  /// +inf for a single atom.
  double min_distance() const noexcept { return min_distance_; }

  std::span<const double> atom(std::size_t i) const {
    return {coords_.data() + i * n_, n_};
  }
  Point atom_point(std::size_t i) const;
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> coords() const noexcept { return coords_; }

  /// Largest pairwise distance, 0 for a single atom.
  double diameter() const;

  /// Same support, new weights.
  DiscreteMeasure with_weights(std::vector<double> weights) const;
  /// Atoms multiplied by `lambda` > 0 about the origin; delta scales too.
  DiscreteMeasure dilated(double lambda) const;
  DiscreteMeasure translated(std::span<const double> shift) const;
  /// Weights multiplied by c > 0.
  DiscreteMeasure mass_scaled(double c) const;
  /// Weights divided by the total mass.
  DiscreteMeasure normalized() const;
  /// Applies `map` to every atom; the caller supplies the new resolution.
  DiscreteMeasure mapped(const std::function<void(std::span<double>)>& map,
                         double new_delta) const;

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  std::size_t n_;
  std::vector<double> coords_;
  std::vector<double> weights_;
  double delta_;
  double total_mass_ = 0.0;
  double min_distance_ = std::numeric_limits<double>::infinity();
};

/// Minimum pairwise distance of a flat coordinate array; +inf below two atoms.
double min_pairwise_distance(std::size_t n, std::span<const double> coords);

/// Disjoint union; delta is the smaller of the two and must not exceed the
/// cross distances.
DiscreteMeasure measure_union(const DiscreteMeasure& a, const DiscreteMeasure& b);

std::vector<Point> atom_points(const DiscreteMeasure& mu);

inline constexpr std::size_t kDefaultMaxAtoms = 65536;

/// Corner Cantor construction: at every generation each cube is replaced by
/// its 2^n corner sub-cubes of relative side `lambda`.
struct CantorSpec {
  std::size_t n = 2;
  double lambda = 0.25;
  unsigned depth = 1;
  double base = 1.0;
  std::vector<double> offset;  // empty = origin
  std::size_t max_atoms = kDefaultMaxAtoms;

  /// Contraction ratio giving similarity dimension `dim` in R^n.
  static double ratio_for_dimension(std::size_t n, double dim);

  std::size_t pieces() const;
  double similarity_dimension() const;
  /// 2^(n*depth), saturating at SIZE_MAX.
  std::size_t atom_count() const;
  double cell_side() const;
  /// Throws ArgumentError for invalid parameters, SizeError over the cap.
  void validate() const;
};

/// Cell centres of the depth-m construction, each with weight 2^(-n m).
/// delta = base * lambda^m.
DiscreteMeasure generate_cantor(const CantorSpec& spec);

/// mu(B(x, r)) for closed balls as a step function of r.
struct BallProfile {
  std::vector<double> center;
  std::vector<double> breakpoints;  // strictly increasing radii
  std::vector<double> masses;       // cumulative mass at each breakpoint

  /// Closed-ball mass at radius r (0 below the first breakpoint).
  double mass_at(double r) const;
};

BallProfile ball_profile(const DiscreteMeasure& mu, std::span<const double> x);
BallProfile ball_profile(const DiscreteMeasure& mu, const Point& x);

/// sup_{r > 0} mu(B(x,r)) / r^alpha. +inf when x is an atom of positive weight.
double maximal_function(const DiscreteMeasure& mu, std::span<const double> x, double alpha);

/// Same supremum restricted to r_min <= r <= r_max, r_min > 0.
double truncated_maximal_function(const BallProfile& profile, double alpha, double r_min,
                                  double r_max = std::numeric_limits<double>::infinity());

/// Largest mu(B(x,r))/r^alpha over the samples x and radii r >= delta: the
/// alpha-growth constant observable at the measure's resolution.
double growth_constant(const DiscreteMeasure& mu, double alpha,
                       const std::vector<Point>& sample_points);

}  // namespace rieszcap
