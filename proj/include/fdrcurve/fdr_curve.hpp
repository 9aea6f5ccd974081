#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fdrcurve/distributions.hpp"

namespace fdrcurve {

/// One target constraint: control the FDR at level `level` for every
/// location >= `theta`.
struct Constraint {
  double theta = 0.0;
  double level = 1.0;  // in (0, 1]
};

/// The user-specified target curve q: a right-continuous, non-increasing
/// step function equal to 1 left of the first jump and to the smallest
/// applicable constraint level elsewhere.
class TargetCurve {
 public:
  TargetCurve() = default;  // degenerate: no jumps, q == 1 everywhere

  /// Normalizes a constraint list: sorts by location, keeps the minimum level
  /// per location, drops vacuous level-1 constraints and any constraint made
  /// redundant by an earlier one at the same or lower level.
  /// Throws std::domain_error on an empty list or a level outside (0, 1].
  static TargetCurve from_constraints(std::vector<Constraint> constraints);

  /// q(theta) = inf{level_j : theta_j <= theta}, empty inf = 1.
  double operator()(double theta) const;

  /// Normalized jumps: strictly increasing locations, strictly decreasing
  /// levels, all levels < 1. Empty for the degenerate all-ones curve.
  const std::vector<Constraint>& jumps() const { return jumps_; }

  bool degenerate() const { return jumps_.empty(); }

 private:
  std::vector<Constraint> jumps_;
};

/// Transformed level for the one-constraint curve that steps from 1 to
/// `level` at `t`, evaluated at `theta`: the tightest level the step-up
/// procedure actually attains there. Closed-form endpoint evaluation for
/// monotone-ratio families, interval scan otherwise; always capped at 1.
double q_star_single(double t, double level, const LocationFamily& family,
                     long m, double theta);

/// Transformed curve q* for a target curve and family set: the infimum over
/// active jump points of the per-constraint transform, with the supremum
/// taken over the distinct families. Precomputes per-jump interval endpoints
/// so grid evaluation is cheap.
class QStarCurve {
 public:
  /// Active subset defaults to every jump of the curve. Subset entries are
  /// indices into curve.jumps(); out-of-range or duplicate indices throw
  /// std::domain_error, as does a degenerate curve or m < 1.
  QStarCurve(TargetCurve curve, FamilySet families, long m);
  QStarCurve(TargetCurve curve, FamilySet families, long m,
             std::vector<std::size_t> subset);

  double evaluate(double theta) const;
  std::vector<double> evaluate(const std::vector<double>& grid) const;

  const TargetCurve& source() const { return curve_; }
  const FamilySet& families() const { return families_; }
  long hypothesis_count() const { return m_; }
  const std::vector<std::size_t>& active_subset() const { return subset_; }

 private:
  struct Term {
    double shift_a;  // t_j + F_i^{-1}(q_j / m)
    double shift_b;  // t_j + F_i^{-1}(q_j)
    std::size_t family_index;
  };
  TargetCurve curve_;
  FamilySet families_;
  long m_ = 1;
  std::vector<std::size_t> subset_;
  std::vector<std::vector<Term>> terms_;  // per active jump, per family
};

/// One-off q* evaluation; builds the precomputation internally.
double q_star(const TargetCurve& curve, const FamilySet& families, long m,
              double theta);
double q_star(const TargetCurve& curve, const FamilySet& families, long m,
              double theta, std::vector<std::size_t> subset);

enum class Dominance {
  NotDominated,
  WeaklyDominated,    // implied, with both shift comparisons tight
  StrictlyDominated,  // implied, with at least one strict shift comparison
};

/// Whether constraint c1 is implied by c2 under the given shared family:
/// the step curve at c2, once transformed, already controls level c1.level
/// at c1.theta. Characterized by two quantile-shift comparisons; requires a
/// monotone-ratio family and levels in (0, 1).
Dominance dominates(const Constraint& c1, const Constraint& c2,
                    const LocationFamily& family, long m);

/// Location where the transformed curve provably meets the target for a
/// shared monotone-ratio family: the jump point minimizing
/// 2*theta + F^{-1}(q(theta)/m) + F^{-1}(q(theta)), ties toward smaller
/// theta. Throws std::domain_error on a degenerate curve or a family
/// without the monotone-ratio property.
double touching_point(const TargetCurve& curve, const LocationFamily& family,
                      long m);

/// Subset of jump indices built by one forward pass in increasing location
/// order: keep the first constraint, then add each next constraint only if
/// the subset selected so far fails to control it. The result controls every
/// original constraint and touches the target at >= 1 jump.
std::vector<std::size_t> select_constraints_greedy(const TargetCurve& curve,
                                                   const FamilySet& families,
                                                   long m);

/// Minimum-cardinality subset of jump indices whose q* controls every
/// original constraint; ties broken by lexicographically smallest location
/// set. Exhaustive search, limited to 20 constraints (use the greedy variant
/// beyond that).
std::vector<std::size_t> select_constraints_minimal(const TargetCurve& curve,
                                                    const FamilySet& families,
                                                    long m);

/// Evaluations of q and q* over a grid, the plot-ready export unit.
struct CurveSamples {
  std::vector<double> grid;
  std::vector<double> q;
  std::vector<double> q_star;
};

CurveSamples sample_curves(const TargetCurve& curve, const QStarCurve& star,
                           const std::vector<double>& grid);

}  // namespace fdrcurve
