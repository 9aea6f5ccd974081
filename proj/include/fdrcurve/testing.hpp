#pragma once

#include <cstddef>
#include <vector>

#include "fdrcurve/distributions.hpp"
#include "fdrcurve/fdr_curve.hpp"

namespace fdrcurve {

/// Observed statistics X_i together with their location families.
struct HypothesisSet {
  HypothesisSet(std::vector<double> stats, FamilySet fams);

  std::size_t size() const { return statistics.size(); }

  std::vector<double> statistics;
  FamilySet families;
};

/// Output of a step-up run. Indices are 0-based. The procedure's fixed
/// point: i is selected iff normalized_pvalues[i] <= selected.size()/m, and
/// no larger set has that property; cutoff_rank == selected.size().
struct RejectionResult {
  std::vector<std::size_t> selected;  // ascending
  std::vector<double> normalized_pvalues;
  std::size_t cutoff_rank = 0;
};

/// p-value of H: theta_i >= theta given statistic x: F(x - theta).
double p_value(double x, const LocationFamily& family, double theta);

/// Curve-normalized p-values: max over the curve's jump points of
/// p_value(x_i, F_i, theta_j) / level_j. May exceed 1. Throws
/// std::domain_error for a degenerate curve.
std::vector<double> normalized_p_values(const HypothesisSet& data,
                                        const TargetCurve& curve);

/// Classic step-up at level q on plain p-values (inclusive comparisons).
/// The stored normalized p-values are p_i / q.
RejectionResult bh_standard(const std::vector<double>& pvalues, double q);

/// Step-up at level 1 on the curve-normalized p-values.
RejectionResult bh_generalized(const HypothesisSet& data,
                               const TargetCurve& curve);

/// FDP(theta) = #{i in selected : true_thetas[i] >= theta} / max(1, |S|)
/// per grid point.
std::vector<double> fdp_curve(const std::vector<std::size_t>& selected,
                              const std::vector<double>& true_thetas,
                              const std::vector<double>& grid);

}  // namespace fdrcurve
