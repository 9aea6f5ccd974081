#pragma once

#include <cstdint>
#include <vector>

#include "fdrcurve/distributions.hpp"
#include "fdrcurve/fdr_curve.hpp"
#include "fdrcurve/testing.hpp"

namespace fdrcurve {

struct SimulationConfig {
  std::vector<double> true_thetas;
  FamilySet families = FamilySet::shared(LocationFamily::standard_gaussian());
  TargetCurve curve;
  long replications = 1;
  std::vector<double> grid;  // sorted ascending
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;  // throws std::domain_error
};

struct CurveEstimate {
  std::vector<double> grid;
  std::vector<double> fdr_hat;   // mean FDP per grid point
  std::vector<double> std_err;   // per-point standard error of the mean
  double sup_ratio_mean = 0.0;   // mean over reps of sup_grid FDP/q*
  double sup_ratio_std_err = 0.0;
};

/// Draws X_i = theta_i + F_i^{-1}(U) from per-replication counter-based
/// substreams of `seed`, runs the generalized step-up, and averages the FDP
/// curve over replications. Replications run concurrently; results are
/// independent of scheduling and thread count.
CurveEstimate simulate_fdr_curve(const SimulationConfig& config);

struct MeanAndError {
  double mean = 0.0;
  double std_err = 0.0;
};

/// Monte Carlo estimate of E[sup over grid of FDP(theta)/q*(theta)].
MeanAndError sup_fdp_ratio_check(const SimulationConfig& config);

/// Worst-case FDR floor below the first jump when every theta_i sits at the
/// evaluation point: the exact expression 1 - (1 - q*(theta)/m)^m and its
/// exponential bound 1 - e^{-q*(theta)}, per grid point (exact >= bound).
/// Requires a monotone-ratio family and grid points strictly below the first
/// jump.
struct LowerBoundCurve {
  std::vector<double> exact;
  std::vector<double> exponential;
};

LowerBoundCurve lower_bound_curve(const TargetCurve& curve,
                                  const LocationFamily& family, long m,
                                  const std::vector<double>& grid);

/// 41 equally spaced points spanning [first jump - 1.5, last jump + 1.5].
std::vector<double> default_grid(const TargetCurve& curve);

}  // namespace fdrcurve
