#include "fdrcurve/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace fdrcurve {

namespace {

// SplitMix64 finalizer at counter position r: substreams depend only on
// (seed, r), never on scheduling.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t r) {
  std::uint64_t x = seed + (r + 1) * 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform draw strictly inside (0, 1): 53 bits centered on the half-step.
double next_uniform(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

// Deterministic pairwise summation.
double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 32) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += data[i];
    return sum;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

MeanAndError mean_and_error(const std::vector<double>& values) {
  const std::size_t n = values.size();
  MeanAndError out;
  out.mean = pairwise_sum(values.data(), n) / static_cast<double>(n);
  if (n < 2) return out;
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - out.mean;
    sq[i] = d * d;
  }
  const double var =
      pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  out.std_err = std::sqrt(var / static_cast<double>(n));
  return out;
}

}  // namespace

void SimulationConfig::validate() const {
  if (true_thetas.empty())
    throw std::domain_error("simulation: true_thetas is empty");
  if (!families.is_shared() &&
      families.per_hypothesis_count() != true_thetas.size())
    throw std::domain_error(
        "simulation: per-hypothesis family count must match true_thetas");
  if (curve.degenerate())
    throw std::domain_error("simulation: degenerate target curve");
  if (replications < 1)
    throw std::domain_error("simulation: replications must be >= 1");
  if (grid.empty()) throw std::domain_error("simulation: grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::domain_error("simulation: grid must be sorted ascending");
}

CurveEstimate simulate_fdr_curve(const SimulationConfig& config) {
  config.validate();
  const std::size_t m = config.true_thetas.size();
  const std::size_t points = config.grid.size();
  const std::size_t reps = static_cast<std::size_t>(config.replications);

  const QStarCurve star(config.curve, config.families,
                        static_cast<long>(m));
  const std::vector<double> q_star_grid = star.evaluate(config.grid);

  std::vector<double> fdp(reps * points);
  std::vector<double> sup_ratio_by_rep(reps);

  const auto run_block = [&](std::size_t first, std::size_t last) {
    std::vector<double> draws(m);
    for (std::size_t r = first; r < last; ++r) {
      std::mt19937_64 eng(substream_seed(config.seed, r));
      for (std::size_t i = 0; i < m; ++i) {
        const LocationFamily& family = config.families.at(i);
        draws[i] =
            config.true_thetas[i] + family.quantile(next_uniform(eng));
      }
      const RejectionResult result = bh_generalized(
          HypothesisSet(draws, config.families), config.curve);
      const std::vector<double> row =
          fdp_curve(result.selected, config.true_thetas, config.grid);
      double sup = 0.0;
      for (std::size_t g = 0; g < points; ++g) {
        fdp[r * points + g] = row[g];
        sup = std::max(sup, row[g] / q_star_grid[g]);
      }
      sup_ratio_by_rep[r] = sup;
    }
  };

  unsigned threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, reps));
  if (threads <= 1) {
    run_block(0, reps);
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (reps + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t first = t * chunk;
      const std::size_t last = std::min(reps, first + chunk);
      if (first >= last) break;
      workers.emplace_back(run_block, first, last);
    }
    for (auto& w : workers) w.join();
  }

  CurveEstimate estimate;
  estimate.grid = config.grid;
  estimate.fdr_hat.resize(points);
  estimate.std_err.resize(points);
  std::vector<double> column(reps);
  for (std::size_t g = 0; g < points; ++g) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = fdp[r * points + g];
    const MeanAndError stats = mean_and_error(column);
    estimate.fdr_hat[g] = stats.mean;
    estimate.std_err[g] = stats.std_err;
  }
  const MeanAndError sup_stats = mean_and_error(sup_ratio_by_rep);
  estimate.sup_ratio_mean = sup_stats.mean;
  estimate.sup_ratio_std_err = sup_stats.std_err;
  return estimate;
}

MeanAndError sup_fdp_ratio_check(const SimulationConfig& config) {
  const CurveEstimate estimate = simulate_fdr_curve(config);
  return MeanAndError{estimate.sup_ratio_mean, estimate.sup_ratio_std_err};
}

LowerBoundCurve lower_bound_curve(const TargetCurve& curve,
                                  const LocationFamily& family, long m,
                                  const std::vector<double>& grid) {
  if (!family.has_monotone_ratio())
    throw std::domain_error(
        "lower_bound_curve: family lacks the monotone-ratio property");
  if (curve.degenerate())
    throw std::domain_error("lower_bound_curve: degenerate curve");
  const double first_jump = curve.jumps().front().theta;
  for (double theta : grid) {
    if (theta >= first_jump)
      throw std::domain_error(
          "lower_bound_curve: grid points must lie below the first jump");
  }
  const QStarCurve star(curve, FamilySet::shared(family), m);
  LowerBoundCurve out;
  out.exact.reserve(grid.size());
  out.exponential.reserve(grid.size());
  const double m_real = static_cast<double>(m);
  for (double theta : grid) {
    const double qs = star.evaluate(theta);
    out.exact.push_back(-std::expm1(m_real * std::log1p(-qs / m_real)));
    out.exponential.push_back(-std::expm1(-qs));
  }
  return out;
}

std::vector<double> default_grid(const TargetCurve& curve) {
  if (curve.degenerate())
    throw std::domain_error("default_grid: degenerate curve");
  const double lo = curve.jumps().front().theta - 1.5;
  const double hi = curve.jumps().back().theta + 1.5;
  std::vector<double> grid;
  grid.reserve(41);
  for (int i = 0; i < 41; ++i)
    grid.push_back(lo + (hi - lo) * (i / 40.0));
  return grid;
}

}  // namespace fdrcurve
