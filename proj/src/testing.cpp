#include "fdrcurve/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fdrcurve {

namespace {

// Step-up at level 1 on normalized values: the largest S with
// i in S iff value_i <= |S|/m.
RejectionResult step_up_unit(std::vector<double> normalized) {
  const std::size_t m = normalized.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t lhs, std::size_t rhs) {
              return normalized[lhs] < normalized[rhs];
            });
  std::size_t cutoff = 0;
  for (std::size_t rank = m; rank >= 1; --rank) {
    if (normalized[order[rank - 1]] <=
        static_cast<double>(rank) / static_cast<double>(m)) {
      cutoff = rank;
      break;
    }
  }
  RejectionResult result;
  result.cutoff_rank = cutoff;
  result.selected.assign(order.begin(),
                         order.begin() + static_cast<std::ptrdiff_t>(cutoff));
  std::sort(result.selected.begin(), result.selected.end());
  result.normalized_pvalues = std::move(normalized);
  return result;
}

}  // namespace

HypothesisSet::HypothesisSet(std::vector<double> stats, FamilySet fams)
    : statistics(std::move(stats)), families(std::move(fams)) {
  if (statistics.empty())
    throw std::domain_error("HypothesisSet: needs at least one statistic");
  if (!families.is_shared() &&
      families.per_hypothesis_count() != statistics.size())
    throw std::domain_error(
        "HypothesisSet: per-hypothesis family count must match statistics");
}

double p_value(double x, const LocationFamily& family, double theta) {
  return family.cdf(x - theta);
}

std::vector<double> normalized_p_values(const HypothesisSet& data,
                                        const TargetCurve& curve) {
  if (curve.degenerate())
    throw std::domain_error(
        "normalized_p_values: curve has no constraint below level 1");
  std::vector<double> result;
  result.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const LocationFamily& family = data.families.at(i);
    double worst = 0.0;
    for (const auto& jump : curve.jumps()) {
      const double ratio =
          p_value(data.statistics[i], family, jump.theta) / jump.level;
      worst = std::max(worst, ratio);
    }
    result.push_back(worst);
  }
  return result;
}

RejectionResult bh_standard(const std::vector<double>& pvalues, double q) {
  if (pvalues.empty())
    throw std::domain_error("bh_standard: empty p-value list");
  if (!(q > 0.0) || q > 1.0)
    throw std::domain_error("bh_standard: q must lie in (0, 1]");
  std::vector<double> normalized;
  normalized.reserve(pvalues.size());
  for (double p : pvalues) {
    if (std::isnan(p) || p < 0.0)
      throw std::domain_error("bh_standard: p-values must be >= 0");
    normalized.push_back(p / q);
  }
  return step_up_unit(std::move(normalized));
}

RejectionResult bh_generalized(const HypothesisSet& data,
                               const TargetCurve& curve) {
  return step_up_unit(normalized_p_values(data, curve));
}

std::vector<double> fdp_curve(const std::vector<std::size_t>& selected,
                              const std::vector<double>& true_thetas,
                              const std::vector<double>& grid) {
  for (std::size_t i : selected) {
    if (i >= true_thetas.size())
      throw std::domain_error("fdp_curve: selected index out of range");
  }
  const double denom = std::max<std::size_t>(1, selected.size());
  std::vector<double> result;
  result.reserve(grid.size());
  for (double theta : grid) {
    std::size_t false_count = 0;
    for (std::size_t i : selected) {
      if (true_thetas[i] >= theta) ++false_count;
    }
    result.push_back(static_cast<double>(false_count) / denom);
  }
  return result;
}

}  // namespace fdrcurve
