#include "fdrcurve/fdr_curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdrcurve {

namespace {

// Slack for level comparisons: well above quantile/cdf round-trip error,
// far below any statistically meaningful gap.
constexpr double kLevelSlack = 1e-12;

// Lemma-2 style value before the cap at 1.
double transform_term(double t, double level, const LocationFamily& family,
                      long m, double theta) {
  if (level >= 1.0) return 1.0;
  const double a = family.quantile(level / static_cast<double>(m));
  const double b = family.quantile(level);
  if (family.has_monotone_ratio()) {
    const double at_a =
        static_cast<double>(m) * family.cdf(t + a - theta);
    const double at_b = family.cdf(t + b - theta);
    return std::max(at_a, at_b);
  }
  return level * sup_ratio(family, theta, t, a, b);
}

void validate_level_positive(double level) {
  if (!(level > 0.0) || level > 1.0 || std::isnan(level))
    throw std::domain_error("constraint level must lie in (0, 1]");
}

}  // namespace

TargetCurve TargetCurve::from_constraints(std::vector<Constraint> constraints) {
  if (constraints.empty())
    throw std::domain_error("target curve needs at least one constraint");
  for (const auto& c : constraints) {
    validate_level_positive(c.level);
    if (!std::isfinite(c.theta))
      throw std::domain_error("constraint location must be finite");
  }
  std::sort(constraints.begin(), constraints.end(),
            [](const Constraint& lhs, const Constraint& rhs) {
              if (lhs.theta != rhs.theta) return lhs.theta < rhs.theta;
              return lhs.level < rhs.level;
            });
  TargetCurve curve;
  for (const auto& c : constraints) {
    if (c.level >= 1.0) continue;  // coincides with the implied left region
    if (!curve.jumps_.empty()) {
      const auto& last = curve.jumps_.back();
      if (c.theta == last.theta || c.level >= last.level)
        continue;  // dominated duplicate: the earlier, lower level wins
    }
    curve.jumps_.push_back(c);
  }
  return curve;
}

double TargetCurve::operator()(double theta) const {
  double level = 1.0;
  for (const auto& jump : jumps_) {
    if (jump.theta > theta) break;
    level = jump.level;
  }
  return level;
}

double q_star_single(double t, double level, const LocationFamily& family,
                     long m, double theta) {
  validate_level_positive(level);
  if (m < 1) throw std::domain_error("q_star_single: m must be >= 1");
  return std::min(1.0, transform_term(t, level, family, m, theta));
}

namespace {

std::vector<std::size_t> full_subset(const TargetCurve& curve) {
  std::vector<std::size_t> all(curve.jumps().size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return all;
}

}  // namespace

QStarCurve::QStarCurve(TargetCurve curve, FamilySet families, long m)
    : QStarCurve(curve, std::move(families), m, full_subset(curve)) {}

QStarCurve::QStarCurve(TargetCurve curve, FamilySet families, long m,
                       std::vector<std::size_t> subset)
    : curve_(std::move(curve)), families_(std::move(families)), m_(m),
      subset_(std::move(subset)) {
  if (m_ < 1) throw std::domain_error("q_star: m must be >= 1");
  if (curve_.degenerate())
    throw std::domain_error("q_star: degenerate curve (no level < 1)");
  if (subset_.empty())
    throw std::domain_error("q_star: active subset is empty");
  std::vector<bool> seen(curve_.jumps().size(), false);
  for (std::size_t j : subset_) {
    if (j >= curve_.jumps().size() || seen[j])
      throw std::domain_error("q_star: subset is not a set of jump indices");
    seen[j] = true;
  }
  const double m_real = static_cast<double>(m_);
  terms_.reserve(subset_.size());
  for (std::size_t j : subset_) {
    const Constraint& jump = curve_.jumps()[j];
    std::vector<Term> row;
    row.reserve(families_.distinct().size());
    for (std::size_t i = 0; i < families_.distinct().size(); ++i) {
      const auto& fam = families_.distinct()[i];
      row.push_back(Term{jump.theta + fam.quantile(jump.level / m_real),
                         jump.theta + fam.quantile(jump.level), i});
    }
    terms_.push_back(std::move(row));
  }
}

double QStarCurve::evaluate(double theta) const {
  const double m_real = static_cast<double>(m_);
  double best = 1.0;
  for (std::size_t row = 0; row < terms_.size(); ++row) {
    const Constraint& jump = curve_.jumps()[subset_[row]];
    double worst = 0.0;
    for (const Term& term : terms_[row]) {
      const LocationFamily& fam = families_.distinct()[term.family_index];
      double value;
      if (fam.has_monotone_ratio()) {
        value = std::max(m_real * fam.cdf(term.shift_a - theta),
                         fam.cdf(term.shift_b - theta));
      } else {
        const double a = term.shift_a - jump.theta;
        const double b = term.shift_b - jump.theta;
        value = jump.level * sup_ratio(fam, theta, jump.theta, a, b);
      }
      worst = std::max(worst, value);
      if (worst >= best) break;  // this jump cannot lower the infimum
    }
    best = std::min(best, worst);
  }
  if (std::isnan(best)) throw std::logic_error("q_star: NaN result");
  return std::min(1.0, best);
}

std::vector<double> QStarCurve::evaluate(
    const std::vector<double>& grid) const {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double theta : grid) out.push_back(evaluate(theta));
  return out;
}

double q_star(const TargetCurve& curve, const FamilySet& families, long m,
              double theta) {
  return QStarCurve(curve, families, m).evaluate(theta);
}

double q_star(const TargetCurve& curve, const FamilySet& families, long m,
              double theta, std::vector<std::size_t> subset) {
  return QStarCurve(curve, families, m, std::move(subset)).evaluate(theta);
}

Dominance dominates(const Constraint& c1, const Constraint& c2,
                    const LocationFamily& family, long m) {
  if (!family.has_monotone_ratio())
    throw std::domain_error(
        "dominates: family lacks the monotone-ratio property");
  if (!(c1.level > 0.0 && c1.level < 1.0 && c2.level > 0.0 && c2.level < 1.0))
    throw std::domain_error("dominates: levels must lie in (0, 1)");
  const double m_real = static_cast<double>(m);
  const double b1 = family.quantile(c1.level) + c1.theta;
  const double b2 = family.quantile(c2.level) + c2.theta;
  const double a1 = family.quantile(c1.level / m_real) + c1.theta;
  const double a2 = family.quantile(c2.level / m_real) + c2.theta;
  if (b1 >= b2 && a1 >= a2) {
    return (b1 > b2 || a1 > a2) ? Dominance::StrictlyDominated
                                : Dominance::WeaklyDominated;
  }
  return Dominance::NotDominated;
}

double touching_point(const TargetCurve& curve, const LocationFamily& family,
                      long m) {
  if (!family.has_monotone_ratio())
    throw std::domain_error(
        "touching_point: family lacks the monotone-ratio property");
  if (curve.degenerate())
    throw std::domain_error("touching_point: degenerate curve");
  const double m_real = static_cast<double>(m);
  double best_theta = 0.0;
  double best_value = kPosInf;
  for (const auto& jump : curve.jumps()) {
    // S(theta) = 2*theta + F^{-1}(q/m) + F^{-1}(q); affine increasing within
    // each constant piece, so only jump points compete.
    const double value = 2.0 * jump.theta +
                         family.quantile(jump.level / m_real) +
                         family.quantile(jump.level);
    if (value < best_value) {
      best_value = value;
      best_theta = jump.theta;
    }
  }
  return best_theta;
}

namespace {

bool subset_controls_all(const TargetCurve& curve, const FamilySet& families,
                         long m, const std::vector<std::size_t>& subset) {
  const QStarCurve star(curve, families, m, subset);
  for (const auto& jump : curve.jumps()) {
    if (star.evaluate(jump.theta) > jump.level + kLevelSlack) return false;
  }
  return true;
}

// Advance indices to the next k-combination of {0..n-1} in lexicographic
// order; false once exhausted.
bool next_combination(std::vector<std::size_t>& combo, std::size_t n) {
  const std::size_t k = combo.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (combo[i] != i + n - k) {
      ++combo[i];
      for (std::size_t j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<std::size_t> select_constraints_greedy(const TargetCurve& curve,
                                                   const FamilySet& families,
                                                   long m) {
  if (curve.degenerate())
    throw std::domain_error("select_constraints: degenerate curve");
  std::vector<std::size_t> chosen{0};
  for (std::size_t j = 1; j < curve.jumps().size(); ++j) {
    const QStarCurve star(curve, families, m, chosen);
    const Constraint& jump = curve.jumps()[j];
    if (star.evaluate(jump.theta) > jump.level + kLevelSlack)
      chosen.push_back(j);
  }
  return chosen;
}

std::vector<std::size_t> select_constraints_minimal(const TargetCurve& curve,
                                                    const FamilySet& families,
                                                    long m) {
  if (curve.degenerate())
    throw std::domain_error("select_constraints: degenerate curve");
  const std::size_t count = curve.jumps().size();
  if (count > 20)
    throw std::domain_error(
        "select_constraints_minimal: more than 20 constraints; use the "
        "greedy variant");
  // Cardinality-major, lexicographic combinations: the first hit is a
  // minimum-cardinality subset with the smallest location set. The full set
  // always controls, so the search terminates.
  for (std::size_t size = 1; size <= count; ++size) {
    std::vector<std::size_t> combo(size);
    for (std::size_t i = 0; i < size; ++i) combo[i] = i;
    do {
      if (subset_controls_all(curve, families, m, combo)) return combo;
    } while (next_combination(combo, count));
  }
  throw std::logic_error(
      "select_constraints_minimal: no controlling subset found");
}

CurveSamples sample_curves(const TargetCurve& curve, const QStarCurve& star,
                           const std::vector<double>& grid) {
  CurveSamples samples;
  samples.grid = grid;
  samples.q.reserve(grid.size());
  samples.q_star.reserve(grid.size());
  for (double theta : grid) {
    samples.q.push_back(curve(theta));
    samples.q_star.push_back(star.evaluate(theta));
  }
  return samples;
}

}  // namespace fdrcurve
