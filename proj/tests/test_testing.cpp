#include "fdrcurve/testing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "support/oracles.hpp"

using namespace fdrcurve;

namespace {

std::vector<double> random_gaussian_data(oracle::TestRng& rng, long m,
                                         double shift_lo = -3.0,
                                         double shift_hi = 1.0) {
  const auto gauss = LocationFamily::standard_gaussian();
  std::vector<double> xs;
  for (long i = 0; i < m; ++i) {
    const double theta = rng.uniform(shift_lo, shift_hi);
    xs.push_back(theta + gauss.quantile(rng.uniform(1e-12, 1.0 - 1e-12)));
  }
  return xs;
}

// All step-up fixed points of the normalized values, by exhaustive subset
// enumeration (m <= 20 or so).
std::vector<std::vector<std::size_t>> fixed_points(
    const std::vector<double>& pbar) {
  const std::size_t m = pbar.size();
  std::vector<std::vector<std::size_t>> sets;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (1u << i)) members.push_back(i);
    const double threshold =
        static_cast<double>(members.size()) / static_cast<double>(m);
    bool ok = true;
    for (std::size_t i = 0; i < m; ++i) {
      const bool in = (mask & (1u << i)) != 0;
      if (in != (pbar[i] <= threshold)) {
        ok = false;
        break;
      }
    }
    if (ok) sets.push_back(std::move(members));
  }
  return sets;
}

}  // namespace

TEST_CASE("p_value basics") {
  const auto gauss = LocationFamily::standard_gaussian();
  CHECK(p_value(0.0, gauss, 0.0) == 0.5);
  CHECK(p_value(-1.2815515655, gauss, 0.0) ==
        doctest::Approx(0.1000000000078273).epsilon(1e-9));
  // scaled sigma=2 at x=0, theta=1: Phi(-0.5)
  CHECK(p_value(0.0, LocationFamily::scaled_gaussian(2.0), 1.0) ==
        doctest::Approx(0.3085375387259869).epsilon(1e-6));
  // decreasing in theta
  CHECK(p_value(0.0, gauss, 1.0) < p_value(0.0, gauss, 0.0));
}

TEST_CASE("normalized p-values: one jump reduces to p/q") {
  const auto curve = TargetCurve::from_constraints({{0.0, 0.1}});
  const auto gauss = LocationFamily::standard_gaussian();
  const HypothesisSet data({-2.0, -0.5, 1.0}, FamilySet::shared(gauss));
  const auto pbar = normalized_p_values(data, curve);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(pbar[i] == gauss.cdf(data.statistics[i]) / 0.1);
}

TEST_CASE("normalized p-values: two constraints, pinned and limits") {
  const auto curve = TargetCurve::from_constraints({{0.0, 0.1}, {1.0, 0.05}});
  const auto gauss = LocationFamily::standard_gaussian();

  const HypothesisSet data({-3.0}, FamilySet::shared(gauss));
  // max(Phi(-3)/0.1, Phi(-4)/0.05); frozen from a 40-digit evaluation
  CHECK(normalized_p_values(data, curve)[0] ==
        doctest::Approx(0.0134989803163009).epsilon(1e-9));

  // a dense scan over the region below level 1 (jump points on-grid) never
  // beats the jump maximum, and matches it where the pieces start
  oracle::TestRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const double x = rng.uniform(-4.0, 3.0);
    const HypothesisSet one({x}, FamilySet::shared(gauss));
    const double reported = normalized_p_values(one, curve)[0];
    double scanned = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double theta = 0.0 + 6.0 * (i / 4000.0);
      scanned = std::max(scanned, gauss.cdf(x - theta) / curve(theta));
    }
    for (const auto& jump : curve.jumps())
      scanned = std::max(scanned,
                         gauss.cdf(x - jump.theta) / curve(jump.theta));
    CHECK(reported >= scanned - 1e-12);
    CHECK(reported == doctest::Approx(scanned).epsilon(1e-9));
  }

  // x -> +inf: every p-value tends to 1, so the sup tends to 1/q_min
  const HypothesisSet far({60.0}, FamilySet::shared(gauss));
  CHECK(normalized_p_values(far, curve)[0] ==
        doctest::Approx(1.0 / 0.05).epsilon(1e-12));

  CHECK_THROWS_AS(
      (void)normalized_p_values(far, TargetCurve()), std::domain_error);
}

TEST_CASE("bh_standard: worked example and boundaries") {
  const auto result = bh_standard({0.01, 0.04, 0.06, 0.9}, 0.1);
  CHECK(result.selected == std::vector<std::size_t>{0, 1, 2});
  CHECK(result.cutoff_rank == 3);

  const auto none = bh_standard({1.0, 1.0, 1.0}, 0.5);
  CHECK(none.selected.empty());
  CHECK(none.cutoff_rank == 0);

  // boundary equality rejects (inclusive comparison)
  const auto edge = bh_standard({0.1}, 0.1);
  CHECK(edge.selected == std::vector<std::size_t>{0});

  CHECK_THROWS_AS((void)bh_standard({}, 0.1), std::domain_error);
  CHECK_THROWS_AS((void)bh_standard({0.5}, 0.0), std::domain_error);
  CHECK_THROWS_AS((void)bh_standard({-0.1}, 0.1), std::domain_error);
}

TEST_CASE("bh_generalized reduces to bh_standard for one-jump curves") {
  oracle::TestRng rng(2024);
  const auto gauss = LocationFamily::standard_gaussian();
  for (int trial = 0; trial < 300; ++trial) {
    const long m = rng.uniform_int(1, 100);
    const double q = rng.uniform(0.02, 0.5);
    const auto xs = random_gaussian_data(rng, m);
    const auto curve = TargetCurve::from_constraints({{0.0, q}});
    const HypothesisSet data(xs, FamilySet::shared(gauss));

    std::vector<double> pvalues;
    for (double x : xs) pvalues.push_back(gauss.cdf(x));

    const auto generalized = bh_generalized(data, curve);
    const auto standard = bh_standard(pvalues, q);
    CHECK(generalized.selected == standard.selected);
    CHECK(generalized.cutoff_rank == standard.cutoff_rank);
  }
}

TEST_CASE("bh_generalized: m=1 boundary") {
  const auto gauss = LocationFamily::standard_gaussian();
  const auto curve = TargetCurve::from_constraints({{0.0, 0.1}});
  const HypothesisSet data({gauss.quantile(0.05)}, FamilySet::shared(gauss));
  const auto result = bh_generalized(data, curve);
  CHECK(result.normalized_pvalues[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(result.selected == std::vector<std::size_t>{0});
}

TEST_CASE("step-up fixed point is the largest, exhaustively for small m") {
  oracle::TestRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = static_cast<std::size_t>(rng.uniform_int(1, 12));
    std::vector<double> pbar;
    for (std::size_t i = 0; i < m; ++i)
      pbar.push_back(rng.uniform(0.0, 1.6));
    const auto result = bh_standard(pbar, 1.0);

    const auto sets = fixed_points(pbar);
    std::size_t largest = 0;
    for (const auto& s : sets) largest = std::max(largest, s.size());
    CHECK(result.selected.size() == largest);
    const bool found = std::find(sets.begin(), sets.end(), result.selected) !=
                       sets.end();
    CHECK(found);
  }
}

TEST_CASE("monotone response: lowering one statistic never shrinks S") {
  oracle::TestRng rng(512);
  const auto gauss = LocationFamily::standard_gaussian();
  const auto curve = TargetCurve::from_constraints({{-0.3, 0.3}, {0.4, 0.08}});
  for (int trial = 0; trial < 100; ++trial) {
    const long m = rng.uniform_int(2, 40);
    auto xs = random_gaussian_data(rng, m);
    const auto before =
        bh_generalized(HypothesisSet(xs, FamilySet::shared(gauss)), curve);
    const std::size_t pick =
        static_cast<std::size_t>(rng.uniform_int(0, m - 1));
    xs[pick] -= rng.uniform(0.1, 3.0);
    const auto after =
        bh_generalized(HypothesisSet(xs, FamilySet::shared(gauss)), curve);
    CHECK(std::includes(after.selected.begin(), after.selected.end(),
                        before.selected.begin(), before.selected.end()));
  }
}

TEST_CASE("simple selection rule: zeroing a selected value changes nothing") {
  oracle::TestRng rng(640);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = static_cast<std::size_t>(rng.uniform_int(1, 12));
    std::vector<double> pbar;
    for (std::size_t i = 0; i < m; ++i) pbar.push_back(rng.uniform(0.0, 1.4));
    const auto base = bh_standard(pbar, 1.0);
    for (std::size_t i : base.selected) {
      auto modified = pbar;
      modified[i] = 0.0;
      const auto rerun = bh_standard(modified, 1.0);
      CHECK(rerun.selected == base.selected);
    }
  }
}

TEST_CASE("rejections are invariant to replacing q by its transform") {
  oracle::TestRng rng(424243);
  for (int trial = 0; trial < 300; ++trial) {
    const long constraint_count = rng.uniform_int(1, 3);
    std::vector<Constraint> constraints;
    double theta = rng.uniform(-1.0, 0.0);
    double level = rng.uniform(0.4, 0.9);
    for (long j = 0; j < constraint_count; ++j) {
      constraints.push_back({theta, level});
      theta += rng.uniform(0.2, 0.8);
      level *= rng.uniform(0.3, 0.8);
    }
    const auto curve = TargetCurve::from_constraints(constraints);

    const long m = rng.uniform_int(1, 60);
    FamilySet families = FamilySet::shared(LocationFamily::standard_gaussian());
    if (trial % 3 == 0) {
      std::vector<LocationFamily> fams;
      for (long i = 0; i < m; ++i)
        fams.push_back(LocationFamily::scaled_gaussian(rng.uniform(0.5, 2.0)));
      families = FamilySet::per_hypothesis(std::move(fams));
    }
    std::vector<double> xs;
    for (long i = 0; i < m; ++i) {
      const double true_theta = rng.uniform(-3.0, 1.0);
      xs.push_back(true_theta + families.at(static_cast<std::size_t>(i))
                                    .quantile(rng.uniform(1e-12, 1.0 - 1e-12)));
    }
    const HypothesisSet data(xs, families);

    const QStarCurve star(curve, families, m);
    std::vector<Constraint> transformed;
    for (const auto& jump : curve.jumps())
      transformed.push_back({jump.theta, star.evaluate(jump.theta)});
    const auto star_curve = TargetCurve::from_constraints(transformed);

    const auto under_q = bh_generalized(data, curve);
    const auto under_star = bh_generalized(data, star_curve);
    CHECK(under_q.selected == under_star.selected);
  }
}

TEST_CASE("fdp_curve: counting and denominators") {
  CHECK(fdp_curve({}, {0.5, -0.5}, {-1.0, 0.0, 1.0}) ==
        std::vector<double>{0.0, 0.0, 0.0});
  // below every true theta, all discoveries are false
  CHECK(fdp_curve({0, 1}, {0.5, -0.5}, {-1.0})[0] == 1.0);
  CHECK(fdp_curve({0, 1}, {0.5, -0.5}, {0.0})[0] == 0.5);
  // non-increasing in theta and within [0, 1]
  const auto curve_vals =
      fdp_curve({0, 1, 2}, {0.5, -0.5, 1.5}, {-2.0, -0.5, 0.0, 1.0, 2.0});
  for (std::size_t i = 1; i < curve_vals.size(); ++i) {
    CHECK(curve_vals[i] <= curve_vals[i - 1]);
    CHECK(curve_vals[i] >= 0.0);
    CHECK(curve_vals[i] <= 1.0);
  }
  CHECK_THROWS_AS((void)fdp_curve({5}, {0.0}, {0.0}), std::domain_error);
}

TEST_CASE("hypothesis set validation") {
  CHECK_THROWS_AS(
      HypothesisSet({}, FamilySet::shared(LocationFamily::logistic())),
      std::domain_error);
  CHECK_THROWS_AS(
      HypothesisSet({1.0, 2.0},
                    FamilySet::per_hypothesis(
                        {LocationFamily::standard_gaussian()})),
      std::domain_error);
}
