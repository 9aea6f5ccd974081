#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace fdrcurve {

inline constexpr double kPosInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Standard normal CDF, relative error below 1e-12 on [-8, 8], with graceful
/// underflow in the far left tail.
double standard_normal_cdf(double x);

/// Inverse of standard_normal_cdf. Rational initial guess followed by two
/// Halley refinements. p = 0 and p = 1 map to the -inf/+inf sentinels;
/// p outside [0, 1] throws std::domain_error.
double standard_normal_quantile(double p);

enum class FamilyKind {
  StandardGaussian,
  ScaledGaussian,
  Logistic,
  Tabulated,
};

/// A location family {F(x - theta)}: a continuous, strictly increasing CDF F
/// together with its quantile and a monotone-ratio capability flag.
///
/// Values are cheap to copy; tabulated knot data is shared.
class LocationFamily {
 public:
  static LocationFamily standard_gaussian();
  static LocationFamily scaled_gaussian(double sigma);  // F(x) = Phi(x/sigma)
  static LocationFamily logistic();                     // F(x) = 1/(1+e^-x)

  /// Piecewise-linear CDF through strictly increasing knots (x_k, p_k) with
  /// p_k in (0,1). Evaluation clamps outside the knot span; the quantile is
  /// the exact inverse on [p_front, p_back]. Families loaded this way do not
  /// get the monotone-ratio fast path unless declared.
  static LocationFamily tabulated(std::vector<double> x, std::vector<double> p,
                                  bool monotone_ratio = false);

  /// Two-column CSV `x,probability` with a header row, strictly increasing in
  /// both columns. Throws DataError on malformed input.
  static LocationFamily tabulated_from_csv(const std::string& path,
                                           bool monotone_ratio = false);

  /// P(X - theta <= x) at theta = 0. Total: accepts the +-inf sentinels.
  double cdf(double x) const;

  /// Generalized quantile inf{x : F(x) >= p}; quantile(0) = -inf,
  /// quantile(1) = +inf. Throws std::domain_error for p outside [0, 1].
  double quantile(double p) const;

  /// True when F(x - t')/F(x - t) is monotone in x for all t, t', so that
  /// interval suprema of CDF ratios are attained at the endpoints.
  bool has_monotone_ratio() const { return monotone_ratio_; }

  FamilyKind kind() const { return kind_; }
  double scale() const { return scale_; }

  bool operator==(const LocationFamily& other) const;

 private:
  struct Table;
  LocationFamily(FamilyKind kind, double scale, bool monotone_ratio)
      : kind_(kind), scale_(scale), monotone_ratio_(monotone_ratio) {}

  FamilyKind kind_ = FamilyKind::StandardGaussian;
  double scale_ = 1.0;
  bool monotone_ratio_ = true;
  std::shared_ptr<const Table> table_;
};

/// sup over x - theta_prime in [a, b] of F(x - theta)/F(x - theta_prime).
///
/// Monotone-ratio families use the endpoint rule (a b = +inf endpoint
/// evaluates to the x -> +inf limit of the ratio, which is 1; a = -inf gives
/// +inf when theta < theta_prime). Other families are scanned on a dense grid
/// clustered near the endpoints and refined by golden-section search.
/// Throws std::domain_error when a > b.
double sup_ratio(const LocationFamily& family, double theta,
                 double theta_prime, double a, double b);

/// One family shared by all hypotheses, or one family per hypothesis.
class FamilySet {
 public:
  static FamilySet shared(LocationFamily family);
  static FamilySet per_hypothesis(std::vector<LocationFamily> families);

  bool is_shared() const { return shared_; }

  /// Family of hypothesis i (any i for a shared set).
  const LocationFamily& at(std::size_t i) const {
    return shared_ ? families_.front() : families_.at(i);
  }

  /// Number of per-hypothesis entries (0 for a shared set).
  std::size_t per_hypothesis_count() const {
    return shared_ ? 0 : families_.size();
  }

  /// The distinct families, deduplicated; this is what curve transforms
  /// iterate over.
  const std::vector<LocationFamily>& distinct() const { return distinct_; }

  bool all_monotone_ratio() const;

 private:
  FamilySet() = default;
  bool shared_ = true;
  std::vector<LocationFamily> families_;
  std::vector<LocationFamily> distinct_;
};

}  // namespace fdrcurve
