#include "fdrcurve/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fdrcurve/errors.hpp"

namespace fdrcurve {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double normal_pdf(double x) {
  const double h = 0.5 * x * x;
  if (h > 745.0) return 0.0;
  return kInvSqrt2Pi * std::exp(-h);
}

// Rational initial guess for the inverse normal CDF (Acklam's approximation,
// absolute error ~1e-9 on (0,1)), sharpened below by Halley steps.
double normal_quantile_guess(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Residual Phi(x) - p evaluated through the tail that avoids cancellation.
double normal_cdf_residual(double x, double p) {
  if (p <= 0.5) return 0.5 * std::erfc(-x * kInvSqrt2) - p;
  return (1.0 - p) - 0.5 * std::erfc(x * kInvSqrt2);
}

double logistic_cdf(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double standard_normal_cdf(double x) {
  if (std::isnan(x)) throw std::domain_error("normal cdf: NaN argument");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double standard_normal_quantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0)
    throw std::domain_error("normal quantile: p outside [0, 1]");
  if (p == 0.0) return kNegInf;
  if (p == 1.0) return kPosInf;
  double x = normal_quantile_guess(p);
  for (int step = 0; step < 2; ++step) {
    const double pdf = normal_pdf(x);
    if (pdf <= 0.0) break;  // beyond refinable range, keep the tail guess
    const double t = normal_cdf_residual(x, p) / pdf;
    x -= t / (1.0 + 0.5 * t * x);
  }
  return x;
}

struct LocationFamily::Table {
  std::vector<double> x;
  std::vector<double> p;
};

LocationFamily LocationFamily::standard_gaussian() {
  return LocationFamily(FamilyKind::StandardGaussian, 1.0, true);
}

LocationFamily LocationFamily::scaled_gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::domain_error("scaled_gaussian: scale must be positive");
  return LocationFamily(FamilyKind::ScaledGaussian, sigma, true);
}

LocationFamily LocationFamily::logistic() {
  // f/F = 1 - F is decreasing, so the CDF-ratio condition holds.
  return LocationFamily(FamilyKind::Logistic, 1.0, true);
}

LocationFamily LocationFamily::tabulated(std::vector<double> x,
                                         std::vector<double> p,
                                         bool monotone_ratio) {
  if (x.size() != p.size() || x.size() < 2)
    throw std::domain_error("tabulated family: need >= 2 (x, p) knots");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(p[i]) || p[i] <= 0.0 ||
        p[i] >= 1.0)
      throw std::domain_error(
          "tabulated family: knots must be finite with p in (0, 1)");
    if (i > 0 && (x[i] <= x[i - 1] || p[i] <= p[i - 1]))
      throw std::domain_error(
          "tabulated family: knots must be strictly increasing in x and p");
  }
  LocationFamily fam(FamilyKind::Tabulated, 1.0, monotone_ratio);
  fam.table_ = std::make_shared<Table>(Table{std::move(x), std::move(p)});
  return fam;
}

LocationFamily LocationFamily::tabulated_from_csv(const std::string& path,
                                                  bool monotone_ratio) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tabulated family file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw DataError("tabulated family file is empty: " + path);
  std::vector<double> xs, ps;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DataError(path + ": line " + std::to_string(lineno) +
                      ": expected `x,probability`");
    char* end = nullptr;
    const std::string xs_str = line.substr(0, comma);
    const std::string ps_str = line.substr(comma + 1);
    const double x = std::strtod(xs_str.c_str(), &end);
    if (end == xs_str.c_str() || *end != '\0')
      throw DataError(path + ": line " + std::to_string(lineno) +
                      ": non-numeric x value");
    const double p = std::strtod(ps_str.c_str(), &end);
    if (end == ps_str.c_str() || (*end != '\0' && *end != '\r'))
      throw DataError(path + ": line " + std::to_string(lineno) +
                      ": non-numeric probability");
    xs.push_back(x);
    ps.push_back(p);
  }
  try {
    return tabulated(std::move(xs), std::move(ps), monotone_ratio);
  } catch (const std::domain_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

double LocationFamily::cdf(double x) const {
  if (std::isnan(x)) throw std::domain_error("cdf: NaN argument");
  switch (kind_) {
    case FamilyKind::StandardGaussian:
      return standard_normal_cdf(x);
    case FamilyKind::ScaledGaussian:
      return standard_normal_cdf(x / scale_);
    case FamilyKind::Logistic:
      return logistic_cdf(x);
    case FamilyKind::Tabulated: {
      const auto& t = *table_;
      if (x <= t.x.front()) return x == kNegInf ? 0.0 : t.p.front();
      if (x >= t.x.back()) return x == kPosInf ? 1.0 : t.p.back();
      const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
      const std::size_t k = static_cast<std::size_t>(it - t.x.begin());
      const double w = (x - t.x[k - 1]) / (t.x[k] - t.x[k - 1]);
      return t.p[k - 1] + w * (t.p[k] - t.p[k - 1]);
    }
  }
  throw std::logic_error("cdf: unknown family kind");
}

double LocationFamily::quantile(double p) const {
  if (std::isnan(p) || p < 0.0 || p > 1.0)
    throw std::domain_error("quantile: p outside [0, 1]");
  if (p == 0.0) return kNegInf;
  if (p == 1.0) return kPosInf;
  switch (kind_) {
    case FamilyKind::StandardGaussian:
      return standard_normal_quantile(p);
    case FamilyKind::ScaledGaussian:
      return scale_ * standard_normal_quantile(p);
    case FamilyKind::Logistic:
      return std::log(p) - std::log1p(-p);
    case FamilyKind::Tabulated: {
      // Bisect to the bracketing segment, then invert the segment exactly.
      const auto& t = *table_;
      if (p <= t.p.front()) return t.x.front();
      if (p >= t.p.back()) return t.x.back();
      const auto it = std::lower_bound(t.p.begin(), t.p.end(), p);
      const std::size_t k = static_cast<std::size_t>(it - t.p.begin());
      const double w = (p - t.p[k - 1]) / (t.p[k] - t.p[k - 1]);
      return t.x[k - 1] + w * (t.x[k] - t.x[k - 1]);
    }
  }
  throw std::logic_error("quantile: unknown family kind");
}

bool LocationFamily::operator==(const LocationFamily& other) const {
  return kind_ == other.kind_ && scale_ == other.scale_ &&
         monotone_ratio_ == other.monotone_ratio_ && table_ == other.table_;
}

namespace {

// Maximize g on [lo, hi] by golden-section search; returns the best value.
template <typename G>
double golden_section_max(const G& g, double lo, double hi, double rel_tol) {
  const double invphi = 0.6180339887498949;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  double gc = g(c);
  double gd = g(d);
  const double span_tol =
      rel_tol * std::max(1.0, std::abs(lo) + std::abs(hi));
  while (hi - lo > span_tol) {
    if (gc > gd) {
      hi = d;
      d = c;
      gd = gc;
      c = hi - invphi * (hi - lo);
      gc = g(c);
    } else {
      lo = c;
      c = d;
      gc = gd;
      d = lo + invphi * (hi - lo);
      gd = g(d);
    }
  }
  return std::max(gc, gd);
}

}  // namespace

double sup_ratio(const LocationFamily& family, double theta,
                 double theta_prime, double a, double b) {
  if (std::isnan(a) || std::isnan(b) || a > b)
    throw std::domain_error("sup_ratio: requires a <= b");
  if (theta == theta_prime) return 1.0;
  const double delta = theta_prime - theta;  // g(y) = F(y + delta) / F(y)

  const auto ratio_at = [&](double y) -> double {
    if (y == kPosInf) return 1.0;  // x -> +inf limit of the CDF ratio
    if (y == kNegInf) return delta > 0.0 ? kPosInf : 0.0;
    const double den = family.cdf(y);
    const double num = family.cdf(y + delta);
    if (den <= 0.0) return delta > 0.0 ? kPosInf : 0.0;
    return num / den;
  };

  if (family.has_monotone_ratio())
    return std::max(ratio_at(a), ratio_at(b));

  double best = std::max(ratio_at(a), ratio_at(b));
  if (std::isinf(best)) return best;

  double lo = (a == kNegInf) ? family.quantile(1e-12) : a;
  double hi = (b == kPosInf) ? family.quantile(1.0 - 1e-12) : b;
  if (!(lo < hi)) return best;

  // >= 512 scan points: a uniform grid plus geometric clusters at both ends.
  std::vector<double> ys;
  ys.reserve(620);
  const double span = hi - lo;
  for (int i = 0; i <= 512; ++i) ys.push_back(lo + span * (i / 512.0));
  for (int k = 1; k <= 45; ++k) {
    const double off = span * std::ldexp(1.0, -k);
    ys.push_back(lo + off);
    ys.push_back(hi - off);
  }
  std::sort(ys.begin(), ys.end());

  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double v = ratio_at(ys[i]);
    if (v > best) {
      best = v;
      best_idx = i;
    }
  }
  const double bracket_lo = ys[best_idx > 0 ? best_idx - 1 : 0];
  const double bracket_hi = ys[std::min(best_idx + 1, ys.size() - 1)];
  if (bracket_lo < bracket_hi)
    best = std::max(
        best, golden_section_max(ratio_at, bracket_lo, bracket_hi, 1e-9));
  if (std::isnan(best)) throw std::logic_error("sup_ratio: NaN result");
  return best;
}

FamilySet FamilySet::shared(LocationFamily family) {
  FamilySet set;
  set.shared_ = true;
  set.families_.push_back(family);
  set.distinct_.push_back(std::move(family));
  return set;
}

FamilySet FamilySet::per_hypothesis(std::vector<LocationFamily> families) {
  if (families.empty())
    throw std::domain_error("FamilySet: per-hypothesis list is empty");
  FamilySet set;
  set.shared_ = false;
  for (const auto& f : families) {
    bool seen = false;
    for (const auto& d : set.distinct_)
      if (d == f) {
        seen = true;
        break;
      }
    if (!seen) set.distinct_.push_back(f);
  }
  set.families_ = std::move(families);
  return set;
}

bool FamilySet::all_monotone_ratio() const {
  return std::all_of(distinct_.begin(), distinct_.end(),
                     [](const LocationFamily& f) {
                       return f.has_monotone_ratio();
                     });
}

}  // namespace fdrcurve
