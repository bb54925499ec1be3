#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "comindex/error.hpp"
#include "comindex/numkernel.hpp"

namespace comindex {
namespace {

constexpr double kCfTolerance = 1e-14;
constexpr int kCfMaxIterations = 300;
constexpr double kTiny = 1e-300;
constexpr int kQuantileBisections = 60;

// Continued fraction for I_x(a, b) (modified Lentz). `y` is 1 - x computed
// by the caller without cancellation.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kCfTolerance) return h;
  }
  std::ostringstream msg;
  msg << "incomplete beta continued fraction did not converge (a=" << a
      << ", b=" << b << ", x=" << x << ")";
  throw NumericalError(msg.str());
}

// I_x(a, b) with y = 1 - x supplied separately.
double ibeta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  double result;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    result = front * beta_continued_fraction(a, b, x) / a;
  } else {
    result = 1.0 - front * beta_continued_fraction(b, a, y) / b;
  }
  return std::clamp(result, 0.0, 1.0);
}

void require_positive_df(double df, const char* name) {
  if (!(df > 0.0) || !std::isfinite(df)) {
    std::ostringstream msg;
    msg << name << " must be a positive finite number, got " << df;
    throw ValidationError(msg.str());
  }
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    std::ostringstream msg;
    msg << "incomplete beta needs a > 0 and b > 0, got a=" << a << ", b=" << b;
    throw ValidationError(msg.str());
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << "incomplete beta needs x in [0, 1], got " << x;
    throw ValidationError(msg.str());
  }
  return ibeta(a, b, x, 1.0 - x);
}

double t_two_tailed_p(double t, double df) {
  require_positive_df(df, "degrees of freedom");
  if (std::isnan(t)) throw ValidationError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double denom = df + t2;
  return ibeta(0.5 * df, 0.5, df / denom, t2 / denom);
}

double t_quantile(double prob, double df) {
  require_positive_df(df, "degrees of freedom");
  if (!(prob > 0.0 && prob < 1.0)) {
    std::ostringstream msg;
    msg << "t_quantile probability must lie in (0, 1), got " << prob;
    throw ValidationError(msg.str());
  }
  if (prob == 0.5) return 0.0;
  const double tail = prob < 0.5 ? prob : 1.0 - prob;
  const double target = 2.0 * tail;

  double lo = 0.0;
  double hi = 1.0;
  while (t_two_tailed_p(hi, df) > target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("t_quantile: bracket overflow");
  }
  for (int i = 0; i < kQuantileBisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (t_two_tailed_p(mid, df) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  return prob < 0.5 ? -t : t;
}

double f_tail_p(double f, double df1, double df2) {
  require_positive_df(df1, "numerator degrees of freedom");
  require_positive_df(df2, "denominator degrees of freedom");
  if (!(f >= 0.0)) {
    std::ostringstream msg;
    msg << "F statistic must be non-negative, got " << f;
    throw ValidationError(msg.str());
  }
  if (std::isinf(f)) return 0.0;
  const double scaled = df1 * f;
  const double denom = df2 + scaled;
  return ibeta(0.5 * df2, 0.5 * df1, df2 / denom, scaled / denom);
}

}  // namespace comindex
