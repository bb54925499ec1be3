#include <algorithm>
#include <cmath>
#include <numeric>

#include "comindex/error.hpp"
#include "comindex/factors.hpp"

namespace comindex {
namespace {

// A sweep whose largest plane rotation is below this is a fixed point
// (together with the relative criterion test).
constexpr double kAngleTolerance = 1e-11;
// Pairs whose rotation equation is this close to 0/0 are flat; skip them.
constexpr double kFlatPairTolerance = 1e-13;

std::vector<double> row_norms(const Matrix& loadings) {
  std::vector<double> h = communalities(loadings);
  for (double& v : h) v = std::sqrt(v);
  return h;
}

Matrix normalized_rows(const Matrix& loadings, const std::vector<double>& norms) {
  Matrix out = loadings;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    if (norms[i] == 0.0) continue;
    for (double& v : out.row(i)) v /= norms[i];
  }
  return out;
}

double raw_criterion(const Matrix& h) {
  const double p = static_cast<double>(h.rows());
  double crit = 0.0;
  for (std::size_t k = 0; k < h.cols(); ++k) {
    double s2 = 0.0;
    double s4 = 0.0;
    for (std::size_t i = 0; i < h.rows(); ++i) {
      const double sq = h(i, k) * h(i, k);
      s2 += sq;
      s4 += sq * sq;
    }
    crit += s4 / p - (s2 / p) * (s2 / p);
  }
  return crit;
}

// Rotates columns j and l of `h` and `t` by the angle that maximizes the
// criterion for that pair. Returns the absolute angle applied.
double rotate_pair(Matrix& h, Matrix& t, std::size_t j, std::size_t l) {
  const double p = static_cast<double>(h.rows());
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    const double u = h(i, j) * h(i, j) - h(i, l) * h(i, l);
    const double v = 2.0 * h(i, j) * h(i, l);
    a += u;
    b += v;
    c += u * u - v * v;
    d += u * v;
    scale += u * u + v * v;
  }
  const double numerator = 2.0 * (p * d - a * b);
  const double denominator = p * c - (a * a - b * b);
  scale = p * scale + a * a + b * b;
  if (std::hypot(numerator, denominator) <= kFlatPairTolerance * scale) return 0.0;

  const double angle = 0.25 * std::atan2(numerator, denominator);
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    const double x = h(i, j);
    const double y = h(i, l);
    h(i, j) = cs * x + sn * y;
    h(i, l) = -sn * x + cs * y;
  }
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double x = t(i, j);
    const double y = t(i, l);
    t(i, j) = cs * x + sn * y;
    t(i, l) = -sn * x + cs * y;
  }
  return std::abs(angle);
}

// Sorts columns by explained sum of squares (descending) and makes each
// column's largest-magnitude loading positive; mirrors the change in `t`.
void canonicalize(Matrix& loadings, Matrix& t) {
  const std::size_t k = loadings.cols();
  std::vector<double> ss(k, 0.0);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < loadings.rows(); ++i) ss[c] += loadings(i, c) * loadings(i, c);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return ss[x] > ss[y]; });

  Matrix sorted_l(loadings.rows(), k);
  Matrix sorted_t(t.rows(), k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t src = order[c];
    std::size_t largest = 0;
    for (std::size_t i = 1; i < loadings.rows(); ++i) {
      if (std::abs(loadings(i, src)) > std::abs(loadings(largest, src))) largest = i;
    }
    const double sign = loadings(largest, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < loadings.rows(); ++i) sorted_l(i, c) = sign * loadings(i, src);
    for (std::size_t i = 0; i < t.rows(); ++i) sorted_t(i, c) = sign * t(i, src);
  }
  loadings = std::move(sorted_l);
  t = std::move(sorted_t);
}

}  // namespace

double varimax_criterion(const Matrix& loadings, bool kaiser_normalize) {
  if (!kaiser_normalize) return raw_criterion(loadings);
  return raw_criterion(normalized_rows(loadings, row_norms(loadings)));
}

VarimaxResult varimax(const Matrix& loadings, const VarimaxOptions& options) {
  const std::size_t p = loadings.rows();
  const std::size_t k = loadings.cols();
  if (loadings.empty() || k < 1) throw ValidationError("varimax: empty loading matrix");
  if (p < k) {
    throw ValidationError("varimax: need at least as many variables as factors");
  }
  if (!(options.tol > 0.0) || options.max_iter < 1) {
    throw ValidationError("varimax: tol must be positive and max_iter at least 1");
  }

  VarimaxResult out;
  if (k == 1) {
    out.loadings = loadings;
    out.rotation = Matrix::identity(1);
    out.converged = true;
    out.criterion_history = {varimax_criterion(loadings, options.kaiser_normalize)};
    return out;
  }

  const std::vector<double> norms =
      options.kaiser_normalize ? row_norms(loadings) : std::vector<double>(p, 1.0);
  Matrix h = options.kaiser_normalize ? normalized_rows(loadings, norms) : loadings;
  Matrix t = Matrix::identity(k);

  double crit = raw_criterion(h);
  out.criterion_history.push_back(crit);
  for (int sweep = 1; sweep <= options.max_iter; ++sweep) {
    double max_angle = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j)
      for (std::size_t l = j + 1; l < k; ++l)
        max_angle = std::max(max_angle, rotate_pair(h, t, j, l));
    const double next = raw_criterion(h);
    out.criterion_history.push_back(next);
    out.sweeps = sweep;
    const double change = std::abs(next - crit) / std::max(std::abs(next), 1e-300);
    crit = next;
    if (change < options.tol && max_angle < kAngleTolerance) {
      out.converged = true;
      break;
    }
  }

  out.loadings = loadings * t;
  canonicalize(out.loadings, t);
  out.rotation = std::move(t);
  return out;
}

}  // namespace comindex
