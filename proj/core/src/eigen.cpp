#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "comindex/error.hpp"
#include "comindex/numkernel.hpp"

namespace comindex {
namespace {

constexpr int kMaxSweeps = 100;
constexpr double kRelativeOffTolerance = 1e-12;
constexpr double kSymmetryTolerance = 1e-9;
constexpr double kSingularTolerance = 1e-12;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Applies the plane rotation that annihilates a(p, q).
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenDecomposition sym_eigen(const Matrix& input) {
  if (!input.square() || input.empty()) {
    throw ValidationError("sym_eigen: matrix must be square, got " +
                          std::to_string(input.rows()) + "x" +
                          std::to_string(input.cols()));
  }
  const std::size_t n = input.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(input(i, j))) {
        throw ValidationError("sym_eigen: non-finite entry");
      }
      if (std::abs(input(i, j) - input(j, i)) >= kSymmetryTolerance) {
        std::ostringstream msg;
        msg << "sym_eigen: matrix is not symmetric at (" << i << ", " << j << ")";
        throw ValidationError(msg.str());
      }
      a(i, j) = 0.5 * (input(i, j) + input(j, i));
    }
  }

  Matrix v = Matrix::identity(n);
  const double threshold = kRelativeOffTolerance * frobenius_norm(a);
  int sweeps = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (sweeps == kMaxSweeps) {
      throw NumericalError("sym_eigen: no convergence after " +
                           std::to_string(kMaxSweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition out;
  out.sweeps = sweeps;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.eigenvalues[c] = a(src, src);
    std::size_t largest = 0;
    for (std::size_t r = 1; r < n; ++r) {
      if (std::abs(v(r, src)) > std::abs(v(largest, src))) largest = r;
    }
    const double sign = v(largest, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = sign * v(r, src);
  }
  return out;
}

Matrix invert_spd(const Matrix& a) {
  const EigenDecomposition eig = sym_eigen(a);
  const double smallest = eig.eigenvalues.back();
  if (!(smallest > kSingularTolerance)) {
    std::ostringstream msg;
    msg << "matrix is singular or not positive definite (smallest eigenvalue "
        << smallest << ")";
    throw NumericalError(msg.str());
  }
  const std::size_t n = a.rows();
  Matrix inv(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 1.0 / eig.eigenvalues[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = eig.eigenvectors(i, k) * w;
      for (std::size_t j = 0; j < n; ++j) inv(i, j) += vik * eig.eigenvectors(j, k);
    }
  }
  return inv;
}

}  // namespace comindex
