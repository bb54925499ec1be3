#include "comindex/factors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "comindex/error.hpp"
#include "comindex/numkernel.hpp"

namespace comindex {
namespace {

constexpr double kUnitDiagonalTolerance = 1e-9;

void require_correlation(const Matrix& r, const char* op) {
  if (!r.square() || r.empty()) {
    throw ValidationError(std::string(op) + ": correlation matrix must be square");
  }
  for (std::size_t i = 0; i < r.rows(); ++i) {
    if (std::abs(r(i, i) - 1.0) > kUnitDiagonalTolerance) {
      throw ValidationError(std::string(op) + ": correlation matrix needs a unit diagonal");
    }
  }
}

}  // namespace

std::string factor_name(std::size_t index) { return "F" + std::to_string(index + 1); }

std::vector<std::string> FactorModel::factor_names() const {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < retained; ++k) names.push_back(factor_name(k));
  return names;
}

Matrix correlation_matrix(const StandardizedMatrix& z) {
  const std::size_t n = z.values.rows();
  const std::size_t p = z.values.cols();
  if (n < 3) throw ValidationError("correlation_matrix: need at least 3 cases");
  Matrix r = Matrix::identity(p);
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += z.values(i, a) * z.values(i, b);
      const double v = std::clamp(s * scale, -1.0, 1.0);
      r(a, b) = v;
      r(b, a) = v;
    }
  }
  return r;
}

PcaExtraction extract_pca(const Matrix& r, const RetentionRule& rule) {
  require_correlation(r, "extract_pca");
  const std::size_t p = r.rows();
  const EigenDecomposition eig = sym_eigen(r);

  std::size_t k = 0;
  if (rule.kind == RetentionRule::Kind::kFixed) {
    if (rule.fixed_k < 1 || rule.fixed_k > p) {
      throw ValidationError("fixed retention needs 1 <= k <= " + std::to_string(p) +
                            ", got " + std::to_string(rule.fixed_k));
    }
    k = rule.fixed_k;
  } else {
    while (k < p && eig.eigenvalues[k] > 1.0) ++k;
    if (k == 0) {
      std::ostringstream msg;
      msg << "no eigenvalue exceeds 1 (largest is " << eig.eigenvalues.front()
          << "); use fixed retention instead of kaiser";
      throw NumericalError(msg.str(), "extract");
    }
  }

  PcaExtraction out;
  out.eigenvalues = eig.eigenvalues;
  out.retained = k;
  out.loadings = Matrix(p, k);
  for (std::size_t j = 0; j < k; ++j) {
    const double s = std::sqrt(std::max(0.0, eig.eigenvalues[j]));
    for (std::size_t i = 0; i < p; ++i) out.loadings(i, j) = eig.eigenvectors(i, j) * s;
  }
  return out;
}

std::string kmo_label(double kmo) {
  // Rounding slack so a value that is 0.5 in exact arithmetic still lands
  // on the boundary's upper side.
  constexpr double slack = 1e-9;
  if (kmo >= 0.9 - slack) return "marvelous";
  if (kmo >= 0.8 - slack) return "meritorious";
  if (kmo >= 0.7 - slack) return "middling";
  if (kmo >= 0.6 - slack) return "mediocre";
  if (kmo >= 0.5 - slack) return "miserable";
  return "unacceptable";
}

KmoResult kmo(const Matrix& r) {
  require_correlation(r, "kmo");
  const std::size_t p = r.rows();
  const Matrix s = invert_spd(r);

  std::vector<double> r2(p, 0.0);
  std::vector<double> q2(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (i == j) continue;
      const double q = -s(i, j) / std::sqrt(s(i, i) * s(j, j));
      r2[i] += r(i, j) * r(i, j);
      q2[i] += q * q;
    }
  }

  double r2_total = 0.0;
  double q2_total = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    r2_total += r2[i];
    q2_total += q2[i];
  }
  if (r2_total + q2_total == 0.0) {
    throw NumericalError("KMO is undefined: all off-diagonal correlations are zero", "kmo");
  }

  KmoResult out;
  out.overall = r2_total / (r2_total + q2_total);
  out.label = kmo_label(out.overall);
  out.per_variable.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double denom = r2[i] + q2[i];
    out.per_variable[i] = denom > 0.0 ? r2[i] / denom : 0.0;
  }
  return out;
}

Matrix score_coefficients(const Matrix& r, const Matrix& loadings) {
  if (r.rows() != loadings.rows()) {
    throw ValidationError("score_coefficients: loadings have " +
                          std::to_string(loadings.rows()) + " rows, correlation matrix " +
                          std::to_string(r.rows()));
  }
  return invert_spd(r) * loadings;
}

FactorScores factor_scores(const StandardizedMatrix& z, const Matrix& w,
                           std::vector<std::string> case_ids) {
  if (z.values.cols() != w.rows()) {
    throw ValidationError("factor_scores: data has " + std::to_string(z.values.cols()) +
                          " variables but weights have " + std::to_string(w.rows()) +
                          " rows");
  }
  if (case_ids.size() != z.values.rows()) {
    throw ValidationError("factor_scores: case id count does not match data rows");
  }
  FactorScores out;
  out.case_ids = std::move(case_ids);
  for (std::size_t k = 0; k < w.cols(); ++k) out.factor_names.push_back(factor_name(k));
  out.scores = z.values * w;
  return out;
}

std::vector<double> communalities(const Matrix& loadings) {
  std::vector<double> h(loadings.rows(), 0.0);
  for (std::size_t i = 0; i < loadings.rows(); ++i)
    for (double v : loadings.row(i)) h[i] += v * v;
  return h;
}

FactorModel fit_factor_model(const StandardizedMatrix& z, const IndicatorDataset& ds,
                             const FactorOptions& options) {
  if (z.values.cols() != ds.n_variables()) {
    throw ValidationError("fit_factor_model: standardized data does not match dataset");
  }
  const Matrix r = in_stage("correlate", [&] { return correlation_matrix(z); });
  PcaExtraction pca = in_stage("extract", [&] { return extract_pca(r, options.retention); });

  FactorModel model;
  model.variable_names = ds.indicator_names();
  model.variable_tags = ds.tags();
  model.eigenvalues = pca.eigenvalues;
  model.retained = pca.retained;
  model.rotation_method = options.rotation;
  model.kaiser_normalized =
      options.rotation == RotationMethod::kVarimax && options.varimax.kaiser_normalize;

  if (options.rotation == RotationMethod::kVarimax) {
    VarimaxResult rot =
        in_stage("rotate", [&] { return varimax(pca.loadings, options.varimax); });
    model.loadings_rotated = std::move(rot.loadings);
    model.rotation = std::move(rot.rotation);
    model.rotation_converged = rot.converged;
    model.rotation_sweeps = rot.sweeps;
    model.criterion_history = std::move(rot.criterion_history);
  } else {
    model.loadings_rotated = pca.loadings;
    model.rotation = Matrix::identity(pca.retained);
  }
  model.loadings_unrotated = std::move(pca.loadings);
  model.communalities = communalities(model.loadings_rotated);

  double retained_sum = 0.0;
  for (std::size_t k = 0; k < model.retained; ++k) retained_sum += model.eigenvalues[k];
  model.variance_explained = retained_sum / static_cast<double>(ds.n_variables());

  model.kmo = in_stage("kmo", [&] { return kmo(r); });
  model.score_coefficients =
      in_stage("score", [&] { return score_coefficients(r, model.loadings_rotated); });
  return model;
}

}  // namespace comindex
