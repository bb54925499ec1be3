#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "comindex/dataset.hpp"
#include "comindex/matrix.hpp"

namespace comindex {

// How many components to keep. Kaiser keeps eigenvalues strictly above 1.
struct RetentionRule {
  enum class Kind { kKaiser, kFixed };
  Kind kind = Kind::kKaiser;
  std::size_t fixed_k = 0;

  static RetentionRule kaiser() { return {}; }
  static RetentionRule fixed(std::size_t k) { return {Kind::kFixed, k}; }

  friend bool operator==(const RetentionRule&, const RetentionRule&) = default;
};

struct PcaExtraction {
  std::vector<double> eigenvalues;  // all p, descending
  Matrix loadings;                  // p x k, column j = v_j * sqrt(lambda_j)
  std::size_t retained = 0;
};

struct KmoResult {
  double overall = 0.0;
  std::vector<double> per_variable;
  std::string label;
};

struct VarimaxOptions {
  bool kaiser_normalize = true;
  double tol = 1e-10;
  int max_iter = 1000;

  friend bool operator==(const VarimaxOptions&, const VarimaxOptions&) = default;
};

struct VarimaxResult {
  Matrix loadings;  // p x k, columns sorted by sum of squares
  Matrix rotation;  // k x k orthogonal; loadings = input * rotation
  bool converged = false;
  int sweeps = 0;
  // Criterion before the first sweep and after each sweep.
  std::vector<double> criterion_history;
};

enum class RotationMethod { kVarimax, kNone };

struct FactorOptions {
  RetentionRule retention;
  RotationMethod rotation = RotationMethod::kVarimax;
  VarimaxOptions varimax;
};

struct FactorModel {
  std::vector<std::string> variable_names;
  std::vector<std::optional<IndicatorTag>> variable_tags;
  std::vector<double> eigenvalues;
  std::size_t retained = 0;
  Matrix loadings_unrotated;
  Matrix loadings_rotated;
  Matrix rotation;
  std::vector<double> communalities;
  double variance_explained = 0.0;
  KmoResult kmo;
  Matrix score_coefficients;
  RotationMethod rotation_method = RotationMethod::kVarimax;
  bool kaiser_normalized = true;
  bool rotation_converged = true;
  int rotation_sweeps = 0;
  std::vector<double> criterion_history;

  std::vector<std::string> factor_names() const;
};

struct FactorScores {
  std::vector<std::string> case_ids;
  std::vector<std::string> factor_names;
  Matrix scores;  // n x k
};

// "F1", "F2", ...
std::string factor_name(std::size_t index);

Matrix correlation_matrix(const StandardizedMatrix& z);

PcaExtraction extract_pca(const Matrix& r, const RetentionRule& rule);

// Kaiser (1974) adjective for an overall KMO value.
std::string kmo_label(double kmo);
KmoResult kmo(const Matrix& r);

// Sum over factors of the variance of squared loadings, with rows scaled
// to unit length first when `kaiser_normalize` is set.
double varimax_criterion(const Matrix& loadings, bool kaiser_normalize);

VarimaxResult varimax(const Matrix& loadings, const VarimaxOptions& options = {});

// Regression-method weights W = R^-1 * loadings.
Matrix score_coefficients(const Matrix& r, const Matrix& loadings);

FactorScores factor_scores(const StandardizedMatrix& z, const Matrix& w,
                           std::vector<std::string> case_ids);

// Per-variable sum of squared loadings.
std::vector<double> communalities(const Matrix& loadings);

// correlate -> extract -> rotate -> KMO -> score coefficients.
FactorModel fit_factor_model(const StandardizedMatrix& z, const IndicatorDataset& ds,
                             const FactorOptions& options);

}  // namespace comindex
