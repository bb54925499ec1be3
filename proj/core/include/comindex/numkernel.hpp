#pragma once

#include <vector>

#include "comindex/matrix.hpp"

namespace comindex {

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // column i pairs with eigenvalues[i]
  int sweeps = 0;
};

// Cyclic Jacobi eigensolver for symmetric matrices. The input is
// symmetrized by averaging; asymmetry above 1e-9 is rejected. Each
// eigenvector is signed so its largest-magnitude entry is positive.
EigenDecomposition sym_eigen(const Matrix& a);

// Inverse of a symmetric positive-definite matrix as V diag(1/l) V^T.
// Throws NumericalError naming the smallest eigenvalue if it is <= 1e-12.
Matrix invert_spd(const Matrix& a);

// Regularized incomplete beta I_x(a, b).
double reg_incomplete_beta(double a, double b, double x);

// Two-tailed Student t probability P(|T| >= |t|).
double t_two_tailed_p(double t, double df);

// Inverse CDF of Student t.
double t_quantile(double prob, double df);

// Upper tail P(F >= f) of the F(df1, df2) distribution.
double f_tail_p(double f, double df1, double df2);

}  // namespace comindex
