// matrix_ops.hpp — Dense complex matrix primitives.
//
// Everything operates on Eigen::MatrixXcd by value; functions are pure and
// thread-safe. The exponential is eigenvalue-free by design so it applies to
// defective matrices unchanged.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace commuprop {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// AB - BA. Both inputs must be square and of equal dimension.
Matrix commutator(const Matrix& a, const Matrix& b);

// Kronecker product, (p*rows(b)) x (q*cols(b)) for a of size p x q.
Matrix kron(const Matrix& a, const Matrix& b);

// Column-stacking: columns of a concatenated top to bottom.
Vector vec(const Matrix& a);

// Inverse of vec for square n x n targets; v must have n*n entries.
Matrix unvec(const Vector& v, Eigen::Index n);

// Matrix exponential via scaling-and-squaring with a Taylor series: the
// argument is scaled so its Frobenius norm is at most 0.5, the series is
// truncated once a term drops below 1e-16 of the partial sum's norm, and the
// result is squared back up. exp of the zero matrix is exactly the identity.
Matrix matrix_exp(const Matrix& a);

// Degree of the minimal polynomial: the smallest m >= 1 such that
// {I, A, ..., A^m} is linearly dependent in vectorized form. Rank decisions
// use singular values with threshold 1e-10 times the largest one.
int min_poly_degree(const Matrix& a);

double frob_norm(const Matrix& a);

// Real eigenvalues of a Hermitian matrix, ascending. The input must be
// Hermitian within 1e-10 in Frobenius norm. Computed with cyclic Jacobi
// rotations (at most 100 sweeps, or until the off-diagonal mass is
// negligible); intended for small matrices.
std::vector<double> hermitian_eigenvalues(const Matrix& a);

// Eigenvalue multiset with multiplicities, for diagnostics only.
struct Spectrum {
  struct Line {
    double eigenvalue;
    int multiplicity;
  };
  std::vector<Line> lines;

  static Spectrum from_sorted_eigenvalues(const std::vector<double>& values,
                                          double cluster_tol = 1e-8);
  int total_multiplicity() const;
};

}  // namespace commuprop
