#include "commuprop/matrix_ops.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace commuprop {

namespace {

void require_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
}

}  // namespace

Matrix commutator(const Matrix& a, const Matrix& b) {
  require_square(a, "commutator");
  require_square(b, "commutator");
  if (a.rows() != b.rows())
    throw std::invalid_argument("commutator: dimension mismatch");
  return a * b - b * a;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector vec(const Matrix& a) {
  // MatrixXcd is column-major, so the raw storage already stacks columns.
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, Eigen::Index n) {
  if (n <= 0 || v.size() != n * n)
    throw std::invalid_argument("unvec: vector length must be n*n");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

Matrix matrix_exp(const Matrix& a) {
  require_square(a, "matrix_exp");
  if (!a.allFinite()) throw std::invalid_argument("matrix_exp: entries must be finite");
  const Eigen::Index n = a.rows();

  int s = 0;
  double norm = a.norm();
  while (norm > 0.5 && s < 200) {
    norm *= 0.5;
    ++s;
  }
  const Matrix b = a / std::ldexp(1.0, s);

  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 300; ++k) {
    term = (term * b) / double(k);
    const double tn = term.norm();
    if (tn == 0.0) break;
    sum += term;
    if (tn < 1e-16 * sum.norm()) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

int min_poly_degree(const Matrix& a) {
  require_square(a, "min_poly_degree");
  const Eigen::Index n = a.rows();
  const Eigen::Index n2 = n * n;

  Matrix powers(n2, n + 1);
  Matrix pk = Matrix::Identity(n, n);
  for (Eigen::Index m = 0; m <= n; ++m) {
    Vector col = vec(pk);
    const double cn = col.norm();
    if (cn == 0.0) return int(m);  // A^m = 0 already dependent on lower powers
    powers.col(m) = col / cn;      // scale-free rank decisions
    if (m < n) pk = pk * a;
  }

  for (Eigen::Index m = 1; m <= n; ++m) {
    Eigen::JacobiSVD<Matrix> svd(powers.leftCols(m + 1));
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cutoff) ++rank;
    if (rank <= m) return int(m);
  }
  return int(n);  // Cayley-Hamilton bound
}

double frob_norm(const Matrix& a) { return a.norm(); }

std::vector<double> hermitian_eigenvalues(const Matrix& a) {
  require_square(a, "hermitian_eigenvalues");
  if ((a - a.adjoint()).norm() > 1e-10)
    throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");

  Matrix m = 0.5 * (a + a.adjoint());
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, m.norm());

  auto offdiag_norm = [&]() {
    double acc = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q)
        if (p != q) acc += std::norm(m(p, q));
    return std::sqrt(acc);
  };

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (offdiag_norm() < 1e-12 * scale) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = m(p, q);
        const double beta = std::abs(apq);
        if (beta <= 1e-300) continue;
        const Complex phase = apq / beta;
        const double tau = (m(p, p).real() - m(q, q).real()) / (2.0 * beta);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // m <- U^dagger m U with the rotation acting on rows/columns p, q.
        const Eigen::RowVectorXcd rp = m.row(p);
        const Eigen::RowVectorXcd rq = m.row(q);
        m.row(p) = c * rp + s * phase * rq;
        m.row(q) = -s * std::conj(phase) * rp + c * rq;
        const Vector cp = m.col(p);
        const Vector cq = m.col(q);
        m.col(p) = c * cp + s * std::conj(phase) * cq;
        m.col(q) = -s * phase * cp + c * cq;
      }
    }
  }

  std::vector<double> values(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = m(i, i).real();
  std::sort(values.begin(), values.end());
  return values;
}

Spectrum Spectrum::from_sorted_eigenvalues(const std::vector<double>& values,
                                           double cluster_tol) {
  Spectrum sp;
  for (double v : values) {
    if (!sp.lines.empty() && std::abs(v - sp.lines.back().eigenvalue) <= cluster_tol) {
      ++sp.lines.back().multiplicity;
    } else {
      sp.lines.push_back({v, 1});
    }
  }
  return sp;
}

int Spectrum::total_multiplicity() const {
  int total = 0;
  for (const auto& line : lines) total += line.multiplicity;
  return total;
}

}  // namespace commuprop
