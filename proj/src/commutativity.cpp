#include "commuprop/commutativity.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace commuprop {

namespace {

std::vector<double> uniform_grid(const Interval& iv, int grid_size) {
  if (grid_size < 3)
    throw std::invalid_argument("commutativity: grid size must be at least 3");
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  const double step = (iv.hi - iv.lo) / double(grid_size - 1);
  for (int i = 0; i < grid_size; ++i) grid[static_cast<std::size_t>(i)] = iv.lo + step * i;
  grid.back() = iv.hi;
  return grid;
}

}  // namespace

CommutativityReport check_functional_commutativity(const GeneratorSum& g,
                                                   int grid_size, double rel_tol) {
  if (!(rel_tol > 0.0))
    throw std::invalid_argument("commutativity: tolerance must be positive");
  const std::vector<double> grid = uniform_grid(g.interval(), grid_size);
  const std::size_t m = grid.size();

  std::vector<Matrix> samples(m);
  std::vector<double> norms(m);
  for (std::size_t i = 0; i < m; ++i) {
    samples[i] = eval_generator(g, grid[i]);
    norms[i] = samples[i].norm();
  }

  double max_ratio = -1.0;
  double witness_norm = 0.0;
  std::pair<double, double> witness{grid[0], grid[1]};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double raw = commutator(samples[i], samples[j]).norm();
      const double ratio = raw / (1.0 + norms[i] * norms[j]);
      if (ratio > max_ratio) {
        max_ratio = ratio;
        witness_norm = raw;
        witness = {grid[i], grid[j]};
      }
    }
  }

  // Equivalent derivative criterion [L(t), L'(t)] = 0, evaluated with a
  // central difference pulled inside the interval at the endpoints. The
  // scale term absorbs the difference quotient's rounding amplification.
  const double h = 1e-5;
  double max_deriv = 0.0;
  double max_deriv_ratio = 0.0;
  for (double t : grid) {
    const double td = std::clamp(t, g.interval().lo + h, g.interval().hi - h);
    const Matrix lt = eval_generator(g, td);
    const Matrix dt = derivative_generator(g, td, h);
    const double raw = commutator(lt, dt).norm();
    const double ln = lt.norm();
    max_deriv = std::max(max_deriv, raw);
    max_deriv_ratio = std::max(max_deriv_ratio, raw / (1.0 + ln * (ln + dt.norm())));
  }

  CommutativityReport report;
  report.is_commutative = max_ratio <= rel_tol;
  report.max_pairwise_commutator_norm = witness_norm;
  report.max_derivative_commutator_norm = max_deriv;
  report.witness_pair = witness;
  report.grid = grid;
  report.diagnostics_agree =
      report.is_commutative == (max_deriv_ratio <= std::max(rel_tol, 1e-8));
  report.tolerance = rel_tol;
  return report;
}

MartinDecomposition martin_decompose(const GeneratorSum& g, int grid_size,
                                     double rel_tol) {
  const CommutativityReport report = check_functional_commutativity(g, grid_size, rel_tol);
  if (!report.is_commutative)
    throw NotCommutativeError(
        "martin_decompose: generator is not functionally commutative (witness t=" +
        std::to_string(report.witness_pair.first) + ", s=" +
        std::to_string(report.witness_pair.second) + ")");

  const std::vector<double> grid = uniform_grid(g.interval(), grid_size);
  const Eigen::Index n2 = g.dim() * g.dim();

  std::vector<Matrix> samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) samples[i] = eval_generator(g, grid[i]);

  // Greedy earliest-first selection of linearly independent samples.
  MartinDecomposition out;
  Eigen::MatrixXcd basis_cols(n2, 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (basis_cols.cols() >= n2) break;  // dimension bound reached
    Eigen::MatrixXcd candidate(n2, basis_cols.cols() + 1);
    candidate.leftCols(basis_cols.cols()) = basis_cols;
    candidate.col(basis_cols.cols()) = vec(samples[i]);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(candidate);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) continue;  // zero sample adds nothing
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > 1e-10 * sv(0)) ++rank;
    if (rank == candidate.cols()) {
      basis_cols = candidate;
      out.basis.push_back(samples[i]);
      out.basis_times.push_back(grid[i]);
    }
  }
  if (out.basis.empty()) {
    // Identically zero generator on the grid: keep the earliest sample so the
    // representation stays well-formed with zero coefficients.
    out.basis.push_back(samples[0]);
    out.basis_times.push_back(grid[0]);
    basis_cols = Eigen::MatrixXcd(n2, 1);
    basis_cols.col(0) = vec(samples[0]);
  }

  // Basis matrices must commute pairwise; functional commutativity implies
  // it, but the property is what downstream factorizations rely on.
  for (std::size_t i = 0; i < out.basis.size(); ++i) {
    for (std::size_t j = i + 1; j < out.basis.size(); ++j) {
      const double raw = commutator(out.basis[i], out.basis[j]).norm();
      if (raw > rel_tol * (1.0 + out.basis[i].norm() * out.basis[j].norm()))
        throw NotCommutativeError("martin_decompose: basis samples fail to commute");
    }
  }

  // Least-squares coefficients at every grid point, with residual control.
  const Eigen::Index mb = basis_cols.cols();
  out.grid = grid;
  out.coefficients.resize(static_cast<Eigen::Index>(grid.size()), mb);
  out.residuals.resize(grid.size());
  out.max_residual = 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(basis_cols,
                                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector target = vec(samples[i]);
    const Vector x = solver.solve(target);
    const double residual = (basis_cols * x - target).norm();
    out.coefficients.row(static_cast<Eigen::Index>(i)) = x.transpose();
    out.residuals[i] = residual;
    out.max_residual = std::max(out.max_residual, residual);
    if (residual > rel_tol * (1.0 + samples[i].norm()))
      throw std::runtime_error(
          "martin_decompose: reconstruction residual too large at t=" +
          std::to_string(grid[i]));
  }
  return out;
}

SpatialDecomposition::SpatialDecomposition(std::vector<DecompositionPart> parts,
                                           Eigen::Index n, Interval interval)
    : parts_(std::move(parts)), n_(n), interval_(interval) {
  if (n_ <= 0) throw std::invalid_argument("decomposition: dimension must be positive");
  if (parts_.empty())
    throw std::invalid_argument("decomposition: needs at least one part");
  for (const auto& part : parts_) {
    if (part.g.rows() != n_ || part.g.cols() != n_)
      throw std::invalid_argument("decomposition: every part matrix must be n x n");
    if (part.primitive_coeffs.empty())
      throw std::invalid_argument("decomposition: parts need at least one coefficient");
  }
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    for (std::size_t j = i + 1; j < parts_.size(); ++j) {
      const double raw = commutator(parts_[i].g, parts_[j].g).norm();
      if (raw > 1e-10 * parts_[i].g.norm() * parts_[j].g.norm())
        throw NotCommutativeError("decomposition: part matrices do not commute");
    }
  }
}

SpatialDecomposition as_spatial_decomposition(const GeneratorSum& g, double rel_tol) {
  std::vector<DecompositionPart> parts;
  parts.reserve(g.terms().size());
  for (const auto& term : g.terms())
    parts.push_back({{ScalarFn(), term.coeff}, term.mat});
  SpatialDecomposition d(std::move(parts), g.dim(), g.interval());

  for (double t : uniform_grid(g.interval(), 33)) {
    const Matrix lt = eval_generator(g, t);
    const double residual = (eval_decomposition(d, t) - lt).norm();
    if (residual > rel_tol * (1.0 + lt.norm()))
      throw std::runtime_error(
          "as_spatial_decomposition: reconstruction residual too large at t=" +
          std::to_string(t));
  }
  return d;
}

Matrix eval_decomposition(const SpatialDecomposition& d, double t) {
  Matrix out = Matrix::Zero(d.dim(), d.dim());
  for (const auto& part : d.parts()) {
    Matrix power = Matrix::Identity(d.dim(), d.dim());  // G^(k-1), k from 1
    for (const auto& coeff : part.primitive_coeffs) {
      out += coeff(t) * power;
      power = power * part.g;
    }
  }
  return out;
}

}  // namespace commuprop
