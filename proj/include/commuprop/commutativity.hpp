// commutativity.hpp — Detecting functional commutativity of L(t), i.e.
// L(t)L(s) = L(s)L(t) for all t, s, and rewriting such generators as sums
// over mutually commuting constant matrices.
#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "commuprop/generator.hpp"
#include "commuprop/tolerance.hpp"

namespace commuprop {

class NotCommutativeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommutativityReport {
  bool is_commutative;
  // Frobenius norm of [L(t), L(s)] at the witness pair; the witness maximises
  // the scaled ratio norm / (1 + |L(t)| * |L(s)|), so the verdict is exactly
  // "max_pairwise_commutator_norm <= tol * (1 + |L(t)| * |L(s)|)" there.
  double max_pairwise_commutator_norm;
  // Max over the grid of |[L(t), L'(t)]| with L' a central difference. This
  // equivalent criterion is diagnostic only; a disagreement with the pairwise
  // verdict is flagged, never silently resolved.
  double max_derivative_commutator_norm;
  std::pair<double, double> witness_pair;
  std::vector<double> grid;
  bool diagnostics_agree;
  double tolerance;
};

// Samples L on a uniform grid over the generator's interval (grid_size >= 3)
// and checks every pair against the relative tolerance.
CommutativityReport check_functional_commutativity(const GeneratorSum& g,
                                                   int grid_size = 33,
                                                   double rel_tol = default_rel_tol());

// Result of sampling-based rewriting of L(t) as sum_k alpha_k(t) * L(t_k)
// with mutually commuting constant samples L(t_k).
struct MartinDecomposition {
  std::vector<Matrix> basis;        // L(t_k), in order of discovery
  std::vector<double> basis_times;  // the t_k, earliest first
  std::vector<double> grid;
  Eigen::MatrixXcd coefficients;    // grid.size() x basis.size(); row = alpha(t)
  std::vector<double> residuals;    // |sum_k alpha_k(t) L(t_k) - L(t)| per grid point
  double max_residual;
};

// Greedy earliest-first basis selection over the grid, then least-squares
// coefficients at every grid point. Requires a passing commutativity check
// (run internally); throws NotCommutativeError otherwise. The basis is
// re-verified to commute pairwise and its size never exceeds dim^2.
MartinDecomposition martin_decompose(const GeneratorSum& g, int grid_size = 33,
                                     double rel_tol = default_rel_tol());

// One part of a spatial decomposition: f(t, G) = sum_k coeffs[k](t) * G^(k-1).
struct DecompositionPart {
  std::vector<ScalarFn> primitive_coeffs;  // index k is the lambda^(k-1) coefficient
  Matrix g;
};

// L(t) = sum_i f_i(t, G_i) with pairwise commuting constant G_i. The
// constructor verifies |[G_i, G_j]| <= 1e-10 * |G_i| * |G_j| for all pairs.
class SpatialDecomposition {
 public:
  SpatialDecomposition(std::vector<DecompositionPart> parts, Eigen::Index n,
                       Interval interval);

  Eigen::Index dim() const { return n_; }
  const std::vector<DecompositionPart>& parts() const { return parts_; }
  const Interval& interval() const { return interval_; }

 private:
  std::vector<DecompositionPart> parts_;
  Eigen::Index n_;
  Interval interval_;
};

// Reads each generator term (beta_i, G_i) as the linear part f_i(t, lambda) =
// beta_i(t) * lambda. The term matrices must mutually commute; the
// reconstruction sum_i f_i(t, G_i) is re-verified against L(t) on a grid
// within rel_tol * (1 + |L(t)|).
SpatialDecomposition as_spatial_decomposition(const GeneratorSum& g,
                                              double rel_tol = default_rel_tol());

// sum_i f_i(t, G_i).
Matrix eval_decomposition(const SpatialDecomposition& d, double t);

}  // namespace commuprop
