// quantum.hpp — Master-equation front end: superoperator builders acting on
// vectorized density matrices, two built-in two-level problems, and state
// evolution with physicality checks.
//
// Conventions: vec stacks columns, so vec(A rho B) = kron(B^T, A) vec(rho);
// an n x n system state maps to an n^2 superoperator dimension.
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "commuprop/solver.hpp"

namespace commuprop {

class PhysicalityError;

// Validated state: Hermitian within 1e-10, unit trace within 1e-10,
// eigenvalues >= -1e-9.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);
  const Matrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  Matrix mat_;
};

// An n^2 x n^2 matrix acting on vec(rho) for an n x n system.
class Superoperator {
 public:
  explicit Superoperator(Matrix m);
  const Matrix& mat() const { return mat_; }
  Eigen::Index system_dim() const { return sys_n_; }

  // unvec(S * vec(rho)).
  Matrix apply(const Matrix& rho) const;

  friend Superoperator operator+(const Superoperator& x, const Superoperator& y);
  friend Superoperator operator*(Complex c, const Superoperator& y);

 private:
  Matrix mat_;
  Eigen::Index sys_n_;
};

// rho -> U rho U^dagger - rho, as kron(conj(U), U) - I.
Superoperator conjugation_channel(const Matrix& u);

// rho -> -(i/hbar) [H, rho], as -(i/hbar) (kron(I, H) - kron(H^T, I)).
// H must be Hermitian within 1e-10; hbar > 0.
Superoperator hamiltonian_part(const Matrix& h, double hbar = 1.0);

// rho -> A rho A^dagger - 1/2 {A^dagger A, rho}.
Superoperator dissipator(const Matrix& a);

// rho -> 1/2 ([F_a, rho F_b] + [F_a rho, F_b]).
Superoperator bilinear_term(const Matrix& f_a, const Matrix& f_b);

// Pauli matrices, with sigma_2 = [[0, i], [-i, 0]].
Matrix pauli(int k);  // k in {1, 2, 3}
// Two-level ladder operators normalized so sigma_plus * sigma_minus has
// trace 2: sigma_plus = [[0, sqrt 2], [0, 0]], sigma_minus its adjoint.
Matrix sigma_plus();
Matrix sigma_minus();

// A closed-form propagator given as coefficient closures on fixed matrices.
struct AnalyticPropagator {
  struct Term {
    std::function<Complex(double)> coeff;
    Matrix mat;
  };
  std::vector<Term> terms;

  Matrix at(double t) const;
};

struct QuantumProblem {
  std::string name;
  GeneratorSum generator;                      // superoperator-level, n^2 x n^2
  std::optional<AnalyticPropagator> reference;  // closed-form Phi when known
  Eigen::Index system_dim;
};

// Two-level Pauli mixing channel
//   d rho/dt = gamma * sum_k alpha_k(t) (sigma_k rho sigma_k - rho).
// The generator carries four terms on fixed structural matrices whose
// coefficients are gamma*(a1+a2), gamma*(a1-a2), -gamma*(a1+a2), -2*gamma*a3,
// and a closed-form reference propagator is attached.
QuantumProblem example1(Complex gamma, const ScalarFn& a1, const ScalarFn& a2,
                        const ScalarFn& a3, Interval interval = Interval(-1.0, 25.0));

// Two-level system with coherent drive eps(t), gain/loss channels weighted by
// mu and 1-mu at rate gamma(t), and bilinear projector couplings c_ab(t):
//   d rho/dt = -(i/2) eps [sigma_3, rho]
//            + gamma (mu D[sigma_plus] + (1-mu) D[sigma_minus]) rho
//            + 1/2 sum_ab c_ab ([F_a, rho F_b] + [F_a rho, F_b]),
// with F_0 = sigma_minus sigma_plus, F_1 = sigma_plus sigma_minus. The
// generator is stored as three terms on mutually commuting matrices and a
// closed-form reference propagator is attached.
QuantumProblem example2(double mu, const ScalarFn& gamma, const ScalarFn& eps,
                        const ScalarFn& c00, const ScalarFn& c01,
                        const ScalarFn& c10, const ScalarFn& c11,
                        Interval interval = Interval(-1.0, 25.0));

struct PhysicalityReport {
  double hermiticity_defect;  // |rho - rho^dagger|_F
  double trace_defect;        // |tr rho - 1|
  double min_eigenvalue;      // of the Hermitian part
};

PhysicalityReport physicality_check(const Matrix& rho);

class PhysicalityError : public std::runtime_error {
 public:
  PhysicalityError(const std::string& what, double t, PhysicalityReport report);
  double time() const { return time_; }
  const PhysicalityReport& report() const { return report_; }

 private:
  double time_;
  PhysicalityReport report_;
};

struct StateTrajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
  std::vector<PhysicalityReport> reports;
};

// rho(t) = unvec(Phi(t) vec(rho0)) on an ascending time list. Every state is
// checked; a violation beyond tolerance (hermiticity or trace defect above
// 1e-8, or an eigenvalue below -1e-8) throws PhysicalityError with the
// offending time unless allow_unphysical is set.
StateTrajectory evolve_state(const Propagator& p, const DensityMatrix& rho0,
                             const std::vector<double>& times,
                             bool allow_unphysical = false);

}  // namespace commuprop
