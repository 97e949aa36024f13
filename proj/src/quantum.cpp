#include "commuprop/quantum.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace commuprop {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
}

Eigen::Index isqrt_exact(Eigen::Index n2, const char* who) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(n2))));
  if (n * n != n2)
    throw std::invalid_argument(std::string(who) + ": dimension must be a perfect square");
  return n;
}

Matrix diag4(Complex a, Complex b, Complex c, Complex d) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  m(3, 3) = d;
  return m;
}

// Anti-diagonal with the first entry in the top-right corner.
Matrix adiag4(Complex a, Complex b, Complex c, Complex d) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 3) = a;
  m(1, 2) = b;
  m(2, 1) = c;
  m(3, 0) = d;
  return m;
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix m) : mat_(std::move(m)) {
  require_square(mat_, "density matrix");
  if (!mat_.allFinite())
    throw std::invalid_argument("density matrix: entries must be finite");
  const PhysicalityReport rep = physicality_check(mat_);
  if (rep.hermiticity_defect > 1e-10)
    throw std::invalid_argument("density matrix: not Hermitian (defect " +
                                std::to_string(rep.hermiticity_defect) + ")");
  if (rep.trace_defect > 1e-10)
    throw std::invalid_argument("density matrix: trace must be 1 (defect " +
                                std::to_string(rep.trace_defect) + ")");
  if (rep.min_eigenvalue < -1e-9)
    throw std::invalid_argument("density matrix: not positive semidefinite (min eig " +
                                std::to_string(rep.min_eigenvalue) + ")");
}

Superoperator::Superoperator(Matrix m) : mat_(std::move(m)) {
  require_square(mat_, "superoperator");
  sys_n_ = isqrt_exact(mat_.rows(), "superoperator");
}

Matrix Superoperator::apply(const Matrix& rho) const {
  if (rho.rows() != sys_n_ || rho.cols() != sys_n_)
    throw std::invalid_argument("superoperator: state dimension mismatch");
  return unvec(mat_ * vec(rho), sys_n_);
}

Superoperator operator+(const Superoperator& x, const Superoperator& y) {
  if (x.sys_n_ != y.sys_n_)
    throw std::invalid_argument("superoperator: dimension mismatch");
  return Superoperator(x.mat_ + y.mat_);
}

Superoperator operator*(Complex c, const Superoperator& y) {
  return Superoperator(c * y.mat_);
}

Superoperator conjugation_channel(const Matrix& u) {
  require_square(u, "conjugation_channel");
  const Eigen::Index n2 = u.rows() * u.rows();
  return Superoperator(kron(u.conjugate(), u) - Matrix::Identity(n2, n2));
}

Superoperator hamiltonian_part(const Matrix& h, double hbar) {
  require_square(h, "hamiltonian_part");
  if (!(hbar > 0.0)) throw std::invalid_argument("hamiltonian_part: hbar must be positive");
  if ((h - h.adjoint()).norm() > 1e-10)
    throw std::invalid_argument("hamiltonian_part: H must be Hermitian");
  const Matrix id = Matrix::Identity(h.rows(), h.cols());
  return Superoperator((-kI / hbar) * (kron(id, h) - kron(h.transpose(), id)));
}

Superoperator dissipator(const Matrix& a) {
  require_square(a, "dissipator");
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix ada = a.adjoint() * a;
  return Superoperator(kron(a.conjugate(), a) -
                       0.5 * (kron(id, ada) + kron(ada.transpose(), id)));
}

Superoperator bilinear_term(const Matrix& f_a, const Matrix& f_b) {
  require_square(f_a, "bilinear_term");
  require_square(f_b, "bilinear_term");
  if (f_a.rows() != f_b.rows())
    throw std::invalid_argument("bilinear_term: dimension mismatch");
  const Matrix id = Matrix::Identity(f_a.rows(), f_a.cols());
  const Matrix ba = f_b * f_a;
  return Superoperator(kron(f_b.transpose(), f_a) -
                       0.5 * (kron(ba.transpose(), id) + kron(id, ba)));
}

Matrix pauli(int k) {
  Matrix m(2, 2);
  switch (k) {
    case 1:
      m << 0, 1, 1, 0;
      return m;
    case 2:
      m << 0, kI, -kI, 0;
      return m;
    case 3:
      m << 1, 0, 0, -1;
      return m;
    default:
      throw std::invalid_argument("pauli: index must be 1, 2 or 3");
  }
}

Matrix sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = std::sqrt(2.0);
  return m;
}

Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = std::sqrt(2.0);
  return m;
}

Matrix AnalyticPropagator::at(double t) const {
  if (terms.empty()) throw std::logic_error("analytic propagator: no terms");
  Matrix out = Matrix::Zero(terms[0].mat.rows(), terms[0].mat.cols());
  for (const auto& term : terms) out += term.coeff(t) * term.mat;
  return out;
}

QuantumProblem example1(Complex gamma, const ScalarFn& a1, const ScalarFn& a2,
                        const ScalarFn& a3, Interval interval) {
  const ScalarFn g = ScalarFn::constant(gamma);
  const Matrix diag_outer = diag4(1, 0, 0, 1);
  const Matrix adiag_outer = adiag4(1, 0, 0, 1);
  const Matrix adiag_inner = adiag4(0, 1, 1, 0);
  const Matrix diag_inner = diag4(0, 1, 1, 0);

  std::vector<GeneratorTerm> terms;
  terms.push_back({g * (a1 + a2), adiag_outer});
  terms.push_back({g * (a1 - a2), adiag_inner});
  terms.push_back({-(g * (a1 + a2)), Matrix::Identity(4, 4)});
  terms.push_back({Complex(-2.0) * (g * a3), diag_inner});
  GeneratorSum gen(4, std::move(terms), interval);

  // Closed form: with E+ = exp(-2 gamma int(a1+a2)), Ek = exp(-2 gamma int(ak)),
  //   Phi = 1/2 [ (1+E+) diag(1,0,0,1) + (1-E+) adiag(1,0,0,1)
  //             + (E2-E1) E3 adiag(0,1,1,0) + (E2+E1) E3 diag(0,1,1,0) ].
  AnalyticPropagator ref;
  auto decay = [gamma](const ScalarFn& f, double t) {
    return std::exp(-2.0 * gamma * integrate(f, 0.0, t));
  };
  ref.terms.push_back({[=](double t) { return 0.5 * (1.0 + decay(a1 + a2, t)); },
                       diag_outer});
  ref.terms.push_back({[=](double t) { return 0.5 * (1.0 - decay(a1 + a2, t)); },
                       adiag_outer});
  ref.terms.push_back({[=](double t) {
                         return 0.5 * (decay(a2, t) - decay(a1, t)) * decay(a3, t);
                       },
                       adiag_inner});
  ref.terms.push_back({[=](double t) {
                         return 0.5 * (decay(a2, t) + decay(a1, t)) * decay(a3, t);
                       },
                       diag_inner});

  return QuantumProblem{"example1", std::move(gen), std::move(ref), 2};
}

QuantumProblem example2(double mu, const ScalarFn& gamma, const ScalarFn& eps,
                        const ScalarFn& c00, const ScalarFn& c01,
                        const ScalarFn& c10, const ScalarFn& c11, Interval interval) {
  if (!(mu >= 0.0 && mu <= 1.0))
    throw std::invalid_argument("example2: mu must lie in [0, 1]");

  Matrix g1 = Matrix::Zero(4, 4);
  g1(0, 0) = mu - 1.0;
  g1(0, 3) = mu;
  g1(3, 0) = 1.0 - mu;
  g1(3, 3) = -mu;
  const Matrix g2 = diag4(0, 1, 0, 0);
  const Matrix g3 = diag4(0, 0, 1, 0);

  const ScalarFn common = 4.0 * c01 - 2.0 * c00 - 2.0 * c11 - gamma;
  const ScalarFn common_conj = 4.0 * c10 - 2.0 * c00 - 2.0 * c11 - gamma;
  const ScalarFn f2 = common + kI * eps;
  const ScalarFn f3 = common_conj - kI * eps;

  std::vector<GeneratorTerm> terms;
  terms.push_back({Complex(2.0) * gamma, g1});
  terms.push_back({f2, g2});
  terms.push_back({f3, g3});
  GeneratorSum gen(4, std::move(terms), interval);

  // Closed form: Phi = P + exp(int f2) G2 + exp(int f3) G3 - exp(-2 int gamma) G1
  // with P carrying the mu-weighted corners.
  Matrix p = Matrix::Zero(4, 4);
  p(0, 0) = mu;
  p(0, 3) = mu;
  p(3, 0) = 1.0 - mu;
  p(3, 3) = 1.0 - mu;

  AnalyticPropagator ref;
  ref.terms.push_back({[](double) { return Complex(1.0); }, p});
  ref.terms.push_back({[f2](double t) { return std::exp(integrate(f2, 0.0, t)); }, g2});
  ref.terms.push_back({[f3](double t) { return std::exp(integrate(f3, 0.0, t)); }, g3});
  ref.terms.push_back(
      {[gamma](double t) { return -std::exp(-2.0 * integrate(gamma, 0.0, t)); }, g1});

  return QuantumProblem{"example2", std::move(gen), std::move(ref), 2};
}

PhysicalityReport physicality_check(const Matrix& rho) {
  require_square(rho, "physicality_check");
  PhysicalityReport rep;
  rep.hermiticity_defect = (rho - rho.adjoint()).norm();
  rep.trace_defect = std::abs(rho.trace() - Complex(1.0));
  const Matrix herm = 0.5 * (rho + rho.adjoint());
  rep.min_eigenvalue = hermitian_eigenvalues(herm).front();
  return rep;
}

PhysicalityError::PhysicalityError(const std::string& what, double t,
                                   PhysicalityReport report)
    : std::runtime_error(what), time_(t), report_(report) {}

StateTrajectory evolve_state(const Propagator& p, const DensityMatrix& rho0,
                             const std::vector<double>& times, bool allow_unphysical) {
  const Eigen::Index n = rho0.dim();
  if (p.dim() != n * n)
    throw std::invalid_argument(
        "evolve_state: propagator dimension must be the square of the state dimension");
  const Trajectory phi = sample_trajectory(p, times);

  StateTrajectory out;
  out.times = times;
  out.states.reserve(times.size());
  out.reports.reserve(times.size());
  const Vector v0 = vec(rho0.mat());
  for (std::size_t i = 0; i < times.size(); ++i) {
    Matrix rho = unvec(phi.values[i] * v0, n);
    const PhysicalityReport rep = physicality_check(rho);
    if (!allow_unphysical &&
        (rep.hermiticity_defect > 1e-8 || rep.trace_defect > 1e-8 ||
         rep.min_eigenvalue < -1e-8)) {
      throw PhysicalityError("evolve_state: unphysical state at t=" +
                                 std::to_string(times[i]),
                             times[i], rep);
    }
    out.states.push_back(std::move(rho));
    out.reports.push_back(rep);
  }
  return out;
}

}  // namespace commuprop
