#include "commuprop/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace commuprop {

namespace {

// Max absolute entry, the error metric for the matrix-valued quadrature.
double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

constexpr int kMagnusMaxDepth = 40;

template <typename F>
Matrix simpson_matrix(const F& f, double a, double b, const Matrix& fa, const Matrix& fm,
                      const Matrix& fb, const Matrix& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const Matrix flm = f(lm);
  const Matrix frm = f(rm);
  const Matrix left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Matrix right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const Matrix delta = left + right - whole;
  const double err = max_abs(delta);
  if (err <= 15.0 * tol || err <= 1e-15 * (max_abs(whole) + 1.0))
    return left + right + delta / 15.0;
  if (depth >= kMagnusMaxDepth)
    throw std::runtime_error("magnus2_term: quadrature failed to converge within depth limit");
  return simpson_matrix(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_matrix(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

template <typename F>
Matrix adaptive_simpson_matrix(const F& f, double a, double b, double tol,
                               Eigen::Index n) {
  if (a == b) return Matrix::Zero(n, n);
  const Matrix fa = f(a);
  const Matrix fm = f(0.5 * (a + b));
  const Matrix fb = f(b);
  const Matrix whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_matrix(f, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace

Matrix propagate_exact(const GeneratorSum& g, double t,
                       const CommutativityReport& certificate) {
  if (!certificate.is_commutative)
    throw NotCommutativeError(
        "propagate_exact: exp(integral of L) requires a functionally commutative "
        "generator; the commutativity check did not pass");
  return matrix_exp(integrate_generator(g, t));
}

Matrix propagate_zhu(const SpatialDecomposition& d, double t) {
  if (!d.interval().contains(t))
    throw std::domain_error("propagate_zhu: t outside the interval");
  const Eigen::Index n = d.dim();
  Matrix phi = Matrix::Identity(n, n);
  for (const auto& part : d.parts()) {
    Matrix exponent = Matrix::Zero(n, n);
    Matrix power = Matrix::Identity(n, n);  // G^(k-1), k from 1
    for (const auto& coeff : part.primitive_coeffs) {
      exponent += integrate(coeff, 0.0, t) * power;
      power = power * part.g;
    }
    phi = phi * matrix_exp(exponent);
  }
  return phi;
}

Matrix propagate_rk4(const GeneratorSum& g, double t, long steps) {
  if (steps < 1) throw std::invalid_argument("propagate_rk4: steps must be >= 1");
  if (!g.interval().contains(t))
    throw std::domain_error("propagate_rk4: t outside the interval");
  const Eigen::Index n = g.dim();
  const double h = t / double(steps);
  Matrix phi = Matrix::Identity(n, n);
  for (long i = 0; i < steps; ++i) {
    const double ti = t * (double(i) / double(steps));
    const Matrix l1 = eval_generator(g, ti);
    const Matrix lm = eval_generator(g, ti + 0.5 * h);
    const Matrix l2 = eval_generator(g, t * (double(i + 1) / double(steps)));
    const Matrix k1 = l1 * phi;
    const Matrix k2 = lm * (phi + 0.5 * h * k1);
    const Matrix k3 = lm * (phi + 0.5 * h * k2);
    const Matrix k4 = l2 * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

Matrix magnus2_term(const GeneratorSum& g, double t, double quad_tol) {
  if (!g.interval().contains(t))
    throw std::domain_error("magnus2_term: t outside the interval");
  auto integrand = [&g](double t1) {
    return commutator(integrate_generator(g, t1), eval_generator(g, t1));
  };
  return -0.5 * adaptive_simpson_matrix(integrand, 0.0, t, quad_tol, g.dim());
}

Propagator::Propagator(Method m, std::optional<GeneratorSum> g,
                       std::optional<SpatialDecomposition> d,
                       std::optional<CommutativityReport> cert, long steps_per_unit)
    : method_(m),
      gen_(std::move(g)),
      dec_(std::move(d)),
      certificate_(std::move(cert)),
      steps_per_unit_(steps_per_unit),
      cache_(std::make_shared<Cache>()) {}

Propagator Propagator::exact(GeneratorSum g, CommutativityReport certificate) {
  if (!certificate.is_commutative)
    throw NotCommutativeError(
        "Propagator::exact requires a passing commutativity check");
  return Propagator(Method::ExactExp, std::move(g), std::nullopt,
                    std::move(certificate), 0);
}

Propagator Propagator::zhu(SpatialDecomposition d) {
  return Propagator(Method::ZhuProduct, std::nullopt, std::move(d), std::nullopt, 0);
}

Propagator Propagator::rk4(GeneratorSum g, long steps_per_unit) {
  if (steps_per_unit < 1)
    throw std::invalid_argument("Propagator::rk4: steps_per_unit must be >= 1");
  return Propagator(Method::Rk4, std::move(g), std::nullopt, std::nullopt,
                    steps_per_unit);
}

Eigen::Index Propagator::dim() const { return gen_ ? gen_->dim() : dec_->dim(); }

const Interval& Propagator::interval() const {
  return gen_ ? gen_->interval() : dec_->interval();
}

Matrix Propagator::compute(double t) const {
  switch (method_) {
    case Method::ExactExp:
      return propagate_exact(*gen_, t, *certificate_);
    case Method::ZhuProduct:
      return propagate_zhu(*dec_, t);
    case Method::Rk4: {
      const long steps = std::max<long>(1, std::lround(std::abs(t) * double(steps_per_unit_)));
      return propagate_rk4(*gen_, t, steps);
    }
  }
  throw std::logic_error("unreachable method");
}

Matrix Propagator::at(double t) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->values.find(t);
    if (it != cache_->values.end()) return it->second;
  }
  Matrix value = compute(t);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto [it, inserted] = cache_->values.emplace(t, std::move(value));
  return it->second;
}

Trajectory sample_trajectory(const Propagator& p, const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("trajectory: needs at least one time");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw std::invalid_argument("trajectory: times must be strictly ascending");
  for (double t : times)
    if (!p.interval().contains(t))
      throw std::domain_error("trajectory: t=" + std::to_string(t) +
                              " outside the interval");
  Trajectory out;
  out.kind = Trajectory::Kind::Propagator;
  out.times = times;
  out.values.reserve(times.size());
  for (double t : times) out.values.push_back(p.at(t));
  return out;
}

}  // namespace commuprop
