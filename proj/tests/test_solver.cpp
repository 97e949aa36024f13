// test_solver.cpp — Propagation routes (exact exponential, factored product,
// RK4), the second Magnus term and trajectory sampling.
#include <cmath>

#include <doctest.h>

#include "commuprop/solver.hpp"
#include "test_support.hpp"

using namespace commuprop;

namespace {

Matrix spin(int k) {
  Matrix m(2, 2);
  const Complex i(0.0, 1.0);
  if (k == 1)
    m << 0, 1, 1, 0;
  else if (k == 2)
    m << 0, i, -i, 0;
  else
    m << 1, 0, 0, -1;
  return m;
}

GeneratorSum constant_s1(Interval iv = Interval(-1.0, 3.0)) {
  return GeneratorSum(2, {{ScalarFn::constant(1.0), spin(1)}}, iv);
}

// L(t) = sin(t) * s1; commutative with known flow exp((1 - cos t) s1).
GeneratorSum pulsed_s1() {
  return GeneratorSum(2, {{ScalarFn::parse("sin(t)"), spin(1)}}, Interval(-1.0, 3.0));
}

GeneratorSum noncommutative() {
  return GeneratorSum(2,
                      {{ScalarFn::constant(1.0), spin(1)},
                       {ScalarFn::variable(), spin(2)}},
                      Interval(-1.0, 5.0));
}

Matrix s1_flow(double x) {  // exp(x * s1)
  return std::cosh(x) * Matrix::Identity(2, 2) + std::sinh(x) * spin(1);
}

CommutativityReport certify(const GeneratorSum& g) {
  return check_functional_commutativity(g);
}

}  // namespace

TEST_CASE("exact route matches the closed-form flow") {
  const GeneratorSum g = constant_s1();
  const CommutativityReport cert = certify(g);
  for (double t : {0.0, 0.4, 1.7, -0.8})
    CHECK((propagate_exact(g, t, cert) - s1_flow(t)).norm() < 1e-13 * s1_flow(t).norm());
  const GeneratorSum p = pulsed_s1();
  const CommutativityReport pcert = certify(p);
  for (double t : {0.5, 2.0})
    CHECK((propagate_exact(p, t, pcert) - s1_flow(1.0 - std::cos(t))).norm() < 1e-12);
}

TEST_CASE("exact route refuses a failing certificate") {
  const GeneratorSum bad = noncommutative();
  const CommutativityReport cert = certify(bad);
  CHECK_FALSE(cert.is_commutative);
  CHECK_THROWS_AS(propagate_exact(bad, 1.0, cert), NotCommutativeError);
}

TEST_CASE("factored product agrees with the exact route and ignores part order") {
  Matrix a(3, 3);
  a << 0.2, 1.0, 0.0, 0.0, 0.2, 1.0, 0.0, 0.0, 0.2;
  const ScalarFn f1 = ScalarFn::parse("sin(t)");
  const ScalarFn f2 = ScalarFn::parse("0.5*t");
  const GeneratorSum g(3, {{f1, a}, {f2, Matrix(a * a)}}, Interval(-1.0, 2.0));
  const SpatialDecomposition d = as_spatial_decomposition(g);
  const CommutativityReport cert = certify(g);
  for (double t : {0.3, 1.5})
    CHECK((propagate_zhu(d, t) - propagate_exact(g, t, cert)).norm() < 1e-10);
  // Reversed part order multiplies commuting exponentials, so nothing changes.
  std::vector<DecompositionPart> rev(d.parts().rbegin(), d.parts().rend());
  const SpatialDecomposition dr(rev, d.dim(), d.interval());
  for (double t : {0.3, 1.5})
    CHECK((propagate_zhu(d, t) - propagate_zhu(dr, t)).norm() < 1e-10);
}

TEST_CASE("rk4 converges at fourth order") {
  const GeneratorSum p = pulsed_s1();
  const Matrix truth = s1_flow(1.0 - std::cos(1.0));
  const double e1 = (propagate_rk4(p, 1.0, 100) - truth).norm();
  const double e2 = (propagate_rk4(p, 1.0, 200) - truth).norm();
  CHECK(e1 > 1e-13);  // far from the rounding floor
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
  CHECK_THROWS_AS(propagate_rk4(p, 1.0, 0), std::invalid_argument);
}

TEST_CASE("rk4 agrees with the exact route on a constant generator") {
  const GeneratorSum g = constant_s1();
  const CommutativityReport cert = certify(g);
  CHECK((propagate_rk4(g, 1.0, 2000) - propagate_exact(g, 1.0, cert)).norm() < 1e-10);
  CHECK((propagate_rk4(g, -0.5, 2000) - propagate_exact(g, -0.5, cert)).norm() < 1e-10);
}

TEST_CASE("all routes are the identity at t = 0") {
  const GeneratorSum g = pulsed_s1();
  const Matrix id = Matrix::Identity(2, 2);
  CHECK((propagate_exact(g, 0.0, certify(g)) - id).norm() == 0.0);
  CHECK((propagate_zhu(as_spatial_decomposition(g), 0.0) - id).norm() == 0.0);
  CHECK((propagate_rk4(g, 0.0, 10) - id).norm() == 0.0);
}

TEST_CASE("constant flows form a semigroup") {
  const GeneratorSum g = constant_s1();
  const CommutativityReport cert = certify(g);
  const Matrix p1 = propagate_exact(g, 0.6, cert);
  const Matrix p2 = propagate_exact(g, 1.1, cert);
  const Matrix p3 = propagate_exact(g, 1.7, cert);
  CHECK((p2 * p1 - p3).norm() < 1e-12 * p3.norm());
}

TEST_CASE("the flow satisfies its own differential equation") {
  const GeneratorSum g = pulsed_s1();
  const CommutativityReport cert = certify(g);
  const double t = 0.9, h = 1e-4;
  const Matrix dphi =
      (propagate_exact(g, t + h, cert) - propagate_exact(g, t - h, cert)) / (2.0 * h);
  const Matrix rhs = eval_generator(g, t) * propagate_exact(g, t, cert);
  CHECK((dphi - rhs).norm() < 1e-5);
}

TEST_CASE("second magnus term vanishes for commuting generators") {
  Matrix a(3, 3);
  a << 0.2, 1.0, 0.0, 0.0, 0.2, 1.0, 0.0, 0.0, 0.2;
  const GeneratorSum g(3,
                       {{ScalarFn::parse("sin(t)"), a},
                        {ScalarFn::parse("cos(t)"), Matrix(a * a)}},
                       Interval(-1.0, 2.0));
  CHECK(magnus2_term(g, 1.0).norm() < 1e-11);
}

TEST_CASE("second magnus term detects the linear counterexample") {
  // For L(t) = s1 + t s2 the term is analytic:
  // -1/2 integral_0^1 [t1 s1 + t1^2/2 s2, s1 + t1 s2] dt1 = (i/6) s3.
  const Matrix m = magnus2_term(noncommutative(), 1.0);
  const Matrix expect = Complex(0.0, 1.0 / 6.0) * spin(3);
  CHECK((m - expect).norm() < 1e-9);
  CHECK(m.norm() == doctest::Approx(std::sqrt(2.0) / 6.0).epsilon(1e-8));

  // Brute-force nested quadrature oracle on a fixed fine grid.
  const GeneratorSum g = noncommutative();
  const int n = 2000;
  const double h = 1.0 / n;
  Matrix inner = Matrix::Zero(2, 2);  // running integral of L
  Matrix acc = Matrix::Zero(2, 2);
  Matrix prev_l = eval_generator(g, 0.0);
  Matrix prev_f = commutator(inner, prev_l);
  for (int k = 1; k <= n; ++k) {
    const double t1 = k * h;
    const Matrix l = eval_generator(g, t1);
    inner += 0.5 * h * (prev_l + l);
    const Matrix f = commutator(inner, l);
    acc += 0.5 * h * (prev_f + f);
    prev_l = l;
    prev_f = f;
  }
  const Matrix oracle = -0.5 * acc;
  CHECK((m - oracle).norm() < 1e-5);
}

TEST_CASE("propagator caches and re-serves values") {
  const GeneratorSum g = pulsed_s1();
  const Propagator p = Propagator::exact(g, certify(g));
  const Matrix first = p.at(0.7);
  const Matrix second = p.at(0.7);
  CHECK((first - second).norm() == 0.0);
  CHECK(p.dim() == 2);
  CHECK(p.interval().hi == 3.0);
  CHECK(p.method() == Method::ExactExp);
}

TEST_CASE("trajectory sampling validates its time grid") {
  const GeneratorSum g = pulsed_s1();
  const Propagator p = Propagator::rk4(g, 200);
  const Trajectory tr = sample_trajectory(p, {0.0, 0.5, 1.0});
  CHECK(tr.kind == Trajectory::Kind::Propagator);
  CHECK(tr.times.size() == 3);
  CHECK(tr.values.size() == 3);
  CHECK((tr.values[0] - Matrix::Identity(2, 2)).norm() == 0.0);
  CHECK_THROWS_AS(sample_trajectory(p, {0.5, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(sample_trajectory(p, {0.0, 4.0}), std::domain_error);
  CHECK_THROWS_AS(sample_trajectory(p, {}), std::invalid_argument);
}

TEST_CASE("the three propagator facades agree") {
  Matrix a(3, 3);
  a << 0.2, 1.0, 0.0, 0.0, 0.2, 1.0, 0.0, 0.0, 0.2;
  const GeneratorSum g(3, {{ScalarFn::parse("sin(t)"), a}}, Interval(-1.0, 2.0));
  const Propagator pe = Propagator::exact(g, certify(g));
  const Propagator pz = Propagator::zhu(as_spatial_decomposition(g));
  const Propagator pr = Propagator::rk4(g);  // default fine stepping
  for (double t : {0.4, 1.8}) {
    CHECK((pe.at(t) - pz.at(t)).norm() < 1e-10);
    CHECK((pe.at(t) - pr.at(t)).norm() < 1e-9);
  }
}
