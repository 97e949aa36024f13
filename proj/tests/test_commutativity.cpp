// test_commutativity.cpp — Pairwise commutation detector, sampled-basis
// decomposition and the term-wise spatial decomposition.
#include <cmath>
#include <cstdlib>

#include <doctest.h>

#include "commuprop/commutativity.hpp"
#include "test_support.hpp"

using namespace commuprop;
using testsup::random_square;

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

// L(t) = s1 + t*s2, the standard non-commutative witness:
// [L(t), L(s)] = (s - t)[s1, s2], so the commutator norm is 2*sqrt(2)*|s-t|.
GeneratorSum noncommutative(double scale = 1.0) {
  return GeneratorSum(2,
                      {{ScalarFn::constant(scale), spin(1)},
                       {Complex(scale) * ScalarFn::variable(), spin(2)}},
                      Interval(-1.0, 5.0));
}

// Polynomial coefficients on powers of one fixed matrix always commute.
GeneratorSum commutative(double scale = 1.0) {
  const Matrix a = random_square(3);
  return GeneratorSum(3,
                      {{Complex(scale) * ScalarFn::parse("sin(t)"), a},
                       {Complex(scale) * ScalarFn::parse("cos(2*t)"), Matrix(a * a)}},
                      Interval(-1.0, 2.0));
}

struct EnvTol {
  explicit EnvTol(const char* v) { setenv("COMMUPROP_TOL", v, 1); }
  ~EnvTol() { unsetenv("COMMUPROP_TOL"); }
};

}  // namespace

TEST_CASE("commutative generator passes with agreeing diagnostics") {
  const CommutativityReport r = check_functional_commutativity(commutative());
  CHECK(r.is_commutative);
  CHECK(r.diagnostics_agree);
  CHECK(r.grid.size() == 33);
  CHECK(r.grid.front() == -1.0);
  CHECK(r.grid.back() == 2.0);
  CHECK(r.max_pairwise_commutator_norm < 1e-9 * 100.0);  // raw norm at desk scale
}

TEST_CASE("non-commutative generator is rejected with an honest witness") {
  const GeneratorSum g = noncommutative();
  const CommutativityReport r = check_functional_commutativity(g);
  CHECK_FALSE(r.is_commutative);
  CHECK(r.diagnostics_agree);
  const auto [wt, ws] = r.witness_pair;
  CHECK(wt != ws);
  // Independent oracle at the witness pair: |[L(t), L(s)]| = 2 sqrt(2) |s-t|.
  const double expect = 2.0 * std::sqrt(2.0) * std::abs(ws - wt);
  CHECK(std::abs(r.max_pairwise_commutator_norm - expect) < 0.05 * expect);
  // Brute-force recomputation of the commutator at the witness.
  const double raw =
      commutator(eval_generator(g, wt), eval_generator(g, ws)).norm();
  CHECK(std::abs(r.max_pairwise_commutator_norm - raw) < 1e-12);
  // The derivative diagnostic sees |[L, L']| = |[s1, s2]| = 2 sqrt(2).
  CHECK(std::abs(r.max_derivative_commutator_norm - 2.0 * std::sqrt(2.0)) < 1e-4);
}

TEST_CASE("verdicts are invariant under rescaling the generator") {
  for (double scale : {1.0, 7.0, 1e-3}) {
    CHECK(check_functional_commutativity(commutative(scale)).is_commutative);
    CHECK_FALSE(check_functional_commutativity(noncommutative(scale)).is_commutative);
  }
}

TEST_CASE("grid size is validated and honored") {
  CHECK_THROWS_AS(check_functional_commutativity(commutative(), 2),
                  std::invalid_argument);
  const CommutativityReport r = check_functional_commutativity(commutative(), 9);
  CHECK(r.grid.size() == 9);
}

TEST_CASE("tolerance can be relaxed through the environment") {
  const GeneratorSum g = noncommutative();
  CHECK_FALSE(check_functional_commutativity(g).is_commutative);
  {
    EnvTol relax("1e6");
    const CommutativityReport r = check_functional_commutativity(g);
    CHECK(r.is_commutative);  // everything passes under an absurd tolerance
    CHECK(r.tolerance == 1e6);
  }
  CHECK_FALSE(check_functional_commutativity(g).is_commutative);
}

TEST_CASE("sampled-basis decomposition reconstructs the generator") {
  const GeneratorSum g = commutative();
  const MartinDecomposition d = martin_decompose(g);
  CHECK(d.basis.size() == 2);  // sin and cos parts are independent samples
  CHECK(d.basis.size() == d.basis_times.size());
  CHECK(static_cast<std::size_t>(d.coefficients.rows()) == d.grid.size());
  CHECK(static_cast<std::size_t>(d.coefficients.cols()) == d.basis.size());
  CHECK(d.max_residual <= 1e-9);
  // Re-verify the reconstruction independently from the returned data.
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    const Matrix target = eval_generator(g, d.grid[i]);
    Matrix rebuilt = Matrix::Zero(3, 3);
    for (std::size_t k = 0; k < d.basis.size(); ++k)
      rebuilt += d.coefficients(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(k)) *
                 d.basis[k];
    CHECK((rebuilt - target).norm() <= 1e-9 * (1.0 + target.norm()));
    CHECK(std::abs((rebuilt - target).norm() - d.residuals[i]) < 1e-12);
  }
  // Basis samples commute pairwise.
  for (std::size_t k = 0; k < d.basis.size(); ++k)
    for (std::size_t l = k + 1; l < d.basis.size(); ++l)
      CHECK(commutator(d.basis[k], d.basis[l]).norm() <
            1e-9 * (1.0 + d.basis[k].norm() * d.basis[l].norm()));
}

TEST_CASE("constant generators need exactly one basis sample") {
  const GeneratorSum g(2, {{ScalarFn::constant(2.5), spin(3)}}, Interval(-1.0, 1.0));
  const MartinDecomposition d = martin_decompose(g);
  CHECK(d.basis.size() == 1);
  CHECK(d.max_residual <= 1e-12);
}

TEST_CASE("decomposition refuses non-commutative input") {
  CHECK_THROWS_AS(martin_decompose(noncommutative()), NotCommutativeError);
}

TEST_CASE("term-wise spatial decomposition evaluates back to the generator") {
  const GeneratorSum g = commutative();
  const SpatialDecomposition d = as_spatial_decomposition(g);
  CHECK(d.parts().size() == g.terms().size());
  for (double t : {-0.9, 0.0, 0.6, 1.9})
    CHECK((eval_decomposition(d, t) - eval_generator(g, t)).norm() < 1e-12);
  CHECK_THROWS_AS(as_spatial_decomposition(noncommutative()), NotCommutativeError);
}

TEST_CASE("polynomial parts evaluate powers against direct sums") {
  // One part with f(t, G) = 2 I + t G + t^2 G^2 exercises the power ladder.
  Matrix a(2, 2);
  a << 0.5, 1.0, 0.0, -0.25;
  const ScalarFn t = ScalarFn::variable();
  const SpatialDecomposition d(
      {{{ScalarFn::constant(2.0), t, t * t}, a}}, 2, Interval(-1.0, 1.0));
  const double at = 0.7;
  const Matrix expect = 2.0 * Matrix::Identity(2, 2) + at * a + at * at * a * a;
  CHECK((eval_decomposition(d, at) - expect).norm() < 1e-14);
}
