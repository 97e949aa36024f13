// solver.hpp — Propagators for dPhi/dt = L(t) Phi, Phi(0) = I.
//
// For functionally commutative generators the flow is Phi(t) =
// exp(integral of L from 0 to t); the product route multiplies one matrix
// exponential per decomposition part. A classical RK4 integrator serves as
// the generator-agnostic reference. All routes satisfy Phi(0) = I.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "commuprop/commutativity.hpp"

namespace commuprop {

enum class Method { ExactExp, ZhuProduct, Rk4 };

// exp(integral_0^t L). Valid only under functional commutativity: the caller
// must present a passing CommutativityReport, otherwise this refuses with
// NotCommutativeError.
Matrix propagate_exact(const GeneratorSum& g, double t,
                       const CommutativityReport& certificate);

// Product of matrix exponentials, one per part:
//   Phi(t) = prod_i exp( sum_k integral_0^t coeffs_ik * G_i^(k-1) ).
// Factor order is immaterial because the parts commute.
Matrix propagate_zhu(const SpatialDecomposition& d, double t);

// Fixed-step classical Runge-Kutta with step t/steps; steps >= 1. Makes no
// commutativity assumption.
Matrix propagate_rk4(const GeneratorSum& g, double t, long steps);

// Second term of the Magnus series,
//   -1/2 * integral_0^t [ integral_0^t1 L(t2) dt2, L(t1) ] dt1,
// computed with adaptive Simpson on the matrix integrand. It vanishes exactly
// when L is functionally commutative, so its norm doubles as an independent
// commutativity diagnostic.
Matrix magnus2_term(const GeneratorSum& g, double t, double quad_tol = 1e-11);

// A reusable propagator with a cache keyed by t (insert-if-absent under a
// lock, so concurrent sampling is safe).
class Propagator {
 public:
  static Propagator exact(GeneratorSum g, CommutativityReport certificate);
  static Propagator zhu(SpatialDecomposition d);
  static Propagator rk4(GeneratorSum g, long steps_per_unit = 10000);

  Matrix at(double t) const;
  Method method() const { return method_; }
  Eigen::Index dim() const;
  const Interval& interval() const;

 private:
  Propagator(Method m, std::optional<GeneratorSum> g,
             std::optional<SpatialDecomposition> d,
             std::optional<CommutativityReport> cert, long steps_per_unit);

  Matrix compute(double t) const;

  Method method_;
  std::optional<GeneratorSum> gen_;
  std::optional<SpatialDecomposition> dec_;
  std::optional<CommutativityReport> certificate_;
  long steps_per_unit_;

  struct Cache {
    std::mutex mutex;
    std::map<double, Matrix> values;
  };
  std::shared_ptr<Cache> cache_;
};

struct Trajectory {
  enum class Kind { Propagator, State };
  Kind kind;
  std::vector<double> times;   // ascending
  std::vector<Matrix> values;  // Phi(t) or rho(t), one per time
};

// Evaluates the propagator on an ascending list of times inside its interval.
Trajectory sample_trajectory(const Propagator& p, const std::vector<double>& times);

}  // namespace commuprop
