// generator.hpp — Time-dependent generators L(t) = sum_i beta_i(t) * M_i.
#pragma once

#include <vector>

#include "commuprop/matrix_ops.hpp"
#include "commuprop/scalar_fn.hpp"

namespace commuprop {

struct GeneratorTerm {
  ScalarFn coeff;
  Matrix mat;
};

// A finite sum of scalar-function coefficients times constant square
// matrices, together with the time interval on which it is defined. Terms
// are kept exactly as given; no merging or simplification.
class GeneratorSum {
 public:
  GeneratorSum(Eigen::Index n, std::vector<GeneratorTerm> terms, Interval interval);

  Eigen::Index dim() const { return n_; }
  const std::vector<GeneratorTerm>& terms() const { return terms_; }
  const Interval& interval() const { return interval_; }

 private:
  Eigen::Index n_;
  std::vector<GeneratorTerm> terms_;
  Interval interval_;
};

// L(t). Throws std::domain_error if t lies outside the interval.
Matrix eval_generator(const GeneratorSum& g, double t);

// Term-wise integral from 0 to t (0 is always inside the interval).
Matrix integrate_generator(const GeneratorSum& g, double t);

// Central difference (L(t+h) - L(t-h)) / (2h); [t-h, t+h] must be inside
// the interval.
Matrix derivative_generator(const GeneratorSum& g, double t, double h = 1e-5);

}  // namespace commuprop
