#include "commuprop/generator.hpp"

#include <stdexcept>
#include <string>

namespace commuprop {

GeneratorSum::GeneratorSum(Eigen::Index n, std::vector<GeneratorTerm> terms,
                           Interval interval)
    : n_(n), terms_(std::move(terms)), interval_(interval) {
  if (n_ <= 0) throw std::invalid_argument("generator: dimension must be positive");
  if (terms_.empty()) throw std::invalid_argument("generator: needs at least one term");
  for (const auto& term : terms_) {
    if (term.mat.rows() != n_ || term.mat.cols() != n_)
      throw std::invalid_argument("generator: every term matrix must be n x n");
    if (!term.mat.allFinite())
      throw std::invalid_argument("generator: term matrices must be finite");
  }
}

Matrix eval_generator(const GeneratorSum& g, double t) {
  if (!g.interval().contains(t))
    throw std::domain_error("eval_generator: t=" + std::to_string(t) +
                            " outside the generator interval");
  Matrix out = Matrix::Zero(g.dim(), g.dim());
  for (const auto& term : g.terms()) out += term.coeff(t) * term.mat;
  return out;
}

Matrix integrate_generator(const GeneratorSum& g, double t) {
  if (!g.interval().contains(t))
    throw std::domain_error("integrate_generator: t=" + std::to_string(t) +
                            " outside the generator interval");
  Matrix out = Matrix::Zero(g.dim(), g.dim());
  for (const auto& term : g.terms()) out += integrate(term.coeff, 0.0, t) * term.mat;
  return out;
}

Matrix derivative_generator(const GeneratorSum& g, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("derivative_generator: h must be positive");
  if (!g.interval().contains(t - h) || !g.interval().contains(t + h))
    throw std::domain_error("derivative_generator: [t-h, t+h] outside the interval");
  return (eval_generator(g, t + h) - eval_generator(g, t - h)) / (2.0 * h);
}

}  // namespace commuprop
