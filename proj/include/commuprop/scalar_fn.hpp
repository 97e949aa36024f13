// scalar_fn.hpp — Closed-form coefficient functions of one real variable t.
//
// A ScalarFn is an immutable expression tree over constants, the variable t,
// sums, products, non-negative integer powers, and sin/cos/exp restricted to
// affine arguments a*t+b with complex a, b. Evaluation is pure; trees are
// shared, never mutated.
#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace commuprop {

using Complex = std::complex<double>;

// Working time interval of a problem. Must satisfy lo < hi and contain 0,
// since propagators are normalized at t = 0.
struct Interval {
  double lo;
  double hi;

  Interval(double lo_, double hi_);
  // Inclusive containment with a small absolute slack for grid arithmetic.
  bool contains(double t) const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class ScalarFn {
 public:
  ScalarFn();  // the zero function

  static ScalarFn constant(Complex value);
  static ScalarFn variable();                            // t
  static ScalarFn sin_affine(Complex a, Complex b = 0.0);  // sin(a*t + b)
  static ScalarFn cos_affine(Complex a, Complex b = 0.0);
  static ScalarFn exp_affine(Complex a, Complex b = 0.0);
  static ScalarFn power(const ScalarFn& base, unsigned exponent);

  // Grammar (whitespace insignificant):
  //   expr   := ['+'|'-'] term (('+'|'-') term)*
  //   term   := factor ('*' factor)*
  //   factor := primary ('^' uint)*
  //   primary:= number | 't' | func '(' expr ')' | '(' expr ')' | '-' primary
  //   func   := 'sin' | 'cos' | 'exp'
  //   number := decimal (optional exponent part, optional trailing 'i')
  // Function arguments must be affine in t; anything else is a ParseError.
  static ScalarFn parse(std::string_view src);

  Complex operator()(double t) const;

  // Printable form; parse(str()) evaluates identically.
  std::string str() const;

  ScalarFn operator-() const;
  friend ScalarFn operator+(const ScalarFn& x, const ScalarFn& y);
  friend ScalarFn operator-(const ScalarFn& x, const ScalarFn& y);
  friend ScalarFn operator*(const ScalarFn& x, const ScalarFn& y);
  friend ScalarFn operator*(Complex c, const ScalarFn& y);
  friend ScalarFn operator+(Complex c, const ScalarFn& y);
  friend ScalarFn operator-(Complex c, const ScalarFn& y);

  struct Node;
  const Node& node() const { return *node_; }

 private:
  explicit ScalarFn(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Complex eval(const ScalarFn& f, double t);

// Definite integral over [a, b]. Uses the exact antiderivative when the tree
// is a linear combination of polynomials and sin/cos/exp of affine arguments;
// otherwise falls back to adaptive Simpson quadrature (absolute tolerance
// 1e-12, depth limit 40).
Complex integrate(const ScalarFn& f, double a, double b);

// Quadrature path only, for cross-checking the exact path.
Complex integrate_quadrature(const ScalarFn& f, double a, double b);

}  // namespace commuprop
