#include "commuprop/scalar_fn.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <utility>
#include <vector>

namespace commuprop {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo < hi)) throw std::invalid_argument("interval: lo must be below hi");
  if (!(lo <= 0.0 && 0.0 <= hi))
    throw std::invalid_argument("interval: must contain 0");
}

bool Interval::contains(double t) const {
  const double slack = 1e-12 * (1.0 + hi - lo);
  return t >= lo - slack && t <= hi + slack;
}

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error(what), position_(position) {}

struct ScalarFn::Node {
  enum class Kind { Const, Var, Sum, Prod, Pow, Sin, Cos, Exp };

  Kind kind;
  Complex value{};                                      // Const
  std::vector<std::shared_ptr<const Node>> kids;        // Sum, Prod
  std::shared_ptr<const Node> base;                     // Pow
  unsigned exponent = 0;                                // Pow
  Complex a{}, b{};                                     // Sin/Cos/Exp: f(a*t+b)
};

namespace {

using Node = ScalarFn::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_const(Complex v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Const;
  n->value = v;
  return n;
}

NodePtr make_var() {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Var;
  return n;
}

NodePtr make_nary(Node::Kind kind, std::vector<NodePtr> kids) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->kids = std::move(kids);
  return n;
}

NodePtr make_pow(NodePtr base, unsigned exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Pow;
  n->base = std::move(base);
  n->exponent = exponent;
  return n;
}

NodePtr make_affine_fn(Node::Kind kind, Complex a, Complex b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = a;
  n->b = b;
  return n;
}

// Negation with constant folding, so that reparsing printed output yields
// the same tree ("(-1)" stays a constant rather than becoming -1 * 1).
NodePtr negate_node(NodePtr x) {
  if (x->kind == Node::Kind::Const) return make_const(-x->value);
  return make_nary(Node::Kind::Prod, {make_const(-1.0), std::move(x)});
}

Complex eval_node(const Node& n, double t) {
  switch (n.kind) {
    case Node::Kind::Const:
      return n.value;
    case Node::Kind::Var:
      return Complex(t, 0.0);
    case Node::Kind::Sum: {
      Complex s = 0.0;
      for (const auto& k : n.kids) s += eval_node(*k, t);
      return s;
    }
    case Node::Kind::Prod: {
      Complex p = 1.0;
      for (const auto& k : n.kids) p *= eval_node(*k, t);
      return p;
    }
    case Node::Kind::Pow: {
      const Complex base = eval_node(*n.base, t);
      Complex p = 1.0;
      for (unsigned i = 0; i < n.exponent; ++i) p *= base;
      return p;
    }
    case Node::Kind::Sin:
      return std::sin(n.a * t + n.b);
    case Node::Kind::Cos:
      return std::cos(n.a * t + n.b);
    case Node::Kind::Exp:
      return std::exp(n.a * t + n.b);
  }
  throw std::logic_error("unreachable node kind");
}

// True when the subtree does not depend on t.
bool is_constant_tree(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Const:
      return true;
    case Node::Kind::Var:
      return false;
    case Node::Kind::Sum:
    case Node::Kind::Prod:
      for (const auto& k : n.kids)
        if (!is_constant_tree(*k)) return false;
      return true;
    case Node::Kind::Pow:
      return n.exponent == 0 || is_constant_tree(*n.base);
    case Node::Kind::Sin:
    case Node::Kind::Cos:
    case Node::Kind::Exp:
      return n.a == Complex(0.0);
  }
  return false;
}

// Coefficients (a, b) with subtree == a*t + b, when the subtree is affine.
std::optional<std::pair<Complex, Complex>> as_affine(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Const:
      return std::make_pair(Complex(0.0), n.value);
    case Node::Kind::Var:
      return std::make_pair(Complex(1.0), Complex(0.0));
    case Node::Kind::Sum: {
      Complex a = 0.0, b = 0.0;
      for (const auto& k : n.kids) {
        auto p = as_affine(*k);
        if (!p) return std::nullopt;
        a += p->first;
        b += p->second;
      }
      return std::make_pair(a, b);
    }
    case Node::Kind::Prod: {
      Complex a = 0.0, b = 1.0;
      for (const auto& k : n.kids) {
        auto p = as_affine(*k);
        if (!p) return std::nullopt;
        if (a != Complex(0.0) && p->first != Complex(0.0)) return std::nullopt;
        const Complex na = a * p->second + b * p->first;
        const Complex nb = b * p->second;
        a = na;
        b = nb;
      }
      return std::make_pair(a, b);
    }
    case Node::Kind::Pow: {
      if (n.exponent == 0) return std::make_pair(Complex(0.0), Complex(1.0));
      auto p = as_affine(*n.base);
      if (!p) return std::nullopt;
      if (n.exponent == 1) return p;
      if (p->first != Complex(0.0)) return std::nullopt;
      Complex v = 1.0;
      for (unsigned i = 0; i < n.exponent; ++i) v *= p->second;
      return std::make_pair(Complex(0.0), v);
    }
    case Node::Kind::Sin:
    case Node::Kind::Cos:
    case Node::Kind::Exp:
      if (n.a == Complex(0.0)) return std::make_pair(Complex(0.0), eval_node(n, 0.0));
      return std::nullopt;
  }
  return std::nullopt;
}

// Dense polynomial coefficients (index = power of t), when the subtree is a
// polynomial of modest degree.
constexpr std::size_t kMaxPolyDegree = 64;

std::optional<std::vector<Complex>> as_polynomial(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Const:
      return std::vector<Complex>{n.value};
    case Node::Kind::Var:
      return std::vector<Complex>{Complex(0.0), Complex(1.0)};
    case Node::Kind::Sum: {
      std::vector<Complex> acc{Complex(0.0)};
      for (const auto& k : n.kids) {
        auto p = as_polynomial(*k);
        if (!p) return std::nullopt;
        if (p->size() > acc.size()) acc.resize(p->size(), Complex(0.0));
        for (std::size_t i = 0; i < p->size(); ++i) acc[i] += (*p)[i];
      }
      return acc;
    }
    case Node::Kind::Prod: {
      std::vector<Complex> acc{Complex(1.0)};
      for (const auto& k : n.kids) {
        auto p = as_polynomial(*k);
        if (!p) return std::nullopt;
        if (acc.size() + p->size() - 2 > kMaxPolyDegree) return std::nullopt;
        std::vector<Complex> conv(acc.size() + p->size() - 1, Complex(0.0));
        for (std::size_t i = 0; i < acc.size(); ++i)
          for (std::size_t j = 0; j < p->size(); ++j) conv[i + j] += acc[i] * (*p)[j];
        acc = std::move(conv);
      }
      return acc;
    }
    case Node::Kind::Pow: {
      if (n.exponent == 0) return std::vector<Complex>{Complex(1.0)};
      auto base = as_polynomial(*n.base);
      if (!base) return std::nullopt;
      if ((base->size() - 1) * n.exponent > kMaxPolyDegree) return std::nullopt;
      std::vector<Complex> acc{Complex(1.0)};
      for (unsigned e = 0; e < n.exponent; ++e) {
        std::vector<Complex> conv(acc.size() + base->size() - 1, Complex(0.0));
        for (std::size_t i = 0; i < acc.size(); ++i)
          for (std::size_t j = 0; j < base->size(); ++j)
            conv[i + j] += acc[i] * (*base)[j];
        acc = std::move(conv);
      }
      return acc;
    }
    case Node::Kind::Sin:
    case Node::Kind::Cos:
    case Node::Kind::Exp:
      if (n.a == Complex(0.0)) return std::vector<Complex>{eval_node(n, 0.0)};
      return std::nullopt;
  }
  return std::nullopt;
}

Complex poly_integral(const std::vector<Complex>& coeffs, double a, double b) {
  // Antiderivative sum c_k t^(k+1)/(k+1), evaluated at both ends.
  auto at = [&](double t) {
    Complex acc = 0.0;
    Complex tp = t;  // t^(k+1)
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      acc += coeffs[k] * tp / double(k + 1);
      tp *= t;
    }
    return acc;
  };
  return at(b) - at(a);
}

// Definite integral over [a, b] when the tree is a linear combination of
// polynomials and sin/cos/exp of affine arguments; nullopt otherwise.
std::optional<Complex> exact_integral(const Node& n, double a, double b) {
  if (auto poly = as_polynomial(n)) return poly_integral(*poly, a, b);
  switch (n.kind) {
    case Node::Kind::Sum: {
      Complex s = 0.0;
      for (const auto& k : n.kids) {
        auto v = exact_integral(*k, a, b);
        if (!v) return std::nullopt;
        s += *v;
      }
      return s;
    }
    case Node::Kind::Prod: {
      // Constant factors times at most one integrable factor.
      Complex c = 1.0;
      const Node* live = nullptr;
      for (const auto& k : n.kids) {
        if (is_constant_tree(*k)) {
          c *= eval_node(*k, 0.0);
        } else if (live == nullptr) {
          live = k.get();
        } else {
          return std::nullopt;
        }
      }
      if (live == nullptr) return c * Complex(b - a);
      auto v = exact_integral(*live, a, b);
      if (!v) return std::nullopt;
      return c * *v;
    }
    case Node::Kind::Pow:
      if (n.exponent == 1) return exact_integral(*n.base, a, b);
      return std::nullopt;
    case Node::Kind::Sin: {
      // integral sin(a t + b) = -cos(a t + b)/a
      if (n.a == Complex(0.0)) return std::sin(n.b) * Complex(b - a);
      return (-std::cos(n.a * b + n.b) + std::cos(n.a * a + n.b)) / n.a;
    }
    case Node::Kind::Cos: {
      if (n.a == Complex(0.0)) return std::cos(n.b) * Complex(b - a);
      return (std::sin(n.a * b + n.b) - std::sin(n.a * a + n.b)) / n.a;
    }
    case Node::Kind::Exp: {
      if (n.a == Complex(0.0)) return std::exp(n.b) * Complex(b - a);
      return (std::exp(n.a * b + n.b) - std::exp(n.a * a + n.b)) / n.a;
    }
    default:
      return std::nullopt;
  }
}

constexpr int kQuadMaxDepth = 40;
constexpr double kQuadAbsTol = 1e-12;

struct QuadFn {
  const Node* node;
  Complex operator()(double t) const { return eval_node(*node, t); }
};

Complex simpson_recurse(const QuadFn& f, double a, double b, Complex fa, Complex fm,
                        Complex fb, Complex whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const Complex flm = f(lm);
  const Complex frm = f(rm);
  const Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const Complex delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol ||
      std::abs(delta) <= 1e-15 * (std::abs(whole) + 1.0)) {
    return left + right + delta / 15.0;
  }
  if (depth >= kQuadMaxDepth)
    throw std::runtime_error("integrate: quadrature failed to converge within depth limit");
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

Complex adaptive_simpson(const QuadFn& f, double a, double b, double tol) {
  if (a == b) return Complex(0.0);
  const Complex fa = f(a);
  const Complex fm = f(0.5 * (a + b));
  const Complex fb = f(b);
  const Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 0);
}

// ---- parsing ----------------------------------------------------------

struct Parser {
  std::string_view src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos); }

  NodePtr parse_expr() {
    skip_ws();
    bool negate = false;
    if (consume('-'))
      negate = true;
    else
      consume('+');
    NodePtr first = parse_term();
    if (negate) first = negate_node(std::move(first));
    std::vector<NodePtr> kids{first};
    for (;;) {
      if (consume('+')) {
        kids.push_back(parse_term());
      } else if (consume('-')) {
        kids.push_back(negate_node(parse_term()));
      } else {
        break;
      }
    }
    if (kids.size() == 1) return kids[0];
    return make_nary(Node::Kind::Sum, std::move(kids));
  }

  NodePtr parse_term() {
    std::vector<NodePtr> kids{parse_factor()};
    while (consume('*')) kids.push_back(parse_factor());
    if (kids.size() == 1) return kids[0];
    return make_nary(Node::Kind::Prod, std::move(kids));
  }

  NodePtr parse_factor() {
    NodePtr base = parse_primary();
    while (consume('^')) {
      const unsigned e = parse_uint();
      base = make_pow(base, e);
    }
    return base;
  }

  unsigned parse_uint() {
    skip_ws();
    if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
      fail("expected a non-negative integer exponent");
    unsigned long v = 0;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
      v = v * 10 + static_cast<unsigned long>(src[pos] - '0');
      if (v > 1000000) fail("exponent too large");
      ++pos;
    }
    return static_cast<unsigned>(v);
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of expression");
    const char c = src[pos];
    if (c == '-') {
      ++pos;
      return negate_node(parse_primary());
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos < src.size() && src[pos] == '.') {
      ++pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
      if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      } else {
        pos = mark;  // not an exponent; leave 'e...' for the caller
      }
    }
    if (pos == start) fail("expected a number");
    const std::string text(src.substr(start, pos - start));
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) fail("malformed number '" + text + "'");
    if (pos < src.size() && src[pos] == 'i') {
      ++pos;
      return make_const(Complex(0.0, v));
    }
    return make_const(Complex(v, 0.0));
  }

  NodePtr parse_ident() {
    const std::size_t start = pos;
    while (pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos]))) ++pos;
    const std::string_view name = src.substr(start, pos - start);
    if (name == "t") return make_var();
    Node::Kind kind;
    if (name == "sin") {
      kind = Node::Kind::Sin;
    } else if (name == "cos") {
      kind = Node::Kind::Cos;
    } else if (name == "exp") {
      kind = Node::Kind::Exp;
    } else {
      pos = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    if (!consume('(')) fail("expected '(' after function name");
    NodePtr arg = parse_expr();
    if (!consume(')')) fail("expected ')'");
    auto affine = as_affine(*arg);
    if (!affine) {
      pos = start;
      fail("function argument must be affine in t");
    }
    return make_affine_fn(kind, affine->first, affine->second);
  }
};

// ---- printing ---------------------------------------------------------

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// A single multiplicative token for a complex value; general values get
// printed as a parenthesized sum.
std::string fmt_complex(Complex c) {
  if (c.imag() == 0.0) return fmt_real(c.real());
  if (c.real() == 0.0) return fmt_real(c.imag()) + "i";
  std::string out = "(" + fmt_real(c.real());
  out += c.imag() < 0.0 ? "-" : "+";
  out += fmt_real(std::abs(c.imag())) + "i)";
  return out;
}

std::string affine_str(Complex a, Complex b) {
  std::string out;
  if (a != Complex(0.0)) {
    if (a == Complex(1.0))
      out = "t";
    else
      out = fmt_complex(a) + "*t";
  }
  if (b != Complex(0.0) || out.empty()) {
    const std::string bs = fmt_complex(b);
    if (!out.empty() && bs[0] != '-') out += "+";
    out += bs;
  }
  return out;
}

// Precedence: Sum = 1, Prod = 2, Pow base = 3.
std::string print_node(const Node& n, int parent_prec) {
  std::string out;
  int prec = 4;
  switch (n.kind) {
    case Node::Kind::Const:
      out = fmt_complex(n.value);
      if (out.size() > 0 && out[0] == '-' && parent_prec >= 2) out = "(" + out + ")";
      break;
    case Node::Kind::Var:
      out = "t";
      break;
    case Node::Kind::Sum: {
      prec = 1;
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += "+";
        out += print_node(*n.kids[i], 2);
      }
      break;
    }
    case Node::Kind::Prod: {
      prec = 2;
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += "*";
        out += print_node(*n.kids[i], 3);
      }
      break;
    }
    case Node::Kind::Pow:
      prec = 3;
      out = print_node(*n.base, 4) + "^" + std::to_string(n.exponent);
      break;
    case Node::Kind::Sin:
      out = "sin(" + affine_str(n.a, n.b) + ")";
      break;
    case Node::Kind::Cos:
      out = "cos(" + affine_str(n.a, n.b) + ")";
      break;
    case Node::Kind::Exp:
      out = "exp(" + affine_str(n.a, n.b) + ")";
      break;
  }
  if (prec < parent_prec && prec != 4) out = "(" + out + ")";
  return out;
}

}  // namespace

// ---- ScalarFn ---------------------------------------------------------

ScalarFn::ScalarFn() : node_(make_const(Complex(0.0))) {}
ScalarFn::ScalarFn(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

ScalarFn ScalarFn::constant(Complex value) { return ScalarFn(make_const(value)); }
ScalarFn ScalarFn::variable() { return ScalarFn(make_var()); }
ScalarFn ScalarFn::sin_affine(Complex a, Complex b) {
  return ScalarFn(make_affine_fn(Node::Kind::Sin, a, b));
}
ScalarFn ScalarFn::cos_affine(Complex a, Complex b) {
  return ScalarFn(make_affine_fn(Node::Kind::Cos, a, b));
}
ScalarFn ScalarFn::exp_affine(Complex a, Complex b) {
  return ScalarFn(make_affine_fn(Node::Kind::Exp, a, b));
}
ScalarFn ScalarFn::power(const ScalarFn& base, unsigned exponent) {
  return ScalarFn(make_pow(base.node_, exponent));
}

ScalarFn ScalarFn::parse(std::string_view src) {
  Parser p{src};
  NodePtr root = p.parse_expr();
  if (!p.eof()) p.fail("trailing characters after expression");
  return ScalarFn(std::move(root));
}

Complex ScalarFn::operator()(double t) const { return eval_node(*node_, t); }

std::string ScalarFn::str() const { return print_node(*node_, 1); }

ScalarFn ScalarFn::operator-() const {
  return ScalarFn(make_nary(Node::Kind::Prod, {make_const(-1.0), node_}));
}

ScalarFn operator+(const ScalarFn& x, const ScalarFn& y) {
  return ScalarFn(make_nary(Node::Kind::Sum, {x.node_, y.node_}));
}
ScalarFn operator-(const ScalarFn& x, const ScalarFn& y) {
  return x + (-y);
}
ScalarFn operator*(const ScalarFn& x, const ScalarFn& y) {
  return ScalarFn(make_nary(Node::Kind::Prod, {x.node_, y.node_}));
}
ScalarFn operator*(Complex c, const ScalarFn& y) { return ScalarFn::constant(c) * y; }
ScalarFn operator+(Complex c, const ScalarFn& y) { return ScalarFn::constant(c) + y; }
ScalarFn operator-(Complex c, const ScalarFn& y) { return ScalarFn::constant(c) - y; }

Complex eval(const ScalarFn& f, double t) { return f(t); }

Complex integrate(const ScalarFn& f, double a, double b) {
  if (auto v = exact_integral(f.node(), a, b)) return *v;
  return integrate_quadrature(f, a, b);
}

Complex integrate_quadrature(const ScalarFn& f, double a, double b) {
  return adaptive_simpson(QuadFn{&f.node()}, a, b, kQuadAbsTol);
}

}  // namespace commuprop
