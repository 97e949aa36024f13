#include "commuprop/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace commuprop::io {

namespace {

using nlohmann::json;

// Emission is hand-rolled so that every floating-point number is printed
// with exactly 17 significant digits regardless of the JSON library's own
// formatting choices.

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string complex_pair(const Complex& c) {
  return "[" + fmt_double(c.real()) + "," + fmt_double(c.imag()) + "]";
}

std::string real_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i]);
  }
  return out + "]";
}

// ---- parsing helpers --------------------------------------------------

[[noreturn]] void bad(const std::string& what) {
  throw std::invalid_argument("problem spec: " + what);
}

double finite_number(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(what + " must be finite");
  return v;
}

Interval interval_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) bad("interval must be [lo, hi]");
  return Interval(finite_number(j[0], "interval lo"), finite_number(j[1], "interval hi"));
}

ScalarFn fn_param(const json& params, const std::string& key,
                  const std::string& fallback) {
  if (!params.contains(key)) return ScalarFn::parse(fallback);
  const json& v = params.at(key);
  if (v.is_number()) return ScalarFn::constant(finite_number(v, key));
  if (v.is_string()) {
    try {
      return ScalarFn::parse(v.get<std::string>());
    } catch (const ParseError& e) {
      bad(key + ": " + e.what());
    }
  }
  bad(key + " must be an expression string or a number");
}

Complex complex_param(const json& params, const std::string& key, Complex fallback) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  if (v.is_number()) return Complex(finite_number(v, key), 0.0);
  if (v.is_array() && v.size() == 2)
    return Complex(finite_number(v[0], key), finite_number(v[1], key));
  bad(key + " must be a number or an [re, im] pair");
}

Matrix default_rho0() {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  return rho;
}

}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_json(const Matrix& m) {
  std::string out = "{\"rows\":" + std::to_string(m.rows()) +
                    ",\"cols\":" + std::to_string(m.cols()) + ",\"data\":[";
  bool first = true;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!first) out += ",";
      first = false;
      out += complex_pair(m(i, j));
    }
  }
  return out + "]}";
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    bad("matrix needs rows, cols and data");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows <= 0 || cols <= 0) bad("matrix dimensions must be positive");
  const json& data = j.at("data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
    bad("matrix data must hold rows*cols [re, im] pairs");
  Matrix m(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++idx) {
      const json& cell = data[static_cast<std::size_t>(idx)];
      if (!cell.is_array() || cell.size() != 2) bad("matrix entries must be [re, im]");
      m(i, j2) = Complex(finite_number(cell[0], "matrix entry"),
                         finite_number(cell[1], "matrix entry"));
    }
  }
  return m;
}

std::string to_json(const GeneratorSum& g) {
  std::string out = "{\"n\":" + std::to_string(g.dim()) + ",\"interval\":[" +
                    fmt_double(g.interval().lo) + "," + fmt_double(g.interval().hi) +
                    "],\"terms\":[";
  for (std::size_t i = 0; i < g.terms().size(); ++i) {
    if (i) out += ",";
    out += "{\"coeff\":\"" + escape(g.terms()[i].coeff.str()) + "\",\"matrix\":" +
           to_json(g.terms()[i].mat) + "}";
  }
  return out + "]}";
}

GeneratorSum generator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("interval") || !j.contains("terms"))
    bad("generator needs n, interval and terms");
  const auto n = j.at("n").get<Eigen::Index>();
  const Interval iv = interval_from_json(j.at("interval"));
  const json& terms = j.at("terms");
  if (!terms.is_array() || terms.empty()) bad("terms must be a non-empty array");
  std::vector<GeneratorTerm> parsed;
  parsed.reserve(terms.size());
  for (const json& term : terms) {
    if (!term.is_object() || !term.contains("coeff") || !term.contains("matrix"))
      bad("every term needs coeff and matrix");
    ScalarFn coeff;
    try {
      coeff = ScalarFn::parse(term.at("coeff").get<std::string>());
    } catch (const ParseError& e) {
      bad(std::string("coeff: ") + e.what());
    }
    parsed.push_back({std::move(coeff), matrix_from_json(term.at("matrix"))});
  }
  return GeneratorSum(n, std::move(parsed), iv);
}

std::string to_json(const CommutativityReport& r) {
  return std::string("{\"commutative\":") + (r.is_commutative ? "true" : "false") +
         ",\"max_pairwise\":" + fmt_double(r.max_pairwise_commutator_norm) +
         ",\"max_derivative\":" + fmt_double(r.max_derivative_commutator_norm) +
         ",\"witness\":[" + fmt_double(r.witness_pair.first) + "," +
         fmt_double(r.witness_pair.second) + "],\"grid_size\":" +
         std::to_string(r.grid.size()) + "}";
}

std::string to_json(const MartinDecomposition& d) {
  std::string out = "{\"grid_size\":" + std::to_string(d.grid.size()) +
                    ",\"basis_times\":" + real_array(d.basis_times) + ",\"basis\":[";
  for (std::size_t i = 0; i < d.basis.size(); ++i) {
    if (i) out += ",";
    out += to_json(d.basis[i]);
  }
  out += "],\"coefficients\":[";
  for (Eigen::Index i = 0; i < d.coefficients.rows(); ++i) {
    if (i) out += ",";
    out += "[";
    for (Eigen::Index j = 0; j < d.coefficients.cols(); ++j) {
      if (j) out += ",";
      out += complex_pair(d.coefficients(i, j));
    }
    out += "]";
  }
  out += "],\"residuals\":" + real_array(d.residuals) +
         ",\"max_residual\":" + fmt_double(d.max_residual) + "}";
  return out;
}

namespace {

std::string trajectory_json(const char* kind, const std::vector<double>& times,
                            const std::vector<Matrix>& values,
                            const std::vector<PhysicalityReport>* reports) {
  std::string out = std::string("{\"kind\":\"") + kind + "\",\"times\":" +
                    real_array(times) + ",\"values\":[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += to_json(values[i]);
  }
  out += "]";
  if (reports) {
    out += ",\"physicality\":[";
    for (std::size_t i = 0; i < reports->size(); ++i) {
      if (i) out += ",";
      const auto& r = (*reports)[i];
      out += "{\"hermiticity_defect\":" + fmt_double(r.hermiticity_defect) +
             ",\"trace_defect\":" + fmt_double(r.trace_defect) +
             ",\"min_eigenvalue\":" + fmt_double(r.min_eigenvalue) + "}";
    }
    out += "]";
  }
  return out + "}";
}

std::string trajectory_csv(const std::vector<double>& times,
                           const std::vector<Matrix>& values,
                           const std::vector<PhysicalityReport>* reports) {
  if (values.empty()) throw std::invalid_argument("csv: empty trajectory");
  const Eigen::Index rows = values[0].rows();
  const Eigen::Index cols = values[0].cols();
  std::string out = "t";
  for (const char* part : {"re", "im"})
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        out += "," + std::string(part) + "_" + std::to_string(i) + "_" + std::to_string(j);
  if (reports) out += ",trace_defect,min_eigenvalue";
  out += "\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    out += fmt_double(times[k]);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        out += "," + fmt_double(values[k](i, j).real());
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        out += "," + fmt_double(values[k](i, j).imag());
    if (reports)
      out += "," + fmt_double((*reports)[k].trace_defect) + "," +
             fmt_double((*reports)[k].min_eigenvalue);
    out += "\n";
  }
  return out;
}

}  // namespace

std::string to_json(const Trajectory& t) {
  return trajectory_json(t.kind == Trajectory::Kind::State ? "state" : "propagator",
                         t.times, t.values, nullptr);
}

std::string to_csv(const Trajectory& t) {
  return trajectory_csv(t.times, t.values, nullptr);
}

std::string to_json(const StateTrajectory& t) {
  return trajectory_json("state", t.times, t.states, &t.reports);
}

std::string to_csv(const StateTrajectory& t) {
  return trajectory_csv(t.times, t.states, &t.reports);
}

ProblemSpec problem_from_json(const json& j) {
  if (!j.is_object()) bad("top level must be an object");

  std::optional<std::vector<double>> times;
  if (j.contains("times")) {
    const json& jt = j.at("times");
    std::vector<double> list;
    if (jt.is_array()) {
      for (const json& v : jt) list.push_back(finite_number(v, "times entry"));
    } else if (jt.is_object() && jt.contains("start") && jt.contains("stop") &&
               jt.contains("step")) {
      const double start = finite_number(jt.at("start"), "times.start");
      const double stop = finite_number(jt.at("stop"), "times.stop");
      const double step = finite_number(jt.at("step"), "times.step");
      if (!(step > 0.0) || stop < start) bad("times range must ascend with step > 0");
      for (double t = start; t <= stop + 1e-12 * (1.0 + std::abs(stop)); t += step)
        list.push_back(t);
    } else {
      bad("times must be an array or {start, stop, step}");
    }
    if (list.empty()) bad("times must not be empty");
    times = std::move(list);
  }

  if (!j.contains("problem")) {
    if (!j.contains("terms")) bad("expected a \"problem\" or a generator with \"terms\"");
    ProblemSpec spec{"generator", generator_from_json(j), std::nullopt, std::nullopt,
                     std::move(times)};
    if (j.contains("rho0")) spec.rho0 = matrix_from_json(j.at("rho0"));
    return spec;
  }

  const std::string name = j.at("problem").get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (!params.is_object()) bad("params must be an object");
  const Interval iv = params.contains("interval")
                          ? interval_from_json(params.at("interval"))
                          : Interval(-1.0, 25.0);

  std::optional<ProblemSpec> spec;
  if (name == "example1") {
    const Complex gamma = complex_param(params, "gamma", Complex(1.0));
    QuantumProblem qp = example1(gamma, fn_param(params, "alpha1", "1"),
                                 fn_param(params, "alpha2", "1"),
                                 fn_param(params, "alpha3", "1"), iv);
    spec = ProblemSpec{qp.name, std::move(qp.generator), std::move(qp.reference),
                       default_rho0(), std::move(times)};
  } else if (name == "example2") {
    const double mu = params.contains("mu") ? finite_number(params.at("mu"), "mu") : 0.5;
    QuantumProblem qp = example2(
        mu, fn_param(params, "gamma", "1"), fn_param(params, "eps", "2"),
        fn_param(params, "c00", "0.1"), fn_param(params, "c01", "0.2"),
        fn_param(params, "c10", "0.2"), fn_param(params, "c11", "0.1"), iv);
    spec = ProblemSpec{qp.name, std::move(qp.generator), std::move(qp.reference),
                       default_rho0(), std::move(times)};
  } else if (name == "custom") {
    if (!j.contains("generator")) bad("custom problems need a \"generator\"");
    spec = ProblemSpec{"custom", generator_from_json(j.at("generator")), std::nullopt,
                       std::nullopt, std::move(times)};
  } else {
    bad("unknown problem \"" + name + "\"");
  }

  if (j.contains("rho0")) spec->rho0 = matrix_from_json(j.at("rho0"));
  return *spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("spec file " + path + ": " + e.what());
  }
  return problem_from_json(j);
}

}  // namespace commuprop::io
