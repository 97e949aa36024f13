// json_io.hpp — JSON and CSV encodings of matrices, generators, reports and
// trajectories, plus parsing of problem-spec files.
//
// All emitted floating-point numbers use 17 significant digits, enough to
// round-trip IEEE-754 doubles bit-exactly, and key order is fixed, so equal
// inputs produce byte-identical output.
#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "commuprop/commutativity.hpp"
#include "commuprop/quantum.hpp"
#include "commuprop/solver.hpp"

namespace commuprop::io {

std::string fmt_double(double v);  // 17 significant digits

// Matrix: {"rows": n, "cols": m, "data": [[re, im], ...]} with data row-major.
std::string to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

// Generator: {"n": ..., "interval": [lo, hi],
//             "terms": [{"coeff": "<expr>", "matrix": {...}}, ...]}.
std::string to_json(const GeneratorSum& g);
GeneratorSum generator_from_json(const nlohmann::json& j);

// Report: {"commutative": ..., "max_pairwise": ..., "max_derivative": ...,
//          "witness": [t, s], "grid_size": ...}.
std::string to_json(const CommutativityReport& r);

std::string to_json(const MartinDecomposition& d);

// Trajectory JSON mirrors the matrix encoding; CSV has one row per time with
// header "t, re_i_j..., im_i_j..." in row-major entry order.
std::string to_json(const Trajectory& t);
std::string to_csv(const Trajectory& t);

// State trajectories additionally carry trace-defect and min-eigenvalue
// columns (CSV) or a "physicality" array (JSON).
std::string to_json(const StateTrajectory& t);
std::string to_csv(const StateTrajectory& t);

// A problem spec is either a bare generator (object with "terms") or a
// quantum problem: {"problem": "example1"|"example2"|"custom",
// "params": {...}, "rho0": <matrix>}; custom problems supply "generator".
struct ProblemSpec {
  std::string kind;  // "generator", "example1", "example2", "custom"
  GeneratorSum generator;
  std::optional<AnalyticPropagator> reference;
  std::optional<Matrix> rho0;
  std::optional<std::vector<double>> times;  // optional explicit time grid
};

ProblemSpec problem_from_json(const nlohmann::json& j);
ProblemSpec load_problem(const std::string& path);

}  // namespace commuprop::io
