// main.cpp — commuprop command-line tool: commutativity checks, decompositions,
// propagator solves and density-matrix evolutions for generator specs.
//
// Exit codes: 0 success (or commutative verdict), 1 negative verdict
// (non-commutative generator, refusal, physicality violation), 2 usage or
// input errors.
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commuprop/commutativity.hpp"
#include "commuprop/json_io.hpp"
#include "commuprop/quantum.hpp"
#include "commuprop/solver.hpp"

namespace {

using namespace commuprop;

struct Options {
  std::string spec_path;
  std::string method = "zhu";
  std::string out_base = "trajectory";
  std::vector<std::string> compare;
  int grid = 33;
  int steps_per_unit = 10000;
  double tmax = 0.0;
  double dt = 0.1;
  bool tmax_set = false;
  bool allow_unphysical = false;
};

std::vector<double> build_times(const io::ProblemSpec& spec, const Options& opt) {
  if (spec.times && !opt.tmax_set) return *spec.times;
  const double hi = spec.generator.interval().hi;
  const double tmax = opt.tmax_set ? opt.tmax : std::min(2.0, hi);
  if (!(opt.dt > 0.0)) throw std::invalid_argument("--dt must be positive");
  if (tmax < 0.0) throw std::invalid_argument("--tmax must be nonnegative");
  std::vector<double> times;
  const double slack = 1e-9 * (1.0 + tmax);
  for (double t = 0.0; t <= tmax + slack; t += opt.dt) times.push_back(std::min(t, tmax));
  return times;
}

Propagator make_propagator(const GeneratorSum& g, const std::string& method,
                           const Options& opt) {
  if (method == "rk4") return Propagator::rk4(g, opt.steps_per_unit);
  if (method == "exact")
    return Propagator::exact(g, check_functional_commutativity(g, opt.grid));
  return Propagator::zhu(as_spatial_decomposition(g));
}

void write_file(const std::string& path, const std::string& body) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  out << body;
  if (!out) throw std::runtime_error("cannot write " + path);
}

int run_check(const Options& opt) {
  const io::ProblemSpec spec = io::load_problem(opt.spec_path);
  const CommutativityReport report = check_functional_commutativity(spec.generator, opt.grid);
  std::cout << io::to_json(report) << "\n";
  return report.is_commutative ? 0 : 1;
}

int run_decompose(const Options& opt) {
  const io::ProblemSpec spec = io::load_problem(opt.spec_path);
  const MartinDecomposition dec = martin_decompose(spec.generator, opt.grid);
  std::cout << io::to_json(dec) << "\n";
  return 0;
}

int run_solve(const Options& opt) {
  const io::ProblemSpec spec = io::load_problem(opt.spec_path);
  const std::vector<double> times = build_times(spec, opt);
  const Propagator prop = make_propagator(spec.generator, opt.method, opt);
  const Trajectory traj = sample_trajectory(prop, times);

  if (!opt.compare.empty()) {
    std::vector<Trajectory> runs;
    for (const std::string& m : opt.compare)
      runs.push_back(sample_trajectory(make_propagator(spec.generator, m, opt), times));
    double max_dev = 0.0;
    for (std::size_t a = 0; a < runs.size(); ++a)
      for (std::size_t b = a + 1; b < runs.size(); ++b)
        for (std::size_t k = 0; k < times.size(); ++k)
          max_dev = std::max(max_dev, (runs[a].values[k] - runs[b].values[k]).norm());
    std::cout << "max cross-method deviation: " << io::fmt_double(max_dev) << "\n";
  }

  write_file(opt.out_base + ".csv", io::to_csv(traj));
  write_file(opt.out_base + ".json", io::to_json(traj));
  std::cout << "wrote " << opt.out_base << ".csv and " << opt.out_base << ".json ("
            << times.size() << " samples, dim " << spec.generator.dim() << ", method "
            << opt.method << ")\n";
  return 0;
}

int run_evolve(const Options& opt) {
  const io::ProblemSpec spec = io::load_problem(opt.spec_path);
  if (!spec.rho0)
    throw std::invalid_argument("evolve needs an initial state: supply \"rho0\"");
  const DensityMatrix rho0(*spec.rho0);
  const std::vector<double> times = build_times(spec, opt);
  const Propagator prop = make_propagator(spec.generator, opt.method, opt);
  const StateTrajectory traj = evolve_state(prop, rho0, times, opt.allow_unphysical);

  double max_trace_defect = 0.0;
  double min_eig = 0.0;
  for (const PhysicalityReport& r : traj.reports) {
    max_trace_defect = std::max(max_trace_defect, r.trace_defect);
    min_eig = std::min(min_eig, r.min_eigenvalue);
  }
  write_file(opt.out_base + ".csv", io::to_csv(traj));
  write_file(opt.out_base + ".json", io::to_json(traj));
  std::cout << "wrote " << opt.out_base << ".csv and " << opt.out_base << ".json ("
            << times.size() << " samples, max trace defect "
            << io::fmt_double(max_trace_defect) << ", min eigenvalue "
            << io::fmt_double(min_eig) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Propagators for linear systems dPhi/dt = L(t) Phi with "
               "functionally commutative L"};
  app.require_subcommand(1);

  const auto method_check = CLI::IsMember({"exact", "zhu", "rk4"});

  CLI::App* check = app.add_subcommand("check", "Report whether L(t) and L(s) commute");
  check->add_option("spec", opt.spec_path, "Problem spec JSON file")->required();
  check->add_option("--grid", opt.grid, "Sample-grid size")->check(CLI::Range(3, 100000));

  CLI::App* decompose =
      app.add_subcommand("decompose", "Write a sampled-basis decomposition of L");
  decompose->add_option("spec", opt.spec_path, "Problem spec JSON file")->required();
  decompose->add_option("--grid", opt.grid, "Sample-grid size")
      ->check(CLI::Range(3, 100000));

  CLI::App* solve = app.add_subcommand("solve", "Sample the propagator Phi(t)");
  solve->add_option("spec", opt.spec_path, "Problem spec JSON file")->required();
  solve->add_option("--method", opt.method, "exact, zhu or rk4")->check(method_check);
  solve->add_option("--steps", opt.steps_per_unit, "RK4 steps per unit time")
      ->check(CLI::PositiveNumber);
  solve->add_option("--grid", opt.grid, "Sample-grid size for the commutativity check")
      ->check(CLI::Range(3, 100000));
  CLI::Option* solve_tmax =
      solve->add_option("--tmax", opt.tmax, "Last sample time (default min(2, interval hi))");
  solve->add_option("--dt", opt.dt, "Sample spacing")->check(CLI::PositiveNumber);
  solve->add_option("--compare", opt.compare, "Comma-separated methods to cross-check")
      ->delimiter(',')
      ->check(method_check);
  solve->add_option("--out", opt.out_base, "Output base path (writes .csv and .json)");

  CLI::App* evolve = app.add_subcommand("evolve", "Evolve a density matrix rho(t)");
  evolve->add_option("spec", opt.spec_path, "Problem spec JSON file")->required();
  evolve->add_option("--method", opt.method, "exact, zhu or rk4")->check(method_check);
  evolve->add_option("--steps", opt.steps_per_unit, "RK4 steps per unit time")
      ->check(CLI::PositiveNumber);
  evolve->add_option("--grid", opt.grid, "Sample-grid size for the commutativity check")
      ->check(CLI::Range(3, 100000));
  CLI::Option* evolve_tmax =
      evolve->add_option("--tmax", opt.tmax, "Last sample time (default min(2, interval hi))");
  evolve->add_option("--dt", opt.dt, "Sample spacing")->check(CLI::PositiveNumber);
  evolve->add_option("--out", opt.out_base, "Output base path (writes .csv and .json)");
  evolve->add_flag("--allow-unphysical", opt.allow_unphysical,
                   "Record physicality violations instead of failing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  opt.tmax_set = (solve_tmax->count() > 0) || (evolve_tmax->count() > 0);

  try {
    if (check->parsed()) return run_check(opt);
    if (decompose->parsed()) return run_decompose(opt);
    if (solve->parsed()) return run_solve(opt);
    return run_evolve(opt);
  } catch (const PhysicalityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NotCommutativeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
