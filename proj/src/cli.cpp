#include "impopt/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "impopt/io.hpp"

namespace impopt::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct ProblemFlags {
  builtin::ProblemParams params;
  double S = 0.0;
  int N = 0;
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& f) {
  cmd->add_option("--alpha", f.params.alpha, "gap2 exponent")->check(CLI::PositiveNumber);
  cmd->add_option("--drift", f.params.drift, "heisenberg drift: none | constant | linear");
  cmd->add_option("--C", f.params.C, "heisenberg target x3");
  cmd->add_option("--c", f.params.c, "heisenberg constant drift");
  cmd->add_option("--S", f.S, "parameter budget")->check(CLI::PositiveNumber);
  cmd->add_option("--N", f.N, "transcription cells")->check(CLI::Range(10, 100000));
}

bool looks_like_file(const std::string& ref) {
  return ref.ends_with(".json") || ref.find('/') != std::string::npos;
}

// Built-in name or problem JSON path; returns the problem and a file-level N.
// Solver options start from the built-in recommendation when ref names one.
RelaxedProblem load_problem(const std::string& ref, const ProblemFlags& flags, SolverOptions& opts) {
  RelaxedProblem p;
  if (looks_like_file(ref)) {
    io::ProblemFile pf = io::problem_from_json(io::read_json_file(ref));
    p = std::move(pf.problem);
    if (pf.N) opts.N = *pf.N;
  } else {
    p = builtin::problem_by_name(ref, flags.params);
    opts = builtin::recommended_options(ref);
  }
  if (flags.S > 0.0) p.S = flags.S;
  if (flags.N > 0) opts.N = flags.N;
  return p;
}

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("IMPOPT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "IMPOPT_SEED must be an unsigned integer");
    }
  }
  return seed;
}

std::string vec_text(const Vec& v) {
  std::ostringstream os;
  os << std::setprecision(10) << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::InvalidArgument, "cannot create directory '" + dir + "'");
}

void write_json(const fs::path& path, const Json& j) { io::write_text_file(path.string(), j.dump(2) + "\n"); }

// distance ------------------------------------------------------------------

struct DistanceArgs {
  std::string a, b;
  double h = 0.01;
  bool strengthened = false;
};

int cmd_distance(const DistanceArgs& args, std::ostream& out) {
  const Json ja = io::read_json_file(args.a), jb = io::read_json_file(args.b);
  double d = 0.0;
  if (ja.contains("T") && jb.contains("T")) {
    const GeneralizedControl ga = io::generalized_from_json(ja), gb = io::generalized_from_json(jb);
    if (args.strengthened) {
      d = control_distance(ga, gb, args.h);
    } else {
      const double T = std::min(ga.horizon(), gb.horizon());
      d = frechet_distance_at(ga.curve(), gb.curve(), T, args.h);
    }
  } else {
    const SampledCurve ca = refine(io::curve_from_json(ja), args.h);
    const SampledCurve cb = refine(io::curve_from_json(jb), args.h);
    d = args.strengthened ? strengthened_distance(ca, cb) : frechet_distance(ca, cb);
  }
  out << std::setprecision(10) << d << '\n';
  return kExitOk;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string problem, control, csv;
  int steps = 64;
  ProblemFlags flags;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  SolverOptions unused;
  const RelaxedProblem p = load_problem(args.problem, args.flags, unused);
  const Json jc = io::read_json_file(args.control);
  const GeneralizedControl gc =
      jc.contains("times") ? from_ordinary(io::ordinary_from_json(jc)) : io::generalized_from_json(jc);
  IntegrationOptions opts;
  opts.steps_per_segment = args.steps;
  const GeneralizedTrajectory traj = integrate_auxiliary(p.sys, gc, p.x0, opts);
  if (!args.csv.empty()) {
    std::ofstream f(args.csv);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + args.csv + "'");
    io::write_trajectory_csv(f, traj);
  }
  out << "endpoint " << vec_text(endpoint(traj)) << '\n';
  return kExitOk;
}

// solve ---------------------------------------------------------------------

struct SolveArgs {
  std::string problem, out_dir;
  std::uint64_t seed = SolverOptions{}.seed;
  int starts = -1;      ///< < 0 keeps the solver default
  int iterations = 0;   ///< 0 keeps the default for the problem
  ProblemFlags flags;
};

int cmd_solve(const SolveArgs& args, std::ostream& out) {
  SolverOptions opts;
  const RelaxedProblem p = load_problem(args.problem, args.flags, opts);
  opts.seed = effective_seed(args.seed);
  if (args.starts >= 0) opts.random_starts = args.starts;
  if (args.iterations > 0) opts.max_iterations = args.iterations;

  RelaxedSolution sol;
  try {
    sol = solve_relaxed(p, opts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Infeasible) throw;
    out << e.what() << '\n';
    return kExitInfeasible;
  }

  out << std::setprecision(6) << "cost " << sol.cost << "  endpoint residual "
      << std::setprecision(3) << sol.endpoint_residual << '\n';
  if (sol.impulse_arcs.empty()) {
    out << "no impulse arc\n";
  } else {
    for (const ImpulseArc& a : sol.impulse_arcs) {
      out << std::setprecision(4) << "impulse arc detected at s∈[" << sol.grid[a.first] << ", "
          << sol.grid[a.last + 1] << "]\n";
    }
  }
  const ProfileReport prof = analyze_profile(sol);
  out << std::setprecision(3) << "profile: min vhat " << prof.min_vhat << ", max increase "
      << prof.max_increase << '\n';
  if (prof.nonincreasing) {
    out << "v monotone decreasing" << (prof.terminal_impulse ? "; terminal impulse arc" : "") << '\n';
  }
  if (!args.out_dir.empty()) {
    ensure_dir(args.out_dir);
    write_json(fs::path(args.out_dir) / "solution.json", io::to_json(sol));
    std::ofstream csv(fs::path(args.out_dir) / "solution.csv");
    io::write_solution_csv(csv, sol);
  }
  return kExitOk;
}

// gap -----------------------------------------------------------------------

struct GapArgs {
  std::string problem, out;
  std::vector<double> etas{0.1, 0.05, 0.02, 0.01};
  std::vector<double> epsilons{1e-2};
  double gap_tol = 0.01;
  std::uint64_t seed = SolverOptions{}.seed;
  int iterations = 0;
  ProblemFlags flags;
};

int cmd_gap(const GapArgs& args, std::ostream& out) {
  SolverOptions opts;
  const RelaxedProblem p = load_problem(args.problem, args.flags, opts);
  opts.seed = effective_seed(args.seed);
  if (args.iterations > 0) opts.max_iterations = args.iterations;
  GapReport r;
  try {
    r = gap_probe(p, args.etas, args.epsilons, opts, args.gap_tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Infeasible) throw;
    out << e.what() << '\n';
    return kExitInfeasible;
  }

  out << std::setprecision(6) << "generalized cost " << r.generalized_cost << '\n';
  out << std::left << std::setw(10) << "eta" << std::setw(10) << "eps" << "restricted cost\n";
  for (const GapCell& c : r.cells) {
    out << std::setw(10) << c.eta << std::setw(10) << c.eps;
    if (c.cost) {
      out << *c.cost << '\n';
    } else {
      out << "infeasible (" << c.note << ")\n";
    }
  }
  out << std::right;
  if (r.gap_detected) {
    out << "GAP detected: >= " << std::setprecision(4) << *r.gap_estimate << '\n';
  } else if (r.gap_estimate) {
    out << "no gap (estimate " << std::setprecision(4) << *r.gap_estimate << ")\n";
  } else {
    out << "no gap estimate: every restricted solve was infeasible\n";
  }
  if (!args.out.empty()) write_json(args.out, io::to_json(r));
  return kExitOk;
}

// example -------------------------------------------------------------------

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"example2", "fuel", "circles", "gap1",
                                              "gap2",     "heisenberg", "trivial"};
  return names;
}

Json problem_json(const std::string& name) {
  auto vecj = [](const Vec& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); };
  const RelaxedProblem p = builtin::problem_by_name(name);
  Json j{{"name", name}, {"x0", vecj(p.x0)}, {"x1", vecj(p.x1)}};
  if (p.S > 0.0) j["S"] = p.S;
  if (name == "fuel") {
    j["system"] = "fuel";
    j["lagrangian"] = "fuel";
  } else if (name == "gap1") {
    j["system"] = "gap";
    j["lagrangian"] = "gap1";
  } else if (name == "gap2") {
    j["system"] = "gap";
    j["lagrangian"] = "gap2:2";
  } else if (name == "heisenberg") {
    j["system"] = Json{{"name", "heisenberg"}, {"drift", "linear"}};
    j["lagrangian"] = "heisenberg";
  } else if (name == "trivial") {
    j["system"] = "integrator:2";
    j["lagrangian"] = "norm-plus-one";
  }
  return j;
}

int cmd_example(const std::string& name, const std::string& dir, std::ostream& out) {
  const auto& names = example_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::InvalidArgument, "unknown example '" + name + "' (available: " + known + ")");
  }
  ensure_dir(dir);
  std::vector<fs::path> written;
  auto emit = [&](const std::string& file, const Json& j) {
    const fs::path path = fs::path(dir) / file;
    write_json(path, j);
    written.push_back(path);
  };

  if (name == "example2") {
    const auto controls = builtin::noninvolutive_controls();
    for (std::size_t i = 0; i < controls.size(); ++i) {
      emit("control_v" + std::to_string(i + 1) + ".json", io::to_json(controls[i]));
    }
    for (int m = 1; m <= 3; ++m) {
      emit("needle_u" + std::to_string(m) + "_eps0.01.json", io::to_json(builtin::noninvolutive_needle(m, 0.01)));
    }
  } else if (name == "fuel") {
    emit("problem.json", problem_json("fuel"));
    emit("impulse.json", io::to_json(builtin::fuel_impulse_control()));
    for (int i : {4, 8, 16, 32}) emit("needle_" + std::to_string(i) + ".json", io::to_json(builtin::fuel_needle(i)));
  } else if (name == "circles") {
    emit("circle.json", io::to_json(builtin::circle_fixture(false).base()));
    emit("circle_reversed.json", io::to_json(builtin::circle_fixture(true).base()));
  } else {
    emit("problem.json", problem_json(name));
  }
  for (const auto& path : written) out << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Impulsive optimal control with generalized controls", "impopt"};
  app.require_subcommand(1);

  DistanceArgs dist;
  auto* c_dist = app.add_subcommand("distance", "Frechet distance between two curve or control files");
  c_dist->add_option("a", dist.a, "first curve JSON")->required();
  c_dist->add_option("b", dist.b, "second curve JSON")->required();
  c_dist->add_option("--refine", dist.h, "refinement step")->check(CLI::PositiveNumber);
  c_dist->add_flag("--strengthened", dist.strengthened, "add the difference of lengths");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Integrate the auxiliary system under a control");
  c_sim->add_option("problem", sim.problem, "built-in problem name or problem JSON")->required();
  c_sim->add_option("control", sim.control, "generalized or ordinary control JSON")->required();
  c_sim->add_option("--steps", sim.steps, "RK4 substeps per segment")->check(CLI::Range(1, 1000000));
  c_sim->add_option("--csv", sim.csv, "trajectory CSV output");
  add_problem_flags(c_sim, sim.flags);

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "Solve the relaxed problem");
  c_solve->add_option("problem", solve.problem, "built-in problem name or problem JSON")->required();
  c_solve->add_option("--seed", solve.seed, "random seed (IMPOPT_SEED overrides)");
  c_solve->add_option("--seeds", solve.starts, "number of random starts")->check(CLI::NonNegativeNumber);
  c_solve->add_option("--iterations", solve.iterations, "iterations per penalty stage")
      ->check(CLI::PositiveNumber);
  c_solve->add_option("--out-dir", solve.out_dir, "directory for solution.json and solution.csv");
  add_problem_flags(c_solve, solve.flags);

  GapArgs gap;
  auto* c_gap = app.add_subcommand("gap", "Probe for a Lavrentiev gap");
  c_gap->add_option("problem", gap.problem, "built-in problem name or problem JSON")->required();
  c_gap->add_option("--etas", gap.etas, "decreasing lower bounds on v")->delimiter(',');
  c_gap->add_option("--epsilons", gap.epsilons, "decreasing endpoint tolerances")->delimiter(',');
  c_gap->add_option("--gap-tol", gap.gap_tol, "gap threshold");
  c_gap->add_option("--seed", gap.seed, "random seed (IMPOPT_SEED overrides)");
  c_gap->add_option("--iterations", gap.iterations, "iterations per penalty stage")
      ->check(CLI::PositiveNumber);
  c_gap->add_option("--out", gap.out, "GapReport JSON output");
  add_problem_flags(c_gap, gap.flags);

  std::string ex_name, ex_dir = ".";
  auto* c_ex = app.add_subcommand("example", "Write built-in fixtures to disk");
  c_ex->add_option("name", ex_name, "example name")->required();
  c_ex->add_option("--out-dir", ex_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (c_dist->parsed()) return cmd_distance(dist, out);
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_solve->parsed()) return cmd_solve(solve, out);
    if (c_gap->parsed()) return cmd_gap(gap, out);
    if (c_ex->parsed()) return cmd_example(ex_name, ex_dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace impopt::cli
