#include "impopt/io.hpp"

#include <fstream>
#include <sstream>

namespace impopt::io {

namespace {

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json vecs_json(const std::vector<Vec>& vs) {
  Json a = Json::array();
  for (const Vec& v : vs) a.push_back(vec_json(v));
  return a;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw Error(ErrorKind::Parse, "expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::Parse, std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw Error(ErrorKind::Parse, what + " must be a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

Vec vec_from(const Json& j, const std::string& what) {
  const auto xs = numbers(j, what);
  return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

std::vector<Vec> vecs_from(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, what + " must be an array of arrays");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec_from(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

Mat mat_from(const Json& j, const std::string& what) {
  const auto rows = vecs_from(j, what);
  if (rows.empty()) throw Error(ErrorKind::Parse, what + " must have at least one row");
  Mat m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw Error(ErrorKind::Parse, what + " rows differ in length");
    m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  }
  return m;
}

void write_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    os << Json(row[i]).dump();
  }
  os << '\n';
}

}  // namespace

static ProblemFile problem_from_json_unchecked(const Json& j);
static RelaxedSolution solution_from_json_unchecked(const Json& j);

Json to_json(const SampledCurve& c) {
  return Json{{"params", c.params()}, {"points", vecs_json(c.points())}};
}

SampledCurve curve_from_json(const Json& j) {
  return SampledCurve(numbers(field(j, "params"), "params"), vecs_from(field(j, "points"), "points"));
}

Json to_json(const OrdinaryControl& u) {
  return Json{{"times", u.times()}, {"values", vecs_json(u.values())}};
}

OrdinaryControl ordinary_from_json(const Json& j) {
  return OrdinaryControl(numbers(field(j, "times"), "times"), vecs_from(field(j, "values"), "values"));
}

Json to_json(const GeneralizedControl& gc) {
  Json j = to_json(gc.curve().base());
  j["T"] = gc.horizon();
  return j;
}

GeneralizedControl generalized_from_json(const Json& j) {
  const double T = number(field(j, "T"), "T");
  return GeneralizedControl(SpaceTimeCurve(curve_from_json(j)), T);
}

ControlAffineSystem linear_system(const Mat& A, const Mat& B) {
  if (A.rows() != A.cols() || B.rows() != A.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "A must be n x n and B must be n x k");
  }
  ControlAffineSystem s;
  s.name = "linear";
  s.n = static_cast<int>(A.rows());
  s.k = static_cast<int>(B.cols());
  s.f = [A](const Vec& x) { return Vec(A * x); };
  s.G = [B](const Vec&) { return B; };
  const double a = B.norm();
  s.growth = GrowthBounds{a, std::max(a, A.norm())};
  s.raw = [A, B](const double* y, double v, const double* w, double* out) {
    Eigen::Map<Vec>(out, A.rows()) =
        v * (A * Eigen::Map<const Vec>(y, A.cols())) + B * Eigen::Map<const Vec>(w, B.cols());
  };
  return s;
}

ProblemFile problem_from_json(const Json& j) {
  try {
    return problem_from_json_unchecked(j);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("problem file: ") + e.what());
  }
}

static ProblemFile problem_from_json_unchecked(const Json& j) {
  ProblemFile out;
  RelaxedProblem& p = out.problem;
  const Json& sys = field(j, "system");
  builtin::ProblemParams params;
  if (sys.is_string()) {
    p.sys = builtin::system_by_name(sys.get<std::string>(), params);
  } else if (sys.is_object() && sys.contains("A")) {
    p.sys = linear_system(mat_from(sys["A"], "A"), mat_from(field(sys, "B"), "B"));
  } else if (sys.is_object()) {
    const Json& name = field(sys, "name");
    if (!name.is_string()) throw Error(ErrorKind::Parse, "system name must be a string");
    if (sys.contains("drift")) params.drift = sys["drift"].get<std::string>();
    if (sys.contains("c")) params.c = number(sys["c"], "c");
    p.sys = builtin::system_by_name(name.get<std::string>(), params);
    if (sys.value("drift_free", false)) p.sys = builtin::without_drift(p.sys);
  } else {
    throw Error(ErrorKind::Parse, "system must be a name or an object");
  }
  const Json& lag = field(j, "lagrangian");
  if (!lag.is_string()) throw Error(ErrorKind::Parse, "lagrangian must be a name");
  p.spec = builtin::lagrangian_by_name(lag.get<std::string>(), p.sys.k);
  p.x0 = vec_from(field(j, "x0"), "x0");
  p.x1 = vec_from(field(j, "x1"), "x1");
  if (j.contains("S")) p.S = number(j["S"], "S");
  if (j.contains("N")) out.N = static_cast<int>(number(j["N"], "N"));
  p.name = j.value("name", p.sys.name);
  p.validate();
  return out;
}

Json to_json(const RelaxedSolution& sol) {
  Json arcs = Json::array();
  for (const auto& a : sol.impulse_arcs) arcs.push_back({a.first, a.last});
  return Json{{"grid", sol.grid},
              {"v", sol.v},
              {"w", vecs_json(sol.w)},
              {"theta", sol.theta},
              {"y", vecs_json(sol.y)},
              {"running_cost", sol.running_cost},
              {"cost", sol.cost},
              {"endpoint_residual", sol.endpoint_residual},
              {"time_residual", sol.time_residual},
              {"impulse_arcs", arcs},
              {"start_index", sol.start_index},
              {"feasible_starts", sol.feasible_starts}};
}

RelaxedSolution solution_from_json(const Json& j) {
  try {
    return solution_from_json_unchecked(j);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("solution file: ") + e.what());
  }
}

static RelaxedSolution solution_from_json_unchecked(const Json& j) {
  RelaxedSolution s;
  s.grid = numbers(field(j, "grid"), "grid");
  s.v = numbers(field(j, "v"), "v");
  s.w = vecs_from(field(j, "w"), "w");
  s.theta = numbers(field(j, "theta"), "theta");
  s.y = vecs_from(field(j, "y"), "y");
  s.running_cost = numbers(field(j, "running_cost"), "running_cost");
  s.cost = number(field(j, "cost"), "cost");
  s.endpoint_residual = number(field(j, "endpoint_residual"), "endpoint_residual");
  s.time_residual = number(field(j, "time_residual"), "time_residual");
  for (const Json& a : field(j, "impulse_arcs")) {
    s.impulse_arcs.push_back({a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>()});
  }
  s.start_index = field(j, "start_index").get<int>();
  s.feasible_starts = field(j, "feasible_starts").get<std::size_t>();
  const std::size_t N = s.v.size();
  if (s.grid.size() != N + 1 || s.w.size() != N || s.theta.size() != N + 1 || s.y.size() != N + 1) {
    throw Error(ErrorKind::Parse, "solution arrays have inconsistent lengths");
  }
  return s;
}

void write_solution_csv(std::ostream& os, const RelaxedSolution& sol) {
  if (sol.v.empty()) throw Error(ErrorKind::InvalidArgument, "empty solution");
  const std::size_t k = sol.w.front().size(), n = sol.y.front().size();
  os << "s,v";
  for (std::size_t i = 1; i <= k; ++i) os << ",w_" << i;
  os << ",theta";
  for (std::size_t i = 1; i <= n; ++i) os << ",y_" << i;
  os << ",running_cost\n";
  for (std::size_t j = 0; j < sol.grid.size(); ++j) {
    const std::size_t cell = std::min(j, sol.v.size() - 1);
    std::vector<double> row{sol.grid[j], sol.v[cell]};
    for (std::size_t i = 0; i < k; ++i) row.push_back(sol.w[cell][i]);
    row.push_back(sol.theta[j]);
    for (std::size_t i = 0; i < n; ++i) row.push_back(sol.y[j][i]);
    row.push_back(j < sol.running_cost.size() ? sol.running_cost[j] : sol.cost);
    write_row(os, row);
  }
}

void write_trajectory_csv(std::ostream& os, const GeneralizedTrajectory& traj) {
  const SpaceTimeCurve& c = traj.curve;
  const int n = c.state_dim();
  os << "s,V";
  for (int i = 1; i <= n; ++i) os << ",y_" << i;
  os << '\n';
  for (std::size_t j = 0; j < c.size(); ++j) {
    std::vector<double> row{c.base().param(j), c.time(j)};
    const Vec y = c.state(j);
    for (int i = 0; i < n; ++i) row.push_back(y[i]);
    write_row(os, row);
  }
}

Json to_json(const GapReport& r) {
  Json cells = Json::array();
  for (const GapCell& c : r.cells) {
    Json cell{{"eta", c.eta}, {"eps", c.eps}, {"endpoint_residual", c.endpoint_residual}};
    cell["cost"] = c.cost ? Json(*c.cost) : Json(nullptr);
    if (!c.note.empty()) cell["note"] = c.note;
    cells.push_back(cell);
  }
  return Json{{"eta_values", r.eta_values},
              {"eps_values", r.eps_values},
              {"cells", cells},
              {"generalized_cost", r.generalized_cost},
              {"gap_estimate", r.gap_estimate ? Json(*r.gap_estimate) : Json(nullptr)},
              {"gap_tol", r.gap_tol},
              {"gap_detected", r.gap_detected}};
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::Parse, origin + ":" + std::to_string(line) + ":" + std::to_string(column) +
                                      ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for '" + path + "'");
}

}  // namespace impopt::io
