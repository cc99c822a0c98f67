#include "impopt/problems.hpp"

#include <cmath>
#include <numbers>

namespace impopt::builtin {

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double heisenberg_loop(double C) { return std::sqrt(std::numbers::pi * std::abs(C)); }

}  // namespace

ControlAffineSystem fuel_system() {
  ControlAffineSystem s;
  s.name = "fuel";
  s.n = 1;
  s.k = 1;
  s.f = [](const Vec& x) { return x; };
  s.G = [](const Vec&) { return Mat::Identity(1, 1); };
  s.growth = GrowthBounds{1.0, 1.0};
  s.raw = [](const double* y, double v, const double* w, double* out) { out[0] = y[0] * v + w[0]; };
  return s;
}

ControlAffineSystem integrator(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "integrator dimension must be positive");
  ControlAffineSystem s;
  s.name = "integrator";
  s.n = n;
  s.k = n;
  s.f = [n](const Vec&) { return Vec::Zero(n); };
  s.G = [n](const Vec&) { return Mat::Identity(n, n); };
  s.growth = GrowthBounds{1.0, 0.0};
  s.raw = [n](const double*, double, const double* w, double* out) {
    for (int i = 0; i < n; ++i) out[i] = w[i];
  };
  return s;
}

ControlAffineSystem noninvolutive_system() {
  ControlAffineSystem s;
  s.name = "example2";
  s.n = 3;
  s.k = 2;
  s.f = [](const Vec&) { return Vec::Zero(3); };
  s.G = [](const Vec& x) {
    Mat g = Mat::Zero(3, 2);
    g(0, 0) = 1.0;
    g(1, 1) = 1.0;
    g(2, 0) = x[1];
    return g;
  };
  s.growth = GrowthBounds{1.0, 1.0};
  s.raw = [](const double* y, double, const double* w, double* out) {
    out[0] = w[0];
    out[1] = w[1];
    out[2] = y[1] * w[0];
  };
  return s;
}

ControlAffineSystem gap_system() {
  ControlAffineSystem s;
  s.name = "gap";
  s.n = 2;
  s.k = 1;
  s.f = [](const Vec& x) { return vec({x[0] + x[1], 0.0}); };
  s.G = [](const Vec&) {
    Mat g(2, 1);
    g << 0.0, 1.0;
    return g;
  };
  s.growth = GrowthBounds{1.0, 2.0};
  s.raw = [](const double* y, double v, const double* w, double* out) {
    out[0] = (y[0] + y[1]) * v;
    out[1] = w[0];
  };
  return s;
}

ControlAffineSystem heisenberg_system(HeisenbergDrift drift, double c) {
  ControlAffineSystem s;
  s.n = 3;
  s.k = 2;
  switch (drift) {
    case HeisenbergDrift::None:
      s.name = "heisenberg";
      s.f = [](const Vec&) { return Vec::Zero(3); };
      s.growth = GrowthBounds{1.0, 2.0};
      break;
    case HeisenbergDrift::Constant:
      s.name = "heisenberg-constant";
      s.f = [c](const Vec&) { return vec({0.0, 0.0, c}); };
      s.growth = GrowthBounds{std::max(1.0, std::abs(c)), 2.0};
      break;
    case HeisenbergDrift::Linear:
      s.name = "heisenberg-linear";
      s.f = [](const Vec& x) { return vec({0.0, 0.0, -x[2]}); };
      s.growth = GrowthBounds{1.0, 2.0};
      break;
  }
  s.G = [](const Vec& x) {
    Mat g = Mat::Zero(3, 2);
    g(0, 0) = 1.0;
    g(1, 1) = 1.0;
    g(2, 0) = 2.0 * x[1];
    g(2, 1) = -2.0 * x[0];
    return g;
  };
  s.raw = [drift, c](const double* y, double v, const double* w, double* out) {
    double f3 = 0.0;
    if (drift == HeisenbergDrift::Constant) f3 = c;
    if (drift == HeisenbergDrift::Linear) f3 = -y[2];
    out[0] = w[0];
    out[1] = w[1];
    out[2] = f3 * v + 2.0 * y[1] * w[0] - 2.0 * y[0] * w[1];
  };
  return s;
}

ControlAffineSystem without_drift(const ControlAffineSystem& sys) {
  ControlAffineSystem s = sys;
  s.name = sys.name + "-driftfree";
  const int n = sys.n;
  s.f = [n](const Vec&) { return Vec::Zero(n); };
  // the velocity is linear in v, so v = 0 drops f
  if (sys.raw) {
    s.raw = [raw = sys.raw](const double* y, double, const double* w, double* out) {
      raw(y, 0.0, w, out);
    };
  }
  return s;
}

LagrangianSpec fuel_lagrangian(int k) {
  LagrangianSpec l;
  l.name = "fuel";
  l.L = [](const Vec&, const Vec& u) { return u.norm(); };
  l.recession = [](const Vec&, const Vec& w) { return w.norm(); };
  l.growth = GrowthBounds{0.0, 1.0};
  l.auxiliary = [k](const double*, double, const double* w) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += w[i] * w[i];
    return std::sqrt(s);
  };
  return l;
}

LagrangianSpec norm_plus_one_lagrangian(int k) {
  LagrangianSpec l;
  l.name = "norm-plus-one";
  l.L = [](const Vec&, const Vec& u) { return std::sqrt(1.0 + u.squaredNorm()); };
  l.recession = [](const Vec&, const Vec& w) { return w.norm(); };
  l.growth = GrowthBounds{0.0, 1.0};
  l.auxiliary = [k](const double*, double v, const double* w) {
    double s = v * v;
    for (int i = 0; i < k; ++i) s += w[i] * w[i];
    return std::sqrt(s);
  };
  return l;
}

LagrangianSpec gap1_lagrangian() {
  LagrangianSpec l;
  l.name = "gap1";
  l.L = [](const Vec& x, const Vec& u) {
    const double a = std::abs(x[0]);
    if (a == 0.0) return 0.0;
    return a + std::max(u.norm() - 1.0 / std::sqrt(a), 0.0);
  };
  l.recession = [](const Vec& y, const Vec& w) { return y[0] == 0.0 ? 0.0 : w.norm(); };
  l.auxiliary = [](const double* y, double v, const double* w) {
    const double a = std::abs(y[0]);
    if (a == 0.0) return 0.0;
    return a * v + std::max(std::abs(w[0]) - v / std::sqrt(a), 0.0);
  };
  return l;
}

LagrangianSpec gap2_lagrangian(double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "gap2 needs alpha > 0");
  LagrangianSpec l;
  l.name = "gap2:" + std::to_string(alpha);
  l.L = [alpha](const Vec& x, const Vec& u) {
    return std::pow(std::abs(x[0]), alpha) * u.squaredNorm();
  };
  l.recession = [](const Vec& y, const Vec& w) {
    return (y[0] == 0.0 || w.squaredNorm() == 0.0) ? 0.0
                                                    : std::numeric_limits<double>::infinity();
  };
  l.auxiliary = [alpha](const double* y, double v, const double* w) {
    const double a = std::abs(y[0]);
    if (a == 0.0 || w[0] == 0.0) return 0.0;
    if (v == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(a, alpha) * w[0] * w[0] / v;
  };
  return l;
}

LagrangianSpec lagrangian_by_name(const std::string& name, int k) {
  if (name == "fuel") return fuel_lagrangian(k);
  if (name == "norm-plus-one" || name == "heisenberg") {
    LagrangianSpec l = norm_plus_one_lagrangian(k);
    l.name = name;
    return l;
  }
  const bool scalar = name == "gap1" || name.rfind("gap2:", 0) == 0;
  if (scalar && k != 1) {
    throw Error(ErrorKind::DimensionMismatch, "lagrangian '" + name + "' needs a scalar control");
  }
  if (name == "gap1") return gap1_lagrangian();
  if (name.rfind("gap2:", 0) == 0) {
    double alpha = 0.0;
    try {
      alpha = std::stod(name.substr(5));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "cannot read alpha in '" + name + "'");
    }
    return gap2_lagrangian(alpha);
  }
  std::string known;
  for (const auto& n : lagrangian_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorKind::InvalidArgument,
              "unknown lagrangian '" + name + "' (known: " + known + ")");
}

std::vector<std::string> lagrangian_names() {
  return {"fuel", "norm-plus-one", "heisenberg", "gap1", "gap2:<alpha>"};
}

RelaxedProblem fuel_problem() {
  RelaxedProblem p;
  p.name = "fuel";
  p.sys = fuel_system();
  p.spec = fuel_lagrangian(1);
  p.x0 = vec({0.0});
  p.x1 = vec({std::numbers::e});
  p.S = 3.0;
  return p;
}

RelaxedProblem gap1_problem() {
  RelaxedProblem p;
  p.name = "gap1";
  p.sys = gap_system();
  p.spec = gap1_lagrangian();
  p.x0 = vec({0.0, -1.0});
  p.x1 = vec({0.0, 0.0});
  return p;
}

RelaxedProblem gap2_problem(double alpha) {
  RelaxedProblem p = gap1_problem();
  p.name = "gap2";
  p.spec = gap2_lagrangian(alpha);
  return p;
}

RelaxedProblem heisenberg_problem(HeisenbergDrift drift, double C, double c) {
  RelaxedProblem p;
  p.name = "heisenberg";
  p.sys = heisenberg_system(drift, c);
  p.spec = norm_plus_one_lagrangian(2);
  p.spec.name = "heisenberg";
  p.x0 = Vec::Zero(3);
  p.x1 = vec({0.0, 0.0, C});
  // time arc plus a loop enclosing |C| / 4, with a factor 2 of room
  p.S = 2.0 * (1.0 + heisenberg_loop(C));
  return p;
}

RelaxedProblem trivial_problem() {
  RelaxedProblem p;
  p.name = "trivial";
  p.sys = integrator(2);
  p.spec = norm_plus_one_lagrangian(2);
  p.x0 = Vec::Zero(2);
  p.x1 = Vec::Zero(2);
  return p;
}

RelaxedProblem drift_free(const RelaxedProblem& p) {
  RelaxedProblem q = p;
  q.name = p.name + "-driftfree";
  q.sys = without_drift(p.sys);
  return q;
}

std::vector<std::string> problem_names() {
  return {"fuel", "fuel-driftfree", "gap1", "gap2", "heisenberg", "trivial", "example2"};
}

HeisenbergDrift drift_by_name(const std::string& name) {
  if (name == "none") return HeisenbergDrift::None;
  if (name == "constant") return HeisenbergDrift::Constant;
  if (name == "linear") return HeisenbergDrift::Linear;
  throw Error(ErrorKind::InvalidArgument, "unknown drift '" + name + "' (known: none, constant, linear)");
}

namespace {

std::string joined(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

RelaxedProblem problem_by_name(const std::string& name, const ProblemParams& params) {
  if (name == "fuel") return fuel_problem();
  if (name == "fuel-driftfree") return drift_free(fuel_problem());
  if (name == "gap1") return gap1_problem();
  if (name == "gap2") return gap2_problem(params.alpha);
  if (name == "heisenberg") return heisenberg_problem(drift_by_name(params.drift), params.C, params.c);
  if (name == "trivial") return trivial_problem();
  if (name == "example2") {
    // the three-impulse transfer (0, 0, 0) -> (1, 1, 1/2) under the fuel integrand
    RelaxedProblem p;
    p.name = "example2";
    p.sys = noninvolutive_system();
    p.spec = fuel_lagrangian(2);
    p.x0 = Vec::Zero(3);
    p.x1 = vec({1.0, 1.0, 0.5});
    return p;
  }
  throw Error(ErrorKind::InvalidArgument,
              "unknown problem '" + name + "' (known: " + joined(problem_names()) + ")");
}

SolverOptions recommended_options(const std::string& name) {
  SolverOptions opts;
  // The drifted Heisenberg transfer converges slowly along its long impulse arc.
  if (name == "heisenberg") opts.max_iterations = 5000;
  return opts;
}

ControlAffineSystem system_by_name(const std::string& name, const ProblemParams& params) {
  if (name == "fuel") return fuel_system();
  if (name == "example2") return noninvolutive_system();
  if (name == "gap") return gap_system();
  if (name == "heisenberg") return heisenberg_system(drift_by_name(params.drift), params.c);
  if (name.rfind("integrator:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(name.substr(11));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "cannot read dimension in '" + name + "'");
    }
    return integrator(n);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown system '" + name +
                                              "' (known: fuel, integrator:<n>, example2, gap, heisenberg)");
}

std::vector<GeneralizedControl> noninvolutive_controls() {
  const Vec e1 = vec({1.0, 0.0}), e2 = vec({0.0, 1.0}), diag = vec({1.0, 1.0});
  std::vector<GeneralizedControl> out;
  for (const auto& legs : {std::vector<Vec>{e1, e2}, std::vector<Vec>{diag}, std::vector<Vec>{e2, e1}}) {
    const SequentialJump jump{0.0, legs};
    out.push_back(sequential_impulse(std::span(&jump, 1), 1.0, 2));
  }
  return out;
}

GeneralizedControl fuel_impulse_control() {
  const Jump jump{0.0, vec({1.0})};
  return impulse_control(std::span(&jump, 1), 1.0, 1);
}

OrdinaryControl fuel_needle(int i) {
  if (i < 2) throw Error(ErrorKind::InvalidArgument, "needle index must be at least 2");
  const double width = 1.0 / i;
  const double height = 1.0 / (1.0 - std::exp(-width));
  return OrdinaryControl({0.0, width, 1.0}, {vec({height}), vec({0.0})});
}

OrdinaryControl noninvolutive_needle(int m, double eps) {
  if (!(eps > 0.0 && 2.0 * eps < 1.0)) throw Error(ErrorKind::InvalidArgument, "need 0 < eps < 1/2");
  const double h = 1.0 / eps;
  switch (m) {
    case 1:
      return OrdinaryControl({0.0, eps, 2 * eps, 1.0}, {vec({h, 0.0}), vec({0.0, h}), vec({0.0, 0.0})});
    case 2:
      return OrdinaryControl({0.0, eps, 1.0}, {vec({h, h}), vec({0.0, 0.0})});
    case 3:
      return OrdinaryControl({0.0, eps, 2 * eps, 1.0}, {vec({0.0, h}), vec({h, 0.0}), vec({0.0, 0.0})});
    default:
      throw Error(ErrorKind::InvalidArgument, "needle family index must be 1, 2 or 3");
  }
}

SpaceTimeCurve circle_fixture(bool reversed, std::size_t samples) {
  if (samples < 3) throw Error(ErrorKind::InvalidArgument, "circle needs at least 3 samples");
  std::vector<double> params;
  std::vector<Vec> points;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(samples);
    const double a = reversed ? 2.0 * std::numbers::pi - t : t;
    params.push_back(t);
    points.push_back(vec({0.0, std::cos(a), std::sin(a)}));
  }
  return SpaceTimeCurve(SampledCurve(std::move(params), std::move(points)));
}

}  // namespace impopt::builtin
