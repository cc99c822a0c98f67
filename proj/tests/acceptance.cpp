// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "impopt/problems.hpp"
#include "support/oracles.hpp"

using namespace impopt;
using namespace impopt::builtin;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s (%.1fs):%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), seconds_since(t0),
              o.detail.str().c_str());
  std::fflush(stdout);
}

Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

}  // namespace

int main() {
  criterion(1, "strengthened distances between the three impulse orderings", [](Outcome& o) {
    const auto cs = noninvolutive_controls();
    const double d_lo = 2.0 - 1.0 / std::sqrt(2.0);
    const std::vector<std::tuple<int, int, double>> pairs{{0, 1, d_lo}, {1, 2, d_lo}, {0, 2, 1.0}};
    for (const auto& [a, b, want] : pairs) {
      const auto t0 = Clock::now();
      const double d = control_distance(cs[a], cs[b], 0.01);
      const double dt = seconds_since(t0);
      o.detail << " d(" << a + 1 << "," << b + 1 << ")=" << d;
      o.require(std::abs(d - want) <= 0.02, "value");
      o.require(dt < 1.0, "runtime");
    }
  });

  criterion(2, "opposite circles are 2 apart while their point sets coincide", [](Outcome& o) {
    const SampledCurve a = refine(circle_fixture(false).base(), 0.01);
    const SampledCurve b = refine(circle_fixture(true).base(), 0.01);
    const double d = strengthened_distance(a, b);
    // Discrete Hausdorff distance between the two vertex sets.
    double haus = 0.0;
    for (const auto* pair : {&a, &b}) {
      const SampledCurve& p = *pair;
      const SampledCurve& q = pair == &a ? b : a;
      for (const Vec& x : p.points()) {
        double best = INFINITY;
        for (const Vec& y : q.points()) best = std::min(best, (x - y).norm());
        haus = std::max(haus, best);
      }
    }
    o.detail << " d+=" << d << " hausdorff=" << haus;
    o.require(std::abs(d - 2.0) <= 0.02, "d+");
    o.require(haus <= 0.01, "point sets");
  });

  criterion(3, "jump order changes the endpoint of the non-involutive system", [](Outcome& o) {
    const auto cs = noninvolutive_controls();
    const std::vector<Vec> want{v3(1, 1, 0), v3(1, 1, 0.5), v3(1, 1, 1)};
    IntegrationOptions opts;
    opts.steps_per_segment = 64;
    std::vector<Vec> ends;
    for (std::size_t i = 0; i < 3; ++i) {
      ends.push_back(endpoint(integrate_auxiliary(noninvolutive_system(), cs[i], Vec::Zero(3), opts)));
      const double err = (ends[i] - want[i]).norm();
      o.detail << " err" << i + 1 << "=" << err;
      o.require(err < 1e-5, "endpoint " + std::to_string(i + 1));
    }
    double min_sep = INFINITY;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) min_sep = std::min(min_sep, (ends[i] - ends[j]).norm());
    o.detail << " min separation=" << min_sep;
    o.require(min_sep >= 0.4, "distinct endpoints");
  });

  criterion(4, "fuel transfer: relaxed optimum and needle sequence", [](Outcome& o) {
    const RelaxedProblem p = fuel_problem();
    const RelaxedSolution sol = solve_relaxed(p);
    o.detail << " cost=" << sol.cost << " residual=" << sol.endpoint_residual;
    o.require(std::abs(sol.cost - 1.0) <= 0.05, "cost");
    o.require(sol.endpoint_residual < 1e-2, "residual");
    o.require(!sol.impulse_arcs.empty() && sol.impulse_arcs.front().first == 0, "initial impulse arc");
    double prev = INFINITY;
    o.detail << " J(u_i)=";
    for (int i : {4, 8, 16, 32}) {
      const double J = extended_cost(p.spec, p.sys, from_ordinary(fuel_needle(i)), p.x0).value();
      o.detail << J << (i < 32 ? "," : "");
      o.require(J < prev && J > 1.0, "needle costs decrease toward 1");
      prev = J;
    }
    o.require(prev - 1.0 < 0.02, "last needle near 1");
  });

  criterion(5, "Lavrentiev gap for the first gap example", [](Outcome& o) {
    const auto t0 = Clock::now();
    const GapReport r = gap_probe(gap1_problem(), {0.1, 0.05, 0.02}, {1e-2});
    const double dt = seconds_since(t0);
    o.detail << " generalized=" << r.generalized_cost << " restricted=";
    for (std::size_t i = 0; i < r.eta_values.size(); ++i) {
      const auto c = r.restricted_cost(i);
      o.detail << (c ? std::to_string(*c) : std::string("infeasible")) << (i + 1 < r.eta_values.size() ? "," : "");
      o.require(c && *c >= 0.0275 - 0.005, "restricted cost at eta=" + std::to_string(r.eta_values[i]));
    }
    o.require(r.generalized_cost <= 0.005, "generalized cost");
    o.require(r.gap_detected, "gap flagged");
    o.require(dt < 60.0, "runtime");
  });

  criterion(6, "no gap for homogeneous, alpha = 2 and drift-free problems", [](Outcome& o) {
    const std::vector<double> etas{0.1, 0.05, 0.02, 0.01};
    const std::vector<std::pair<std::string, RelaxedProblem>> cases{
        {"fuel", fuel_problem()}, {"gap2", gap2_problem(2.0)}, {"fuel-driftfree", drift_free(fuel_problem())}};
    for (const auto& [name, p] : cases) {
      const GapReport r = gap_probe(p, etas, {1e-2});
      const double g = r.gap_estimate ? *r.gap_estimate : INFINITY;
      o.detail << " " << name << "=" << g;
      o.require(g < 0.01, name);
    }
  });

  criterion(7, "Heisenberg: decreasing profile with terminal jump, continuous with constant drift", [](Outcome& o) {
    const auto t0 = Clock::now();
    SolverOptions opts = recommended_options("heisenberg");
    opts.random_starts = 8;
    const RelaxedSolution lin = solve_relaxed(heisenberg_problem(HeisenbergDrift::Linear, 30.0), opts);
    const ProfileReport pl = analyze_profile(lin);
    o.detail << " linear: cost=" << lin.cost << " max increase=" << pl.max_increase
             << " terminal impulse=" << (pl.terminal_impulse ? "yes" : "no");
    o.require(pl.nonincreasing, "nonincreasing profile");
    o.require(pl.terminal_impulse, "terminal impulse arc");

    const RelaxedSolution cst = solve_relaxed(heisenberg_problem(HeisenbergDrift::Constant, 2.0, 1.0), opts);
    const ProfileReport pc = analyze_profile(cst);
    double min_v = INFINITY;
    for (double v : cst.v) min_v = std::min(min_v, v);
    // Raw v scales with the speed |(v, w)|, which the dilation invariance leaves free,
    // so the bound is checked on the normalized profile of the active cells.
    o.detail << "; constant: cost=" << cst.cost << " min v=" << min_v << " min vhat=" << pc.min_vhat;
    o.require(pc.active_cells > 0 && pc.min_vhat > 0.05, "min vhat");
    o.require(cst.impulse_arcs.empty(), "no impulse arc");
    o.require(seconds_since(t0) < 300.0, "runtime");
  });

  criterion(8, "property suites", [](Outcome& o) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.0, 1.0), kap(0.1, 10.0);

    // Dilation homogeneity and convexity of lambda.
    std::size_t homog_bad = 0, convex_bad = 0;
    const std::vector<LagrangianSpec> specs{fuel_lagrangian(2), norm_plus_one_lagrangian(2)};
    for (const auto& spec : specs) {
      for (int i = 0; i < 10000; ++i) {
        const Vec y = (Vec(3) << u(rng), u(rng), u(rng)).finished();
        const Vec w = (Vec(2) << u(rng), u(rng)).finished();
        const double v = pos(rng), k = kap(rng);
        const double a = lambda_eval(spec, y, k * v, k * w).value();
        const double b = k * lambda_eval(spec, y, v, w).value();
        if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(b))) ++homog_bad;
      }
      convex_bad += convexity_check(spec, Vec::Zero(3), 2, 10000, 8).violations.size();
    }
    o.detail << " homogeneity violations=" << homog_bad << " convexity violations=" << convex_bad;
    o.require(homog_bad == 0 && convex_bad == 0, "lambda properties");

    // Ordinary versus auxiliary trajectories on random problems.
    double worst_traj = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      Mat A(3, 3), B(3, 2);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A(i, j) = u(rng) / 2.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) B(i, j) = u(rng) / 2.0;
      // Alternate between a random linear system and the non-involutive one.
      ControlAffineSystem sys = trial % 2 ? noninvolutive_system() : ControlAffineSystem{};
      if (trial % 2 == 0) {
        sys.name = "linear";
        sys.n = 3;
        sys.k = 2;
        sys.f = [A](const Vec& x) { return Vec(A * x); };
        sys.G = [B](const Vec&) { return B; };
      }
      const OrdinaryControl c = oracle::random_control(rng, 2, 5, 1.0);
      const Vec x0 = (Vec(3) << u(rng), u(rng), u(rng)).finished();
      const Vec a = ordinary_trajectory(sys, c, x0).states.back();
      const Vec b = endpoint(integrate_auxiliary(sys, from_ordinary(c), x0));
      worst_traj = std::max(worst_traj, (a - b).norm());
    }
    o.detail << " trajectory mismatch=" << worst_traj;
    o.require(worst_traj < 1e-6, "ordinary vs auxiliary");

    // Reparameterization invariance of the endpoint.
    double worst_reparam = 0.0;
    const GeneralizedControl gc = noninvolutive_controls()[1];
    for (int trial = 0; trial < 20; ++trial) {
      const auto rep = reparam_check(noninvolutive_system(), gc, Vec::Zero(3),
                                     oracle::random_reparam(rng, gc.exit_param()));
      worst_reparam = std::max(worst_reparam, rep.endpoint_discrepancy);
    }
    o.detail << " reparam drift=" << worst_reparam;
    o.require(worst_reparam < 1e-4, "reparameterization invariance");

    // Canonical selector: unit speed and idempotence.
    double worst_canon = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> params{0.0};
      std::vector<Vec> pts;
      for (int i = 0; i < 12; ++i) {
        if (i) params.push_back(params.back() + 0.1 + pos(rng));
        pts.push_back((Vec(3) << u(rng), u(rng), u(rng)).finished());
      }
      const SampledCurve c = canonical_reparam(SampledCurve(params, pts));
      const SampledCurve cc = canonical_reparam(c);
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        worst_canon = std::max(worst_canon, std::abs((c.point(i + 1) - c.point(i)).norm() - (c.param(i + 1) - c.param(i))));
      }
      for (std::size_t i = 0; i < c.size(); ++i) {
        worst_canon = std::max({worst_canon, std::abs(cc.param(i) - c.param(i)), (cc.point(i) - c.point(i)).norm()});
      }
    }
    o.detail << " canonical error=" << worst_canon;
    o.require(worst_canon <= 1e-12, "canonical selector");

    // Lift then project returns the samples at continuity points.
    std::size_t lift_bad = 0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> t{0.0};
      std::vector<Vec> x{(Vec(2) << u(rng), u(rng)).finished()};
      std::vector<double> continuity{0.0};
      for (int j = 1; j < 10; ++j) {
        const bool jump = pos(rng) < 0.3;
        if (jump) {
          t.push_back(t.back());
          x.push_back((Vec(2) << u(rng), u(rng)).finished());
        }
        t.push_back(t.back() + 0.1 + pos(rng));
        x.push_back((Vec(2) << u(rng), u(rng)).finished());
        if (!jump) continuity.push_back(t[t.size() - 2]);
      }
      const SpaceTimeCurve lifted = lift_bv(t, x);
      const auto back = project_time(lifted, t);
      for (std::size_t j = 0; j < t.size(); ++j) {
        const bool at_jump = (j + 1 < t.size() && t[j + 1] == t[j]) || (j > 0 && t[j - 1] == t[j]);
        if (!at_jump && back[j] != x[j]) ++lift_bad;
      }
    }
    o.detail << " lift mismatches=" << lift_bad;
    o.require(lift_bad == 0, "lift/project round trip");
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
