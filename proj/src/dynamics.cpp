#include "impopt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace impopt {

namespace {

void guard(const Vec& y, double bound, double s) {
  if (!y.allFinite() || y.norm() > bound) {
    throw Error(ErrorKind::BlowUp, "state norm exceeded " + std::to_string(bound) +
                                       " at parameter " + std::to_string(s));
  }
}

Vec space_time(double V, const Vec& y) {
  Vec p(y.size() + 1);
  p[0] = V;
  p.tail(y.size()) = y;
  return p;
}

// Appends `steps` RK4 substeps of a piece with constant (v, w) to the sample lists.
void integrate_piece(const ControlAffineSystem& sys, double v, const Vec& w, double s0, double s1,
                     double V0, double V1, int steps, double bound, Vec& y,
                     std::vector<double>& params, std::vector<Vec>& points) {
  const double h = (s1 - s0) / steps;
  auto rate = [&](const Vec& z) { return sys.velocity(z, v, w); };
  for (int i = 1; i <= steps; ++i) {
    y = rk4_step(rate, y, h);
    double s = i == steps ? s1 : s0 + i * h;
    guard(y, bound, s);
    double V = i == steps ? V1 : V0 + v * (i * h);
    params.push_back(s);
    points.push_back(space_time(V, y));
  }
}

}  // namespace

Vec ControlAffineSystem::velocity(const Vec& y, double v, const Vec& w) const {
  if (raw) {
    Vec out(n);
    raw(y.data(), v, w.data(), out.data());
    return out;
  }
  return f(y) * v + G(y) * w;
}

RawVelocity ControlAffineSystem::raw_velocity() const {
  if (raw) return raw;
  return [this](const double* y, double v, const double* w, double* out) {
    const Eigen::Map<const Vec> ym(y, n);
    const Eigen::Map<const Vec> wm(w, k);
    Eigen::Map<Vec>(out, n) = f(ym) * v + G(ym) * wm;
  };
}

void ControlAffineSystem::check_dimensions(const Vec& probe) const {
  if (n < 1 || k < 1) throw Error(ErrorKind::InvalidArgument, "system dimensions must be positive");
  if (probe.size() != n) throw Error(ErrorKind::DimensionMismatch, "initial state dimension");
  Vec fx = f(probe);
  Mat Gx = G(probe);
  if (fx.size() != n || Gx.rows() != n || Gx.cols() != k) {
    throw Error(ErrorKind::DimensionMismatch, "f or G returned wrong shape");
  }
}

GeneralizedTrajectory integrate_auxiliary(const ControlAffineSystem& sys,
                                          const GeneralizedControl& gc, const Vec& x0,
                                          const IntegrationOptions& opts) {
  sys.check_dimensions(x0);
  if (gc.dim() != sys.k) throw Error(ErrorKind::DimensionMismatch, "control dimension");
  if (opts.steps_per_segment < 1) {
    throw Error(ErrorKind::InvalidArgument, "steps_per_segment must be at least 1");
  }
  const SpaceTimeCurve head = truncate_at_time(gc.curve(), gc.horizon());
  const SampledCurve& base = head.base();

  Vec y = x0;
  std::vector<double> params{base.param(0)};
  std::vector<Vec> points{space_time(0.0, y)};
  for (std::size_t j = 0; j < base.segments(); ++j) {
    const double s0 = base.param(j), s1 = base.param(j + 1);
    const double ds = s1 - s0;
    const double v = (head.time(j + 1) - head.time(j)) / ds;
    const Vec w = (head.state(j + 1) - head.state(j)) / ds;
    integrate_piece(sys, v, w, s0, s1, head.time(j), head.time(j + 1), opts.steps_per_segment,
                    opts.blowup_bound, y, params, points);
  }
  return {SpaceTimeCurve(SampledCurve(std::move(params), std::move(points))), gc.horizon()};
}

Vec endpoint(const GeneralizedTrajectory& traj) {
  const SpaceTimeCurve& c = traj.curve;
  if (c.final_time() < traj.horizon - 1e-9) {
    throw Error(ErrorKind::TimeIncomplete, "trajectory stops at V = " +
                                               std::to_string(c.final_time()) + " before T = " +
                                               std::to_string(traj.horizon));
  }
  return c.state(c.size() - 1);
}

OrdinaryPath ordinary_trajectory(const ControlAffineSystem& sys, const OrdinaryControl& u,
                                 const Vec& x0, const IntegrationOptions& opts) {
  sys.check_dimensions(x0);
  if (u.dim() != sys.k) throw Error(ErrorKind::DimensionMismatch, "control dimension");
  OrdinaryPath path{{0.0}, {x0}};
  Vec x = x0;
  for (std::size_t j = 0; j < u.intervals(); ++j) {
    const double t0 = u.times()[j], t1 = u.times()[j + 1];
    const double h = (t1 - t0) / opts.steps_per_segment;
    const Vec& uj = u.values()[j];
    auto rate = [&](const Vec& z) { return sys.ordinary_velocity(z, uj); };
    for (int i = 1; i <= opts.steps_per_segment; ++i) {
      x = rk4_step(rate, x, h);
      double t = i == opts.steps_per_segment ? t1 : t0 + i * h;
      guard(x, opts.blowup_bound, t);
      path.times.push_back(t);
      path.states.push_back(x);
    }
  }
  return path;
}

ReparamReport reparam_check(const ControlAffineSystem& sys, const GeneralizedControl& gc,
                            const Vec& x0, const MonotoneMap& sigma,
                            const IntegrationOptions& opts, double refine_h) {
  GeneralizedTrajectory canonical = integrate_auxiliary(sys, gc, x0, opts);

  const SpaceTimeCurve head = truncate_at_time(gc.curve(), gc.horizon());
  const SampledCurve& base = head.base();
  const auto& r_knots = sigma.knots();
  if (sigma.values().front() != base.front_param() ||
      std::abs(sigma.values().back() - base.back_param()) > 1e-12 * (1.0 + base.back_param())) {
    throw Error(ErrorKind::InvalidArgument, "sigma must map onto [0, V#(T)]");
  }

  // Pieces on which both sigma and the control derivative are constant.
  std::vector<double> cuts(r_knots.begin(), r_knots.end());
  for (std::size_t j = 1; j + 1 < base.size(); ++j) {
    cuts.push_back(pseudo_inverse(sigma, base.param(j)));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Vec y = x0;
  std::vector<double> params{cuts.front()};
  std::vector<Vec> points{space_time(0.0, y)};
  double V = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double r0 = cuts[i], r1 = cuts[i + 1];
    const double s0 = sigma(r0), s1 = sigma(r1);
    const double slope = (s1 - s0) / (r1 - r0);
    const std::size_t j = base.segment_index(0.5 * (s0 + s1));
    const double ds = base.param(j + 1) - base.param(j);
    const double v = slope * (head.time(j + 1) - head.time(j)) / ds;
    const Vec w = slope * (head.state(j + 1) - head.state(j)) / ds;
    const double V1 = V + v * (r1 - r0);
    integrate_piece(sys, v, w, r0, r1, V, V1, opts.steps_per_segment, opts.blowup_bound, y, params,
                    points);
    V = V1;
  }
  SpaceTimeCurve reparam(SampledCurve(std::move(params), std::move(points)));

  ReparamReport report;
  report.endpoint = reparam.state(reparam.size() - 1);
  report.endpoint_discrepancy = (report.endpoint - endpoint(canonical)).norm();
  report.distance = strengthened_distance(refine(canonical_reparam(reparam.base()), refine_h),
                                          refine(canonical.curve.base(), refine_h));
  return report;
}

}  // namespace impopt
