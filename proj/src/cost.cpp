#include "impopt/cost.hpp"

#include <array>
#include <cmath>
#include <random>

namespace impopt {

namespace {

constexpr double kDivergenceCutoff = 1e12;

}  // namespace

ExtendedReal numerical_recession(const LagrangianSpec& spec, const Vec& y, const Vec& w) {
  constexpr std::array<double, 5> etas{1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
  std::array<double, etas.size()> terms{};
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const Vec u = w / etas[i];
    terms[i] = spec.L(y, u) * etas[i];
    if (!(terms[i] <= kDivergenceCutoff)) return ExtendedReal::infinity();
  }
  const std::size_t last = etas.size() - 1;
  bool growing = true;
  for (std::size_t i = last - 2; i < last; ++i) {
    if (!(terms[i] > 0.0 && terms[i + 1] >= 10.0 * terms[i])) growing = false;
  }
  if (growing) return ExtendedReal::infinity();
  return ExtendedReal(terms[last]);
}

ExtendedReal lambda_eval(const LagrangianSpec& spec, const Vec& y, double v, const Vec& w) {
  if (v < 0.0) throw Error(ErrorKind::InvalidArgument, "lambda needs v >= 0");
  if (spec.auxiliary) {
    double value = spec.auxiliary(y.data(), v, w.data());
    return std::isfinite(value) ? ExtendedReal(value) : ExtendedReal::infinity();
  }
  return lambda_from_lagrangian(spec, y, v, w);
}

ExtendedReal lambda_from_lagrangian(const LagrangianSpec& spec, const Vec& y, double v,
                                    const Vec& w) {
  if (v < 0.0) throw Error(ErrorKind::InvalidArgument, "lambda needs v >= 0");
  if (v > 0.0) {
    const Vec u = w / v;
    double value = spec.L(y, u) * v;
    if (std::isfinite(value)) return ExtendedReal(value);
    // w / v overflowed for denormal v: fall through to the recession value.
  }
  if (spec.recession) {
    double value = spec.recession(y, w);
    return std::isfinite(value) ? ExtendedReal(value) : ExtendedReal::infinity();
  }
  return numerical_recession(spec, y, w);
}

ExtendedReal extended_cost(const LagrangianSpec& spec, const ControlAffineSystem& sys,
                           const GeneralizedControl& gc, const Vec& x0, const CostOptions& opts) {
  sys.check_dimensions(x0);
  const int steps = opts.integration.steps_per_segment;
  const SpaceTimeCurve head = truncate_at_time(gc.curve(), gc.horizon());
  const SampledCurve& base = head.base();

  Vec y = x0;
  double total = 0.0;
  for (std::size_t j = 0; j < base.segments(); ++j) {
    const double ds = base.param(j + 1) - base.param(j);
    const double v = (head.time(j + 1) - head.time(j)) / ds;
    const Vec w = (head.state(j + 1) - head.state(j)) / ds;
    const double h = ds / steps;
    auto rate = [&](const Vec& z) { return sys.velocity(z, v, w); };
    for (int i = 0; i < steps; ++i) {
      const Vec mid = rk4_step(rate, y, 0.5 * h);
      const ExtendedReal lam = lambda_eval(spec, mid, v, w);
      if (lam.is_infinite()) return ExtendedReal::infinity();
      total += lam.value() * h;
      y = rk4_step(rate, y, h);
      if (!y.allFinite() || y.norm() > opts.integration.blowup_bound) {
        throw Error(ErrorKind::BlowUp, "state left the bound while evaluating the cost");
      }
    }
  }
  return ExtendedReal(total);
}

ConvexityReport convexity_check(const LagrangianSpec& spec, const Vec& y, int k,
                                std::size_t sample_count, std::uint64_t seed, double w_range,
                                double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> wdist(-w_range, w_range);
  auto draw_w = [&] {
    Vec w(k);
    for (int i = 0; i < k; ++i) w[i] = wdist(rng);
    return w;
  };

  ConvexityReport report;
  report.samples = sample_count;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const double v1 = 1.0 - unit(rng);  // (0, 1]
    const double v2 = 1.0 - unit(rng);
    const Vec w1 = draw_w();
    const Vec w2 = draw_w();
    double t = unit(rng);
    if (t == 0.0) t = 0.5;
    const double l1 = lambda_eval(spec, y, v1, w1).value();
    const double l2 = lambda_eval(spec, y, v2, w2).value();
    const double lm =
        lambda_eval(spec, y, t * v1 + (1 - t) * v2, Vec(t * w1 + (1 - t) * w2)).value();
    const double excess = lm - (t * l1 + (1 - t) * l2);
    if (excess > tol) report.violations.push_back({v1, v2, t, w1, w2, excess});
  }
  return report;
}

GrowthReport growth_check(const LagrangianSpec& spec, int n, int k, std::size_t sample_count,
                          std::uint64_t seed, double range) {
  if (!spec.growth) throw Error(ErrorKind::InvalidArgument, "lagrangian has no growth constants");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-range, range);
  GrowthReport report;
  report.samples = sample_count;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample_count; ++i) {
    Vec x(n), u(k);
    for (int d = 0; d < n; ++d) x[d] = dist(rng);
    for (int d = 0; d < k; ++d) u[d] = dist(rng);
    double margin = spec.L(x, u) - (spec.growth->a + spec.growth->b * u.norm());
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -1e-12) ++report.violations;
  }
  return report;
}

LscReport lsc_probe(const LagrangianSpec& spec, const ControlAffineSystem& sys,
                    const GeneralizedControl& gc, const Vec& x0, const std::vector<double>& eps_list,
                    double tol, const CostOptions& opts) {
  LscReport report;
  report.eps = eps_list;
  report.reference = extended_cost(spec, sys, gc, x0, opts);
  report.liminf = std::numeric_limits<double>::infinity();
  for (double eps : eps_list) {
    ExtendedReal c = extended_cost(spec, sys, from_ordinary(regularize(gc, eps)), x0, opts);
    report.costs.push_back(c);
    report.liminf = std::min(report.liminf, c.value());
  }
  report.holds = report.reference.is_infinite()
                     ? report.liminf == std::numeric_limits<double>::infinity()
                     : report.liminf >= report.reference.value() - tol;
  return report;
}

}  // namespace impopt
