#include "impopt/controls.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace impopt {

namespace {

constexpr double kUnitSpeedTol = 1e-9;

Vec space_time_point(double t, const Vec& w) {
  Vec p(w.size() + 1);
  p[0] = t;
  p.tail(w.size()) = w;
  return p;
}

SampledCurve index_param_curve(std::vector<Vec> points) {
  std::vector<double> params(points.size());
  for (std::size_t i = 0; i < params.size(); ++i) params[i] = static_cast<double>(i);
  return SampledCurve(std::move(params), std::move(points));
}

}  // namespace

OrdinaryControl::OrdinaryControl(std::vector<double> times, std::vector<Vec> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() < 2 || values_.size() + 1 != times_.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "ordinary control needs one value per grid interval");
  }
  if (times_.front() != 0.0) throw Error(ErrorKind::InvalidArgument, "grid must start at 0");
  const auto k = values_.front().size();
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "control dimension must be positive");
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!(times_[j + 1] > times_[j])) {
      throw Error(ErrorKind::InvalidArgument, "grid must be strictly increasing");
    }
    if (values_[j].size() != k || !values_[j].allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "bad control value at interval " + std::to_string(j));
    }
  }
}

const Vec& OrdinaryControl::at(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - times_.begin() - 1));
  return values_[std::min(j, values_.size() - 1)];
}

std::vector<Vec> OrdinaryControl::primitive() const {
  std::vector<Vec> U{Vec::Zero(dim())};
  for (std::size_t j = 0; j < values_.size(); ++j) {
    U.push_back(U.back() + (times_[j + 1] - times_[j]) * values_[j]);
  }
  return U;
}

GeneralizedControl::GeneralizedControl(SpaceTimeCurve curve, double horizon)
    : curve_(std::move(curve)), horizon_(horizon) {
  if (!(horizon_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  const SampledCurve& base = curve_.base();
  if (!base.point(0).isZero(0.0)) {
    throw Error(ErrorKind::InvalidArgument, "generalized control must start at the origin");
  }
  for (std::size_t j = 0; j < segments(); ++j) {
    // Params are cumulative sums, so short late segments carry rounding of order
    // eps * s; the tolerance is relative with an absolute floor scaled by s.
    double ds = segment_length(j);
    double chord = (base.point(j + 1) - base.point(j)).norm();
    if (std::abs(chord - ds) > kUnitSpeedTol * ds + 1e-14 * base.param(j + 1)) {
      throw Error(ErrorKind::InvalidArgument,
                  "segment " + std::to_string(j) + " is not unit speed");
    }
  }
  if (curve_.final_time() < horizon_ - 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "control ends before reaching the horizon");
  }
}

GeneralizedControl GeneralizedControl::from_curve(const SampledCurve& curve, double horizon) {
  return GeneralizedControl(SpaceTimeCurve(canonical_reparam(curve)), horizon);
}

double GeneralizedControl::segment_length(std::size_t j) const {
  return curve_.base().param(j + 1) - curve_.base().param(j);
}

double GeneralizedControl::v(std::size_t j) const {
  return (curve_.time(j + 1) - curve_.time(j)) / segment_length(j);
}

Vec GeneralizedControl::w(std::size_t j) const {
  return (curve_.state(j + 1) - curve_.state(j)) / segment_length(j);
}

double GeneralizedControl::exit_param() const {
  return pseudo_inverse(curve_.time_map(), horizon_);
}

double GeneralizedControl::length_to_horizon() const {
  return arc_length(truncate_at_time(curve_, horizon_).base());
}

GeneralizedControl from_ordinary(const OrdinaryControl& u) {
  std::vector<Vec> U = u.primitive();
  std::vector<Vec> points;
  points.reserve(U.size());
  for (std::size_t j = 0; j < U.size(); ++j) points.push_back(space_time_point(u.times()[j], U[j]));
  return GeneralizedControl::from_curve(index_param_curve(std::move(points)), u.horizon());
}

GeneralizedControl sequential_impulse(std::span<const SequentialJump> jumps, double T, int k) {
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  std::vector<Vec> points{Vec::Zero(k + 1)};
  double t = 0.0;
  Vec W = Vec::Zero(k);
  for (const SequentialJump& jump : jumps) {
    if (jump.time < t || jump.time > T) {
      throw Error(ErrorKind::InvalidArgument, "jump times must be ordered within [0, T]");
    }
    if (jump.time > t) {
      t = jump.time;
      points.push_back(space_time_point(t, W));
    }
    for (const Vec& leg : jump.legs) {
      if (leg.size() != k) throw Error(ErrorKind::DimensionMismatch, "jump leg has wrong dimension");
      W += leg;
      points.push_back(space_time_point(t, W));
    }
  }
  if (T > t) points.push_back(space_time_point(T, W));
  return GeneralizedControl::from_curve(index_param_curve(std::move(points)), T);
}

GeneralizedControl impulse_control(std::span<const Jump> jumps, double T, int k) {
  std::vector<SequentialJump> chains;
  chains.reserve(jumps.size());
  for (const Jump& j : jumps) chains.push_back({j.time, {j.delta}});
  return sequential_impulse(chains, T, k);
}

OrdinaryControl regularize(const GeneralizedControl& gc, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  const double T = gc.horizon();
  const SpaceTimeCurve head = truncate_at_time(gc.curve(), T);
  const SampledCurve& base = head.base();
  const double floor = eps / T;

  double total = 0.0;
  for (std::size_t j = 0; j < base.segments(); ++j) {
    double ds = base.param(j + 1) - base.param(j);
    double dv = head.time(j + 1) - head.time(j);
    total += std::max(dv / ds, floor) * ds;
  }
  const double scale = T / total;

  std::vector<double> times{0.0};
  std::vector<Vec> values;
  for (std::size_t j = 0; j < base.segments(); ++j) {
    double ds = base.param(j + 1) - base.param(j);
    if (ds == 0.0) continue;
    double rate = scale * std::max((head.time(j + 1) - head.time(j)) / ds, floor);
    double dt = rate * ds;
    values.push_back((head.state(j + 1) - head.state(j)) / dt);
    times.push_back(times.back() + dt);
  }
  times.back() = T;
  return OrdinaryControl(std::move(times), std::move(values));
}

double control_distance(const GeneralizedControl& a, const GeneralizedControl& b, double h) {
  double T = std::min(a.horizon(), b.horizon());
  return strengthened_distance_at(a.curve(), b.curve(), T, h);
}

LimitReport limit_of_sequence(std::span<const GeneralizedControl> controls,
                              const LimitOptions& opts) {
  if (controls.empty()) throw Error(ErrorKind::InvalidArgument, "empty control sequence");
  LimitReport report;
  for (std::size_t i = 0; i + 1 < controls.size(); ++i) {
    report.successive.push_back(control_distance(controls[i], controls[i + 1], opts.refine_h));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < report.successive.size(); ++i) {
    if (report.successive[i] > report.successive[i - 1]) decreasing = false;
  }
  double last = report.successive.empty() ? 0.0 : report.successive.back();
  report.converged = decreasing && last < opts.tolerance;
  if (report.converged) report.limit = controls.back();
  return report;
}

}  // namespace impopt
