#include "impopt/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace impopt {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::BeyondHorizon: return "beyond-horizon";
    case ErrorKind::DegenerateCurve: return "degenerate-curve";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::TimeIncomplete: return "time-incomplete";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

SampledCurve::SampledCurve(std::vector<double> params, std::vector<Vec> points)
    : params_(std::move(params)), points_(std::move(points)) {
  if (params_.size() != points_.size()) {
    throw Error(ErrorKind::InvalidArgument, "params and points differ in length");
  }
  if (params_.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "a curve needs at least two samples");
  }
  dim_ = static_cast<int>(points_.front().size());
  if (dim_ < 1) throw Error(ErrorKind::InvalidArgument, "curve dimension must be positive");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != dim_) {
      throw Error(ErrorKind::DimensionMismatch, "sample " + std::to_string(i) + " has wrong dimension");
    }
    if (!points_[i].allFinite() || !std::isfinite(params_[i])) {
      throw Error(ErrorKind::InvalidArgument, "non-finite sample " + std::to_string(i));
    }
    if (i > 0 && !(params_[i] > params_[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "params must be strictly increasing");
    }
  }
}

std::size_t SampledCurve::segment_index(double s) const {
  auto it = std::upper_bound(params_.begin(), params_.end(), s);
  if (it == params_.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - params_.begin()) - 1;
  return std::min(i, segments() - 1);
}

Vec SampledCurve::evaluate(double s) const {
  if (s <= params_.front()) return points_.front();
  if (s >= params_.back()) return points_.back();
  std::size_t i = segment_index(s);
  if (s == params_[i]) return points_[i];
  double lambda = (s - params_[i]) / (params_[i + 1] - params_[i]);
  return points_[i] + lambda * (points_[i + 1] - points_[i]);
}

std::vector<double> cumulative_arc_length(const SampledCurve& c) {
  std::vector<double> out(c.size(), 0.0);
  for (std::size_t i = 1; i < c.size(); ++i) {
    out[i] = out[i - 1] + (c.point(i) - c.point(i - 1)).norm();
  }
  return out;
}

double arc_length(const SampledCurve& c) { return cumulative_arc_length(c).back(); }

MonotoneMap::MonotoneMap(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() != values_.size() || knots_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "monotone map needs matching non-empty arrays");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "monotone map knots must increase");
    }
    if (values_[i] < values_[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, "monotone map values must not decrease");
    }
  }
}

double MonotoneMap::operator()(double s) const {
  if (s <= knots_.front()) return values_.front();
  if (s >= knots_.back()) return values_.back();
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (s == knots_[i]) return values_[i];
  double lambda = (s - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return values_[i] + lambda * (values_[i + 1] - values_[i]);
}

double pseudo_inverse(const MonotoneMap& alpha, double t) {
  const auto& v = alpha.values();
  const auto& k = alpha.knots();
  if (t > v.back()) {
    throw Error(ErrorKind::BeyondHorizon,
                "t = " + std::to_string(t) + " exceeds " + std::to_string(v.back()));
  }
  if (t < v.front()) {
    throw Error(ErrorKind::InvalidArgument, "t below the range of the map");
  }
  // Last knot whose value does not exceed t: plateaus resolve to their right end.
  auto it = std::upper_bound(v.begin(), v.end(), t);
  std::size_t i = static_cast<std::size_t>(it - v.begin()) - 1;
  if (i + 1 == v.size() || t == v[i]) return k[i];
  double lambda = (t - v[i]) / (v[i + 1] - v[i]);
  return k[i] + lambda * (k[i + 1] - k[i]);
}

SampledCurve canonical_reparam(const SampledCurve& c) {
  std::vector<double> params{0.0};
  std::vector<Vec> points{c.point(0)};
  double length = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    double chord = (c.point(i) - points.back()).norm();
    // Chords below the rounding of the accumulated length would repeat a param.
    if (length + chord == length) continue;
    length += chord;
    params.push_back(length);
    points.push_back(c.point(i));
  }
  if (points.size() < 2) {
    throw Error(ErrorKind::DegenerateCurve, "curve has zero length");
  }
  return SampledCurve(std::move(params), std::move(points));
}

SampledCurve refine(const SampledCurve& c, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "refinement step must be positive");
  std::vector<double> params{c.param(0)};
  std::vector<Vec> points{c.point(0)};
  for (std::size_t i = 0; i < c.segments(); ++i) {
    const Vec& a = c.point(i);
    const Vec& b = c.point(i + 1);
    double len = (b - a).norm();
    auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / h)));
    for (std::size_t j = 1; j < pieces; ++j) {
      double lambda = static_cast<double>(j) / static_cast<double>(pieces);
      params.push_back(c.param(i) + lambda * (c.param(i + 1) - c.param(i)));
      points.push_back(a + lambda * (b - a));
    }
    params.push_back(c.param(i + 1));
    points.push_back(b);
  }
  return SampledCurve(std::move(params), std::move(points));
}

double frechet_distance(const SampledCurve& a, const SampledCurve& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "curves of dimension " + std::to_string(a.dim()) +
                                                  " and " + std::to_string(b.dim()));
  }
  const std::size_t m = b.size();
  // Rolling rows of the coupling table: prev = row i-1, row = row i.
  std::vector<double> prev(m), row(m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec& p = a.point(i);
    for (std::size_t j = 0; j < m; ++j) {
      double d = (p - b.point(j)).norm();
      double best;
      if (i == 0 && j == 0) {
        best = d;
      } else if (i == 0) {
        best = std::max(row[j - 1], d);
      } else if (j == 0) {
        best = std::max(prev[0], d);
      } else {
        best = std::max(std::min({prev[j], prev[j - 1], row[j - 1]}), d);
      }
      row[j] = best;
    }
    std::swap(prev, row);
  }
  return prev[m - 1];
}

double strengthened_distance(const SampledCurve& a, const SampledCurve& b) {
  return frechet_distance(a, b) + std::abs(arc_length(a) - arc_length(b));
}

SpaceTimeCurve::SpaceTimeCurve(SampledCurve base) : base_(std::move(base)) {
  if (base_.dim() < 2) {
    throw Error(ErrorKind::InvalidArgument, "space-time curve needs time plus at least one state");
  }
  if (base_.point(0)[0] != 0.0) {
    throw Error(ErrorKind::InvalidArgument, "time coordinate must start at 0");
  }
  for (std::size_t i = 1; i < base_.size(); ++i) {
    if (base_.point(i)[0] < base_.point(i - 1)[0]) {
      throw Error(ErrorKind::InvalidArgument, "time coordinate decreases at sample " + std::to_string(i));
    }
  }
}

MonotoneMap SpaceTimeCurve::time_map() const {
  std::vector<double> theta(size());
  for (std::size_t i = 0; i < size(); ++i) theta[i] = time(i);
  return MonotoneMap(base_.params(), std::move(theta));
}

SpaceTimeCurve truncate_at_time(const SpaceTimeCurve& c, double T) {
  if (T >= c.final_time()) return c;
  const SampledCurve& base = c.base();
  double s_star = pseudo_inverse(c.time_map(), T);
  std::vector<double> params;
  std::vector<Vec> points;
  for (std::size_t i = 0; i < base.size() && base.param(i) < s_star; ++i) {
    params.push_back(base.param(i));
    points.push_back(base.point(i));
  }
  Vec last = base.evaluate(s_star);
  last[0] = T;
  params.push_back(s_star);
  points.push_back(std::move(last));
  if (params.size() < 2) {
    // T = 0 with no initial plateau: a single point, kept as a zero-length segment.
    params.push_back(s_star + 1.0);
    points.push_back(points.back());
  }
  return SpaceTimeCurve(SampledCurve(std::move(params), std::move(points)));
}

double frechet_distance_at(const SpaceTimeCurve& a, const SpaceTimeCurve& b, double T, double h) {
  return frechet_distance(refine(truncate_at_time(a, T).base(), h),
                          refine(truncate_at_time(b, T).base(), h));
}

double strengthened_distance_at(const SpaceTimeCurve& a, const SpaceTimeCurve& b, double T,
                                double h) {
  return strengthened_distance(refine(truncate_at_time(a, T).base(), h),
                               refine(truncate_at_time(b, T).base(), h));
}

JumpPolicy segment_jump() {
  return [](const Vec&, const Vec&) { return std::vector<Vec>{}; };
}

JumpPolicy staircase_jump() {
  return [](const Vec& left, const Vec& right) {
    std::vector<Vec> out;
    Vec p = left;
    for (Eigen::Index d = 0; d + 1 < left.size(); ++d) {
      if (p[d] == right[d]) continue;
      p[d] = right[d];
      out.push_back(p);
    }
    return out;
  };
}

SpaceTimeCurve lift_bv(std::span<const double> times, std::span<const Vec> values,
                       const JumpPolicy& policy) {
  if (times.size() != values.size() || times.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "lift needs at least two matching samples");
  }
  if (times.front() != 0.0) {
    throw Error(ErrorKind::InvalidArgument, "sampled function must start at t = 0");
  }
  const Eigen::Index n = values.front().size();
  auto space_time = [n](double t, const Vec& x) {
    Vec p(n + 1);
    p[0] = t;
    p.tail(n) = x;
    return p;
  };
  std::vector<Vec> points{space_time(times[0], values[0])};
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (values[j].size() != n) {
      throw Error(ErrorKind::DimensionMismatch, "value " + std::to_string(j) + " has wrong dimension");
    }
    if (times[j] < times[j - 1]) {
      throw Error(ErrorKind::InvalidArgument, "times must be nondecreasing");
    }
    if (times[j] == times[j - 1]) {
      for (const Vec& x : policy(values[j - 1], values[j])) {
        points.push_back(space_time(times[j], x));
      }
    }
    points.push_back(space_time(times[j], values[j]));
  }
  std::vector<double> index(points.size());
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<double>(i);
  return SpaceTimeCurve(canonical_reparam(SampledCurve(std::move(index), std::move(points))));
}

std::vector<Vec> project_time(const SpaceTimeCurve& c, std::span<const double> query_times) {
  MonotoneMap theta = c.time_map();
  std::vector<Vec> out;
  out.reserve(query_times.size());
  for (double t : query_times) {
    double s = pseudo_inverse(theta, t);
    out.push_back(c.base().evaluate(s).tail(c.state_dim()));
  }
  return out;
}

}  // namespace impopt
