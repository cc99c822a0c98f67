#pragma once

// Oriented rectifiable curves represented as polylines.
//
// A SampledCurve is the piecewise-linear interpolant of (params[i], points[i]).
// Past the last sample a curve is treated as constant (its end point), which is
// how finite truncations stand in for curves of infinite length.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "impopt/error.hpp"

namespace impopt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class SampledCurve {
 public:
  SampledCurve() = default;
  SampledCurve(std::vector<double> params, std::vector<Vec> points);

  std::size_t size() const { return params_.size(); }
  std::size_t segments() const { return params_.size() - 1; }
  int dim() const { return dim_; }

  const std::vector<double>& params() const { return params_; }
  const std::vector<Vec>& points() const { return points_; }
  double param(std::size_t i) const { return params_[i]; }
  const Vec& point(std::size_t i) const { return points_[i]; }
  double front_param() const { return params_.front(); }
  double back_param() const { return params_.back(); }

  /// Point at parameter s; clamps to the end points outside [s_0, s_m].
  /// Returns the stored sample bit-exactly when s equals a sample parameter.
  Vec evaluate(double s) const;

  /// Index i of the segment [s_i, s_{i+1}] containing s (last one for s >= s_m).
  std::size_t segment_index(double s) const;

 private:
  std::vector<double> params_;
  std::vector<Vec> points_;
  int dim_ = 0;
};

/// Cumulative chord lengths l(s_j); front() == 0, back() == total length.
std::vector<double> cumulative_arc_length(const SampledCurve& c);
double arc_length(const SampledCurve& c);

/// Nondecreasing piecewise-linear map s -> alpha(s) given at knots.
class MonotoneMap {
 public:
  MonotoneMap(std::vector<double> knots, std::vector<double> values);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(double s) const;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// alpha#(t) = sup { s : alpha(s) <= t }. On a plateau alpha = t this is the
/// plateau's right end. Throws BeyondHorizon for t above max(alpha).
double pseudo_inverse(const MonotoneMap& alpha, double t);

/// Unit-speed representative g o l_g^#: params become cumulative chord lengths
/// starting at zero, repeated consecutive points are dropped.
SampledCurve canonical_reparam(const SampledCurve& c);

/// Subdivides every segment so no piece is longer than h.
SampledCurve refine(const SampledCurve& c, double h);

/// Discrete Frechet distance between the vertex sequences of a and b.
/// Callers refine both curves first to approximate the continuous distance.
double frechet_distance(const SampledCurve& a, const SampledCurve& b);

/// frechet_distance plus the absolute difference of total lengths.
double strengthened_distance(const SampledCurve& a, const SampledCurve& b);

/// A curve (theta, y) in space-time: theta(s_0) = 0, theta nondecreasing.
class SpaceTimeCurve {
 public:
  SpaceTimeCurve() = default;
  explicit SpaceTimeCurve(SampledCurve base);

  const SampledCurve& base() const { return base_; }
  int state_dim() const { return base_.dim() - 1; }
  std::size_t size() const { return base_.size(); }

  double time(std::size_t i) const { return base_.point(i)[0]; }
  Vec state(std::size_t i) const { return base_.point(i).tail(state_dim()); }
  double final_time() const { return time(size() - 1); }

  /// theta as a monotone map of the curve parameter.
  MonotoneMap time_map() const;

 private:
  SampledCurve base_;
};

/// The curve frozen after s* = theta#(T). A curve whose time never exceeds T is
/// returned unchanged.
SpaceTimeCurve truncate_at_time(const SpaceTimeCurve& c, double T);

/// d_T and d_T^+ on space-time curves: both curves truncated at T and refined to h.
double frechet_distance_at(const SpaceTimeCurve& a, const SpaceTimeCurve& b, double T, double h);
double strengthened_distance_at(const SpaceTimeCurve& a, const SpaceTimeCurve& b, double T,
                                double h);

/// Builds the arc traversed at frozen time between the left and right limits of a
/// jump. Returns interior points only; the end points are added by the caller.
using JumpPolicy = std::function<std::vector<Vec>(const Vec& left, const Vec& right)>;

/// Straight segment from left to right limit (no interior points).
JumpPolicy segment_jump();

/// Axis-aligned staircase: coordinate 0 moves first, then 1, and so on.
JumpPolicy staircase_jump();

/// Lifts a sampled function of bounded variation to a space-time curve.
///
/// times must be nondecreasing. A repeated time t_j == t_{j+1} marks a jump from
/// values[j] (left limit) to values[j+1]; the jump becomes a theta-plateau whose
/// state arc is produced by `policy`. Between distinct times the function is
/// interpolated linearly.
SpaceTimeCurve lift_bv(std::span<const double> times, std::span<const Vec> values,
                       const JumpPolicy& policy = segment_jump());

/// y(theta#(t)) for every query time; right-continuous at jumps.
std::vector<Vec> project_time(const SpaceTimeCurve& c, std::span<const double> query_times);

}  // namespace impopt
