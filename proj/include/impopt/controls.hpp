#pragma once

// Generalized controls: canonical space-time curves (V, W) with V(0) = W(0) = 0.
// Ordinary controls embed as graphs of their primitives, impulses as legs
// traversed at frozen V.

#include <optional>
#include <span>
#include <vector>

#include "impopt/curves.hpp"

namespace impopt {

/// Piecewise-constant control: values[j] holds on [times[j], times[j+1]).
class OrdinaryControl {
 public:
  OrdinaryControl(std::vector<double> times, std::vector<Vec> values);

  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec>& values() const { return values_; }
  double horizon() const { return times_.back(); }
  int dim() const { return static_cast<int>(values_.front().size()); }
  std::size_t intervals() const { return values_.size(); }

  /// u(t), right-continuous; the last value holds at t = T.
  const Vec& at(double t) const;

  /// Primitive U(t_j) at every grid time.
  std::vector<Vec> primitive() const;

 private:
  std::vector<double> times_;
  std::vector<Vec> values_;
};

/// A canonical curve (V, W) in R^{1+k} and its horizon T.
class GeneralizedControl {
 public:
  /// Validates V(0) = W(0) = 0, V nondecreasing, unit speed per segment and
  /// V reaching T. Throws InvalidArgument otherwise.
  GeneralizedControl(SpaceTimeCurve curve, double horizon);

  /// Canonicalizes `curve` first.
  static GeneralizedControl from_curve(const SampledCurve& curve, double horizon);

  const SpaceTimeCurve& curve() const { return curve_; }
  double horizon() const { return horizon_; }
  int dim() const { return curve_.state_dim(); }
  std::size_t segments() const { return curve_.base().segments(); }

  /// (v_j, w_j) = derivative on segment j; v_j^2 + |w_j|^2 = 1.
  double v(std::size_t j) const;
  Vec w(std::size_t j) const;
  double segment_length(std::size_t j) const;

  /// V#(T): parameter at which the control leaves the hyperplane V = T.
  double exit_param() const;

  /// Arc length of the part with s <= V#(T).
  double length_to_horizon() const;

 private:
  SpaceTimeCurve curve_;
  double horizon_;
};

GeneralizedControl from_ordinary(const OrdinaryControl& u);

struct Jump {
  double time;
  Vec delta;
};

/// A jump resolved into straight legs traversed in the given order at frozen V.
struct SequentialJump {
  double time;
  std::vector<Vec> legs;
};

/// Horizontal legs between jumps, one straight vertical leg per jump.
GeneralizedControl impulse_control(std::span<const Jump> jumps, double T, int k);

/// Like impulse_control, but each jump is a user-ordered chain of legs.
GeneralizedControl sequential_impulse(std::span<const SequentialJump> jumps, double T, int k);

/// Ordinary approximation: V' is replaced by max(V', eps/T) and rescaled so the
/// horizon stays T; returns u = d(W o V_eps^{-1})/dt on the induced grid.
OrdinaryControl regularize(const GeneralizedControl& gc, double eps);

/// d_T^+ between two generalized controls with refinement h.
double control_distance(const GeneralizedControl& a, const GeneralizedControl& b, double h = 0.01);

struct LimitOptions {
  double tolerance = 0.05;  ///< last successive distance must fall below this
  double refine_h = 0.01;
};

struct LimitReport {
  std::vector<double> successive;  ///< d_T^+(c_i, c_{i+1})
  bool converged = false;
  std::optional<GeneralizedControl> limit;
};

/// Numerical Cauchy check on a sequence of controls sharing a horizon.
/// Converged when successive distances decrease and the last is below tolerance;
/// the limit representative is then the last element. Throws on an empty list.
LimitReport limit_of_sequence(std::span<const GeneralizedControl> controls,
                              const LimitOptions& opts = {});

}  // namespace impopt
