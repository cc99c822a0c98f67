#pragma once

// The generalized input-to-trajectory map.
//
// For a canonical control (V, W) with piecewise-constant derivative (v, w), the
// generalized trajectory is (V, y) where
//
//     y(0) = x0,   y' = f(y) v + G(y) w,   s in [0, V#(T)].
//
// Ordinary controls are the special case v > 0 a.e., and then y o V# equals the
// classical solution of x' = f(x) + G(x) u.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "impopt/controls.hpp"

namespace impopt {

/// |f(x)| <= a + b |x| and |G(x)| <= a + b |x| (operator 2-norm).
struct GrowthBounds {
  double a = 0.0;
  double b = 0.0;
};

/// out = f(y) v + G(y) w on raw arrays of length n, k and n.
using RawVelocity = std::function<void(const double* y, double v, const double* w, double* out)>;

struct ControlAffineSystem {
  std::string name;
  int n = 0;
  int k = 0;
  std::function<Vec(const Vec&)> f;
  std::function<Mat(const Vec&)> G;
  std::optional<GrowthBounds> growth;
  /// Optional allocation-free evaluation of f(y) v + G(y) w; must agree with f and G.
  RawVelocity raw;

  /// f(y) v + G(y) w.
  Vec velocity(const Vec& y, double v, const Vec& w) const;
  Vec ordinary_velocity(const Vec& x, const Vec& u) const { return velocity(x, 1.0, u); }

  /// `raw` if present, otherwise a wrapper over f and G.
  RawVelocity raw_velocity() const;

  /// Throws DimensionMismatch when f or G at `probe` disagree with (n, k).
  void check_dimensions(const Vec& probe) const;
};

struct IntegrationOptions {
  int steps_per_segment = 64;
  double blowup_bound = 1e6;
};

struct GeneralizedTrajectory {
  SpaceTimeCurve curve;  ///< (V, y) sampled at every RK4 substep, params are s
  double horizon = 0.0;
};

/// Classical RK4 of the auxiliary system over s in [0, V#(T)].
/// Throws BlowUp if |y| exceeds the bound (the trajectory is not defined on [0, T]).
GeneralizedTrajectory integrate_auxiliary(const ControlAffineSystem& sys,
                                          const GeneralizedControl& gc, const Vec& x0,
                                          const IntegrationOptions& opts = {});

/// y(V#(T)), the right limit at the horizon. Throws TimeIncomplete if V never reaches T.
Vec endpoint(const GeneralizedTrajectory& traj);

struct OrdinaryPath {
  std::vector<double> times;
  std::vector<Vec> states;
};

/// RK4 of x' = f(x) + G(x) u with `opts.steps_per_segment` substeps per grid interval.
OrdinaryPath ordinary_trajectory(const ControlAffineSystem& sys, const OrdinaryControl& u,
                                 const Vec& x0, const IntegrationOptions& opts = {});

struct ReparamReport {
  double distance = 0.0;            ///< d^+ to the canonical-run trajectory
  double endpoint_discrepancy = 0.0;
  Vec endpoint;
};

/// Integrates the auxiliary system under the representative (V o sigma, W o sigma),
/// where sigma maps [0, R] onto [0, V#(T)] strictly increasingly, and compares the
/// result with the canonical run.
ReparamReport reparam_check(const ControlAffineSystem& sys, const GeneralizedControl& gc,
                            const Vec& x0, const MonotoneMap& sigma,
                            const IntegrationOptions& opts = {}, double refine_h = 0.01);

/// One classical RK4 step of y' = rate(y) of length h.
template <class Rate>
Vec rk4_step(const Rate& rate, const Vec& y, double h) {
  Vec k1 = rate(y);
  Vec k2 = rate(y + 0.5 * h * k1);
  Vec k3 = rate(y + 0.5 * h * k2);
  Vec k4 = rate(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace impopt
