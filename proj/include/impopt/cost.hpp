#pragma once

// The auxiliary Lagrangian
//
//     lambda(y, v, w) = L(y, w / v) v                       for v > 0,
//     lambda(y, 0, w) = lim_{eta -> 0+} L(y, w / eta) eta   (recession),
//
// and the extended cost I([(V, W)]) = int_0^{V#(T)} lambda(y, v, w) ds.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "impopt/dynamics.hpp"

namespace impopt {

/// A real number or +infinity. Never -infinity or NaN.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr explicit ExtendedReal(double v) : value_(v) {}
  static constexpr ExtendedReal infinity() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }

  constexpr bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_finite() const { return !is_infinite(); }
  constexpr double value() const { return value_; }

  friend constexpr bool operator==(ExtendedReal, ExtendedReal) = default;

 private:
  double value_ = 0.0;
};

struct LagrangianSpec {
  std::string name;
  /// L(x, u), continuous and convex in u.
  std::function<double(const Vec& x, const Vec& u)> L;
  /// lim L(x, w / eta) eta as eta -> 0+; may return +infinity. Optional.
  std::function<double(const Vec& x, const Vec& w)> recession;
  /// Linear growth constants: L(x, u) >= a + b |u|.
  std::optional<GrowthBounds> growth;
  /// Optional closed form of lambda(y, v, w) on raw arrays, including v = 0.
  /// When present, lambda_eval uses it instead of L and the recession.
  std::function<double(const double* y, double v, const double* w)> auxiliary;
};

/// Throws InvalidArgument for v < 0.
ExtendedReal lambda_from_lagrangian(const LagrangianSpec& spec, const Vec& y, double v,
                                    const Vec& w);

/// Closed form when available, else lambda_from_lagrangian. Throws for v < 0.
ExtendedReal lambda_eval(const LagrangianSpec& spec, const Vec& y, double v, const Vec& w);

/// The recession limit computed from L alone along eta = 1e-2, 1e-4, ..., 1e-10.
/// Returns +infinity once a term exceeds 1e12, or when the tail keeps growing
/// geometrically (at least tenfold per step over the last three steps).
ExtendedReal numerical_recession(const LagrangianSpec& spec, const Vec& y, const Vec& w);

struct CostOptions {
  IntegrationOptions integration;
};

/// I([(V, W)]) by integrating the auxiliary system and applying the midpoint
/// rule on every RK4 substep; +infinity as soon as any node has lambda = +infinity.
ExtendedReal extended_cost(const LagrangianSpec& spec, const ControlAffineSystem& sys,
                           const GeneralizedControl& gc, const Vec& x0,
                           const CostOptions& opts = {});

struct ConvexityViolation {
  double v1, v2, t;
  Vec w1, w2;
  double excess;  ///< lambda(mix) - (t lambda(p1) + (1 - t) lambda(p2))
};

struct ConvexityReport {
  std::size_t samples = 0;
  std::vector<ConvexityViolation> violations;
  bool convex() const { return violations.empty(); }
};

/// Samples pairs (v_i, w_i) with v_i in (0, 1], w_i in [-w_range, w_range]^k and
/// checks the convexity inequality of lambda(y, ., .) with slack `tol`.
ConvexityReport convexity_check(const LagrangianSpec& spec, const Vec& y, int k,
                                std::size_t sample_count, std::uint64_t seed = 1,
                                double w_range = 3.0, double tol = 1e-9);

struct GrowthReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  ///< min over samples of L(x, u) - (a + b |u|)
};

/// Sampled check of L(x, u) >= a + b |u|; requires spec.growth.
GrowthReport growth_check(const LagrangianSpec& spec, int n, int k, std::size_t sample_count,
                          std::uint64_t seed = 1, double range = 5.0);

struct LscReport {
  std::vector<double> eps;
  std::vector<ExtendedReal> costs;  ///< extended_cost of the regularized controls
  ExtendedReal reference;           ///< extended_cost of the control itself
  double liminf = 0.0;              ///< min of the costs over the sweep
  bool holds = false;               ///< liminf >= reference - tol
};

/// Evaluates extended_cost on regularize(gc, eps) for each eps and compares the
/// lowest value with the cost of gc.
LscReport lsc_probe(const LagrangianSpec& spec, const ControlAffineSystem& sys,
                    const GeneralizedControl& gc, const Vec& x0, const std::vector<double>& eps_list,
                    double tol = 1e-3, const CostOptions& opts = {});

}  // namespace impopt
