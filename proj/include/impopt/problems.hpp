#pragma once

// Built-in systems, Lagrangians and boundary-value problems.

#include <string>
#include <vector>

#include "impopt/cost.hpp"
#include "impopt/solver.hpp"

namespace impopt::builtin {

// Systems -------------------------------------------------------------------

/// x' = x + u (scalar).
ControlAffineSystem fuel_system();

/// x' = u in R^n.
ControlAffineSystem integrator(int n);

/// x1' = u1, x2' = u2, x3' = x2 u1.
ControlAffineSystem noninvolutive_system();

/// x1' = x1 + x2, x2' = u.
ControlAffineSystem gap_system();

enum class HeisenbergDrift { None, Constant, Linear };

/// Horizontal curves of the Heisenberg group plus a drift:
/// none, f = (0, 0, c) or f = (0, 0, -x3).
ControlAffineSystem heisenberg_system(HeisenbergDrift drift, double c = 1.0);

/// The same system with f replaced by zero.
ControlAffineSystem without_drift(const ControlAffineSystem& sys);

// Lagrangians ---------------------------------------------------------------

/// L = |u| with u in R^k.
LagrangianSpec fuel_lagrangian(int k = 1);

/// L = sqrt(1 + |u|^2) with u in R^k; also registered as "heisenberg".
LagrangianSpec norm_plus_one_lagrangian(int k = 2);

/// L = |x1| + max(|u| - 1 / sqrt|x1|, 0), with the second term 0 at x1 = 0.
LagrangianSpec gap1_lagrangian();

/// L = |x1|^alpha u^2.
LagrangianSpec gap2_lagrangian(double alpha);

/// Looks up "fuel", "norm-plus-one", "heisenberg", "gap1" or "gap2:<alpha>"
/// for controls in R^k. gap1 and gap2 are scalar-control integrands.
LagrangianSpec lagrangian_by_name(const std::string& name, int k);
std::vector<std::string> lagrangian_names();

// Problems ------------------------------------------------------------------

/// Fuel-optimal transfer x(0) = 0 to x(1) = e with L = |u|; S = 3.
RelaxedProblem fuel_problem();

/// x(0) = (0, -1) to x(1) = (0, 0) under the gap dynamics with the gap1 integrand.
RelaxedProblem gap1_problem();
RelaxedProblem gap2_problem(double alpha);

/// x(0) = 0 to (0, 0, C) with L = sqrt(1 + |u|^2).
/// Linear drift f = (0, 0, -x3); constant drift f = (0, 0, c).
RelaxedProblem heisenberg_problem(HeisenbergDrift drift, double C, double c = 1.0);

/// f = 0, G = I on R^2, L = sqrt(1 + |u|^2), x0 = x1 = 0.
RelaxedProblem trivial_problem();

/// Same boundary data and integrand with the drift removed.
RelaxedProblem drift_free(const RelaxedProblem& p);

std::vector<std::string> problem_names();

struct ProblemParams {
  double alpha = 2.0;            ///< gap2 exponent
  std::string drift = "linear";  ///< heisenberg: none | constant | linear
  double C = 30.0;               ///< heisenberg target x3
  double c = 1.0;                ///< heisenberg constant drift
};

HeisenbergDrift drift_by_name(const std::string& name);

/// Built-in problem by name (see problem_names()); throws InvalidArgument
/// listing the known names otherwise.
RelaxedProblem problem_by_name(const std::string& name, const ProblemParams& params = {});

/// Solver defaults tuned for a built-in problem; plain defaults for other names.
SolverOptions recommended_options(const std::string& name);

/// Built-in system by name: fuel, integrator:<n>, example2, gap, heisenberg.
ControlAffineSystem system_by_name(const std::string& name, const ProblemParams& params = {});

/// The three orderings of the unit impulse (1, 1) at t = 0: e1 then e2,
/// the diagonal, e2 then e1. Horizon 1.
std::vector<GeneralizedControl> noninvolutive_controls();

/// Unit impulse at t = 0 followed by a unit-time horizontal leg (horizon 1).
GeneralizedControl fuel_impulse_control();

/// u_i = ubar_i on [0, 1/i], ubar_i = 1 / (1 - e^{-1/i}), zero afterwards.
OrdinaryControl fuel_needle(int i);

/// The needle concatenations u^{m, eps}, m = 1, 2, 3, on [0, 1].
OrdinaryControl noninvolutive_needle(int m, double eps);

/// The unit circle (0, cos t, sin t), t in [0, 2 pi], traversed counterclockwise
/// or reversed; both start at (0, 1, 0).
SpaceTimeCurve circle_fixture(bool reversed, std::size_t samples = 720);

}  // namespace impopt::builtin
