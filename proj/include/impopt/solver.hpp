#pragma once

// Direct transcription of the relaxed problem
//
//     sum_j lambda(y_j, v_j, w_j) ds -> min,   y' = f(y) v + G(y) w,   theta' = v,
//     v >= 0,  v^2 + |w|^2 <= 1,  theta(S) = 1,  y(S) = x1,
//
// on a fixed parameter interval [0, S] with N piecewise-constant control cells.
// Free final parameter is handled by the dilation invariance of lambda.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "impopt/cost.hpp"

namespace impopt {

struct RelaxedProblem {
  std::string name;
  ControlAffineSystem sys;
  LagrangianSpec spec;
  Vec x0;
  Vec x1;
  double S = 0.0;  ///< parameter budget; <= 0 selects 2 (1 + |x1 - x0|)
  double time_target = 1.0;

  double budget() const;
  /// Throws DimensionMismatch or InvalidArgument.
  void validate() const;
};

struct SolverOptions {
  int N = 200;
  int random_starts = 8;
  bool warm_starts = true;
  std::uint64_t seed = 20240917;
  std::vector<double> penalties{1e2, 1e3, 1e4};
  int max_iterations = 400;  ///< per penalty stage
  double feas_tol = 1e-2;
  double v_tol = 1e-3;
  double fd_step = 1e-6;         ///< relative step for the dynamics Jacobians
  /// Relative step for derivatives of lambda. At a kink of lambda the central
  /// difference is the slope of a Huber smoothing of this width, so a step far
  /// below the grid scale makes the problem needlessly stiff.
  double lambda_fd_step = 1e-3;
  int substeps = 1;  ///< RK4 substeps per cell
  double blowup_bound = 1e6;
  double endpoint_slack = 0.0;  ///< penalize only (|y_N - x1| - slack)^+
  double v_min = 0.0;           ///< restriction v >= v_min
  /// Extra starting points (v, w per cell); entries with another N are ignored.
  std::vector<std::pair<std::vector<double>, std::vector<Vec>>> initial_guesses;
};

struct ImpulseArc {
  std::size_t first = 0;  ///< first cell
  std::size_t last = 0;   ///< last cell, inclusive
};

struct RelaxedSolution {
  std::vector<double> grid;  ///< s_0..s_N
  std::vector<double> v;     ///< per cell
  std::vector<Vec> w;        ///< per cell
  std::vector<double> theta; ///< per node
  std::vector<Vec> y;        ///< per node
  std::vector<double> running_cost;  ///< cumulative cost per node
  double cost = 0.0;
  double endpoint_residual = 0.0;  ///< |y_N - x1|
  double time_residual = 0.0;      ///< |theta_N - 1|
  std::vector<ImpulseArc> impulse_arcs;
  int start_index = -1;  ///< which start produced the result
  std::size_t feasible_starts = 0;
};

/// Euclidean projection onto {v >= 0} intersected with the closed unit ball.
std::pair<double, Vec> project_half_ball(double v, const Vec& w);

/// Projection onto {v >= eta} intersected with the closed unit ball, 0 <= eta < 1.
std::pair<double, Vec> project_restricted(double v, const Vec& w, double eta);

/// Transcribed objective pieces for fixed controls; exposed for tests.
struct TranscriptionValue {
  double cost = 0.0;     ///< +infinity when some cell has lambda = +infinity
  double penalty = 0.0;
  std::vector<Vec> y;
  std::vector<double> theta;
  std::vector<double> running_cost;
};

TranscriptionValue evaluate_transcription(const RelaxedProblem& p, const std::vector<double>& v,
                                          const std::vector<Vec>& w, double mu,
                                          const SolverOptions& opts = {});

/// Gradient of cost + penalty with respect to (v_j, w_j), packed per cell as
/// [v_0, w_0, v_1, w_1, ...]. Returns false if the objective is not finite.
bool transcription_gradient(const RelaxedProblem& p, const std::vector<double>& v,
                            const std::vector<Vec>& w, double mu, const SolverOptions& opts,
                            std::vector<double>& grad, double& objective);

/// Multi-start projected gradient with penalty continuation. Throws Infeasible
/// when no start meets the endpoint and time tolerances at the largest penalty.
RelaxedSolution solve_relaxed(const RelaxedProblem& p, const SolverOptions& opts = {});

/// Same problem with v >= eta; the result is an ordinary control.
RelaxedSolution solve_restricted(const RelaxedProblem& p, double eta,
                                 const SolverOptions& opts = {});

/// (v, w) as a generalized control with horizon 1, padded by a time leg
/// when theta_N falls short of 1.
GeneralizedControl to_generalized_control(const RelaxedSolution& sol);

/// W o V^{-1} on the time grid theta; requires v > 0 on every cell.
OrdinaryControl to_ordinary(const RelaxedSolution& sol);

/// Shape of the normalized profile vhat = v / |(v, w)| over active cells.
struct ProfileReport {
  std::size_t active_cells = 0;
  double min_vhat = 0.0;
  double max_increase = 0.0;  ///< largest vhat_{j'} - vhat_j over active j < j'
  bool nonincreasing = false; ///< max_increase <= tolerance
  bool terminal_impulse = false;
  std::vector<double> vhat;   ///< per active cell, in order
};

ProfileReport analyze_profile(const RelaxedSolution& sol, double tolerance = 0.02,
                              double active_norm = 1e-2, double v_tol = 1e-3);

struct GapCell {
  double eta = 0.0;
  double eps = 0.0;
  std::optional<double> cost;  ///< empty when the restricted solve was infeasible
  double endpoint_residual = 0.0;
  std::string note;
};

struct GapReport {
  std::vector<double> eta_values;
  std::vector<double> eps_values;
  std::vector<GapCell> cells;  ///< row-major over (eta, eps)
  double generalized_cost = 0.0;
  std::optional<double> gap_estimate;
  double gap_tol = 0.01;
  bool gap_detected = false;

  /// Restricted cost at (eta_values[i], smallest eps), if feasible.
  std::optional<double> restricted_cost(std::size_t i) const;
};

/// Compares the generalized infimum with restricted (ordinary) solves.
/// eta_list and eps_list must be decreasing.
GapReport gap_probe(const RelaxedProblem& p, const std::vector<double>& eta_list,
                    const std::vector<double>& eps_list, const SolverOptions& opts = {},
                    double gap_tol = 0.01);

}  // namespace impopt
