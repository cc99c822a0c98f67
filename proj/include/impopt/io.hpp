#pragma once

// JSON and CSV serialization. Doubles are written in shortest round-trip form,
// so every emitted JSON document re-parses to bit-identical values.

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "impopt/problems.hpp"
#include "impopt/solver.hpp"

namespace impopt::io {

using Json = nlohmann::json;

/// {"params": [...], "points": [[...], ...]}
Json to_json(const SampledCurve& c);
SampledCurve curve_from_json(const Json& j);

/// {"times": [...], "values": [[...], ...]}
Json to_json(const OrdinaryControl& u);
OrdinaryControl ordinary_from_json(const Json& j);

/// {"T": T, "params": [...], "points": [[V, W...], ...]}
Json to_json(const GeneralizedControl& gc);
GeneralizedControl generalized_from_json(const Json& j);

/// Problem file: {"system": name or {"name": ..., "drift": ..., "c": ...,
/// "drift_free": bool} or {"A": [[...]], "B": [[...]]}, "lagrangian": name, "x0": [...], "x1": [...],
/// "S": budget (optional), "N": cells (optional)}.
struct ProblemFile {
  RelaxedProblem problem;
  std::optional<int> N;
};
ProblemFile problem_from_json(const Json& j);

/// Linear system f(x) = A x, G(x) = B.
ControlAffineSystem linear_system(const Mat& A, const Mat& B);

Json to_json(const RelaxedSolution& sol);
RelaxedSolution solution_from_json(const Json& j);

/// Columns s, v, w_1..w_k, theta, y_1..y_n, running_cost; one row per node,
/// controls of the cell starting at the node (the last row repeats the last cell).
void write_solution_csv(std::ostream& os, const RelaxedSolution& sol);

/// Columns s, V, y_1..y_n.
void write_trajectory_csv(std::ostream& os, const GeneralizedTrajectory& traj);

Json to_json(const GapReport& r);

/// Reads and parses a JSON file; Parse errors report the line and column.
Json read_json_file(const std::string& path);
Json parse_json(const std::string& text, const std::string& origin = "<input>");
void write_text_file(const std::string& path, const std::string& text);

}  // namespace impopt::io
