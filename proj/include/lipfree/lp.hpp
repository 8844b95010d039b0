#pragma once

// Small dense linear-program solver: two-phase tableau simplex with a fixed
// pivot rule, so identical inputs always give identical outputs.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace lipfree::lp {

enum class Sense { maximize, minimize };
enum class Relation { less_equal, equal, greater_equal };

struct Constraint {
  std::vector<double> coefficients;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

struct VariableBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

inline constexpr VariableBounds kFree{-std::numeric_limits<double>::infinity(),
                                      std::numeric_limits<double>::infinity()};

struct LinearProgram {
  Sense sense = Sense::maximize;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  // Empty means every variable lies in [0, +inf).
  std::vector<VariableBounds> bounds;

  std::size_t variable_count() const { return objective.size(); }
};

enum class Status { optimal, infeasible, unbounded };
std::string to_string(Status s);

struct Solution {
  Status status = Status::infeasible;
  double value = 0.0;               // objective at `assignment` (optimal only)
  std::vector<double> assignment;   // empty unless optimal
  double max_violation = 0.0;       // worst constraint or bound violation
  std::size_t pivots = 0;
};

enum class PivotRule {
  bland,    // smallest eligible index; never cycles
  dantzig,  // most negative reduced cost, switching to Bland after a run of
            // degenerate pivots
};

struct SolverOptions {
  double tolerance = 1e-9;           // feasibility
  double pivot_tolerance = 1e-11;    // smallest usable pivot / reduced cost
  PivotRule rule = PivotRule::dantzig;
  std::size_t stall_limit = 50;      // degenerate pivots before Bland takes over
  std::size_t max_pivots = 5'000'000;
};

// Throws lipfree::Error on malformed dimensions or non-finite coefficients.
Solution solve(const LinearProgram& lp, const SolverOptions& opts = {});

// Worst violation of constraints and bounds by `x` (0 when feasible).
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

// JSON rendering for failure triage.
std::string to_debug_json(const LinearProgram& lp);

}  // namespace lipfree::lp
