#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uavnet/convex/program.hpp"

namespace uavnet::convex {

enum class SolveStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

std::string_view to_string(SolveStatus status);

struct SolveOptions {
  double barrier_mu = 10.0;
  double initial_t = 1.0;
  double feas_tol = 1e-9;
  double gap_tol = 1e-8;     // stop when (sum of barrier degrees) / t falls below this
  double newton_tol = 1e-10; // half the squared Newton decrement
  int max_newton = 5000;
  double armijo = 0.25;
  double backtrack = 0.5;
  bool record_merit = false;   // keep the barrier merit of every accepted iterate
  bool audit_smooth = false;   // finite-difference and convexity audit of smooth constraints
  std::uint64_t audit_seed = 1;
};

struct SolveReport {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  double max_violation = 0.0;
  std::string worst_constraint;  // most violated constraint at x (Infeasible) or empty
  double gap = 0.0;              // final barrier gap bound
  int outer_iterations = 0;
  int newton_steps = 0;
  bool used_phase_one = false;
  std::string diagnostic;
  /// One entry per centering stage: merit after each accepted Newton step.
  std::vector<std::vector<double>> merit_history;
};

/// Strictly feasible point for `program` or Infeasible naming the worst constraint.
/// Minimizes a common shift s over g_i(x) <= s and stops once s < 0.
SolveReport find_feasible_point(const ConvexProgram& program, const SolveOptions& options = {});

/// Log-barrier interior-point method on `program`.
SolveReport solve(const ConvexProgram& program, const SolveOptions& options = {});

/// Checks every smooth constraint's derivatives against central differences
/// (step 1e-5) and midpoint convexity on random pairs near `x`. Throws
/// std::logic_error naming the first offending constraint.
void audit_smooth_constraints(const ConvexProgram& program, std::span<const double> x,
                              std::uint64_t seed);

}  // namespace uavnet::convex
