#pragma once

#include <string>
#include <vector>

#include "uavnet/scenario.hpp"

namespace uavnet {

/// Worst relative violation of one constraint family (<= 0 when satisfied).
struct ConstraintCheck {
  std::string name;
  double max_violation = 0.0;
  std::string where;
  bool enforced = true;  // counts toward validity
};

struct VerificationReport {
  double tolerance = 1e-6;
  std::vector<ConstraintCheck> checks;
  double backhaul_excess_bps = 0.0;  // largest load minus capacity over slots
  double eta = 0.0;                  // bps, recomputed min normal average rate
  std::vector<double> average_rates;  // bps per vehicle

  // Share lower bound floor / full-bandwidth rate at rate-floor slots.
  int floor_slots = 0;
  int binding_slots = 0;             // rate within 1e-3 relative of the floor
  int tight_slots = 0;               // share within 1e-4 relative of the bound
  double max_binding_bound_gap = 0.0;

  // Analytic rate derivative against central differences at the solution geometry.
  int derivative_probes = 0;
  double derivative_max_rel_error = 0.0;
  bool derivative_negative = true;
  bool derivative_ok = true;

  bool valid = false;

  [[nodiscard]] const ConstraintCheck* find(const std::string& name) const;
};

/// Recomputes every constraint with exact formulas. `enforce_rate_floor` marks the
/// rate-floor family as informational when false. Pure function of its inputs.
VerificationReport verify_solution(const ScenarioConfig& scenario, const Trajectory& traj,
                                   const std::vector<std::vector<double>>& share,
                                   bool enforce_rate_floor = true);

/// Deterministic text rendering; identical inputs give identical bytes.
std::string render_report(const VerificationReport& report);

}  // namespace uavnet
