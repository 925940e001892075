#pragma once

#include <stdexcept>
#include <string>

namespace uavnet {

/// Malformed or inconsistent scenario input.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No plan satisfies the hard constraints (rate floors, shares, backhaul).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The convex solver failed for numerical reasons or hit its iteration cap.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uavnet
