// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_STEPPING_HPP
#define CBMOR_STEPPING_HPP

#include <functional>
#include <vector>

namespace cbmor {

struct SubstepResult {
  int iterations = 0;
  std::vector<double> residual_norms;
};

/// Advances the state from one load factor to another; throws
/// NonConvergenceError / ElementInversionError / SolverError on failure and
/// must leave the state unchanged in that case.
using SubstepFn = std::function<SubstepResult(double t_from, double t_to)>;

struct ScheduledRecord {
  double load_factor = 0.0;
  int substeps = 0;
  int iterations = 0;
  std::vector<double> residual_norms;  // of the final substep
};

/// Drives the quasi-static schedule from t_start with adaptive increment
/// halving: a failed substep is split at its midpoint, at most max_halvings
/// times. Failures beyond that propagate.
std::vector<ScheduledRecord> quasi_static_drive(
    const std::vector<double>& targets, int max_halvings,
    const SubstepFn& substep, double t_start = 0.0);

}  // namespace cbmor

#endif
