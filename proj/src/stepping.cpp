// SPDX-License-Identifier: Apache-2.0

#include "cbmor/stepping.hpp"

#include "cbmor/errors.hpp"

namespace cbmor {

std::vector<ScheduledRecord> quasi_static_drive(
    const std::vector<double>& targets, int max_halvings,
    const SubstepFn& substep, double t_start) {
  std::vector<ScheduledRecord> records;
  double t_cur = t_start;

  for (double target : targets) {
    ScheduledRecord rec;
    rec.load_factor = target;

    std::vector<std::pair<double, int>> stack{{target, 0}};
    while (!stack.empty()) {
      auto [t_try, level] = stack.back();
      try {
        SubstepResult res = substep(t_cur, t_try);
        stack.pop_back();
        t_cur = t_try;
        ++rec.substeps;
        rec.iterations += res.iterations;
        rec.residual_norms = std::move(res.residual_norms);
      } catch (const Error& e) {
        const bool recoverable =
            dynamic_cast<const NonConvergenceError*>(&e) != nullptr ||
            dynamic_cast<const ElementInversionError*>(&e) != nullptr ||
            dynamic_cast<const SolverError*>(&e) != nullptr;
        if (!recoverable || level >= max_halvings) throw;
        stack.back().second = level + 1;
        stack.emplace_back(0.5 * (t_cur + t_try), level + 1);
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace cbmor
