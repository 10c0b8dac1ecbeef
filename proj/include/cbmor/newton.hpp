// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_NEWTON_HPP
#define CBMOR_NEWTON_HPP

#include <vector>

#include "cbmor/assembly.hpp"

namespace cbmor {

struct NewtonOptions {
  double tol = 1e-8;   // on the free residual 2-norm [N]
  int max_iter = 25;
};

struct StepReport {
  double load_factor = 0.0;
  std::vector<double> residual_norms;  // per iteration, before each solve
  int iterations = 0;
};

struct NewtonResult {
  std::vector<DisplacementState> trajectory;  // one converged state per step
  std::vector<StepReport> report;
};

/// Quasi-static Newton-Raphson ramp over the given load factors for one
/// substructure. The boundary-condition increment of each step enters the
/// first solve through symmetric condensation. Throws NonConvergenceError or
/// SolverError.
NewtonResult newton_solve(const Mesh& mesh, const NeoHookeMaterial& material,
                          const LoadCase& loads,
                          const std::vector<double>& load_factors,
                          const NewtonOptions& options = {});

/// Shared linear-solve policy: dense LDLT below 2000 unknowns, sparse
/// simplicial LDLT otherwise. Throws SolverError if factorization fails.
Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& matrix,
                          const Eigen::VectorXd& rhs);

}  // namespace cbmor

#endif
