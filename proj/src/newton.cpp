// SPDX-License-Identifier: Apache-2.0

#include "cbmor/newton.hpp"

#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "cbmor/errors.hpp"

namespace cbmor {

Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& matrix,
                          const Eigen::VectorXd& rhs) {
  if (matrix.rows() < 2000) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Eigen::MatrixXd(matrix));
    if (ldlt.info() != Eigen::Success)
      throw SolverError("dense LDLT factorization failed");
    return ldlt.solve(rhs);
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(matrix);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("sparse LDLT factorization failed");
  return ldlt.solve(rhs);
}

namespace {

double free_residual_norm(const AssembledSystem& sys) {
  Eigen::VectorXd g = sys.residual;
  for (const auto& [d, v] : sys.dirichlet) {
    (void)v;
    g(d) = 0.0;
  }
  return g.norm();
}

}  // namespace

NewtonResult newton_solve(const Mesh& mesh, const NeoHookeMaterial& material,
                          const LoadCase& loads,
                          const std::vector<double>& load_factors,
                          const NewtonOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("newton: tol must be positive");

  NewtonResult result;
  DisplacementState state;
  state.u = Eigen::VectorXd::Zero(mesh.dof_count());

  for (double t : load_factors) {
    state.load_factor = t;
    StepReport step;
    step.load_factor = t;

    // Boundary-condition increment for this step.
    DirichletMap increment;
    for (const auto& [d, v] : loads.dirichlet) {
      const double delta = t * v - state.u(d);
      if (delta != 0.0) increment[d] = delta;
    }

    bool converged = false;
    for (int iter = 0; iter < options.max_iter; ++iter) {
      AssembledSystem raw = assemble_raw(mesh, material, state, loads);
      const double rnorm = free_residual_norm(raw);
      step.residual_norms.push_back(rnorm);
      const bool bc_pending = !increment.empty();
      if (!bc_pending && rnorm <= options.tol) {
        converged = true;
        break;
      }

      std::vector<int> constrained;
      for (const auto& [d, v] : raw.dirichlet) {
        (void)v;
        constrained.push_back(d);
      }
      apply_dirichlet(raw.tangent, raw.residual, increment, constrained);
      increment.clear();

      const Eigen::VectorXd du = solve_spd(raw.tangent, -raw.residual);
      state.u += du;
      ++step.iterations;
    }
    if (!converged) {
      const double last = step.residual_norms.empty()
                              ? std::numeric_limits<double>::infinity()
                              : step.residual_norms.back();
      throw NonConvergenceError(
          last, "newton: no convergence at load factor " + std::to_string(t));
    }
    result.trajectory.push_back(state);
    result.report.push_back(std::move(step));
  }
  return result;
}

}  // namespace cbmor
