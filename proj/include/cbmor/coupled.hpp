// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_COUPLED_HPP
#define CBMOR_COUPLED_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cbmor/assembly.hpp"
#include "cbmor/layout.hpp"
#include "cbmor/mortar.hpp"
#include "cbmor/newton.hpp"

namespace cbmor {

/// Reaction-force probe: a Dirichlet edge whose constrained component is
/// summed into the force-displacement curve.
struct CurveProbe {
  int sub = 0;
  std::string edge_set;
  int component = 0;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 25;
  int max_halvings = 3;
};

/// A fully specified multi-substructure quasi-static problem.
struct CoupledScenario {
  std::vector<Mesh> meshes;
  std::vector<NeoHookeMaterial> materials;
  std::vector<LoadCase> loads;  // per substructure, values at load factor 1
  SystemLayout layout;
  std::vector<MortarOperators> mortar;  // parallel to layout.interfaces
  std::vector<double> load_factors;
  SolveOptions options;
  std::optional<CurveProbe> curve;

  int substructure_count() const { return static_cast<int>(meshes.size()); }
  /// Global DOF indices constrained by any Dirichlet condition.
  std::vector<int> constrained_global_dofs() const;
};

/// Map between the full DOF vector and the condensed unknowns with all owned
/// slave-side interface DOFs eliminated through P. `keep` lists global DOFs
/// that must stay condensed unknowns (externally constrained slave DOFs).
struct Condensation {
  Eigen::SparseMatrix<double> T;   // total_dofs x n_cond prolongation
  std::vector<int> cond_index;     // full dof -> condensed index or -1
  std::vector<int> cond_to_full;   // condensed index -> full dof
  int n_cond = 0;
};

Condensation build_condensation(const SystemLayout& layout,
                                const std::vector<MortarOperators>& mortar,
                                const std::vector<int>& keep = {});

/// Block-diagonal stack of per-substructure raw tangents and residuals.
struct FullSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd G;
};

FullSystem stack_systems(const std::vector<AssembledSystem>& systems,
                         const SystemLayout& layout);

struct CondensedSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd G;
};

/// Folds slave rows and columns into the master side, Eq.-18 style, for any
/// number of substructures and interfaces. Inputs are raw (no Dirichlet
/// treatment) substructure systems.
CondensedSystem assemble_condensed(const std::vector<AssembledSystem>& systems,
                                   const std::vector<MortarOperators>& mortar,
                                   const SystemLayout& layout);

struct SaddlePointSolution {
  Eigen::VectorXd delta_u;  // all DOFs of both substructures
  Eigen::VectorXd lambda;   // slave contact DOFs of the single interface
};

/// Dense indefinite solve of the full saddle-point system for one interface
/// between two substructures. Reference oracle for the condensed path.
SaddlePointSolution solve_saddle_point(
    const std::vector<AssembledSystem>& systems,
    const std::vector<MortarOperators>& mortar, const SystemLayout& layout);

/// Lagrange multipliers of one interface from the slave-side blocks:
/// Lambda = D^-T (-G_C - (K dU)_C), evaluated at the slave substructure.
Eigen::VectorXd recover_lagrange(const AssembledSystem& slave_system,
                                 const InterfaceLayout& interface,
                                 const MortarOperators& ops,
                                 const Eigen::VectorXd& delta_u_slave);

struct CurvePoint {
  int step = 0;
  double load_factor = 0.0;
  double displacement = 0.0;
  double force = 0.0;
  int newton_iters = 0;
  double assembly_s = 0.0;
  double solve_s = 0.0;
};

struct RunResult {
  std::vector<std::vector<Eigen::VectorXd>> trajectory;  // [step][sub]
  std::vector<CurvePoint> curve;
  std::vector<std::vector<double>> residual_history;  // [step][iter]
  /// Free condensed residual norm at each converged scheduled step. For
  /// reduced runs this is the diagnostic alongside the reduced norm.
  std::vector<double> full_residual_norms;
  double assembly_s = 0.0;
  double solve_s = 0.0;
  int total_substeps = 0;
  int n_unknowns = 0;
};

/// Full-order mortar tied-contact solve over the load schedule. Scheduled
/// steps that fail to converge are retried with up to max_halvings bisections
/// of the increment.
RunResult newton_solve_coupled(const CoupledScenario& scenario);

/// Quadratic-penalty baseline on the mortar-weighted gap g = D U_C^S -
/// M U_C^M with tangent epsilon B^T B; no condensation. Optional
/// per-substructure bases turn it into the reduced penalty variant
/// (columns must vanish on constrained DOFs).
RunResult penalty_coupled_solve(
    const CoupledScenario& scenario, double epsilon_penalty,
    const std::vector<Eigen::MatrixXd>& bases = {});

}  // namespace cbmor

#endif
