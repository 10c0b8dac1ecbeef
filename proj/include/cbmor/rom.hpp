// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_ROM_HPP
#define CBMOR_ROM_HPP

#include <vector>

#include <Eigen/Core>

#include "cbmor/coupled.hpp"

namespace cbmor {

struct RomOptions {
  /// Modes per substructure internal block; empty or -1 entries keep every
  /// available column.
  std::vector<int> internal_modes;
  /// Modes per interface; -1 keeps every available column.
  int interface_modes = -1;
  /// With reduction off the interface blocks use identity trial spaces.
  bool interface_reduction = true;
};

/// Galerkin trial space of the condensed system. Each substructure carries a
/// dense map B from its local reduced coordinates to its displacement DOFs;
/// global_cols places the local columns in the assembled reduced vector
/// [a_I per substructure | a_C per interface].
struct ReducedModel {
  struct SubReduction {
    Eigen::MatrixXd B;             // dof_count x local width
    std::vector<int> global_cols;  // local column -> reduced index
  };
  std::vector<SubReduction> sub;

  std::vector<Eigen::MatrixXd> internal_modes;   // per substructure
  std::vector<Eigen::MatrixXd> interface_modes;  // per interface (master side)
  std::vector<int> internal_offset;
  std::vector<int> interface_offset;
  int reduced_dim = 0;

  int total_dofs = 0;

  Eigen::VectorXd gather_local(const SubReduction& s,
                               const Eigen::VectorXd& reduced) const;
};

/// Builds the reduced trial spaces from per-substructure bases (empty matrix
/// selects the identity pool). Basis rows at externally constrained DOFs are
/// zeroed and every block is re-orthonormalized; prescribed values enter the
/// solve through a lifting increment.
ReducedModel build_reduced_model(const CoupledScenario& scenario,
                                 const std::vector<Eigen::MatrixXd>& bases,
                                 const RomOptions& options);

struct ReducedSystem {
  Eigen::MatrixXd K;
  Eigen::VectorXd G;
};

/// Congruence projection of the condensed blocks onto the reduced space.
ReducedSystem reduce_system(const std::vector<AssembledSystem>& systems,
                            const ReducedModel& model);

/// Newton-Raphson on the reduced residual with full-order element assembly;
/// slave interface DOFs follow the master reduction through P. The full
/// condensed residual at each converged step lands in
/// RunResult::full_residual_norms.
RunResult newton_solve_rom(const CoupledScenario& scenario,
                           const ReducedModel& model);

/// Lagrange multipliers of one interface from the reduced increment.
Eigen::VectorXd recover_lagrange_rom(const AssembledSystem& slave_system,
                                     const InterfaceLayout& interface,
                                     const MortarOperators& ops,
                                     const ReducedModel& model, int slave_sub,
                                     const Eigen::VectorXd& delta_a);

struct DofCounts {
  int n_full = 0;
  int n_reduced = 0;
  double ratio = 0.0;
};

/// Reduced-unknown arithmetic: sum of internal and interface mode counts.
int reduced_dof_total(const std::vector<int>& internal_modes,
                      const std::vector<int>& interface_modes);

DofCounts count_reduced_dofs(const ReducedModel& model);

}  // namespace cbmor

#endif
