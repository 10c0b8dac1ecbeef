// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_ASSEMBLY_HPP
#define CBMOR_ASSEMBLY_HPP

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cbmor/material.hpp"
#include "cbmor/mesh.hpp"

namespace cbmor {

/// Prescribed displacement values per substructure-local DOF at load factor 1.
/// Values are ramped linearly by the load factor.
using DirichletMap = std::map<int, double>;

/// Constant nominal traction on a named boundary edge set [MPa], ramped by
/// the load factor.
struct TractionSpec {
  std::string edge_set;
  Eigen::Vector2d traction = Eigen::Vector2d::Zero();
};

/// Nodal displacement state of one substructure plus the load factor it
/// belongs to.
struct DisplacementState {
  Eigen::VectorXd u;
  double load_factor = 0.0;
};

struct AssembledSystem {
  Eigen::VectorXd residual;            // G = R - F_ext
  Eigen::SparseMatrix<double> tangent; // K = dG/dU
  Eigen::VectorXd external_force;
  DirichletMap dirichlet;              // values at the current load factor
};

struct LoadCase {
  DirichletMap dirichlet;  // values at load factor 1
  std::vector<TractionSpec> tractions;
  Eigen::Vector2d body_force = Eigen::Vector2d::Zero();
};

/// Raw assembly: element scatter-add in ascending element order plus external
/// loads; no boundary-condition treatment.
AssembledSystem assemble_raw(const Mesh& mesh, const NeoHookeMaterial& material,
                             const DisplacementState& state,
                             const LoadCase& loads);

/// Raw assembly followed by symmetric Dirichlet condensation for increments
/// `increment` at the constrained DOFs: rows/columns are eliminated, the
/// column contribution K(:,d)*increment(d) moves to the right-hand side and
/// the residual row is replaced so that solving K dU = -G yields
/// dU(d) = increment(d).
AssembledSystem assemble(const Mesh& mesh, const NeoHookeMaterial& material,
                         const DisplacementState& state, const LoadCase& loads,
                         const DirichletMap& increment = {});

/// In-place symmetric row/column elimination on an already assembled system.
void apply_dirichlet(Eigen::SparseMatrix<double>& tangent,
                     Eigen::VectorXd& residual, const DirichletMap& increment,
                     const std::vector<int>& constrained_dofs);

/// Expands an edge-set boundary condition into a per-DOF map. component is
/// 0 (x), 1 (y) or -1 (both). Conflicting duplicate values throw ConfigError.
void add_edge_dirichlet(DirichletMap& map, const Mesh& mesh,
                        const std::string& edge_set, int component,
                        const Eigen::Vector2d& value);

}  // namespace cbmor

#endif
