// SPDX-License-Identifier: Apache-2.0

#include "cbmor/assembly.hpp"

#include <cmath>

#include "cbmor/element.hpp"
#include "cbmor/errors.hpp"

namespace cbmor {

AssembledSystem assemble_raw(const Mesh& mesh,
                             const NeoHookeMaterial& material,
                             const DisplacementState& state,
                             const LoadCase& loads) {
  const int n = mesh.dof_count();
  if (state.u.size() != n)
    throw LayoutError("state length does not match mesh DOF count");

  AssembledSystem sys;
  sys.residual = Eigen::VectorXd::Zero(n);
  sys.external_force = Eigen::VectorXd::Zero(n);

  const double t = state.load_factor;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(64 * mesh.elements.size());

  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& conn = mesh.elements[e];
    ElementCoords coords;
    ElementVector ue;
    for (int a = 0; a < 4; ++a) {
      coords.row(a) = mesh.nodes[conn[a]].transpose();
      ue.segment<2>(2 * a) = state.u.segment<2>(2 * conn[a]);
    }
    const ElementResult el = element_residual_tangent(
        coords, ue, material, t * loads.body_force, e);
    for (int a = 0; a < 4; ++a) {
      sys.residual.segment<2>(2 * conn[a]) += el.residual.segment<2>(2 * a);
      for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            triplets.emplace_back(2 * conn[a] + i, 2 * conn[b] + j,
                                  el.tangent(2 * a + i, 2 * b + j));
    }
  }

  // Nominal tractions on named edge sets, 2-point Gauss per edge.
  for (const auto& spec : loads.tractions) {
    const Eigen::Vector2d tr = t * spec.traction;
    for (const auto& [na, nb] : mesh.edge_set(spec.edge_set)) {
      const double len = (mesh.nodes[nb] - mesh.nodes[na]).norm();
      // Linear shape functions integrate the constant traction to len/2 per
      // node.
      sys.external_force.segment<2>(2 * na) += 0.5 * len * tr;
      sys.external_force.segment<2>(2 * nb) += 0.5 * len * tr;
    }
  }
  sys.residual -= sys.external_force;

  sys.tangent.resize(n, n);
  sys.tangent.setFromTriplets(triplets.begin(), triplets.end());

  for (const auto& [dof, value] : loads.dirichlet)
    sys.dirichlet[dof] = t * value;

  return sys;
}

void apply_dirichlet(Eigen::SparseMatrix<double>& tangent,
                     Eigen::VectorXd& residual, const DirichletMap& increment,
                     const std::vector<int>& constrained_dofs) {
  const Eigen::Index n = tangent.rows();
  std::vector<char> constrained(n, 0);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  for (int d : constrained_dofs) constrained[d] = 1;
  for (const auto& [d, v] : increment) {
    if (d < 0 || d >= n) throw LayoutError("dirichlet DOF out of range");
    constrained[d] = 1;
    delta(d) = v;
  }

  // Move prescribed columns to the right-hand side, then blank rows/columns.
  if (delta.squaredNorm() > 0.0) residual += tangent * delta;

  for (Eigen::Index col = 0; col < tangent.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(tangent, col); it;
         ++it) {
      if (constrained[it.row()] || constrained[it.col()])
        it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    }
  tangent.prune(0.0);

  for (Eigen::Index d = 0; d < n; ++d)
    if (constrained[d]) residual(d) = -delta(d);
}

AssembledSystem assemble(const Mesh& mesh, const NeoHookeMaterial& material,
                         const DisplacementState& state, const LoadCase& loads,
                         const DirichletMap& increment) {
  AssembledSystem sys = assemble_raw(mesh, material, state, loads);
  std::vector<int> constrained;
  constrained.reserve(sys.dirichlet.size());
  for (const auto& [d, v] : sys.dirichlet) {
    (void)v;
    constrained.push_back(d);
  }
  apply_dirichlet(sys.tangent, sys.residual, increment, constrained);
  return sys;
}

void add_edge_dirichlet(DirichletMap& map, const Mesh& mesh,
                        const std::string& edge_set, int component,
                        const Eigen::Vector2d& value) {
  for (int node : mesh.edge_set_nodes(edge_set))
    for (int c = 0; c < 2; ++c) {
      if (component >= 0 && c != component) continue;
      const int dof = 2 * node + c;
      auto [it, inserted] = map.try_emplace(dof, value(c));
      if (!inserted && it->second != value(c))
        throw ConfigError("conflicting Dirichlet values at DOF " +
                          std::to_string(dof));
    }
}

}  // namespace cbmor
