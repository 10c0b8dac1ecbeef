// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_LAYOUT_HPP
#define CBMOR_LAYOUT_HPP

#include <span>
#include <string>
#include <vector>

#include "cbmor/mesh.hpp"

namespace cbmor {

/// One tied-contact interface request: two substructure edge sets that
/// coincide geometrically.
struct InterfaceSpec {
  int sub_a = -1;
  std::string edge_set_a;
  int sub_b = -1;
  std::string edge_set_b;
};

/// Resolved interface. Node lists are sorted by arc-length coordinate along
/// the interface line. `*_all_nodes` covers every node of the edge set
/// (mortar integration spans whole edges); `*_nodes` keeps only the nodes
/// assigned to this interface, which carry the constraint rows/columns.
struct InterfaceLayout {
  int master_sub = -1;
  int slave_sub = -1;
  std::string master_edge_set;
  std::string slave_edge_set;

  std::vector<Edge> slave_edges;
  std::vector<Edge> master_edges;

  std::vector<int> slave_all_nodes;
  std::vector<int> master_all_nodes;
  std::vector<char> slave_owned;   // parallel to slave_all_nodes
  std::vector<char> master_owned;  // parallel to master_all_nodes

  std::vector<int> slave_nodes;   // owned only
  std::vector<int> master_nodes;  // owned only

  // Line frame used for sorting and mortar parametrization.
  Eigen::Vector2d line_origin = Eigen::Vector2d::Zero();
  Eigen::Vector2d line_dir = Eigen::Vector2d::Zero();

  int slave_dof_count() const { return 2 * static_cast<int>(slave_nodes.size()); }
  int master_dof_count() const { return 2 * static_cast<int>(master_nodes.size()); }
  /// Slave-substructure-local DOFs of the owned slave nodes, node-major (x,y).
  std::vector<int> slave_dofs() const;
  std::vector<int> master_dofs() const;
};

struct SubstructureLayout {
  int dof_offset = 0;
  int dof_count = 0;
  std::vector<int> internal_dofs;  // local, ascending
  std::vector<int> contact_dofs;   // local, ascending
};

struct SystemLayout {
  std::vector<SubstructureLayout> subs;
  std::vector<InterfaceLayout> interfaces;
  int total_dofs = 0;

  /// Stable fingerprint of the DOF partition, used in basis sidecar files.
  std::string hash() const;
};

/// Assigns master/slave sides, contact DOF sets and interface node ownership
/// for a list of substructures and interface pairings. The side with more
/// interface nodes becomes slave; ties go to the lower substructure index.
/// A node touched by several interfaces of one substructure is assigned to
/// the lowest-indexed one.
SystemLayout build_layout(std::span<const Mesh> substructures,
                          std::span<const InterfaceSpec> interfaces);

}  // namespace cbmor

#endif
