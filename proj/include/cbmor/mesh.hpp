// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_MESH_HPP
#define CBMOR_MESH_HPP

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cbmor {

using Edge = std::pair<int, int>;

/// 2D mesh of 4-node quadrilaterals with named boundary edge sets.
/// Coordinates are reference coordinates in mm and elements are
/// counter-clockwise.
struct Mesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 4>> elements;
  std::map<std::string, std::vector<Edge>> edge_sets;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }
  int dof_count() const { return 2 * node_count(); }

  const std::vector<Edge>& edge_set(const std::string& name) const;
  /// Unique nodes of an edge set, ascending order.
  std::vector<int> edge_set_nodes(const std::string& name) const;
  /// Axis-aligned bounding box of the whole mesh.
  std::pair<Eigen::Vector2d, Eigen::Vector2d> bounding_box() const;
};

/// Regular nx-by-ny grid of quads covering [0,lx]x[0,ly] shifted by origin,
/// with edge sets named left/right/top/bottom.
Mesh generate_structured_quad_mesh(int nx, int ny, double lx, double ly,
                                   const Eigen::Vector2d& origin = {0.0, 0.0});

/// Checks element index ranges, reference Jacobians at the 2x2 Gauss points
/// and that every edge-set pair is an edge of exactly one element.
/// Throws MeshError on violation.
void validate_mesh(const Mesh& mesh);

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);

}  // namespace cbmor

#endif
