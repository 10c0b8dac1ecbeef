// SPDX-License-Identifier: Apache-2.0

#include "cbmor/layout.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "cbmor/errors.hpp"

namespace cbmor {

std::vector<int> InterfaceLayout::slave_dofs() const {
  std::vector<int> dofs;
  dofs.reserve(2 * slave_nodes.size());
  for (int n : slave_nodes) {
    dofs.push_back(2 * n);
    dofs.push_back(2 * n + 1);
  }
  return dofs;
}

std::vector<int> InterfaceLayout::master_dofs() const {
  std::vector<int> dofs;
  dofs.reserve(2 * master_nodes.size());
  for (int n : master_nodes) {
    dofs.push_back(2 * n);
    dofs.push_back(2 * n + 1);
  }
  return dofs;
}

namespace {

std::pair<Eigen::Vector2d, Eigen::Vector2d> edge_set_bbox(
    const Mesh& mesh, const std::vector<Edge>& edges) {
  Eigen::Vector2d lo(std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::max());
  Eigen::Vector2d hi = -lo;
  for (const auto& [a, b] : edges) {
    lo = lo.cwiseMin(mesh.nodes[a]).cwiseMin(mesh.nodes[b]);
    hi = hi.cwiseMax(mesh.nodes[a]).cwiseMax(mesh.nodes[b]);
  }
  return {lo, hi};
}

bool boxes_overlap(const std::pair<Eigen::Vector2d, Eigen::Vector2d>& a,
                   const std::pair<Eigen::Vector2d, Eigen::Vector2d>& b,
                   double tol) {
  return (a.first.x() <= b.second.x() + tol) &&
         (b.first.x() <= a.second.x() + tol) &&
         (a.first.y() <= b.second.y() + tol) &&
         (b.first.y() <= a.second.y() + tol);
}

// Sorts interface nodes by arc-length coordinate along the line through the
// extreme points of the slave edge set.
void sort_along_line(const Mesh& mesh, const Eigen::Vector2d& origin,
                     const Eigen::Vector2d& dir, std::vector<int>& nodes) {
  std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
    return dir.dot(mesh.nodes[a] - origin) < dir.dot(mesh.nodes[b] - origin);
  });
}

}  // namespace

std::string SystemLayout::hash() const {
  // FNV-1a over a canonical description string.
  std::ostringstream desc;
  for (const auto& s : subs) {
    desc << 's' << s.dof_offset << ':' << s.dof_count << ':'
         << s.internal_dofs.size() << ':' << s.contact_dofs.size() << ';';
  }
  for (const auto& itf : interfaces) {
    desc << 'i' << itf.master_sub << ':' << itf.slave_sub << ':';
    for (int n : itf.slave_nodes) desc << n << ',';
    desc << ':';
    for (int n : itf.master_nodes) desc << n << ',';
    desc << ';';
  }
  std::uint64_t h = 14695981039346656037ull;
  for (char c : desc.str()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

SystemLayout build_layout(std::span<const Mesh> substructures,
                          std::span<const InterfaceSpec> interfaces) {
  SystemLayout layout;
  const int n_subs = static_cast<int>(substructures.size());

  layout.subs.resize(n_subs);
  int offset = 0;
  for (int s = 0; s < n_subs; ++s) {
    layout.subs[s].dof_offset = offset;
    layout.subs[s].dof_count = substructures[s].dof_count();
    offset += layout.subs[s].dof_count;
  }
  layout.total_dofs = offset;

  // Gap tolerance scales with the diagonal of the whole system.
  Eigen::Vector2d lo(std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::max());
  Eigen::Vector2d hi = -lo;
  for (const auto& mesh : substructures) {
    auto [mlo, mhi] = mesh.bounding_box();
    lo = lo.cwiseMin(mlo);
    hi = hi.cwiseMax(mhi);
  }
  const double gap_tol = 1e-8 * (hi - lo).norm();

  layout.interfaces.resize(interfaces.size());
  for (std::size_t j = 0; j < interfaces.size(); ++j) {
    const auto& spec = interfaces[j];
    if (spec.sub_a < 0 || spec.sub_a >= n_subs || spec.sub_b < 0 ||
        spec.sub_b >= n_subs)
      throw LayoutError("interface " + std::to_string(j) +
                        ": substructure index out of range");
    const Mesh& mesh_a = substructures[spec.sub_a];
    const Mesh& mesh_b = substructures[spec.sub_b];
    const auto& edges_a = mesh_a.edge_set(spec.edge_set_a);
    const auto& edges_b = mesh_b.edge_set(spec.edge_set_b);
    if (edges_a.empty() || edges_b.empty())
      throw LayoutError("interface " + std::to_string(j) +
                        ": empty edge set");

    if (!boxes_overlap(edge_set_bbox(mesh_a, edges_a),
                       edge_set_bbox(mesh_b, edges_b), gap_tol))
      throw InterfaceError("interface " + std::to_string(j) +
                           ": edge sets do not overlap");

    const auto nodes_a = mesh_a.edge_set_nodes(spec.edge_set_a);
    const auto nodes_b = mesh_b.edge_set_nodes(spec.edge_set_b);

    // More interface nodes -> slave; ties -> lower substructure index.
    bool a_is_slave;
    if (nodes_a.size() != nodes_b.size())
      a_is_slave = nodes_a.size() > nodes_b.size();
    else
      a_is_slave = spec.sub_a < spec.sub_b;

    auto& itf = layout.interfaces[j];
    if (a_is_slave) {
      itf.slave_sub = spec.sub_a;
      itf.slave_edge_set = spec.edge_set_a;
      itf.master_sub = spec.sub_b;
      itf.master_edge_set = spec.edge_set_b;
      itf.slave_edges = edges_a;
      itf.master_edges = edges_b;
      itf.slave_all_nodes = nodes_a;
      itf.master_all_nodes = nodes_b;
    } else {
      itf.slave_sub = spec.sub_b;
      itf.slave_edge_set = spec.edge_set_b;
      itf.master_sub = spec.sub_a;
      itf.master_edge_set = spec.edge_set_a;
      itf.slave_edges = edges_b;
      itf.master_edges = edges_a;
      itf.slave_all_nodes = nodes_b;
      itf.master_all_nodes = nodes_a;
    }
    if (itf.slave_sub == itf.master_sub)
      throw LayoutError("interface " + std::to_string(j) +
                        ": both sides on one substructure");

    // Line frame from the slave side extremes.
    const Mesh& smesh = substructures[itf.slave_sub];
    Eigen::Vector2d p0 = smesh.nodes[itf.slave_all_nodes.front()];
    Eigen::Vector2d p1 = p0;
    for (int n : itf.slave_all_nodes) {
      const auto& x = smesh.nodes[n];
      if (x.x() < p0.x() || (x.x() == p0.x() && x.y() < p0.y())) p0 = x;
      if (x.x() > p1.x() || (x.x() == p1.x() && x.y() > p1.y())) p1 = x;
    }
    const double len = (p1 - p0).norm();
    if (!(len > 0.0))
      throw InterfaceError("interface " + std::to_string(j) +
                           ": degenerate slave edge set");
    itf.line_origin = p0;
    itf.line_dir = (p1 - p0) / len;

    sort_along_line(smesh, itf.line_origin, itf.line_dir,
                    itf.slave_all_nodes);
    sort_along_line(substructures[itf.master_sub], itf.line_origin,
                    itf.line_dir, itf.master_all_nodes);
  }

  // Node ownership: a node on several interfaces of one substructure belongs
  // to the lowest-indexed of them.
  std::vector<std::map<int, int>> owner(n_subs);  // node -> interface
  for (std::size_t j = 0; j < layout.interfaces.size(); ++j) {
    auto& itf = layout.interfaces[j];
    for (int n : itf.slave_all_nodes)
      owner[itf.slave_sub].try_emplace(n, static_cast<int>(j));
    for (int n : itf.master_all_nodes)
      owner[itf.master_sub].try_emplace(n, static_cast<int>(j));
  }

  for (std::size_t j = 0; j < layout.interfaces.size(); ++j) {
    auto& itf = layout.interfaces[j];
    itf.slave_owned.assign(itf.slave_all_nodes.size(), 0);
    itf.master_owned.assign(itf.master_all_nodes.size(), 0);
    for (std::size_t k = 0; k < itf.slave_all_nodes.size(); ++k) {
      const int n = itf.slave_all_nodes[k];
      if (owner[itf.slave_sub].at(n) == static_cast<int>(j)) {
        itf.slave_owned[k] = 1;
        itf.slave_nodes.push_back(n);
      } else if (k != 0 && k + 1 != itf.slave_all_nodes.size()) {
        // Only interface endpoints may be claimed by another interface.
        throw LayoutError("interface " + std::to_string(j) +
                          ": interior slave node " + std::to_string(n) +
                          " already slave of interface " +
                          std::to_string(owner[itf.slave_sub].at(n)));
      }
    }
    if (itf.slave_nodes.empty())
      throw LayoutError("interface " + std::to_string(j) +
                        ": no owned slave nodes remain");
    for (std::size_t k = 0; k < itf.master_all_nodes.size(); ++k) {
      const int n = itf.master_all_nodes[k];
      if (owner[itf.master_sub].at(n) == static_cast<int>(j)) {
        itf.master_owned[k] = 1;
        itf.master_nodes.push_back(n);
      }
    }
    if (itf.master_nodes.empty())
      throw LayoutError("interface " + std::to_string(j) +
                        ": no owned master nodes remain");
  }

  // Contact DOFs of a substructure: both components of every node it has on
  // any of its interfaces.
  for (int s = 0; s < n_subs; ++s) {
    std::set<int> contact;
    for (const auto& [node, itf] : owner[s]) {
      (void)itf;
      contact.insert(2 * node);
      contact.insert(2 * node + 1);
    }
    auto& sub = layout.subs[s];
    sub.contact_dofs.assign(contact.begin(), contact.end());
    sub.internal_dofs.reserve(sub.dof_count - sub.contact_dofs.size());
    for (int d = 0; d < sub.dof_count; ++d)
      if (!contact.count(d)) sub.internal_dofs.push_back(d);
  }

  return layout;
}

}  // namespace cbmor
