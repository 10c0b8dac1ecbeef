// SPDX-License-Identifier: Apache-2.0

#include "cbmor/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "cbmor/errors.hpp"
#include "cbmor/text_io.hpp"

namespace cbmor {

const std::vector<Edge>& Mesh::edge_set(const std::string& name) const {
  auto it = edge_sets.find(name);
  if (it == edge_sets.end()) throw MeshError("unknown edge set: " + name);
  return it->second;
}

std::vector<int> Mesh::edge_set_nodes(const std::string& name) const {
  std::set<int> uniq;
  for (const auto& [a, b] : edge_set(name)) {
    uniq.insert(a);
    uniq.insert(b);
  }
  return {uniq.begin(), uniq.end()};
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> Mesh::bounding_box() const {
  Eigen::Vector2d lo = nodes.front(), hi = nodes.front();
  for (const auto& x : nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  return {lo, hi};
}

Mesh generate_structured_quad_mesh(int nx, int ny, double lx, double ly,
                                   const Eigen::Vector2d& origin) {
  if (nx < 1 || ny < 1)
    throw MeshError("structured mesh needs nx, ny >= 1");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw MeshError("structured mesh needs positive lx, ly");

  Mesh mesh;
  const int nnx = nx + 1, nny = ny + 1;
  mesh.nodes.reserve(static_cast<std::size_t>(nnx) * nny);
  const auto nid = [nnx](int i, int j) { return i + j * nnx; };
  for (int j = 0; j < nny; ++j)
    for (int i = 0; i < nnx; ++i)
      mesh.nodes.emplace_back(origin.x() + lx * i / nx,
                              origin.y() + ly * j / ny);

  mesh.elements.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      mesh.elements.push_back(
          {nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)});

  auto& left = mesh.edge_sets["left"];
  auto& right = mesh.edge_sets["right"];
  for (int j = 0; j < ny; ++j) {
    left.emplace_back(nid(0, j), nid(0, j + 1));
    right.emplace_back(nid(nx, j), nid(nx, j + 1));
  }
  auto& bottom = mesh.edge_sets["bottom"];
  auto& top = mesh.edge_sets["top"];
  for (int i = 0; i < nx; ++i) {
    bottom.emplace_back(nid(i, 0), nid(i + 1, 0));
    top.emplace_back(nid(i, ny), nid(i + 1, ny));
  }
  return mesh;
}

namespace {

// Reference Jacobian determinant of a bilinear quad at (xi, eta).
double quad_jacobian(const Mesh& mesh, const std::array<int, 4>& conn,
                     double xi, double eta) {
  const double dxi[4] = {-0.25 * (1 - eta), 0.25 * (1 - eta),
                         0.25 * (1 + eta), -0.25 * (1 + eta)};
  const double deta[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi),
                          0.25 * (1 + xi), 0.25 * (1 - xi)};
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int a = 0; a < 4; ++a) {
    J.col(0) += dxi[a] * mesh.nodes[conn[a]];
    J.col(1) += deta[a] * mesh.nodes[conn[a]];
  }
  return J.determinant();
}

}  // namespace

void validate_mesh(const Mesh& mesh) {
  const int n = mesh.node_count();
  const double g = 1.0 / std::sqrt(3.0);
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (int a : mesh.elements[e])
      if (a < 0 || a >= n)
        throw MeshError("element " + std::to_string(e) +
                        " references node out of range");
    for (double xi : {-g, g})
      for (double eta : {-g, g})
        if (!(quad_jacobian(mesh, mesh.elements[e], xi, eta) > 0.0))
          throw MeshError("element " + std::to_string(e) +
                          " has non-positive reference Jacobian");
  }

  // Each edge-set pair must be an edge of exactly one element.
  std::map<std::pair<int, int>, int> boundary_count;
  for (const auto& conn : mesh.elements)
    for (int k = 0; k < 4; ++k) {
      int a = conn[k], b = conn[(k + 1) % 4];
      boundary_count[{std::min(a, b), std::max(a, b)}] += 1;
    }
  for (const auto& [name, edges] : mesh.edge_sets)
    for (const auto& [a, b] : edges) {
      auto it = boundary_count.find({std::min(a, b), std::max(a, b)});
      if (it == boundary_count.end() || it->second != 1)
        throw MeshError("edge set " + name + " contains (" +
                        std::to_string(a) + "," + std::to_string(b) +
                        ") which is not a boundary edge of exactly one "
                        "element");
    }
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "nodes " << mesh.node_count() << " elements " << mesh.element_count()
     << '\n';
  for (const auto& x : mesh.nodes)
    os << format_double(x.x()) << ' ' << format_double(x.y()) << '\n';
  for (const auto& conn : mesh.elements)
    os << conn[0] << ' ' << conn[1] << ' ' << conn[2] << ' ' << conn[3]
       << '\n';
  for (const auto& [name, edges] : mesh.edge_sets) {
    os << "set " << name << ' ' << edges.size() << '\n';
    for (const auto& [a, b] : edges) os << a << ' ' << b << '\n';
  }
}

Mesh read_mesh(std::istream& is) {
  std::string kw;
  int n = 0, m = 0;
  if (!(is >> kw >> n) || kw != "nodes")
    throw IoError("mesh header: expected `nodes <n>`");
  if (!(is >> kw >> m) || kw != "elements")
    throw IoError("mesh header: expected `elements <m>`");
  Mesh mesh;
  mesh.nodes.resize(n);
  for (auto& x : mesh.nodes)
    if (!(is >> x.x() >> x.y())) throw IoError("mesh nodes truncated");
  mesh.elements.resize(m);
  for (auto& conn : mesh.elements)
    if (!(is >> conn[0] >> conn[1] >> conn[2] >> conn[3]))
      throw IoError("mesh elements truncated");
  while (is >> kw) {
    if (kw != "set") throw IoError("mesh: expected `set`, got " + kw);
    std::string name;
    int k = 0;
    if (!(is >> name >> k)) throw IoError("mesh: malformed set header");
    auto& edges = mesh.edge_sets[name];
    edges.resize(k);
    for (auto& [a, b] : edges)
      if (!(is >> a >> b)) throw IoError("mesh: set " + name + " truncated");
  }
  return mesh;
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_mesh(os, mesh);
  if (!os) throw IoError("write failed: " + path);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  return read_mesh(is);
}

}  // namespace cbmor
