// SPDX-License-Identifier: Apache-2.0

#include "cbmor/mortar.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cbmor/errors.hpp"

namespace cbmor {

namespace {

// 3-point Gauss on [-1, 1].
constexpr double kGaussX[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGaussW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

DualShapeCoefficients dual_coefficients(const Eigen::Vector2d& a,
                                        const Eigen::Vector2d& b) {
  const double len = (b - a).norm();
  if (!(len > 0.0)) throw InterfaceError("degenerate slave edge");

  Eigen::Matrix2d B = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d C = Eigen::Matrix2d::Zero();
  for (int g = 0; g < 3; ++g) {
    const double xi = kGaussX[g];
    const double w = kGaussW[g] * 0.5 * len;
    const Eigen::Vector2d N(0.5 * (1.0 - xi), 0.5 * (1.0 + xi));
    B(0, 0) += w * N(0);
    B(1, 1) += w * N(1);
    C += w * N * N.transpose();
  }
  DualShapeCoefficients coeff;
  coeff.A = B * C.inverse();
  return coeff;
}

std::vector<Segment> build_segments(
    const std::vector<std::pair<double, double>>& slave_intervals,
    const std::vector<std::pair<double, double>>& master_intervals,
    double tol) {
  std::vector<Segment> segments;
  for (std::size_t es = 0; es < slave_intervals.size(); ++es) {
    const auto [s_lo, s_hi] = slave_intervals[es];
    double covered = 0.0;
    for (std::size_t em = 0; em < master_intervals.size(); ++em) {
      const auto [m_lo, m_hi] = master_intervals[em];
      const double lo = std::max(s_lo, m_lo);
      const double hi = std::min(s_hi, m_hi);
      if (hi - lo > tol) {
        segments.push_back({static_cast<int>(es), static_cast<int>(em), lo, hi});
        covered += hi - lo;
      }
    }
    if (covered <= tol)
      throw InterfaceError("slave edge " + std::to_string(es) +
                           " lies outside the master side");
  }
  std::sort(segments.begin(), segments.end(), [](const auto& a, const auto& b) {
    return a.s_lo < b.s_lo || (a.s_lo == b.s_lo && a.slave_edge < b.slave_edge);
  });
  if (segments.empty()) throw InterfaceError("interface has no overlap");
  return segments;
}

Eigen::MatrixXd MortarOperators::dof_coupling() const {
  Eigen::MatrixXd Pd = Eigen::MatrixXd::Zero(2 * P.rows(), 2 * P.cols());
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      Pd(2 * i, 2 * j) = P(i, j);
      Pd(2 * i + 1, 2 * j + 1) = P(i, j);
    }
  return Pd;
}

MortarOperators assemble_mortar(const Mesh& slave_mesh,
                                const Mesh& master_mesh,
                                const InterfaceLayout& interface) {
  const Eigen::Vector2d& origin = interface.line_origin;
  const Eigen::Vector2d& dir = interface.line_dir;
  const Eigen::Vector2d normal(-dir.y(), dir.x());

  const auto coord = [&](const Mesh& mesh, int node) {
    return dir.dot(mesh.nodes[node] - origin);
  };

  // Interfaces are straight in the reference configuration; verify.
  double span = 0.0;
  for (int n : interface.slave_all_nodes)
    span = std::max(span, std::abs(coord(slave_mesh, n)));
  for (int n : interface.master_all_nodes)
    span = std::max(span, std::abs(coord(master_mesh, n)));
  const double tol = 1e-8 * std::max(span, 1.0);
  for (int n : interface.slave_all_nodes)
    if (std::abs(normal.dot(slave_mesh.nodes[n] - origin)) > tol)
      throw InterfaceError("slave interface nodes are not collinear");
  for (int n : interface.master_all_nodes)
    if (std::abs(normal.dot(master_mesh.nodes[n] - origin)) > tol)
      throw InterfaceError("master interface nodes are not collinear");

  std::vector<std::pair<double, double>> slave_iv, master_iv;
  for (const auto& [a, b] : interface.slave_edges) {
    const double sa = coord(slave_mesh, a), sb = coord(slave_mesh, b);
    slave_iv.emplace_back(std::min(sa, sb), std::max(sa, sb));
  }
  for (const auto& [a, b] : interface.master_edges) {
    const double sa = coord(master_mesh, a), sb = coord(master_mesh, b);
    master_iv.emplace_back(std::min(sa, sb), std::max(sa, sb));
  }

  MortarOperators ops;
  ops.segments = build_segments(slave_iv, master_iv, tol);

  // Full matrices over every edge node, restricted to owned nodes afterwards.
  std::map<int, int> slave_index, master_index;
  for (std::size_t k = 0; k < interface.slave_all_nodes.size(); ++k)
    slave_index[interface.slave_all_nodes[k]] = static_cast<int>(k);
  for (std::size_t k = 0; k < interface.master_all_nodes.size(); ++k)
    master_index[interface.master_all_nodes[k]] = static_cast<int>(k);

  const int ns = static_cast<int>(interface.slave_all_nodes.size());
  const int nm = static_cast<int>(interface.master_all_nodes.size());
  Eigen::MatrixXd D_full = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::MatrixXd M_full = Eigen::MatrixXd::Zero(ns, nm);

  std::vector<DualShapeCoefficients> dual;
  dual.reserve(interface.slave_edges.size());
  for (const auto& [a, b] : interface.slave_edges)
    dual.push_back(
        dual_coefficients(slave_mesh.nodes[a], slave_mesh.nodes[b]));

  for (const Segment& seg : ops.segments) {
    const auto& [sa, sb] = interface.slave_edges[seg.slave_edge];
    const auto& [ma, mb] = interface.master_edges[seg.master_edge];
    const double s_a = coord(slave_mesh, sa), s_b = coord(slave_mesh, sb);
    const double m_a = coord(master_mesh, ma), m_b = coord(master_mesh, mb);
    const Eigen::Matrix2d& A = dual[seg.slave_edge].A;

    const int rows[2] = {slave_index.at(sa), slave_index.at(sb)};
    const int cols[2] = {master_index.at(ma), master_index.at(mb)};

    for (int g = 0; g < 3; ++g) {
      const double s = 0.5 * (seg.s_lo + seg.s_hi) +
                       0.5 * kGaussX[g] * seg.length();
      const double w = kGaussW[g] * 0.5 * seg.length();

      // Linear interpolation in the line coordinate.
      const Eigen::Vector2d Ns((s_b - s) / (s_b - s_a),
                               (s - s_a) / (s_b - s_a));
      const Eigen::Vector2d Nm((m_b - s) / (m_b - m_a),
                               (s - m_a) / (m_b - m_a));
      const Eigen::Vector2d Nhat = A * Ns;

      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          D_full(rows[i], rows[j]) += w * Nhat(i) * Ns(j);
          M_full(rows[i], cols[j]) += w * Nhat(i) * Nm(j);
        }
      }
    }
  }

  // Dual shapes make D diagonal; anything beyond roundoff is a defect.
  const double d_max = D_full.diagonal().maxCoeff();
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j)
      if (i != j)
        ops.max_off_diagonal =
            std::max(ops.max_off_diagonal, std::abs(D_full(i, j)));
  if (ops.max_off_diagonal > 1e-12 * d_max)
    throw InterfaceError("mortar matrix D is not diagonal");

  std::vector<int> owned_rows, owned_cols;
  for (int k = 0; k < ns; ++k)
    if (interface.slave_owned[k]) owned_rows.push_back(k);
  for (int k = 0; k < nm; ++k)
    if (interface.master_owned[k]) owned_cols.push_back(k);

  const int nr = static_cast<int>(owned_rows.size());
  const int nc = static_cast<int>(owned_cols.size());
  ops.D.resize(nr);
  ops.M.resize(nr, nc);
  for (int i = 0; i < nr; ++i) {
    ops.D(i) = D_full(owned_rows[i], owned_rows[i]);
    if (!(ops.D(i) > 0.0))
      throw InterfaceError("non-positive mortar weight: orientation or "
                           "overlap defect at slave node " +
                           std::to_string(interface.slave_nodes[i]));
    for (int j = 0; j < nc; ++j)
      ops.M(i, j) = M_full(owned_rows[i], owned_cols[j]);
  }
  ops.P = ops.D.cwiseInverse().asDiagonal() * ops.M;
  return ops;
}

}  // namespace cbmor
