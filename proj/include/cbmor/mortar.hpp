// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_MORTAR_HPP
#define CBMOR_MORTAR_HPP

#include <vector>

#include <Eigen/Core>

#include "cbmor/layout.hpp"
#include "cbmor/mesh.hpp"

namespace cbmor {

/// Coefficients of the dual Lagrange-multiplier shapes on one slave edge:
/// N_hat_j = A(j,k) N_k with A = B C^-1, b_jk = delta_jk int N_k,
/// c_jk = int N_j N_k.
struct DualShapeCoefficients {
  Eigen::Matrix2d A;
};

DualShapeCoefficients dual_coefficients(const Eigen::Vector2d& a,
                                        const Eigen::Vector2d& b);

/// Closed interval on the interface line owned by one slave/master edge pair.
struct Segment {
  int slave_edge = -1;
  int master_edge = -1;
  double s_lo = 0.0;
  double s_hi = 0.0;

  double length() const { return s_hi - s_lo; }
};

/// Clips slave against master edge intervals given in interface line
/// coordinates. Throws InterfaceError when a slave edge has no overlap with
/// the master side.
std::vector<Segment> build_segments(
    const std::vector<std::pair<double, double>>& slave_intervals,
    const std::vector<std::pair<double, double>>& master_intervals,
    double tol);

/// Node-level mortar operators of one interface, restricted to the nodes the
/// interface owns. Scalar weights; both displacement components share them.
struct MortarOperators {
  Eigen::VectorXd D;   // diagonal entries, one per owned slave node [mm]
  Eigen::MatrixXd M;   // owned slave x owned master [mm]
  Eigen::MatrixXd P;   // D^-1 M
  std::vector<Segment> segments;
  double max_off_diagonal = 0.0;  // largest |D_ij|, i != j, before restriction

  /// P expanded to displacement DOFs (x and y interleaved per node).
  Eigen::MatrixXd dof_coupling() const;
};

/// Segment-based integration of D and M with 3-point Gauss per segment,
/// evaluated on the reference configuration.
MortarOperators assemble_mortar(const Mesh& slave_mesh,
                                const Mesh& master_mesh,
                                const InterfaceLayout& interface);

}  // namespace cbmor

#endif
