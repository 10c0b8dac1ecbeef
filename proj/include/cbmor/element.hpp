// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_ELEMENT_HPP
#define CBMOR_ELEMENT_HPP

#include <Eigen/Core>

#include "cbmor/material.hpp"

namespace cbmor {

using ElementCoords = Eigen::Matrix<double, 4, 2>;  // one node per row
using ElementVector = Eigen::Matrix<double, 8, 1>;  // (ux0, uy0, ..., uy3)
using ElementMatrix = Eigen::Matrix<double, 8, 8>;

struct ElementResult {
  ElementVector residual;
  ElementMatrix tangent;
};

/// Total-Lagrangian residual and consistent tangent of a 4-node plane-strain
/// quad, 2x2 Gauss quadrature. body_force is force per unit reference volume.
/// Throws ElementInversionError carrying element_id when det F <= 0 at a
/// Gauss point.
ElementResult element_residual_tangent(
    const ElementCoords& coords, const ElementVector& u,
    const NeoHookeMaterial& material,
    const Eigen::Vector2d& body_force = Eigen::Vector2d::Zero(),
    int element_id = -1);

/// Deformation gradient at a reference point (xi, eta), for tests and
/// stress post-processing.
Eigen::Matrix2d element_deformation_gradient(const ElementCoords& coords,
                                             const ElementVector& u,
                                             double xi, double eta);

}  // namespace cbmor

#endif
