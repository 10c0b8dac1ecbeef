// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_MATERIAL_HPP
#define CBMOR_MATERIAL_HPP

#include <Eigen/Core>

namespace cbmor {

/// Compressible Neo-Hooke in plane strain, units MPa.
/// W = mu/2 (tr C - 2) - mu ln J + lambda/2 (ln J)^2
struct NeoHookeMaterial {
  double lambda = 0.0;
  double mu = 0.0;

  static NeoHookeMaterial from_lame(double lambda, double mu);
  static NeoHookeMaterial from_youngs_poisson(double E, double nu);

  double youngs_modulus() const;
  double poisson_ratio() const;
};

/// Second Piola-Kirchhoff stress in Voigt order [S11, S22, S12] and the
/// material tangent dS/dE for Voigt strain [E11, E22, 2 E12].
struct StressTangent {
  Eigen::Vector3d stress;
  Eigen::Matrix3d tangent;
};

/// Evaluates S(F) and the consistent tangent. Throws ElementInversionError
/// (element id -1) if det F <= 0.
StressTangent pk2_stress_and_tangent(const Eigen::Matrix2d& deformation_gradient,
                                     const NeoHookeMaterial& material);

/// Full 2x2 S tensor, convenience for tests.
Eigen::Matrix2d pk2_stress(const Eigen::Matrix2d& deformation_gradient,
                           const NeoHookeMaterial& material);

}  // namespace cbmor

#endif
