// SPDX-License-Identifier: Apache-2.0

#include "cbmor/element.hpp"

#include <cmath>

#include "cbmor/errors.hpp"

namespace cbmor {

namespace {

struct ShapeDerivs {
  Eigen::Vector4d N;
  Eigen::Matrix<double, 4, 2> dN_dxi;
};

ShapeDerivs quad_shapes(double xi, double eta) {
  ShapeDerivs s;
  const double sx[4] = {-1.0, 1.0, 1.0, -1.0};
  const double sy[4] = {-1.0, -1.0, 1.0, 1.0};
  for (int a = 0; a < 4; ++a) {
    s.N(a) = 0.25 * (1.0 + sx[a] * xi) * (1.0 + sy[a] * eta);
    s.dN_dxi(a, 0) = 0.25 * sx[a] * (1.0 + sy[a] * eta);
    s.dN_dxi(a, 1) = 0.25 * sy[a] * (1.0 + sx[a] * xi);
  }
  return s;
}

// Gradient of the shape functions w.r.t. reference coordinates and the
// reference Jacobian determinant.
double reference_gradients(const ElementCoords& coords, double xi, double eta,
                           Eigen::Matrix<double, 4, 2>& dN_dX,
                           Eigen::Vector4d* N = nullptr) {
  const ShapeDerivs s = quad_shapes(xi, eta);
  const Eigen::Matrix2d J = coords.transpose() * s.dN_dxi;  // dX/dxi
  const double detJ = J.determinant();
  dN_dX = s.dN_dxi * J.inverse();
  if (N) *N = s.N;
  return detJ;
}

}  // namespace

Eigen::Matrix2d element_deformation_gradient(const ElementCoords& coords,
                                             const ElementVector& u,
                                             double xi, double eta) {
  Eigen::Matrix<double, 4, 2> dN_dX;
  reference_gradients(coords, xi, eta, dN_dX);
  Eigen::Matrix2d F = Eigen::Matrix2d::Identity();
  for (int a = 0; a < 4; ++a)
    F += u.segment<2>(2 * a) * dN_dX.row(a);
  return F;
}

ElementResult element_residual_tangent(const ElementCoords& coords,
                                       const ElementVector& u,
                                       const NeoHookeMaterial& material,
                                       const Eigen::Vector2d& body_force,
                                       int element_id) {
  ElementResult out;
  out.residual.setZero();
  out.tangent.setZero();

  const double g = 1.0 / std::sqrt(3.0);
  const double gp[2] = {-g, g};

  for (double eta : gp) {
    for (double xi : gp) {
      Eigen::Matrix<double, 4, 2> dN_dX;
      Eigen::Vector4d N;
      const double detJ = reference_gradients(coords, xi, eta, dN_dX, &N);
      if (!(detJ > 0.0))
        throw ElementInversionError(
            element_id, "element " + std::to_string(element_id) +
                            ": non-positive reference Jacobian");

      Eigen::Matrix2d F = Eigen::Matrix2d::Identity();
      for (int a = 0; a < 4; ++a)
        F += u.segment<2>(2 * a) * dN_dX.row(a);
      if (!(F.determinant() > 0.0))
        throw ElementInversionError(
            element_id, "element " + std::to_string(element_id) +
                            ": deformation gradient inverted");

      StressTangent st;
      try {
        st = pk2_stress_and_tangent(F, material);
      } catch (const ElementInversionError&) {
        throw ElementInversionError(
            element_id, "element " + std::to_string(element_id) +
                            ": deformation gradient inverted");
      }

      // Strain-displacement matrix for Voigt [E11, E22, 2E12].
      Eigen::Matrix<double, 3, 8> B;
      for (int a = 0; a < 4; ++a) {
        const double dN1 = dN_dX(a, 0), dN2 = dN_dX(a, 1);
        for (int i = 0; i < 2; ++i) {
          B(0, 2 * a + i) = F(i, 0) * dN1;
          B(1, 2 * a + i) = F(i, 1) * dN2;
          B(2, 2 * a + i) = F(i, 0) * dN2 + F(i, 1) * dN1;
        }
      }

      const double w = detJ;  // 2x2 Gauss weights are 1
      out.residual += w * B.transpose() * st.stress;
      out.tangent += w * B.transpose() * st.tangent * B;

      // Geometric stiffness: (dN_a . S dN_b) I2
      const Eigen::Matrix2d S = (Eigen::Matrix2d() << st.stress(0),
                                 st.stress(2), st.stress(2), st.stress(1))
                                    .finished();
      const Eigen::Matrix4d G = dN_dX * S * dN_dX.transpose();
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          out.tangent(2 * a, 2 * b) += w * G(a, b);
          out.tangent(2 * a + 1, 2 * b + 1) += w * G(a, b);
        }

      // Body force contribution (external): G = R - F_ext.
      for (int a = 0; a < 4; ++a)
        out.residual.segment<2>(2 * a) -= w * N(a) * body_force;
    }
  }
  return out;
}

}  // namespace cbmor
