// SPDX-License-Identifier: Apache-2.0

#include "cbmor/material.hpp"

#include <cmath>

#include "cbmor/errors.hpp"

namespace cbmor {

NeoHookeMaterial NeoHookeMaterial::from_lame(double lambda, double mu) {
  NeoHookeMaterial m{lambda, mu};
  if (!(m.mu > 0.0))
    throw ConfigError("material: mu must be positive");
  if (!(m.lambda + 2.0 * m.mu / 3.0 > 0.0))
    throw ConfigError("material: bulk modulus must be positive");
  return m;
}

NeoHookeMaterial NeoHookeMaterial::from_youngs_poisson(double E, double nu) {
  if (!(E > 0.0) || !(nu > -1.0) || !(nu < 0.5))
    throw ConfigError("material: need E > 0 and -1 < nu < 0.5");
  const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = E / (2.0 * (1.0 + nu));
  return from_lame(lambda, mu);
}

double NeoHookeMaterial::youngs_modulus() const {
  return mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu);
}

double NeoHookeMaterial::poisson_ratio() const {
  return lambda / (2.0 * (lambda + mu));
}

StressTangent pk2_stress_and_tangent(const Eigen::Matrix2d& F,
                                     const NeoHookeMaterial& material) {
  const double J = F.determinant();
  if (!(J > 0.0))
    throw ElementInversionError(-1, "non-positive deformation Jacobian");

  const Eigen::Matrix2d C = F.transpose() * F;
  const Eigen::Matrix2d Ci = C.inverse();
  const double logJ = std::log(J);
  const double lambda = material.lambda, mu = material.mu;

  // S = mu (I - C^-1) + lambda ln J C^-1
  const Eigen::Matrix2d S =
      mu * (Eigen::Matrix2d::Identity() - Ci) + lambda * logJ * Ci;

  // C_ijkl = lambda Ci_ij Ci_kl + (mu - lambda ln J)(Ci_ik Ci_jl + Ci_il Ci_jk)
  const double c = mu - lambda * logJ;
  auto comp = [&](int i, int jj, int k, int l) {
    return lambda * Ci(i, jj) * Ci(k, l) +
           c * (Ci(i, k) * Ci(jj, l) + Ci(i, l) * Ci(jj, k));
  };

  StressTangent out;
  out.stress << S(0, 0), S(1, 1), S(0, 1);
  // Voigt strain [E11, E22, 2E12]: columns already carry the shear factor.
  const int vi[3] = {0, 1, 0};
  const int vj[3] = {0, 1, 1};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      out.tangent(a, b) = comp(vi[a], vj[a], vi[b], vj[b]);
  return out;
}

Eigen::Matrix2d pk2_stress(const Eigen::Matrix2d& F,
                           const NeoHookeMaterial& material) {
  const auto st = pk2_stress_and_tangent(F, material);
  Eigen::Matrix2d S;
  S << st.stress(0), st.stress(2), st.stress(2), st.stress(1);
  return S;
}

}  // namespace cbmor
