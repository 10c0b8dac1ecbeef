// SPDX-License-Identifier: Apache-2.0

#include "cbmor/pod.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "cbmor/errors.hpp"

namespace cbmor {

void SnapshotMatrix::append(const Eigen::VectorXd& state,
                            const SnapshotProvenance& from) {
  if (columns.size() == 0) {
    columns.resize(state.size(), 1);
    columns.col(0) = state;
  } else {
    if (state.size() != columns.rows())
      throw LayoutError("snapshot length does not match matrix");
    columns.conservativeResize(Eigen::NoChange, columns.cols() + 1);
    columns.col(columns.cols() - 1) = state;
  }
  provenance.push_back(from);
}

int pod_rank(const Eigen::VectorXd& singular_values) {
  if (singular_values.size() == 0) return 0;
  const double cutoff = 1e-12 * singular_values(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i)
    if (singular_values(i) > cutoff) ++rank;
  return rank;
}

int default_mode_count(const Eigen::VectorXd& singular_values) {
  if (singular_values.size() == 0) return 0;
  const double cutoff = 1e-8 * singular_values(0);
  for (Eigen::Index m = 1; m < singular_values.size(); ++m)
    if (singular_values(m) < cutoff) return static_cast<int>(m);
  return static_cast<int>(singular_values.size());
}

namespace {

void apply_sign_convention(Eigen::MatrixXd& modes) {
  for (Eigen::Index c = 0; c < modes.cols(); ++c) {
    Eigen::Index imax = 0;
    modes.col(c).cwiseAbs().maxCoeff(&imax);
    if (modes(imax, c) < 0.0) modes.col(c) = -modes.col(c);
  }
}

}  // namespace

PodBasis compute_pod(const SnapshotMatrix& snapshots, int mode_count) {
  if (snapshots.count() == 0)
    throw ConfigError("POD requested on an empty snapshot matrix");
  if (mode_count < 1)
    throw ConfigError("POD mode count must be at least 1");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(snapshots.columns, Eigen::ComputeThinU);

  PodBasis basis;
  basis.singular_values = svd.singularValues();
  const int rank = pod_rank(basis.singular_values);
  basis.mode_count = std::min(mode_count, rank);
  basis.truncated_to_rank = mode_count > rank;
  basis.modes = svd.matrixU().leftCols(basis.mode_count);
  apply_sign_convention(basis.modes);
  return basis;
}

Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& m,
                                       double drop_tol) {
  Eigen::MatrixXd q(m.rows(), m.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::VectorXd v = m.col(c);
    const double norm0 = v.norm();
    // Two Gram-Schmidt sweeps keep orthogonality near machine precision.
    for (int sweep = 0; sweep < 2; ++sweep)
      for (Eigen::Index k = 0; k < kept; ++k)
        v -= q.col(k).dot(v) * q.col(k);
    const double norm = v.norm();
    if (norm <= drop_tol * std::max(norm0, 1e-300)) continue;
    q.col(kept++) = v / norm;
  }
  Eigen::MatrixXd out = q.leftCols(kept);
  apply_sign_convention(out);
  return out;
}

SplitBasis split_basis(const Eigen::MatrixXd& modes,
                       const SystemLayout& layout, int substructure,
                       bool interface_reduction) {
  if (substructure < 0 ||
      substructure >= static_cast<int>(layout.subs.size()))
    throw LayoutError("split_basis: substructure out of range");
  const auto& sub = layout.subs[substructure];
  if (modes.rows() != sub.dof_count)
    throw LayoutError("split_basis: basis rows do not match substructure");

  SplitBasis split;
  Eigen::MatrixXd internal_rows(sub.internal_dofs.size(), modes.cols());
  for (std::size_t i = 0; i < sub.internal_dofs.size(); ++i)
    internal_rows.row(i) = modes.row(sub.internal_dofs[i]);
  split.internal = orthonormalize_columns(internal_rows);

  const Eigen::Index n_contact =
      static_cast<Eigen::Index>(sub.contact_dofs.size());
  if (!interface_reduction) {
    split.contact = Eigen::MatrixXd::Identity(n_contact, n_contact);
    return split;
  }
  if (n_contact == 0) {
    split.contact.resize(0, 0);
    return split;
  }
  Eigen::MatrixXd contact_rows(n_contact, modes.cols());
  for (Eigen::Index i = 0; i < n_contact; ++i)
    contact_rows.row(i) = modes.row(sub.contact_dofs[i]);
  split.contact = orthonormalize_columns(contact_rows);
  return split;
}

}  // namespace cbmor
