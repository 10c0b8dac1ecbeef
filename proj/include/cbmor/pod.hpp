// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_POD_HPP
#define CBMOR_POD_HPP

#include <vector>

#include <Eigen/Core>

#include "cbmor/layout.hpp"

namespace cbmor {

/// Columns are substructure displacement states; provenance keeps the sample
/// point and load step each column came from.
struct SnapshotProvenance {
  int sample_id = -1;
  int load_step = -1;
};

struct SnapshotMatrix {
  Eigen::MatrixXd columns;
  std::vector<SnapshotProvenance> provenance;

  void append(const Eigen::VectorXd& state, const SnapshotProvenance& from);
  Eigen::Index rows() const { return columns.rows(); }
  Eigen::Index count() const { return columns.cols(); }
};

struct PodBasis {
  Eigen::MatrixXd modes;            // n x m, orthonormal columns
  Eigen::VectorXd singular_values;  // all of them, descending
  int mode_count = 0;
  bool truncated_to_rank = false;   // requested m exceeded the rank
};

/// Leading left singular vectors of the snapshot matrix. Sign convention:
/// the entry of largest magnitude of each mode is positive. Requesting more
/// modes than the numerical rank truncates and flags the result.
PodBasis compute_pod(const SnapshotMatrix& snapshots, int mode_count);

/// Numerical rank at the default relative threshold 1e-12.
int pod_rank(const Eigen::VectorXd& singular_values);

/// Smallest m with sigma_{m+1}/sigma_1 < 1e-8; used when no mode count is
/// given explicitly.
int default_mode_count(const Eigen::VectorXd& singular_values);

/// Modified Gram-Schmidt with column dropping: orthonormal columns spanning
/// the input in original column order.
Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& m,
                                       double drop_tol = 1e-10);

struct SplitBasis {
  Eigen::MatrixXd internal;   // rows at internal DOFs, re-orthonormalized
  Eigen::MatrixXd contact;    // rows at contact DOFs, or identity
};

/// Row selection of a substructure basis into internal/contact blocks per the
/// layout. With interface_reduction off the contact block is the identity.
/// Both selected blocks are re-orthonormalized.
SplitBasis split_basis(const Eigen::MatrixXd& modes,
                       const SystemLayout& layout, int substructure,
                       bool interface_reduction);

}  // namespace cbmor

#endif
