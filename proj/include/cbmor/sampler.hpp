// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_SAMPLER_HPP
#define CBMOR_SAMPLER_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cbmor/coupled.hpp"
#include "cbmor/pod.hpp"
#include "cbmor/rng.hpp"

namespace cbmor {

/// Boundary-condition parametrization of one controlled edge: a translation
/// of the constrained component(s) plus a rotation of the edge about its
/// midpoint. Parameters are drawn from truncated normals over the given
/// ranges (mean midpoint, sigma = width/4).
struct EdgeParametrization {
  int sub = 0;
  std::string edge_set;
  int component = 0;  // 0 x, 1 y, -1 both
  std::array<double, 2> translation_x{0.0, 0.0};  // active unless component==1
  std::array<double, 2> translation_y{0.0, 0.0};  // active unless component==0
  std::array<double, 2> rotation_deg{0.0, 0.0};

  int param_count() const { return (component == -1 ? 2 : 1) + 1; }
};

using BcParametrization = std::vector<EdgeParametrization>;

int parameter_count(const BcParametrization& param);

/// One draw of the full parameter vector, edge by edge in declared order
/// (translation x, translation y, rotation within each edge).
std::vector<double> draw_sample(const BcParametrization& param,
                                RandomStream& rng);

/// Corner of the parameter box: all lows (corner 0) or all highs (corner 1).
std::vector<double> corner_sample(const BcParametrization& param, int corner);

/// Expands a parameter vector into per-substructure Dirichlet maps. With
/// active_edge >= 0 only that edge receives its parameters; the other
/// controlled edges are pinned to zero on their constrained components.
std::vector<DirichletMap> bc_from_parameters(const std::vector<double>& alpha,
                                             const std::vector<Mesh>& meshes,
                                             const BcParametrization& param,
                                             int active_edge = -1);

struct SamplerConfig {
  int n_samples = 20;
  double epsilon = 1.0;  // full-residual tolerance [N]
  int load_steps = 3;
  std::uint64_t seed = 0;
  /// Apply the drawn parameters to each controlled edge in turn, the others
  /// held at zero; otherwise one configuration drives all edges at once.
  bool two_sided = false;
};

/// The boundary value problem snapshots are computed on: the base scenario
/// (fixed loads, interfaces, solver settings) plus the controlled edges.
struct SamplingProblem {
  CoupledScenario scenario;
  int sampled_sub = 0;
  BcParametrization parametrization;
};

struct SampleLogEntry {
  int sample_id = 0;
  std::vector<double> alpha;
  double criterion_residual = 0.0;
  bool triggered_fom = false;
  bool fom_failed = false;  // sample skipped, no snapshots appended
  int new_mode_count = 0;
};

struct SamplingResult {
  SnapshotMatrix snapshots;
  PodBasis basis;
  std::vector<SampleLogEntry> log;
  int bootstrap_columns = 0;
  int fom_solves = 0;
};

/// Residual-screened random sampling: each sample is first solved with the
/// current basis; only when the full residual of that reduced solution
/// reaches epsilon is a full-order solve run, the snapshot matrix extended
/// and the mode count re-bisected. The final basis is recomputed from the
/// complete snapshot matrix.
SamplingResult run_sampling(const SamplingProblem& problem,
                            const SamplerConfig& config);

/// Full residual of the reduced solution at alpha using the leading
/// mode_count columns of the snapshot POD; infinity when the reduced solve
/// fails.
double sampling_criterion(const SamplingProblem& problem,
                          const SamplerConfig& config,
                          const Eigen::MatrixXd& modes,
                          const std::vector<double>& alpha);

struct BisectionResult {
  int mode_count = 0;
  bool criterion_met = false;
};

/// Smallest probed m in [1, rank] with residual_at(m) <= epsilon, probing by
/// bisection; walks up linearly if the bisection candidate fails a re-check.
BisectionResult bisect_mode_count(const std::function<double(int)>& residual_at,
                                  int rank, double epsilon);

/// Problem-bound overload: bisects over POD bases of the snapshot matrix.
BisectionResult bisect_mode_count(const SamplingProblem& problem,
                                  const SamplerConfig& config,
                                  const SnapshotMatrix& snapshots,
                                  const std::vector<double>& alpha,
                                  double epsilon);

/// CSV: sample_id, alpha components, criterion_residual, triggered_fom,
/// new_mode_count.
void write_sampling_log(std::ostream& os,
                        const std::vector<SampleLogEntry>& log);

}  // namespace cbmor

#endif
