// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_REPORT_HPP
#define CBMOR_REPORT_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbmor/coupled.hpp"
#include "cbmor/pod.hpp"
#include "cbmor/rom.hpp"

namespace cbmor {

/// CSV with the exact columns
/// step, load_factor, displacement_mm, force_N, newton_iters, assembly_s,
/// solve_s.
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);
std::vector<CurvePoint> read_curve_csv(std::istream& is);
std::vector<CurvePoint> read_curve_csv_file(const std::string& path);

struct CompareMetrics {
  double max_rel_force_error = 0.0;  // relative to max |reference force|
  double l2_rel_force_error = 0.0;
  std::optional<double> max_rel_displacement_error;
};

/// Compares the force-displacement curves (and persisted states, when both
/// runs saved them) of two run directories sharing a load schedule.
CompareMetrics compare_runs(const std::string& reference_dir,
                            const std::string& test_dir);

/// Writes curve.csv, report.json and the per-substructure final states
/// (state_<i>.txt) into the output directory.
void write_run_artifacts(const std::string& out_dir, const std::string& model,
                         const RunResult& result, const DofCounts& counts,
                         double total_seconds,
                         const std::optional<CompareMetrics>& errors);

/// Basis file (text matrix) plus a JSON sidecar with mode count, singular
/// values, the substructure it belongs to and the layout fingerprint.
void write_basis(const std::string& path_prefix, const PodBasis& basis,
                 const std::string& substructure, const std::string& layout_hash);
PodBasis read_basis(const std::string& path_prefix);

}  // namespace cbmor

#endif
