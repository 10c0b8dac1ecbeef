// SPDX-License-Identifier: Apache-2.0

#include "cbmor/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbmor/errors.hpp"
#include "cbmor/text_io.hpp"

namespace cbmor {

namespace {

namespace fs = std::filesystem;

}  // namespace

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "step,load_factor,displacement_mm,force_N,newton_iters,assembly_s,"
        "solve_s\n";
  for (const auto& p : curve)
    os << p.step << ',' << format_double(p.load_factor) << ','
       << format_double(p.displacement) << ',' << format_double(p.force)
       << ',' << p.newton_iters << ',' << format_double(p.assembly_s) << ','
       << format_double(p.solve_s) << '\n';
}

std::vector<CurvePoint> read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw IoError("curve CSV: missing header");
  std::vector<CurvePoint> curve;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    CurvePoint p;
    if (!(row >> p.step >> p.load_factor >> p.displacement >> p.force >>
          p.newton_iters >> p.assembly_s >> p.solve_s))
      throw IoError("curve CSV: malformed row `" + line + "`");
    curve.push_back(p);
  }
  return curve;
}

std::vector<CurvePoint> read_curve_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  return read_curve_csv(is);
}

CompareMetrics compare_runs(const std::string& reference_dir,
                            const std::string& test_dir) {
  const auto ref = read_curve_csv_file(
      (fs::path(reference_dir) / "curve.csv").string());
  const auto test =
      read_curve_csv_file((fs::path(test_dir) / "curve.csv").string());
  if (ref.size() != test.size())
    throw ConfigError("compare: runs have different load schedules");

  double f_scale = 0.0, max_err = 0.0, l2_err = 0.0, l2_ref = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (ref[i].load_factor != test[i].load_factor)
      throw ConfigError("compare: load schedules do not match at step " +
                        std::to_string(i + 1));
    f_scale = std::max(f_scale, std::abs(ref[i].force));
    const double diff = test[i].force - ref[i].force;
    max_err = std::max(max_err, std::abs(diff));
    l2_err += diff * diff;
    l2_ref += ref[i].force * ref[i].force;
  }

  CompareMetrics metrics;
  if (f_scale > 0.0) {
    metrics.max_rel_force_error = max_err / f_scale;
    metrics.l2_rel_force_error = std::sqrt(l2_err / l2_ref);
  } else {
    metrics.max_rel_force_error = max_err;
    metrics.l2_rel_force_error = std::sqrt(l2_err);
  }

  // Displacement states, when both runs persisted them.
  double u_scale = 0.0, u_err = 0.0;
  bool have_states = false;
  for (int s = 0;; ++s) {
    const fs::path ref_state =
        fs::path(reference_dir) / ("state_" + std::to_string(s) + ".txt");
    const fs::path test_state =
        fs::path(test_dir) / ("state_" + std::to_string(s) + ".txt");
    if (!fs::exists(ref_state) || !fs::exists(test_state)) break;
    const Eigen::MatrixXd ur = read_matrix_file(ref_state.string());
    const Eigen::MatrixXd ut = read_matrix_file(test_state.string());
    if (ur.rows() != ut.rows())
      throw ConfigError("compare: state sizes differ for substructure " +
                        std::to_string(s));
    have_states = true;
    u_scale = std::max(u_scale, ur.cwiseAbs().maxCoeff());
    u_err = std::max(u_err, (ur - ut).cwiseAbs().maxCoeff());
  }
  if (have_states)
    metrics.max_rel_displacement_error =
        u_scale > 0.0 ? u_err / u_scale : u_err;
  return metrics;
}

void write_run_artifacts(const std::string& out_dir, const std::string& model,
                         const RunResult& result, const DofCounts& counts,
                         double total_seconds,
                         const std::optional<CompareMetrics>& errors) {
  fs::create_directories(out_dir);

  {
    std::ofstream os(fs::path(out_dir) / "curve.csv");
    if (!os) throw IoError("cannot write curve.csv in " + out_dir);
    write_curve_csv(os, result.curve);
  }

  for (std::size_t step = 0; step < result.trajectory.size(); ++step) {
    if (step + 1 != result.trajectory.size()) continue;  // final state only
    for (std::size_t s = 0; s < result.trajectory[step].size(); ++s)
      write_matrix_file(
          (fs::path(out_dir) / ("state_" + std::to_string(s) + ".txt"))
              .string(),
          result.trajectory[step][s]);
  }

  nlohmann::json report;
  report["model"] = model;
  report["unknowns"] = result.n_unknowns;
  report["dof_counts"] = {{"full", counts.n_full},
                          {"reduced", counts.n_reduced},
                          {"ratio", counts.ratio}};
  report["load_steps"] = result.curve.size();
  report["total_substeps"] = result.total_substeps;
  report["timing"] = {
      {"assembly_s", result.assembly_s},
      {"solve_s", result.solve_s},
      {"total_s", total_seconds},
      {"assembly_rel", total_seconds > 0 ? result.assembly_s / total_seconds
                                         : 0.0},
      {"solve_rel",
       total_seconds > 0 ? result.solve_s / total_seconds : 0.0}};
  report["residual_history"] = result.residual_history;
  report["full_residual_norms"] = result.full_residual_norms;
  if (errors) {
    report["error_vs_reference"] = {
        {"max_rel_force_error", errors->max_rel_force_error},
        {"l2_rel_force_error", errors->l2_rel_force_error}};
    if (errors->max_rel_displacement_error)
      report["error_vs_reference"]["max_rel_displacement_error"] =
          *errors->max_rel_displacement_error;
  }

  std::ofstream os(fs::path(out_dir) / "report.json");
  if (!os) throw IoError("cannot write report.json in " + out_dir);
  os << report.dump(2) << '\n';
}

void write_basis(const std::string& path_prefix, const PodBasis& basis,
                 const std::string& substructure,
                 const std::string& layout_hash) {
  write_matrix_file(path_prefix + ".txt", basis.modes);
  nlohmann::json meta;
  meta["mode_count"] = basis.mode_count;
  meta["truncated_to_rank"] = basis.truncated_to_rank;
  meta["substructure"] = substructure;
  meta["layout_hash"] = layout_hash;
  std::vector<double> sv(basis.singular_values.data(),
                         basis.singular_values.data() +
                             basis.singular_values.size());
  meta["singular_values"] = sv;
  std::ofstream os(path_prefix + ".meta.json");
  if (!os) throw IoError("cannot write " + path_prefix + ".meta.json");
  os << meta.dump(2) << '\n';
}

PodBasis read_basis(const std::string& path_prefix) {
  PodBasis basis;
  basis.modes = read_matrix_file(path_prefix + ".txt");
  basis.mode_count = static_cast<int>(basis.modes.cols());
  std::ifstream is(path_prefix + ".meta.json");
  if (is) {
    nlohmann::json meta;
    try {
      is >> meta;
      if (meta.contains("singular_values")) {
        const auto sv = meta["singular_values"].get<std::vector<double>>();
        basis.singular_values =
            Eigen::Map<const Eigen::VectorXd>(sv.data(), sv.size());
      }
      if (meta.contains("truncated_to_rank"))
        basis.truncated_to_rank = meta["truncated_to_rank"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("basis sidecar is malformed: ") + e.what());
    }
  }
  return basis;
}

}  // namespace cbmor
