// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbmor/errors.hpp"
#include "cbmor/report.hpp"
#include "cbmor/rom.hpp"
#include "cbmor/sampler.hpp"
#include "cbmor/scenario.hpp"
#include "cbmor/text_io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cbmor;

constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
  std::string config;
  std::string out;
  std::string model;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int modes = -2;  // internal modes override; -2 = not given
};

Scenario load_with_overrides(const CommonFlags& flags) {
  Scenario scenario = load_scenario(flags.config);
  if (!flags.out.empty()) scenario.output = flags.out;
  if (!flags.model.empty()) scenario.model = flags.model;
  if (flags.seed_set) scenario.seed = flags.seed;
  if (flags.modes != -2) {
    if (!scenario.rom) scenario.rom.emplace();
    scenario.rom->internal_modes = flags.modes;
  }
  if (scenario.output.empty())
    throw ConfigError("no output directory (config `output` or --out)");
  return scenario;
}

int run_command(const CommonFlags& flags, const std::string& ref_dir) {
  const Scenario scenario = load_with_overrides(flags);
  const CoupledScenario coupled = scenario.build();

  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  DofCounts counts;
  counts.n_full = coupled.layout.total_dofs;

  if (scenario.model == "fom") {
    result = newton_solve_coupled(coupled);
    counts.n_reduced = result.n_unknowns;
    counts.ratio = counts.n_reduced > 0
                       ? static_cast<double>(counts.n_full) / counts.n_reduced
                       : 0.0;
  } else if (scenario.model == "rom") {
    std::vector<Eigen::MatrixXd> bases(coupled.substructure_count());
    RomOptions options;
    if (scenario.rom) {
      for (const auto& [s, file] : scenario.rom->basis_files)
        bases[s] = read_basis(file).modes;
      options.internal_modes.assign(coupled.substructure_count(),
                                    scenario.rom->internal_modes);
      options.interface_modes = scenario.rom->interface_modes;
      options.interface_reduction = scenario.rom->interface_reduction;
    }
    const ReducedModel model = build_reduced_model(coupled, bases, options);
    counts = count_reduced_dofs(model);
    result = newton_solve_rom(coupled, model);
  } else {
    result = penalty_coupled_solve(coupled, *scenario.penalty_epsilon);
    counts.n_reduced = result.n_unknowns;
    counts.ratio = counts.n_reduced > 0
                       ? static_cast<double>(counts.n_full) / counts.n_reduced
                       : 0.0;
  }
  const double total_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::optional<CompareMetrics> errors;
  write_run_artifacts(scenario.output, scenario.model, result, counts,
                      total_s, errors);
  if (!ref_dir.empty()) {
    errors = compare_runs(ref_dir, scenario.output);
    write_run_artifacts(scenario.output, scenario.model, result, counts,
                        total_s, errors);
  }

  std::cout << "model " << scenario.model << ": " << result.curve.size()
            << " steps, " << result.total_substeps << " substeps, unknowns "
            << result.n_unknowns << "\n";
  std::cout << "assembly " << format_double(result.assembly_s) << " s, solve "
            << format_double(result.solve_s) << " s\n";
  if (errors)
    std::cout << "max relative force error vs reference: "
              << format_double(errors->max_rel_force_error) << "\n";
  return 0;
}

int sample_command(const CommonFlags& flags) {
  const Scenario scenario = load_with_overrides(flags);
  if (!scenario.sampler)
    throw ConfigError("sample command needs a `sampler` section");

  SamplingProblem problem;
  problem.scenario = scenario.build();
  problem.sampled_sub = scenario.sampler->sampled_sub;
  problem.parametrization = scenario.sampler->parametrization;

  SamplerConfig config = scenario.sampler->config;
  config.seed = scenario.seed;

  const SamplingResult result = run_sampling(problem, config);

  fs::create_directories(scenario.output);
  {
    std::ofstream os(fs::path(scenario.output) / "sampling_log.csv");
    if (!os) throw IoError("cannot write sampling_log.csv");
    write_sampling_log(os, result.log);
  }
  write_matrix_file((fs::path(scenario.output) / "snapshots.txt").string(),
                    result.snapshots.columns);
  write_basis((fs::path(scenario.output) / "basis").string(), result.basis,
              scenario.subs[problem.sampled_sub].name,
              problem.scenario.layout.hash());

  int triggered = 0;
  for (const auto& e : result.log) triggered += e.triggered_fom ? 1 : 0;
  std::cout << "samples " << result.log.size() << ", bootstrap columns "
            << result.bootstrap_columns << ", full solves "
            << result.fom_solves << ", triggered " << triggered
            << ", modes " << result.basis.mode_count << "\n";
  return 0;
}

int pod_command(const std::string& input, const std::string& out_prefix,
                int modes) {
  SnapshotMatrix snapshots;
  snapshots.columns = read_matrix_file(input);
  snapshots.provenance.resize(snapshots.count());
  const PodBasis basis = compute_pod(
      snapshots, modes > 0 ? modes : static_cast<int>(snapshots.count()));
  write_basis(out_prefix, basis, "", "");
  std::cout << "modes " << basis.mode_count
            << (basis.truncated_to_rank ? " (truncated to rank)" : "")
            << "\n";
  return 0;
}

int compare_command(const std::string& ref_dir, const std::string& test_dir) {
  const CompareMetrics metrics = compare_runs(ref_dir, test_dir);
  std::cout << "max_rel_force_error "
            << format_double(metrics.max_rel_force_error) << "\n";
  std::cout << "l2_rel_force_error "
            << format_double(metrics.l2_rel_force_error) << "\n";
  if (metrics.max_rel_displacement_error)
    std::cout << "max_rel_displacement_error "
              << format_double(*metrics.max_rel_displacement_error) << "\n";
  return 0;
}

int generate_mesh_command(int nx, int ny, double lx, double ly,
                          const std::vector<double>& origin,
                          const std::string& out) {
  Eigen::Vector2d o = Eigen::Vector2d::Zero();
  if (origin.size() == 2) o = {origin[0], origin[1]};
  const Mesh mesh = generate_structured_quad_mesh(nx, ny, lx, ly, o);
  write_mesh_file(out, mesh);
  std::cout << "nodes " << mesh.node_count() << " elements "
            << mesh.element_count() << " -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Component-based model order reduction with mortar tied "
               "contact"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string ref_dir, test_dir, input, out_prefix;
  int modes = -1;
  int nx = 1, ny = 1;
  double lx = 1.0, ly = 1.0;
  std::vector<double> origin;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", flags.config, "scenario config file")
          ->required();
    cmd->add_option("--out", flags.out, "output directory override");
    cmd->add_option("--seed", flags.seed, "RNG seed override")
        ->each([&](const std::string&) { flags.seed_set = true; });
  };

  CLI::App* run = app.add_subcommand("run", "solve a scenario");
  add_common(run, true);
  run->add_option("--model", flags.model, "fom | rom | penalty");
  run->add_option("--modes", flags.modes, "internal modes per substructure");
  run->add_option("--ref", ref_dir, "reference run directory for error "
                                    "metrics");

  CLI::App* sample = app.add_subcommand("sample", "snapshot sampling");
  add_common(sample, true);

  CLI::App* pod = app.add_subcommand("pod", "POD of a snapshot matrix file");
  pod->add_option("--in", input, "snapshot matrix file")->required();
  pod->add_option("--out", out_prefix, "basis file prefix")->required();
  pod->add_option("--modes", modes, "mode count (default: rank)");

  CLI::App* compare = app.add_subcommand("compare", "compare two runs");
  compare->add_option("--ref", ref_dir, "reference run directory")
      ->required();
  compare->add_option("--test", test_dir, "test run directory")->required();

  CLI::App* genmesh =
      app.add_subcommand("generate-mesh", "write a structured quad mesh");
  genmesh->add_option("--nx", nx)->required();
  genmesh->add_option("--ny", ny)->required();
  genmesh->add_option("--lx", lx)->required();
  genmesh->add_option("--ly", ly)->required();
  genmesh->add_option("--origin", origin)->expected(2);
  genmesh->add_option("--out", out_prefix, "mesh file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(flags, ref_dir);
    if (sample->parsed()) return sample_command(flags);
    if (pod->parsed()) return pod_command(input, out_prefix, modes);
    if (compare->parsed()) return compare_command(ref_dir, test_dir);
    if (genmesh->parsed())
      return generate_mesh_command(nx, ny, lx, ly, origin, out_prefix);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const NonConvergenceError& e) {
    std::cerr << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
