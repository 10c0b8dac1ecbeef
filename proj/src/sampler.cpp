// SPDX-License-Identifier: Apache-2.0

#include "cbmor/sampler.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "cbmor/errors.hpp"
#include "cbmor/rom.hpp"
#include "cbmor/text_io.hpp"

namespace cbmor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_ranges(const EdgeParametrization& edge) {
  auto check = [](const std::array<double, 2>& r, const char* what) {
    if (!(r[0] < r[1]))
      throw ConfigError(std::string("parametrization: degenerate ") + what +
                        " range");
  };
  if (edge.component != 1) check(edge.translation_x, "translation");
  if (edge.component != 0) check(edge.translation_y, "translation");
  check(edge.rotation_deg, "rotation");
  if (std::max(std::abs(edge.rotation_deg[0]),
               std::abs(edge.rotation_deg[1])) >= 90.0)
    throw ConfigError("parametrization: |rotation| must stay below 90 deg");
}

double draw_range(const std::array<double, 2>& range, RandomStream& rng) {
  const double mean = 0.5 * (range[0] + range[1]);
  const double sigma = 0.25 * (range[1] - range[0]);
  return rng.truncated_normal(mean, sigma, range[0], range[1]);
}

}  // namespace

int parameter_count(const BcParametrization& param) {
  int count = 0;
  for (const auto& edge : param) count += edge.param_count();
  return count;
}

std::vector<double> draw_sample(const BcParametrization& param,
                                RandomStream& rng) {
  std::vector<double> alpha;
  alpha.reserve(parameter_count(param));
  for (const auto& edge : param) {
    check_ranges(edge);
    if (edge.component != 1) alpha.push_back(draw_range(edge.translation_x, rng));
    if (edge.component != 0) alpha.push_back(draw_range(edge.translation_y, rng));
    alpha.push_back(draw_range(edge.rotation_deg, rng));
  }
  return alpha;
}

std::vector<double> corner_sample(const BcParametrization& param, int corner) {
  const int side = corner == 0 ? 0 : 1;
  std::vector<double> alpha;
  alpha.reserve(parameter_count(param));
  for (const auto& edge : param) {
    if (edge.component != 1) alpha.push_back(edge.translation_x[side]);
    if (edge.component != 0) alpha.push_back(edge.translation_y[side]);
    alpha.push_back(edge.rotation_deg[side]);
  }
  return alpha;
}

std::vector<DirichletMap> bc_from_parameters(const std::vector<double>& alpha,
                                             const std::vector<Mesh>& meshes,
                                             const BcParametrization& param,
                                             int active_edge) {
  if (static_cast<int>(alpha.size()) != parameter_count(param))
    throw ConfigError("parameter vector length does not match "
                      "parametrization");

  std::vector<DirichletMap> maps(meshes.size());
  int cursor = 0;
  for (std::size_t e = 0; e < param.size(); ++e) {
    const auto& edge = param[e];
    double dx = 0.0, dy = 0.0, phi_deg = 0.0;
    if (edge.component != 1) dx = alpha[cursor++];
    if (edge.component != 0) dy = alpha[cursor++];
    phi_deg = alpha[cursor++];
    const bool active =
        active_edge < 0 || static_cast<int>(e) == active_edge;
    if (!active) {
      dx = dy = phi_deg = 0.0;
    }

    const Mesh& mesh = meshes.at(edge.sub);
    const auto nodes = mesh.edge_set_nodes(edge.edge_set);
    Eigen::Vector2d lo = mesh.nodes[nodes.front()], hi = lo;
    for (int n : nodes) {
      lo = lo.cwiseMin(mesh.nodes[n]);
      hi = hi.cwiseMax(mesh.nodes[n]);
    }
    const Eigen::Vector2d mid = 0.5 * (lo + hi);

    const double phi = phi_deg * M_PI / 180.0;
    Eigen::Matrix2d R;
    R << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);

    for (int n : nodes) {
      const Eigen::Vector2d rel = mesh.nodes[n] - mid;
      const Eigen::Vector2d rot = R * rel - rel;
      const Eigen::Vector2d value(dx + rot.x(), dy + rot.y());
      for (int c = 0; c < 2; ++c) {
        if (edge.component >= 0 && c != edge.component) continue;
        const int dof = 2 * n + c;
        auto [it, inserted] = maps[edge.sub].try_emplace(dof, value(c));
        if (!inserted && it->second != value(c))
          throw ConfigError("parametrization: conflicting values at DOF " +
                            std::to_string(dof));
      }
    }
  }
  return maps;
}

namespace {

std::vector<double> uniform_schedule(int steps) {
  std::vector<double> t(steps);
  for (int k = 0; k < steps; ++k) t[k] = static_cast<double>(k + 1) / steps;
  return t;
}

// The sampling boundary value problem at one parameter point/configuration.
CoupledScenario configure(const SamplingProblem& problem,
                          const SamplerConfig& config,
                          const std::vector<double>& alpha, int active_edge) {
  CoupledScenario scenario = problem.scenario;
  scenario.load_factors = uniform_schedule(config.load_steps);
  const auto maps = bc_from_parameters(alpha, scenario.meshes,
                                       problem.parametrization, active_edge);
  for (std::size_t s = 0; s < maps.size(); ++s)
    for (const auto& [dof, value] : maps[s]) {
      auto [it, inserted] = scenario.loads[s].dirichlet.emplace(dof, value);
      if (!inserted && it->second != value)
        throw ConfigError("sampling BC collides with a fixed Dirichlet "
                          "condition");
    }
  return scenario;
}

int configuration_count(const SamplingProblem& problem,
                        const SamplerConfig& config) {
  return config.two_sided
             ? static_cast<int>(problem.parametrization.size())
             : 1;
}

}  // namespace

double sampling_criterion(const SamplingProblem& problem,
                          const SamplerConfig& config,
                          const Eigen::MatrixXd& modes,
                          const std::vector<double>& alpha) {
  const int n_configs = configuration_count(problem, config);
  double worst = 0.0;
  for (int c = 0; c < n_configs; ++c) {
    const CoupledScenario scenario =
        configure(problem, config, alpha, config.two_sided ? c : -1);
    std::vector<Eigen::MatrixXd> bases(scenario.substructure_count());
    bases[problem.sampled_sub] = modes;
    try {
      const ReducedModel model = build_reduced_model(scenario, bases, {});
      const RunResult run = newton_solve_rom(scenario, model);
      worst = std::max(worst, run.full_residual_norms.back());
    } catch (const Error&) {
      return kInf;
    }
  }
  return worst;
}

BisectionResult bisect_mode_count(const std::function<double(int)>& residual_at,
                                  int rank, double epsilon) {
  if (rank < 1) throw ConfigError("bisection needs rank >= 1");

  if (!(residual_at(rank) <= epsilon)) return {rank, false};

  int lo = 1, hi = rank, best = rank;
  while (lo <= hi) {
    const int mid = lo + (hi - lo) / 2;
    if (residual_at(mid) <= epsilon) {
      best = mid;
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }
  // Guard for non-monotone residuals: the candidate was probed as passing,
  // but walk up if a re-check disagrees.
  int m = best;
  while (m < rank && !(residual_at(m) <= epsilon)) ++m;
  return {m, true};
}

BisectionResult bisect_mode_count(const SamplingProblem& problem,
                                  const SamplerConfig& config,
                                  const SnapshotMatrix& snapshots,
                                  const std::vector<double>& alpha,
                                  double epsilon) {
  const PodBasis pool = compute_pod(snapshots,
                                    static_cast<int>(snapshots.count()));
  const int rank = pool.mode_count;
  auto residual_at = [&](int m) {
    return sampling_criterion(problem, config, pool.modes.leftCols(m), alpha);
  };
  return bisect_mode_count(residual_at, rank, epsilon);
}

SamplingResult run_sampling(const SamplingProblem& problem,
                            const SamplerConfig& config) {
  if (config.n_samples < 1)
    throw ConfigError("sampler: n_samples must be at least 1");
  if (!(config.epsilon > 0.0))
    throw ConfigError("sampler: epsilon must be positive");

  const int n_configs = configuration_count(problem, config);
  SamplingResult result;

  // Full-order solve of one configured boundary value problem, appending
  // every load-step state of the sampled substructure. Nothing is appended
  // unless every configuration converges.
  auto run_fom = [&](const std::vector<double>& alpha, int sample_id) {
    std::vector<Eigen::VectorXd> staged;
    for (int c = 0; c < n_configs; ++c) {
      const CoupledScenario scenario =
          configure(problem, config, alpha, config.two_sided ? c : -1);
      const RunResult run = newton_solve_coupled(scenario);
      for (const auto& states : run.trajectory)
        staged.push_back(states[problem.sampled_sub]);
    }
    result.fom_solves += n_configs;
    for (std::size_t i = 0; i < staged.size(); ++i)
      result.snapshots.append(
          staged[i],
          {sample_id, static_cast<int>(i) % config.load_steps});
  };

  // Bootstrap: deterministic corner samples seed the initial basis.
  for (int corner = 0; corner < 2; ++corner)
    run_fom(corner_sample(problem.parametrization, corner), -1 - corner);
  result.bootstrap_columns = static_cast<int>(result.snapshots.count());

  PodBasis pool = compute_pod(result.snapshots,
                              static_cast<int>(result.snapshots.count()));
  int mode_count = default_mode_count(pool.singular_values);

  RandomStream rng(config.seed);
  for (int k = 0; k < config.n_samples; ++k) {
    SampleLogEntry entry;
    entry.sample_id = k;
    entry.alpha = draw_sample(problem.parametrization, rng);
    entry.criterion_residual = sampling_criterion(
        problem, config, pool.modes.leftCols(mode_count), entry.alpha);

    if (entry.criterion_residual >= config.epsilon) {
      entry.triggered_fom = true;
      try {
        run_fom(entry.alpha, k);
        pool = compute_pod(result.snapshots,
                           static_cast<int>(result.snapshots.count()));
        auto residual_at = [&](int m) {
          return sampling_criterion(problem, config, pool.modes.leftCols(m),
                                    entry.alpha);
        };
        mode_count =
            bisect_mode_count(residual_at, pool.mode_count, config.epsilon)
                .mode_count;
      } catch (const Error&) {
        entry.fom_failed = true;
      }
    }
    entry.new_mode_count = mode_count;
    result.log.push_back(std::move(entry));
  }

  // The in-loop basis only screens sample points; the delivered one comes
  // from the full snapshot matrix.
  result.basis = compute_pod(result.snapshots, mode_count);
  return result;
}

void write_sampling_log(std::ostream& os,
                        const std::vector<SampleLogEntry>& log) {
  if (log.empty()) {
    os << "sample_id,criterion_residual,triggered_fom,new_mode_count\n";
    return;
  }
  os << "sample_id";
  for (std::size_t i = 0; i < log.front().alpha.size(); ++i)
    os << ",alpha_" << i;
  os << ",criterion_residual,triggered_fom,new_mode_count\n";
  for (const auto& entry : log) {
    os << entry.sample_id;
    for (double a : entry.alpha) os << ',' << format_double(a);
    os << ',' << format_double(entry.criterion_residual) << ','
       << (entry.triggered_fom ? 1 : 0) << ',' << entry.new_mode_count
       << '\n';
  }
}

}  // namespace cbmor
