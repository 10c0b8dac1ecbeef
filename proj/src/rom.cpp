// SPDX-License-Identifier: Apache-2.0

#include "cbmor/rom.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include <Eigen/Cholesky>

#include "cbmor/errors.hpp"
#include "cbmor/pod.hpp"
#include "cbmor/stepping.hpp"

namespace cbmor {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m,
                            const std::vector<int>& rows) {
  Eigen::MatrixXd out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

}  // namespace

Eigen::VectorXd ReducedModel::gather_local(const SubReduction& s,
                                           const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd local(s.global_cols.size());
  for (std::size_t c = 0; c < s.global_cols.size(); ++c)
    local(c) = reduced(s.global_cols[c]);
  return local;
}

ReducedModel build_reduced_model(const CoupledScenario& scenario,
                                 const std::vector<Eigen::MatrixXd>& bases,
                                 const RomOptions& options) {
  const auto& layout = scenario.layout;
  const int n_subs = scenario.substructure_count();
  const int n_itf = static_cast<int>(layout.interfaces.size());

  ReducedModel model;
  model.total_dofs = layout.total_dofs;

  // Basis pools with constrained rows zeroed.
  std::vector<Eigen::MatrixXd> pool(n_subs);
  for (int s = 0; s < n_subs; ++s) {
    const int n = layout.subs[s].dof_count;
    if (!bases.empty() && bases[s].size() > 0) {
      if (bases[s].rows() != n)
        throw ConfigError("basis rows do not match substructure " +
                          std::to_string(s));
      pool[s] = bases[s];
    } else {
      pool[s] = Eigen::MatrixXd::Identity(n, n);
    }
    for (const auto& [d, v] : scenario.loads[s].dirichlet) {
      (void)v;
      pool[s].row(d).setZero();
    }
  }

  // Internal blocks.
  model.internal_modes.resize(n_subs);
  for (int s = 0; s < n_subs; ++s) {
    Eigen::MatrixXd rows = select_rows(pool[s], layout.subs[s].internal_dofs);
    Eigen::MatrixXd q = orthonormalize_columns(rows);
    int want = -1;
    if (!options.internal_modes.empty())
      want = options.internal_modes.at(s);
    if (want >= 0 && want < q.cols()) q = q.leftCols(want).eval();
    model.internal_modes[s] = std::move(q);
  }

  // Interface blocks from the master-side pool, rows in interface node order.
  model.interface_modes.resize(n_itf);
  for (int j = 0; j < n_itf; ++j) {
    const auto& itf = layout.interfaces[j];
    const Eigen::MatrixXd& mpool =
        options.interface_reduction
            ? pool[itf.master_sub]
            : Eigen::MatrixXd(Eigen::MatrixXd::Identity(
                  layout.subs[itf.master_sub].dof_count,
                  layout.subs[itf.master_sub].dof_count));
    Eigen::MatrixXd mp = mpool;
    if (!options.interface_reduction) {
      // Identity pool still may not move constrained DOFs.
      for (const auto& [d, v] : scenario.loads[itf.master_sub].dirichlet) {
        (void)v;
        mp.row(d).setZero();
      }
    }
    Eigen::MatrixXd rows = select_rows(mp, itf.master_dofs());
    Eigen::MatrixXd q = orthonormalize_columns(rows);
    if (options.interface_reduction && options.interface_modes >= 0 &&
        options.interface_modes < q.cols())
      q = q.leftCols(options.interface_modes).eval();
    model.interface_modes[j] = std::move(q);
  }

  // Reduced vector layout.
  model.internal_offset.resize(n_subs);
  model.interface_offset.resize(n_itf);
  int offset = 0;
  for (int s = 0; s < n_subs; ++s) {
    model.internal_offset[s] = offset;
    offset += static_cast<int>(model.internal_modes[s].cols());
  }
  for (int j = 0; j < n_itf; ++j) {
    model.interface_offset[j] = offset;
    offset += static_cast<int>(model.interface_modes[j].cols());
  }
  model.reduced_dim = offset;

  // Per-substructure maps B: rows cover internal DOFs, owned master contact
  // DOFs (via the interface block) and owned slave contact DOFs (via P times
  // the interface block). Externally constrained DOFs stay zero.
  std::vector<std::set<int>> constrained(n_subs);
  for (int s = 0; s < n_subs; ++s)
    for (const auto& [d, v] : scenario.loads[s].dirichlet) {
      (void)v;
      constrained[s].insert(d);
    }

  model.sub.resize(n_subs);
  std::vector<std::vector<int>> sub_itfs(n_subs);
  for (int j = 0; j < n_itf; ++j) {
    sub_itfs[layout.interfaces[j].master_sub].push_back(j);
    sub_itfs[layout.interfaces[j].slave_sub].push_back(j);
  }

  for (int s = 0; s < n_subs; ++s) {
    auto& sr = model.sub[s];
    const int m_int = static_cast<int>(model.internal_modes[s].cols());
    int width = m_int;
    for (int j : sub_itfs[s])
      width += static_cast<int>(model.interface_modes[j].cols());
    sr.B = Eigen::MatrixXd::Zero(layout.subs[s].dof_count, width);
    sr.global_cols.resize(width);

    for (int c = 0; c < m_int; ++c)
      sr.global_cols[c] = model.internal_offset[s] + c;
    const auto& internal = layout.subs[s].internal_dofs;
    for (std::size_t i = 0; i < internal.size(); ++i)
      sr.B.row(internal[i]).head(m_int) = model.internal_modes[s].row(i);

    int col0 = m_int;
    for (int j : sub_itfs[s]) {
      const auto& itf = layout.interfaces[j];
      const Eigen::MatrixXd& psi_c = model.interface_modes[j];
      const int m_c = static_cast<int>(psi_c.cols());
      for (int c = 0; c < m_c; ++c)
        sr.global_cols[col0 + c] = model.interface_offset[j] + c;

      if (itf.master_sub == s) {
        const std::vector<int> dofs = itf.master_dofs();
        for (std::size_t i = 0; i < dofs.size(); ++i)
          sr.B.row(dofs[i]).segment(col0, m_c) = psi_c.row(i);
      } else {
        // U_C^S = P Psi_C^M a_C; constrained components stay lifted.
        const Eigen::MatrixXd coupled =
            scenario.mortar[j].dof_coupling() * psi_c;
        const std::vector<int> dofs = itf.slave_dofs();
        for (std::size_t i = 0; i < dofs.size(); ++i) {
          if (constrained[s].count(dofs[i])) continue;
          sr.B.row(dofs[i]).segment(col0, m_c) = coupled.row(i);
        }
      }
      col0 += m_c;
    }
  }
  return model;
}

ReducedSystem reduce_system(const std::vector<AssembledSystem>& systems,
                            const ReducedModel& model) {
  ReducedSystem red;
  red.K = Eigen::MatrixXd::Zero(model.reduced_dim, model.reduced_dim);
  red.G = Eigen::VectorXd::Zero(model.reduced_dim);
  for (std::size_t s = 0; s < model.sub.size(); ++s) {
    const auto& sr = model.sub[s];
    const Eigen::MatrixXd KB = systems[s].tangent * sr.B;
    const Eigen::MatrixXd k_local = sr.B.transpose() * KB;
    const Eigen::VectorXd g_local = sr.B.transpose() * systems[s].residual;
    const int w = static_cast<int>(sr.global_cols.size());
    for (int a = 0; a < w; ++a) {
      red.G(sr.global_cols[a]) += g_local(a);
      for (int b = 0; b < w; ++b)
        red.K(sr.global_cols[a], sr.global_cols[b]) += k_local(a, b);
    }
  }
  return red;
}

RunResult newton_solve_rom(const CoupledScenario& scenario,
                           const ReducedModel& model) {
  const int n_subs = scenario.substructure_count();
  const auto& layout = scenario.layout;

  // Condensation of the same scenario, used for the full-residual diagnostic
  // and the reaction forces.
  const std::vector<int> constrained = scenario.constrained_global_dofs();
  const Condensation cond =
      build_condensation(layout, scenario.mortar, constrained);
  std::vector<int> constrained_cond;
  constrained_cond.reserve(constrained.size());
  for (int gd : constrained) constrained_cond.push_back(cond.cond_index[gd]);

  RunResult result;
  result.n_unknowns = model.reduced_dim;

  Eigen::VectorXd U = Eigen::VectorXd::Zero(layout.total_dofs);
  Eigen::VectorXd G_cond_latest = Eigen::VectorXd::Zero(cond.n_cond);
  double full_residual_latest = 0.0;

  auto assemble_all = [&](double t) {
    std::vector<AssembledSystem> systems;
    systems.reserve(n_subs);
    for (int s = 0; s < n_subs; ++s) {
      DisplacementState state{
          U.segment(layout.subs[s].dof_offset, layout.subs[s].dof_count), t};
      systems.push_back(assemble_raw(scenario.meshes[s],
                                     scenario.materials[s], state,
                                     scenario.loads[s]));
    }
    return systems;
  };

  auto substep = [&](double /*t_from*/, double t_to) -> SubstepResult {
    const Eigen::VectorXd U_backup = U;
    try {
      SubstepResult res;
      Eigen::VectorXd bc_delta = Eigen::VectorXd::Zero(layout.total_dofs);
      bool bc_pending = false;
      for (int s = 0; s < n_subs; ++s) {
        const int offset = layout.subs[s].dof_offset;
        for (const auto& [d, v] : scenario.loads[s].dirichlet) {
          const double delta = t_to * v - U(offset + d);
          if (delta != 0.0) {
            bc_delta(offset + d) = delta;
            bc_pending = true;
          }
        }
      }

      for (int iter = 0; iter <= scenario.options.max_iter; ++iter) {
        const auto t_assembly = Clock::now();
        const std::vector<AssembledSystem> systems = assemble_all(t_to);
        ReducedSystem red = reduce_system(systems, model);
        result.assembly_s += seconds_since(t_assembly);

        res.residual_norms.push_back(red.G.norm());
        if (!bc_pending && red.G.norm() <= scenario.options.tol) {
          const FullSystem full = stack_systems(systems, layout);
          G_cond_latest = cond.T.transpose() * full.G;
          Eigen::VectorXd g_free = G_cond_latest;
          for (int q : constrained_cond) g_free(q) = 0.0;
          full_residual_latest = g_free.norm();
          return res;
        }
        if (iter == scenario.options.max_iter) break;

        Eigen::VectorXd rhs = red.G;
        if (bc_pending)
          for (int s = 0; s < n_subs; ++s) {
            const auto& sr = model.sub[s];
            const auto& sub = layout.subs[s];
            const Eigen::VectorXd k_delta =
                systems[s].tangent *
                bc_delta.segment(sub.dof_offset, sub.dof_count);
            const Eigen::VectorXd local = sr.B.transpose() * k_delta;
            for (std::size_t c = 0; c < sr.global_cols.size(); ++c)
              rhs(sr.global_cols[c]) += local(c);
          }

        const auto t_solve = Clock::now();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(red.K);
        if (ldlt.info() != Eigen::Success)
          throw SolverError("reduced LDLT factorization failed");
        const Eigen::VectorXd da = ldlt.solve(-rhs);
        result.solve_s += seconds_since(t_solve);

        for (int s = 0; s < n_subs; ++s) {
          const auto& sr = model.sub[s];
          const auto& sub = layout.subs[s];
          U.segment(sub.dof_offset, sub.dof_count) +=
              sr.B * model.gather_local(sr, da);
        }
        if (bc_pending) {
          U += bc_delta;
          bc_pending = false;
          bc_delta.setZero();
        }
        ++res.iterations;
      }
      throw NonConvergenceError(
          res.residual_norms.back(),
          "reduced newton: no convergence at load factor " +
              std::to_string(t_to));
    } catch (...) {
      U = U_backup;
      throw;
    }
  };

  const CurveProbe* probe = scenario.curve ? &*scenario.curve : nullptr;
  std::vector<int> probe_dofs;
  double probe_reference = 0.0;
  if (probe) {
    const auto& mesh = scenario.meshes[probe->sub];
    const auto& load = scenario.loads[probe->sub];
    const int offset = layout.subs[probe->sub].dof_offset;
    for (int node : mesh.edge_set_nodes(probe->edge_set)) {
      const int local = 2 * node + probe->component;
      auto it = load.dirichlet.find(local);
      if (it == load.dirichlet.end()) continue;
      probe_dofs.push_back(cond.cond_index[offset + local]);
      if (std::abs(it->second) > std::abs(probe_reference))
        probe_reference = it->second;
    }
    if (probe_dofs.empty())
      throw ConfigError("curve probe edge has no constrained DOFs");
  }

  for (std::size_t k = 0; k < scenario.load_factors.size(); ++k) {
    const double t = scenario.load_factors[k];
    const double t_prev = k == 0 ? 0.0 : scenario.load_factors[k - 1];
    const auto records = quasi_static_drive(
        {t}, scenario.options.max_halvings, substep, t_prev);
    const auto& rec = records.front();
    result.total_substeps += rec.substeps;
    result.residual_history.push_back(rec.residual_norms);
    result.full_residual_norms.push_back(full_residual_latest);

    std::vector<Eigen::VectorXd> states;
    states.reserve(n_subs);
    for (int s = 0; s < n_subs; ++s)
      states.push_back(
          U.segment(layout.subs[s].dof_offset, layout.subs[s].dof_count));
    result.trajectory.push_back(std::move(states));

    CurvePoint point;
    point.step = static_cast<int>(k) + 1;
    point.load_factor = t;
    point.newton_iters = rec.iterations;
    point.assembly_s = result.assembly_s;
    point.solve_s = result.solve_s;
    if (probe) {
      point.displacement = t * probe_reference;
      for (int q : probe_dofs) point.force += G_cond_latest(q);
    }
    result.curve.push_back(point);
  }
  return result;
}

Eigen::VectorXd recover_lagrange_rom(const AssembledSystem& slave_system,
                                     const InterfaceLayout& interface,
                                     const MortarOperators& ops,
                                     const ReducedModel& model, int slave_sub,
                                     const Eigen::VectorXd& delta_a) {
  const auto& sr = model.sub[slave_sub];
  const Eigen::VectorXd delta_u = sr.B * model.gather_local(sr, delta_a);
  return recover_lagrange(slave_system, interface, ops, delta_u);
}

int reduced_dof_total(const std::vector<int>& internal_modes,
                      const std::vector<int>& interface_modes) {
  int total = 0;
  for (int m : internal_modes) total += m;
  for (int m : interface_modes) total += m;
  return total;
}

DofCounts count_reduced_dofs(const ReducedModel& model) {
  std::vector<int> internal, interface;
  for (const auto& m : model.internal_modes)
    internal.push_back(static_cast<int>(m.cols()));
  for (const auto& m : model.interface_modes)
    interface.push_back(static_cast<int>(m.cols()));
  DofCounts counts;
  counts.n_full = model.total_dofs;
  counts.n_reduced = reduced_dof_total(internal, interface);
  counts.ratio =
      counts.n_reduced > 0
          ? static_cast<double>(counts.n_full) / counts.n_reduced
          : 0.0;
  return counts;
}

}  // namespace cbmor
