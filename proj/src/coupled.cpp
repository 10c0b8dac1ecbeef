// SPDX-License-Identifier: Apache-2.0

#include "cbmor/coupled.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "cbmor/errors.hpp"
#include "cbmor/stepping.hpp"

namespace cbmor {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<int> CoupledScenario::constrained_global_dofs() const {
  std::vector<int> dofs;
  for (int s = 0; s < substructure_count(); ++s)
    for (const auto& [d, v] : loads[s].dirichlet) {
      (void)v;
      dofs.push_back(layout.subs[s].dof_offset + d);
    }
  return dofs;
}

Condensation build_condensation(const SystemLayout& layout,
                                const std::vector<MortarOperators>& mortar,
                                const std::vector<int>& keep) {
  if (mortar.size() != layout.interfaces.size())
    throw LayoutError("mortar operator count does not match interfaces");

  const std::set<int> kept(keep.begin(), keep.end());
  const int n = layout.total_dofs;

  Condensation cond;
  cond.cond_index.assign(n, 0);

  // Mark eliminated DOFs: owned slave nodes, unless externally constrained.
  struct Elim {
    int interface = -1;
    int row = -1;  // DOF row in the interface's P
  };
  std::vector<Elim> elim(n);
  for (std::size_t j = 0; j < layout.interfaces.size(); ++j) {
    const auto& itf = layout.interfaces[j];
    const int offset = layout.subs[itf.slave_sub].dof_offset;
    for (std::size_t r = 0; r < itf.slave_nodes.size(); ++r)
      for (int c = 0; c < 2; ++c) {
        const int gd = offset + 2 * itf.slave_nodes[r] + c;
        if (kept.count(gd)) continue;
        if (elim[gd].interface >= 0)
          throw LayoutError("DOF " + std::to_string(gd) +
                            " is slave on two interfaces");
        elim[gd] = {static_cast<int>(j), static_cast<int>(2 * r + c)};
      }
  }

  for (int gd = 0; gd < n; ++gd) {
    if (elim[gd].interface >= 0) {
      cond.cond_index[gd] = -1;
    } else {
      cond.cond_index[gd] = cond.n_cond++;
      cond.cond_to_full.push_back(gd);
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * n);
  for (int gd = 0; gd < n; ++gd) {
    if (cond.cond_index[gd] >= 0) {
      triplets.emplace_back(gd, cond.cond_index[gd], 1.0);
      continue;
    }
    const int j = elim[gd].interface;
    const auto& itf = layout.interfaces[j];
    const auto& P = mortar[j].P;
    const int node_row = elim[gd].row / 2, c = elim[gd].row % 2;
    const int moffset = layout.subs[itf.master_sub].dof_offset;
    for (Eigen::Index k = 0; k < P.cols(); ++k) {
      const int mgd = moffset + 2 * itf.master_nodes[k] + c;
      const int q = cond.cond_index[mgd];
      if (q < 0)
        throw LayoutError("master DOF of interface " + std::to_string(j) +
                          " is eliminated elsewhere");
      triplets.emplace_back(gd, q, P(node_row, k));
    }
  }

  cond.T.resize(n, cond.n_cond);
  cond.T.setFromTriplets(triplets.begin(), triplets.end());
  return cond;
}

FullSystem stack_systems(const std::vector<AssembledSystem>& systems,
                         const SystemLayout& layout) {
  FullSystem full;
  const int n = layout.total_dofs;
  full.G = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t s = 0; s < systems.size(); ++s) {
    const int offset = layout.subs[s].dof_offset;
    full.G.segment(offset, systems[s].residual.size()) = systems[s].residual;
    const auto& K = systems[s].tangent;
    for (int col = 0; col < K.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it)
        triplets.emplace_back(offset + it.row(), offset + it.col(),
                              it.value());
  }
  full.K.resize(n, n);
  full.K.setFromTriplets(triplets.begin(), triplets.end());
  return full;
}

CondensedSystem assemble_condensed(const std::vector<AssembledSystem>& systems,
                                   const std::vector<MortarOperators>& mortar,
                                   const SystemLayout& layout) {
  const Condensation cond = build_condensation(layout, mortar);
  const FullSystem full = stack_systems(systems, layout);
  CondensedSystem out;
  out.K = cond.T.transpose() * full.K * cond.T;
  out.G = cond.T.transpose() * full.G;
  return out;
}

SaddlePointSolution solve_saddle_point(
    const std::vector<AssembledSystem>& systems,
    const std::vector<MortarOperators>& mortar, const SystemLayout& layout) {
  if (systems.size() != 2 || mortar.size() != 1 ||
      layout.interfaces.size() != 1)
    throw LayoutError("saddle-point oracle needs two substructures and one "
                      "interface");
  const auto& itf = layout.interfaces[0];
  const int ms = itf.master_sub, ss = itf.slave_sub;

  const std::vector<int>& Im = layout.subs[ms].internal_dofs;
  const std::vector<int>& Is = layout.subs[ss].internal_dofs;
  const std::vector<int> Cm = itf.master_dofs();
  const std::vector<int> Cs = itf.slave_dofs();

  const int nIm = static_cast<int>(Im.size());
  const int nIs = static_cast<int>(Is.size());
  const int nCm = static_cast<int>(Cm.size());
  const int nCs = static_cast<int>(Cs.size());
  const int n = nIm + nIs + nCm + nCs + nCs;

  const Eigen::MatrixXd Km(systems[ms].tangent);
  const Eigen::MatrixXd Ks(systems[ss].tangent);

  Eigen::MatrixXd Dd = Eigen::MatrixXd::Zero(nCs, nCs);
  for (int r = 0; r < mortar[0].D.size(); ++r) {
    Dd(2 * r, 2 * r) = mortar[0].D(r);
    Dd(2 * r + 1, 2 * r + 1) = mortar[0].D(r);
  }
  Eigen::MatrixXd Mdof = Eigen::MatrixXd::Zero(nCs, nCm);
  for (int r = 0; r < mortar[0].M.rows(); ++r)
    for (int k = 0; k < mortar[0].M.cols(); ++k) {
      Mdof(2 * r, 2 * k) = mortar[0].M(r, k);
      Mdof(2 * r + 1, 2 * k + 1) = mortar[0].M(r, k);
    }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  const int oIm = 0, oIs = nIm, oCm = nIm + nIs, oCs = nIm + nIs + nCm,
            oL = nIm + nIs + nCm + nCs;

  auto fill = [&](const Eigen::MatrixXd& K, const std::vector<int>& rows,
                  int row_off, const std::vector<int>& cols, int col_off) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = 0; k < cols.size(); ++k)
        A(row_off + i, col_off + k) = K(rows[i], cols[k]);
  };
  fill(Km, Im, oIm, Im, oIm);
  fill(Km, Im, oIm, Cm, oCm);
  fill(Km, Cm, oCm, Im, oIm);
  fill(Km, Cm, oCm, Cm, oCm);
  fill(Ks, Is, oIs, Is, oIs);
  fill(Ks, Is, oIs, Cs, oCs);
  fill(Ks, Cs, oCs, Is, oIs);
  fill(Ks, Cs, oCs, Cs, oCs);

  A.block(oCm, oL, nCm, nCs) = -Mdof.transpose();
  A.block(oCs, oL, nCs, nCs) = Dd.transpose();
  A.block(oL, oCm, nCs, nCm) = -Mdof;
  A.block(oL, oCs, nCs, nCs) = Dd;

  auto fill_rhs = [&](const Eigen::VectorXd& G, const std::vector<int>& rows,
                      int row_off) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      rhs(row_off + i) = -G(rows[i]);
  };
  fill_rhs(systems[ms].residual, Im, oIm);
  fill_rhs(systems[ss].residual, Is, oIs);
  fill_rhs(systems[ms].residual, Cm, oCm);
  fill_rhs(systems[ss].residual, Cs, oCs);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw SolverError("saddle-point system is singular");
  const Eigen::VectorXd x = lu.solve(rhs);

  SaddlePointSolution sol;
  sol.delta_u = Eigen::VectorXd::Zero(layout.total_dofs);
  for (std::size_t i = 0; i < Im.size(); ++i)
    sol.delta_u(layout.subs[ms].dof_offset + Im[i]) = x(oIm + i);
  for (std::size_t i = 0; i < Is.size(); ++i)
    sol.delta_u(layout.subs[ss].dof_offset + Is[i]) = x(oIs + i);
  for (std::size_t i = 0; i < Cm.size(); ++i)
    sol.delta_u(layout.subs[ms].dof_offset + Cm[i]) = x(oCm + i);
  for (std::size_t i = 0; i < Cs.size(); ++i)
    sol.delta_u(layout.subs[ss].dof_offset + Cs[i]) = x(oCs + i);
  sol.lambda = x.segment(oL, nCs);
  return sol;
}

Eigen::VectorXd recover_lagrange(const AssembledSystem& slave_system,
                                 const InterfaceLayout& interface,
                                 const MortarOperators& ops,
                                 const Eigen::VectorXd& delta_u_slave) {
  for (int r = 0; r < ops.D.size(); ++r)
    if (ops.D(r) == 0.0)
      throw SolverError("zero diagonal entry in mortar matrix D");

  const Eigen::VectorXd linearized =
      slave_system.residual + slave_system.tangent * delta_u_slave;
  const std::vector<int> Cs = interface.slave_dofs();
  Eigen::VectorXd lambda(Cs.size());
  for (std::size_t i = 0; i < Cs.size(); ++i)
    lambda(i) = -linearized(Cs[i]) / ops.D(static_cast<int>(i) / 2);
  return lambda;
}

namespace {

struct CurveContext {
  bool active = false;
  std::vector<int> probe_global_dofs;
  double reference_value = 0.0;  // prescribed value at t = 1
};

CurveContext make_curve_context(const CoupledScenario& scenario) {
  CurveContext ctx;
  if (!scenario.curve) return ctx;
  const auto& probe = *scenario.curve;
  const auto& mesh = scenario.meshes[probe.sub];
  const auto& load = scenario.loads[probe.sub];
  const int offset = scenario.layout.subs[probe.sub].dof_offset;
  for (int node : mesh.edge_set_nodes(probe.edge_set)) {
    const int local = 2 * node + probe.component;
    auto it = load.dirichlet.find(local);
    if (it == load.dirichlet.end()) continue;
    ctx.probe_global_dofs.push_back(offset + local);
    if (std::abs(it->second) > std::abs(ctx.reference_value))
      ctx.reference_value = it->second;
  }
  if (ctx.probe_global_dofs.empty())
    throw ConfigError("curve probe edge has no constrained DOFs");
  ctx.active = true;
  return ctx;
}

std::vector<Eigen::VectorXd> split_states(const Eigen::VectorXd& U,
                                          const SystemLayout& layout) {
  std::vector<Eigen::VectorXd> states;
  states.reserve(layout.subs.size());
  for (const auto& sub : layout.subs)
    states.push_back(U.segment(sub.dof_offset, sub.dof_count));
  return states;
}

}  // namespace

RunResult newton_solve_coupled(const CoupledScenario& scenario) {
  const int n_subs = scenario.substructure_count();
  const auto& layout = scenario.layout;

  const std::vector<int> constrained = scenario.constrained_global_dofs();
  const Condensation cond =
      build_condensation(layout, scenario.mortar, constrained);
  std::vector<int> constrained_cond;
  constrained_cond.reserve(constrained.size());
  for (int gd : constrained) constrained_cond.push_back(cond.cond_index[gd]);

  const CurveContext curve_ctx = make_curve_context(scenario);

  RunResult result;
  result.n_unknowns = cond.n_cond;

  Eigen::VectorXd U = Eigen::VectorXd::Zero(layout.total_dofs);
  Eigen::VectorXd G_cond_latest = Eigen::VectorXd::Zero(cond.n_cond);

  auto substep = [&](double /*t_from*/, double t_to) -> SubstepResult {
    const Eigen::VectorXd U_backup = U;
    try {
      SubstepResult res;
      DirichletMap increment;  // keyed by condensed index
      for (int s = 0; s < n_subs; ++s) {
        const int offset = layout.subs[s].dof_offset;
        for (const auto& [d, v] : scenario.loads[s].dirichlet) {
          const double delta = t_to * v - U(offset + d);
          if (delta != 0.0) increment[cond.cond_index[offset + d]] = delta;
        }
      }

      for (int iter = 0; iter <= scenario.options.max_iter; ++iter) {
        const auto t_assembly = Clock::now();
        std::vector<AssembledSystem> systems;
        systems.reserve(n_subs);
        for (int s = 0; s < n_subs; ++s) {
          DisplacementState state{
              U.segment(layout.subs[s].dof_offset, layout.subs[s].dof_count),
              t_to};
          systems.push_back(assemble_raw(scenario.meshes[s],
                                         scenario.materials[s], state,
                                         scenario.loads[s]));
        }
        const FullSystem full = stack_systems(systems, layout);
        Eigen::SparseMatrix<double> K_cond =
            cond.T.transpose() * full.K * cond.T;
        Eigen::VectorXd G_cond = cond.T.transpose() * full.G;
        result.assembly_s += seconds_since(t_assembly);

        Eigen::VectorXd g_free = G_cond;
        for (int q : constrained_cond) g_free(q) = 0.0;
        res.residual_norms.push_back(g_free.norm());
        if (increment.empty() && g_free.norm() <= scenario.options.tol) {
          G_cond_latest = G_cond;
          return res;
        }
        if (iter == scenario.options.max_iter) break;

        Eigen::VectorXd rhs = G_cond;
        apply_dirichlet(K_cond, rhs, increment, constrained_cond);
        increment.clear();

        const auto t_solve = Clock::now();
        const Eigen::VectorXd du_cond = solve_spd(K_cond, -rhs);
        result.solve_s += seconds_since(t_solve);

        U += cond.T * du_cond;
        ++res.iterations;
      }
      throw NonConvergenceError(
          res.residual_norms.back(),
          "coupled newton: no convergence at load factor " +
              std::to_string(t_to));
    } catch (...) {
      U = U_backup;
      throw;
    }
  };

  for (std::size_t k = 0; k < scenario.load_factors.size(); ++k) {
    const double t = scenario.load_factors[k];
    const double t_prev = k == 0 ? 0.0 : scenario.load_factors[k - 1];
    const auto records = quasi_static_drive(
        {t}, scenario.options.max_halvings, substep, t_prev);
    const auto& rec = records.front();
    result.total_substeps += rec.substeps;
    result.residual_history.push_back(rec.residual_norms);
    result.full_residual_norms.push_back(rec.residual_norms.back());
    result.trajectory.push_back(split_states(U, layout));

    CurvePoint point;
    point.step = static_cast<int>(k) + 1;
    point.load_factor = t;
    point.newton_iters = rec.iterations;
    point.assembly_s = result.assembly_s;
    point.solve_s = result.solve_s;
    if (curve_ctx.active) {
      point.displacement = t * curve_ctx.reference_value;
      for (int gd : curve_ctx.probe_global_dofs)
        point.force += G_cond_latest(cond.cond_index[gd]);
    }
    result.curve.push_back(point);
  }
  return result;
}

RunResult penalty_coupled_solve(const CoupledScenario& scenario,
                                double epsilon_penalty,
                                const std::vector<Eigen::MatrixXd>& bases) {
  if (!(epsilon_penalty > 0.0))
    throw ConfigError("penalty parameter must be positive");
  const int n_subs = scenario.substructure_count();
  const auto& layout = scenario.layout;
  const int n = layout.total_dofs;

  const std::vector<int> constrained = scenario.constrained_global_dofs();
  const std::set<int> constrained_set(constrained.begin(), constrained.end());

  // Per-substructure trial spaces: supplied bases (columns must vanish on
  // constrained DOFs) or the free-DOF selection.
  std::vector<Eigen::Triplet<double>> phi_triplets;
  int m_total = 0;
  for (int s = 0; s < n_subs; ++s) {
    const int offset = layout.subs[s].dof_offset;
    if (!bases.empty() && bases[s].size() > 0) {
      const Eigen::MatrixXd& phi = bases[s];
      if (phi.rows() != layout.subs[s].dof_count)
        throw ConfigError("penalty basis rows do not match substructure");
      for (Eigen::Index i = 0; i < phi.rows(); ++i)
        for (Eigen::Index c = 0; c < phi.cols(); ++c)
          if (phi(i, c) != 0.0)
            phi_triplets.emplace_back(offset + i, m_total + c, phi(i, c));
      m_total += static_cast<int>(phi.cols());
    } else {
      for (int d = 0; d < layout.subs[s].dof_count; ++d) {
        if (constrained_set.count(offset + d)) continue;
        phi_triplets.emplace_back(offset + d, m_total, 1.0);
        ++m_total;
      }
    }
  }
  Eigen::SparseMatrix<double> Phi(n, m_total);
  Phi.setFromTriplets(phi_triplets.begin(), phi_triplets.end());

  // Mortar-weighted gap operator g = B U, rows over owned slave DOFs.
  std::vector<Eigen::Triplet<double>> b_triplets;
  int gap_rows = 0;
  for (std::size_t j = 0; j < layout.interfaces.size(); ++j) {
    const auto& itf = layout.interfaces[j];
    const auto& ops = scenario.mortar[j];
    const int soff = layout.subs[itf.slave_sub].dof_offset;
    const int moff = layout.subs[itf.master_sub].dof_offset;
    for (Eigen::Index r = 0; r < ops.P.rows(); ++r)
      for (int c = 0; c < 2; ++c) {
        const int row = gap_rows + static_cast<int>(2 * r) + c;
        b_triplets.emplace_back(row, soff + 2 * itf.slave_nodes[r] + c,
                                ops.D(r));
        for (Eigen::Index k = 0; k < ops.P.cols(); ++k)
          b_triplets.emplace_back(row, moff + 2 * itf.master_nodes[k] + c,
                                  -ops.M(r, k));
      }
    gap_rows += 2 * static_cast<int>(ops.P.rows());
  }
  Eigen::SparseMatrix<double> B(gap_rows, n);
  B.setFromTriplets(b_triplets.begin(), b_triplets.end());
  const Eigen::SparseMatrix<double> Kpen =
      epsilon_penalty * Eigen::SparseMatrix<double>(B.transpose() * B);

  const CurveContext curve_ctx = make_curve_context(scenario);

  RunResult result;
  result.n_unknowns = m_total;

  Eigen::VectorXd U = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd G_pen_latest = Eigen::VectorXd::Zero(n);

  auto substep = [&](double /*t_from*/, double t_to) -> SubstepResult {
    const Eigen::VectorXd U_backup = U;
    try {
      SubstepResult res;
      Eigen::VectorXd bc_delta = Eigen::VectorXd::Zero(n);
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
        std::vector<AssembledSystem> systems;
        systems.reserve(n_subs);
        for (int s = 0; s < n_subs; ++s) {
          DisplacementState state{
              U.segment(layout.subs[s].dof_offset, layout.subs[s].dof_count),
              t_to};
          systems.push_back(assemble_raw(scenario.meshes[s],
                                         scenario.materials[s], state,
                                         scenario.loads[s]));
        }
        FullSystem full = stack_systems(systems, layout);
        const Eigen::VectorXd G_pen =
            full.G + epsilon_penalty * (B.transpose() * (B * U));
        const Eigen::SparseMatrix<double> K_total = full.K + Kpen;
        const Eigen::VectorXd r_red = Phi.transpose() * G_pen;
        result.assembly_s += seconds_since(t_assembly);

        res.residual_norms.push_back(r_red.norm());
        if (!bc_pending && r_red.norm() <= scenario.options.tol) {
          G_pen_latest = G_pen;
          return res;
        }
        if (iter == scenario.options.max_iter) break;

        Eigen::VectorXd rhs = r_red;
        if (bc_pending) rhs += Phi.transpose() * (K_total * bc_delta);
        const Eigen::SparseMatrix<double> K_red =
            Phi.transpose() * K_total * Phi;

        const auto t_solve = Clock::now();
        const Eigen::VectorXd da = solve_spd(K_red, -rhs);
        result.solve_s += seconds_since(t_solve);

        U += Phi * da;
        if (bc_pending) {
          U += bc_delta;
          bc_pending = false;
          bc_delta.setZero();
        }
        ++res.iterations;
      }
      throw NonConvergenceError(
          res.residual_norms.back(),
          "penalty newton: no convergence at load factor " +
              std::to_string(t_to));
    } catch (...) {
      U = U_backup;
      throw;
    }
  };

  for (std::size_t k = 0; k < scenario.load_factors.size(); ++k) {
    const double t = scenario.load_factors[k];
    const double t_prev = k == 0 ? 0.0 : scenario.load_factors[k - 1];
    const auto records = quasi_static_drive(
        {t}, scenario.options.max_halvings, substep, t_prev);
    const auto& rec = records.front();
    result.total_substeps += rec.substeps;
    result.residual_history.push_back(rec.residual_norms);
    result.full_residual_norms.push_back(rec.residual_norms.back());
    result.trajectory.push_back(split_states(U, layout));

    CurvePoint point;
    point.step = static_cast<int>(k) + 1;
    point.load_factor = t;
    point.newton_iters = rec.iterations;
    point.assembly_s = result.assembly_s;
    point.solve_s = result.solve_s;
    if (curve_ctx.active) {
      point.displacement = t * curve_ctx.reference_value;
      for (int gd : curve_ctx.probe_global_dofs)
        point.force += G_pen_latest(gd);
    }
    result.curve.push_back(point);
  }
  return result;
}

}  // namespace cbmor
