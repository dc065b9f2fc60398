#include "tmc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace tmc {

void SolverConfig::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("solver setting ") + name + " must be positive");
  };
  positive(tol_rel_residual, "tol_rel_residual");
  positive(tol_abs_residual, "tol_abs_residual");
  positive(force_scale, "force_scale");
  positive(dlambda_initial, "dlambda_initial");
  positive(dlambda_min, "dlambda_min");
  positive(shift_initial, "shift_initial");
  positive(shift_max, "shift_max");
  if (max_newton_iters < 1) throw ConfigError("solver setting max_newton_iters must be at least 1");
  if (max_escapes < 0) throw ConfigError("solver setting max_escapes must be non-negative");
  if (ls_max_trials < 1) throw ConfigError("solver setting ls_max_trials must be at least 1");
  if (!(ls_backtrack > 0.0 && ls_backtrack < 1.0)) throw ConfigError("ls_backtrack must lie in (0, 1)");
  if (!(ls_sufficient_decrease > 0.0 && ls_sufficient_decrease < 1.0))
    throw ConfigError("ls_sufficient_decrease must lie in (0, 1)");
  if (!(dlambda_cut > 0.0 && dlambda_cut < 1.0)) throw ConfigError("dlambda_cut must lie in (0, 1)");
  if (!(dlambda_growth >= 1.0)) throw ConfigError("dlambda_growth must be at least 1");
  if (!(shift_growth > 1.0)) throw ConfigError("shift_growth must exceed 1");
  if (!(dlambda_max_factor >= 1.0)) throw ConfigError("dlambda_max_factor must be at least 1");
  if (dlambda_min > dlambda_initial) throw ConfigError("dlambda_min exceeds dlambda_initial");
}

void ModifiedCholesky::factorize(const SparseSym& K, const SolverConfig& cfg) {
  const Eigen::Index n = K.rows();
  scale_ = n > 0 ? K.diagonal().cwiseAbs().mean() : 1.0;
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
    if (!std::isfinite(scale_)) throw IllConditionedError("non-finite tangent diagonal");
    scale_ = 1.0;
  }
  if (!analyzed_ || analyzed_size_ != n || analyzed_nnz_ != K.nonZeros()) {
    ldlt_.analyzePattern(K);
    analyzed_ = true;
    analyzed_size_ = n;
    analyzed_nnz_ = K.nonZeros();
  }

  const double pivot_floor = 1e-14 * scale_;
  double tau = 0.0;
  attempts_ = 0;
  for (;;) {
    ++attempts_;
    ldlt_.setShift(tau);
    ldlt_.factorize(K);
    if (ldlt_.info() == Eigen::Success && (n == 0 || ldlt_.vectorD().minCoeff() > pivot_floor)) break;
    tau = tau == 0.0 ? cfg.shift_initial * scale_ : tau * cfg.shift_growth;
    if (tau > cfg.shift_max * scale_)
      throw IllConditionedError("diagonal shift exceeded " + std::to_string(cfg.shift_max) +
                                " x mean diagonal without reaching positive definiteness");
  }
  shift_ = tau;
}

Eigen::VectorXd ModifiedCholesky::solve(const Eigen::VectorXd& b) const { return ldlt_.solve(b); }

Eigen::VectorXd negative_curvature_direction(const ModifiedCholesky& chol, const SparseSym& K, int iterations) {
  const Eigen::Index n = K.rows();
  if (n == 0 || !chol.indefinite()) return {};
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uni(rng);
  v.normalize();
  const auto K_sym = K.selfadjointView<Eigen::Lower>();
  double rq_prev = 0.0;
  for (int k = 0; k < iterations; ++k) {
    v = chol.solve(v);
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) return {};
    v /= norm;
    const double rq = v.dot(K_sym * v);
    if (rq < 0.0 && std::abs(rq - rq_prev) <= 1e-3 * std::abs(rq)) break;
    rq_prev = rq;
  }
  const Eigen::VectorXd Kv = K_sym * v;
  if (!(v.dot(Kv) < 0.0)) return {};
  return v;
}

IterationLogger stream_logger(std::ostream& os) {
  return [&os](const IterationLog& l) {
    os << "step=" << l.step << " lambda=" << l.lambda << " iter=" << l.iteration << " residual=" << l.residual
       << " s=" << l.step_length << " tau=" << l.shift << '\n';
  };
}

Problem::Problem(MeshModel mesh, BoundaryProgram bc, int threads)
    : mesh_(std::move(mesh)), bc_(std::move(bc)) {
  mesh_.validate();
  dofs_ = build_dof_map(mesh_, bc_);
  assembler_ = std::make_unique<Assembler>(mesh_, dofs_, threads);
}

namespace {

double reaction_norm(const DofMap& dofs, const Eigen::VectorXd& f_full) {
  double s = 0.0;
  for (int dof : dofs.prescribed_dofs) s += f_full[dof] * f_full[dof];
  return std::sqrt(s);
}

}  // namespace

StepResult newton_solve(const Problem& problem, double lambda, const Eigen::VectorXd& d_start,
                        const SolverConfig& cfg, const IterationLogger& log, int step_index) {
  const DofMap& dofs = problem.dofs();
  const Assembler& assembler = problem.assembler();
  const double tol_abs = cfg.tol_abs_residual * cfg.force_scale;

  StepResult out;
  out.lambda = lambda;
  out.d = d_start;

  const AssemblyOptions with_k;

  ModifiedCholesky chol;
  const auto note_factorization = [&] {
    out.max_shift = std::max(out.max_shift, chol.shift());
    out.indefinite = out.indefinite || chol.indefinite();
  };

  const Eigen::VectorXd target = prescribed_values(dofs, lambda);
  Eigen::VectorXd dp(dofs.num_prescribed());
  for (int k = 0; k < dofs.num_prescribed(); ++k) dp[k] = target[k] - d_start[dofs.prescribed_dofs[k]];

  Eigen::VectorXd d = d_start;
  apply_prescribed(dofs, lambda, d);
  AssemblyResult cur;
  bool have_state = false;

  try {
    if (cfg.tangent_predictor && dp.norm() > 0.0) {
      // Linearized response to the prescribed increment, taken from the
      // previous state; backtracked if it produces invalid kinematics.
      AssemblyOptions opts;
      opts.coupling = true;
      const AssemblyResult prev = assembler.assemble(d_start, opts);
      chol.factorize(prev.K, cfg);
      note_factorization();
      const Eigen::VectorXd dx = chol.solve(-(prev.f_free + prev.K_fp * dp));
      out.iterations = 1;
      for (const double s : {1.0, 0.5, 0.25, 0.0}) {
        Eigen::VectorXd trial = d;
        add_free(dofs, s * dx, trial);
        try {
          cur = assembler.assemble(trial, with_k);
          d = std::move(trial);
          have_state = true;
          out.min_step_length = std::min(out.min_step_length, s);
          break;
        } catch (const SingularKinematicsError&) {
        } catch (const GeometryError&) {
        }
      }
      if (!have_state) throw SingularKinematicsError(0.0);
    } else {
      cur = assembler.assemble(d, with_k);
    }
  } catch (const Error& e) {
    out.failure = std::string("initial state: ") + e.what();
    return out;
  }

  // Moves d off a saddle: picks the step along the negative-curvature
  // direction with the lowest energy among geometrically growing lengths.
  const auto escape_saddle = [&]() -> bool {
    try {
      chol.factorize(cur.K, cfg);
    } catch (const IllConditionedError&) {
      return false;
    }
    const Eigen::VectorXd v0 = negative_curvature_direction(chol, cur.K);
    if (v0.size() == 0) return false;
    note_factorization();
    const Eigen::VectorXd v = cur.f_free.dot(v0) > 0.0 ? Eigen::VectorXd(-v0) : v0;

    double extent = 0.0;
    for (const Eigen::Vector2d& x : problem.mesh().nodes) extent = std::max(extent, x.cwiseAbs().maxCoeff());
    const AssemblyOptions energy_only{false, false, false};
    double best_e = cur.energy, best_t = 0.0;
    for (double t = 1e-6 * extent; t <= 0.1 * extent; t *= 2.0) {
      Eigen::VectorXd d_try = d;
      add_free(dofs, t * v, d_try);
      double e;
      try {
        e = assembler.assemble(d_try, energy_only).energy;
      } catch (const SingularKinematicsError&) {
        break;
      } catch (const GeometryError&) {
        break;
      }
      if (!(e < best_e)) {
        if (best_t > 0.0) break;
        continue;
      }
      best_e = e;
      best_t = t;
    }
    if (best_t == 0.0) return false;
    Eigen::VectorXd d_new = d;
    add_free(dofs, best_t * v, d_new);
    try {
      cur = assembler.assemble(d_new, with_k);
    } catch (const Error&) {
      return false;
    }
    d = std::move(d_new);
    ++out.escapes;
    return true;
  };

  double last_s = 1.0;
  for (;;) {
    const double res = cur.f_free.norm();
    const double ref = reaction_norm(dofs, cur.f_full);
    out.residual = res;
    out.reference = ref;
    if (log) log({step_index, lambda, out.iterations, res, last_s, chol.shift()});
    if (!std::isfinite(res)) {
      out.failure = "non-finite residual";
      break;
    }
    if (res <= tol_abs || res <= cfg.tol_rel_residual * ref) {
      if (cfg.negative_curvature_escape && out.escapes < cfg.max_escapes && escape_saddle()) continue;
      out.converged = true;
      break;
    }
    if (out.iterations >= cfg.max_newton_iters) {
      out.failure = "maximum Newton iterations reached";
      break;
    }

    Eigen::VectorXd dx;
    try {
      chol.factorize(cur.K, cfg);
    } catch (const IllConditionedError& e) {
      out.failure = e.what();
      break;
    }
    note_factorization();
    dx = chol.solve(-cur.f_free);
    const double slope = cur.f_free.dot(dx);
    const double e0 = cfg.merit == MeritFunction::Energy ? cur.energy : 0.0;

    bool accepted = false;
    double s = 1.0;
    for (int trial = 0; trial < cfg.ls_max_trials; ++trial, s *= cfg.ls_backtrack) {
      Eigen::VectorXd d_try = d;
      add_free(dofs, s * dx, d_try);
      AssemblyResult next;
      try {
        next = assembler.assemble(d_try, with_k);
      } catch (const SingularKinematicsError&) {
        continue;
      } catch (const GeometryError&) {
        continue;
      }
      const bool ok = cfg.merit == MeritFunction::ResidualNorm
                          ? next.f_free.norm() <= (1.0 - cfg.ls_sufficient_decrease * s) * res
                          : next.energy <= e0 + cfg.ls_sufficient_decrease * s * slope;
      if (ok) {
        d = std::move(d_try);
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    ++out.iterations;
    if (!accepted) {
      out.failure = "line search failed";
      break;
    }
    last_s = s;
    out.min_step_length = std::min(out.min_step_length, s);
  }
  out.d = std::move(d);
  return out;
}

SolveHistory adaptive_march(const StepFunction& step, const Eigen::VectorXd& d0, const SolverConfig& cfg,
                            const AcceptCallback& on_accept, const std::vector<double>& stops) {
  cfg.validate();
  for (std::size_t i = 0; i < stops.size(); ++i)
    if (!(stops[i] > 0.0 && stops[i] < 1.0) || (i > 0 && !(stops[i] > stops[i - 1])))
      throw ConfigError("load factor stops must be ascending and inside (0, 1)");
  SolveHistory h;
  double lambda = 0.0;
  Eigen::VectorXd d = d0;

  const AcceptedStep first{0, 0.0, 0, 0.0, 0.0, false};
  h.steps.push_back(first);
  if (on_accept && !on_accept(first, d)) {
    h.termination = "stopped";
    h.final_d = d;
    return h;
  }

  const double dl_max = cfg.dlambda_initial * cfg.dlambda_max_factor;
  double dl = cfg.dlambda_initial;
  int streak = 0;
  h.termination = "completed";

  std::size_t next_stop = 0;
  while (lambda < 1.0) {
    while (next_stop < stops.size() && stops[next_stop] <= lambda) ++next_stop;
    const double target = next_stop < stops.size() ? stops[next_stop] : 1.0;
    const double lambda_try = (target - lambda) <= dl * (1.0 + 1e-9) ? target : lambda + dl;
    StepResult r = step(lambda_try, d);
    if (r.converged) {
      lambda = lambda_try;
      d = std::move(r.d);
      const AcceptedStep rec{static_cast<int>(h.steps.size()), lambda, r.iterations, r.residual, r.max_shift,
                             r.indefinite};
      h.steps.push_back(rec);
      if (on_accept && !on_accept(rec, d)) {
        h.termination = "stopped";
        break;
      }
      if (++streak >= cfg.growth_streak) {
        dl = std::min(dl * cfg.dlambda_growth, dl_max);
        streak = 0;
      }
    } else {
      ++h.rejected_steps;
      h.last_failure = r.failure;
      streak = 0;
      dl *= cfg.dlambda_cut;
      if (dl < cfg.dlambda_min) {
        h.termination = "non-convergence";
        break;
      }
    }
  }
  h.completed = lambda >= 1.0;
  h.final_d = std::move(d);
  return h;
}

SolveHistory adaptive_march(const Problem& problem, const SolverConfig& cfg, const AcceptCallback& on_accept,
                            const IterationLogger& log, const std::vector<double>& stops) {
  int step_index = 1;
  const StepFunction step = [&](double lambda, const Eigen::VectorXd& d_prev) {
    return newton_solve(problem, lambda, d_prev, cfg, log, step_index);
  };
  const AcceptCallback counted = [&](const AcceptedStep& s, const Eigen::VectorXd& d) {
    step_index = s.step + 1;
    return on_accept ? on_accept(s, d) : true;
  };
  return adaptive_march(step, Eigen::VectorXd::Zero(problem.mesh().num_dofs()), cfg, counted, stops);
}

}  // namespace tmc
