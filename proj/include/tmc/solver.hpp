#pragma once

// Load-controlled Newton solver with backtracking line search, a diagonal-shift
// modified Cholesky factorization, and adaptive load stepping.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "tmc/assembly.hpp"

namespace tmc {

enum class MeritFunction { ResidualNorm, Energy };

struct SolverConfig {
  double tol_rel_residual = 1e-8;
  double tol_abs_residual = 1e-10;  // N; scaled by force_scale
  double force_scale = 1.0;         // N
  int max_newton_iters = 25;

  double ls_backtrack = 0.5;
  double ls_sufficient_decrease = 1e-4;
  int ls_max_trials = 15;
  MeritFunction merit = MeritFunction::ResidualNorm;

  double dlambda_initial = 0.05;
  double dlambda_min = 1e-5;
  double dlambda_growth = 1.2;
  double dlambda_cut = 0.5;
  double dlambda_max_factor = 4.0;  // growth cap relative to dlambda_initial
  int growth_streak = 2;

  double shift_initial = 1e-8;  // relative to the mean absolute diagonal
  double shift_growth = 10.0;
  double shift_max = 1e12;      // relative to the mean absolute diagonal

  bool tangent_predictor = true;

  // At a converged state with an indefinite tangent, step along the direction
  // of most negative curvature (energy line search) and iterate again, at most
  // max_escapes times per load step.
  bool negative_curvature_escape = false;
  int max_escapes = 3;

  // Throws ConfigError when a value is out of range.
  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

// Factorization of K + tau I with the smallest tau in {0, b0, b0 g, b0 g^2, ...}
// that gives a positive definite LDL^T (b0 = shift_initial * mean |diag|).
class ModifiedCholesky {
 public:
  // Throws IllConditionedError when tau would exceed shift_max * mean |diag|.
  void factorize(const SparseSym& K, const SolverConfig& cfg);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  double shift() const { return shift_; }
  bool indefinite() const { return shift_ > 0.0; }
  int attempts() const { return attempts_; }
  double diagonal_scale() const { return scale_; }

 private:
  Eigen::SimplicialLDLT<SparseSym, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  bool analyzed_ = false;
  Eigen::Index analyzed_size_ = -1;
  Eigen::Index analyzed_nnz_ = -1;
  double shift_ = 0.0;
  double scale_ = 0.0;
  int attempts_ = 0;
};

struct IterationLog {
  int step = 0;
  double lambda = 0.0;
  int iteration = 0;
  double residual = 0.0;
  double step_length = 1.0;
  double shift = 0.0;
};

using IterationLogger = std::function<void(const IterationLog&)>;

// Logger writing "step=.. lambda=.. iter=.. residual=.. s=.. tau=.." lines.
IterationLogger stream_logger(std::ostream& os);

struct StepResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;       // free-DOF residual norm, N
  double reference = 0.0;      // reaction norm used for the relative test, N
  double lambda = 0.0;
  Eigen::VectorXd d;           // full displacement vector
  double max_shift = 0.0;
  bool indefinite = false;
  double min_step_length = 1.0;
  int escapes = 0;             // negative-curvature escapes taken
  std::string failure;         // empty when converged
};

// Owns a mesh, its boundary program, the DOF map and an assembler.
class Problem {
 public:
  Problem(MeshModel mesh, BoundaryProgram bc, int threads = 1);
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  const MeshModel& mesh() const { return mesh_; }
  const BoundaryProgram& bc() const { return bc_; }
  const DofMap& dofs() const { return dofs_; }
  const Assembler& assembler() const { return *assembler_; }

 private:
  MeshModel mesh_;
  BoundaryProgram bc_;
  DofMap dofs_;
  std::unique_ptr<Assembler> assembler_;
};

// Unit eigenvector estimate for the most negative eigenvalue of K, from
// inverse iteration with a factorization of K + tau I (tau > 0), stopped once
// the Rayleigh quotient is negative and settled. Returns an empty vector when
// the Rayleigh quotient is not negative.
Eigen::VectorXd negative_curvature_direction(const ModifiedCholesky& chol, const SparseSym& K, int iterations = 200);

// Solves the load step at lambda starting from d_start, which must satisfy the
// boundary program at some earlier load factor. Never throws for
// non-convergence or singular kinematics; those are reported in the result.
StepResult newton_solve(const Problem& problem, double lambda, const Eigen::VectorXd& d_start,
                        const SolverConfig& cfg, const IterationLogger& log = {}, int step_index = 0);

struct AcceptedStep {
  int step = 0;
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double max_shift = 0.0;
  bool indefinite = false;
};

struct SolveHistory {
  std::vector<AcceptedStep> steps;   // step 0 is the reference state at lambda = 0
  Eigen::VectorXd final_d;
  bool completed = false;
  std::string termination;           // "completed", "non-convergence", "stopped"
  std::string last_failure;
  int rejected_steps = 0;
};

using StepFunction = std::function<StepResult(double lambda, const Eigen::VectorXd& d_prev)>;
// Called after every accepted step with the step record and its displacement.
// Returning false stops the march with termination "stopped".
using AcceptCallback = std::function<bool(const AcceptedStep&, const Eigen::VectorXd&)>;

// Load factors listed in `stops` (ascending, inside (0, 1)) are always hit
// exactly by an accepted step.
SolveHistory adaptive_march(const StepFunction& step, const Eigen::VectorXd& d0, const SolverConfig& cfg,
                            const AcceptCallback& on_accept = {}, const std::vector<double>& stops = {});

SolveHistory adaptive_march(const Problem& problem, const SolverConfig& cfg, const AcceptCallback& on_accept = {},
                            const IterationLogger& log = {}, const std::vector<double>& stops = {});

}  // namespace tmc
