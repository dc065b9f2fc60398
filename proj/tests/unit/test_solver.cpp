#include "doctest.h"

#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tmc/solver.hpp"
#include "tmc/verification.hpp"

using namespace tmc;

namespace {

SparseSym sparse(const Eigen::MatrixXd& m) { return m.sparseView(0.0, 0.0); }

SparseSym with_full_diagonal(const Eigen::MatrixXd& m) {
  SparseSym s = sparse(m + Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  s.coeffs() *= 1.0;
  for (int k = 0; k < s.outerSize(); ++k)
    for (SparseSym::InnerIterator it(s, k); it; ++it)
      if (it.row() == it.col()) it.valueRef() -= 1.0;
  return s;
}

}  // namespace

TEST_CASE("modified Cholesky: SPD matrix needs no shift") {
  Eigen::MatrixXd A(3, 3);
  A << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  ModifiedCholesky chol;
  chol.factorize(sparse(A), SolverConfig{});
  CHECK(chol.shift() == 0.0);
  CHECK_FALSE(chol.indefinite());
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(3);
  CHECK((A * chol.solve(b) - b).norm() < 1e-12);
}

TEST_CASE("modified Cholesky: diag(1, -1) gives a shifted descent direction") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, -1;
  ModifiedCholesky chol;
  chol.factorize(sparse(A), SolverConfig{});
  CHECK(chol.shift() > 1.0);
  CHECK(chol.indefinite());
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector2d g(n(rng), n(rng));
    const Eigen::VectorXd d = chol.solve(-g);
    CHECK(d.dot(g) < 0.0);
    // Solves the shifted system.
    CHECK(((A + chol.shift() * Eigen::Matrix2d::Identity()) * d + g).norm() < 1e-12 * g.norm() * (1 + chol.shift()));
  }
}

TEST_CASE("modified Cholesky: singular matrix is flagged") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 1, 1, 1;
  ModifiedCholesky chol;
  chol.factorize(sparse(A), SolverConfig{});
  CHECK(chol.shift() > 0.0);
  CHECK(chol.indefinite());
}

TEST_CASE("modified Cholesky: shift limit raises an error") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, -10;
  SolverConfig cfg;
  cfg.shift_max = 1.0;
  ModifiedCholesky chol;
  CHECK_THROWS_AS(chol.factorize(sparse(A), cfg), IllConditionedError);
}

TEST_CASE("modified Cholesky: descent on random indefinite matrices") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 30; ++trial) {
    const int size = 12;
    Eigen::MatrixXd B(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) B(i, j) = std::abs(i - j) <= 2 ? n(rng) : 0.0;
    const Eigen::MatrixXd A = 0.5 * (B + B.transpose());
    ModifiedCholesky chol;
    chol.factorize(with_full_diagonal(A), SolverConfig{});
    const Eigen::VectorXd g = Eigen::VectorXd::NullaryExpr(size, [&] { return n(rng); });
    const Eigen::VectorXd d = chol.solve(-g);
    CHECK(d.dot(g) < 0.0);
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues().minCoeff();
    CHECK(chol.indefinite() == (min_eig <= 0.0));
    if (chol.indefinite()) CHECK(chol.shift() > -min_eig);
  }
}

TEST_CASE("Newton on a linear problem converges in one iteration") {
  MeshModel m = rectangle_mesh(4, 2, 2.0, 1.0, LinearTermParams{1000.0, 0.3}, QuadratureSpec::Gauss2x2);
  BoundaryProgram bc;
  bc.fix(m.node_set("left"), 0);
  bc.fix({m.node_set("left").front()}, 1);
  bc.ramp(m.node_set("right"), 0, 0.1);
  bc.ramp(m.node_set("top"), 1, -0.05);
  Problem p(m, bc);
  const StepResult r = newton_solve(p, 1.0, Eigen::VectorXd::Zero(m.num_dofs()), SolverConfig{});
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.min_step_length == 1.0);

  SolverConfig plain;
  plain.tangent_predictor = false;
  const StepResult r2 = newton_solve(p, 1.0, Eigen::VectorXd::Zero(m.num_dofs()), plain);
  CHECK(r2.converged);
  CHECK(r2.iterations == 1);
  CHECK((r.d - r2.d).cwiseAbs().maxCoeff() < 1e-10);

  // A zero load increment needs no iteration.
  const StepResult r3 = newton_solve(p, 1.0, r.d, SolverConfig{});
  CHECK(r3.converged);
  CHECK(r3.iterations == 0);
}

TEST_CASE("Newton on a nonlinear problem with logging") {
  MeshModel m = rectangle_mesh(6, 2, 3.0, 1.0, NeoHookeanParams{1e6, 0.214e6}, QuadratureSpec::Lobatto3x3);
  BoundaryProgram bc;
  bc.fix(m.node_set("left"), 0);
  bc.fix(m.node_set("left"), 1);
  bc.ramp(m.node_set("right"), 1, -0.6);
  Problem p(m, bc);
  std::ostringstream log;
  SolverConfig cfg;
  cfg.dlambda_initial = 0.25;
  const SolveHistory h = adaptive_march(p, cfg, {}, stream_logger(log));
  CHECK(h.completed);
  CHECK(h.termination == "completed");
  CHECK(log.str().find("step=1 lambda=0.25 iter=1") != std::string::npos);
  CHECK(log.str().find("tau=") != std::string::npos);
  for (std::size_t k = 1; k < h.steps.size(); ++k) CHECK(h.steps[k].lambda > h.steps[k - 1].lambda);

  // Converged state: residual below tolerance and reactions balance.
  const AssemblyResult r = p.assembler().assemble(h.final_d);
  const Eigen::Vector2d left = reaction(r.f_full, m.node_set("left"));
  const Eigen::Vector2d right = reaction(r.f_full, m.node_set("right"));
  CHECK((left + right).norm() <= 10 * std::max(1e-8 * r.f_full.norm(), r.f_free.norm() + 1e-10));
}

TEST_CASE("energy merit line search also converges") {
  MeshModel m = rectangle_mesh(4, 2, 2.0, 1.0, NeoHookeanParams{1e6, 0.214e6}, QuadratureSpec::Lobatto3x3);
  BoundaryProgram bc;
  bc.fix(m.node_set("left"), 0);
  bc.fix(m.node_set("left"), 1);
  bc.ramp(m.node_set("right"), 0, 0.5);
  Problem p(m, bc);
  SolverConfig cfg;
  cfg.merit = MeritFunction::Energy;
  cfg.dlambda_initial = 0.5;
  CHECK(adaptive_march(p, cfg).completed);
}

TEST_CASE("adaptive march: linear problem takes one step") {
  MeshModel m = rectangle_mesh(2, 2, 1.0, 1.0, LinearTermParams{1.0, 0.0}, QuadratureSpec::Gauss2x2);
  BoundaryProgram bc;
  bc.fix(m.node_set("bottom"), 0);
  bc.fix(m.node_set("bottom"), 1);
  bc.ramp(m.node_set("top"), 0, 0.3);
  Problem p(m, bc);
  SolverConfig cfg;
  cfg.dlambda_initial = 1.0;
  const SolveHistory h = adaptive_march(p, cfg);
  CHECK(h.completed);
  REQUIRE(h.steps.size() == 2);
  CHECK(h.steps[1].lambda == 1.0);
  CHECK(h.rejected_steps == 0);
}

namespace {

StepResult fake_step(double lambda, const Eigen::VectorXd& d, bool ok) {
  StepResult r;
  r.lambda = lambda;
  r.converged = ok;
  r.d = Eigen::VectorXd::Constant(d.size(), lambda);
  if (!ok) {
    r.d = Eigen::VectorXd::Constant(d.size(), -1.0);  // garbage that must not leak
    r.failure = "forced";
  }
  return r;
}

}  // namespace

TEST_CASE("adaptive march: persistent failure ends before the failing load") {
  SolverConfig cfg;
  cfg.dlambda_initial = 0.1;
  cfg.dlambda_min = 1e-4;
  const double lambda_star = 0.43;
  const SolveHistory h = adaptive_march(
      [&](double l, const Eigen::VectorXd& d) { return fake_step(l, d, l < lambda_star); },
      Eigen::VectorXd::Zero(3), cfg);
  CHECK_FALSE(h.completed);
  CHECK(h.termination == "non-convergence");
  CHECK(h.last_failure == "forced");
  CHECK(h.steps.back().lambda < lambda_star);
  CHECK(h.steps.back().lambda > lambda_star - 2e-4);
}

TEST_CASE("adaptive march: recovers from a one-off failure with exact restart") {
  SolverConfig cfg;
  cfg.dlambda_initial = 0.1;
  bool failed = false;
  Eigen::VectorXd last_accepted = Eigen::VectorXd::Zero(3);
  bool restart_exact = true;
  const SolveHistory h = adaptive_march(
      [&](double l, const Eigen::VectorXd& d) {
        if (d != last_accepted) restart_exact = false;
        if (!failed && l > 0.45) {
          failed = true;
          return fake_step(l, d, false);
        }
        return fake_step(l, d, true);
      },
      Eigen::VectorXd::Zero(3), cfg,
      [&](const AcceptedStep&, const Eigen::VectorXd& d) {
        last_accepted = d;
        return true;
      });
  CHECK(h.completed);
  CHECK(h.rejected_steps == 1);
  CHECK(restart_exact);
  CHECK(h.steps.back().lambda == 1.0);
  CHECK(h.final_d == Eigen::VectorXd::Constant(3, 1.0));
}

TEST_CASE("adaptive march: step growth is capped") {
  SolverConfig cfg;
  cfg.dlambda_initial = 0.01;
  std::vector<double> lambdas;
  const SolveHistory h = adaptive_march(
      [&](double l, const Eigen::VectorXd& d) {
        lambdas.push_back(l);
        return fake_step(l, d, true);
      },
      Eigen::VectorXd::Zero(1), cfg);
  CHECK(h.completed);
  double max_inc = 0.0;
  for (std::size_t k = 1; k < lambdas.size(); ++k) max_inc = std::max(max_inc, lambdas[k] - lambdas[k - 1]);
  CHECK(max_inc <= 0.04 + 1e-12);
  CHECK(max_inc > 0.035);
  // Growth needs two successes: the first two increments equal the initial one.
  CHECK(lambdas[1] - lambdas[0] == doctest::Approx(0.01));
  CHECK(lambdas[2] - lambdas[1] == doctest::Approx(0.012));
}

TEST_CASE("adaptive march: callback can stop the run") {
  SolverConfig cfg;
  cfg.dlambda_initial = 0.1;
  const SolveHistory h = adaptive_march([&](double l, const Eigen::VectorXd& d) { return fake_step(l, d, true); },
                                        Eigen::VectorXd::Zero(1), cfg,
                                        [](const AcceptedStep& s, const Eigen::VectorXd&) { return s.lambda < 0.3; });
  CHECK(h.termination == "stopped");
  CHECK_FALSE(h.completed);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.dlambda_min = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.tol_rel_residual = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("negative curvature direction: found for an indefinite matrix, absent for SPD") {
  Eigen::MatrixXd A(4, 4);
  A << 4, 1, 0, 0, 1, -2, 1, 0, 0, 1, 3, 1, 0, 0, 1, 5;
  const SparseSym K = sparse(A);
  ModifiedCholesky chol;
  chol.factorize(K, SolverConfig{});
  REQUIRE(chol.indefinite());
  const Eigen::VectorXd v = negative_curvature_direction(chol, K);
  REQUIRE(v.size() == 4);
  CHECK(v.norm() == doctest::Approx(1.0));
  CHECK(v.dot(A * v) < 0.0);
  const double lambda_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues()[0];
  CHECK(v.dot(A * v) == doctest::Approx(lambda_min).epsilon(1e-2));

  Eigen::MatrixXd B(2, 2);
  B << 2, 1, 1, 2;
  ModifiedCholesky spd;
  spd.factorize(sparse(B), SolverConfig{});
  CHECK(negative_curvature_direction(spd, sparse(B)).size() == 0);
}
