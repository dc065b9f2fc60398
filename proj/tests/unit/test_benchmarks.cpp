#include "doctest.h"

#include <cmath>
#include <numbers>

#include "tmc/benchmarks.hpp"

using namespace tmc;

namespace {

bool has_region(const MeshModel& mesh, bool third_medium) {
  for (const MeshElement& e : mesh.elements)
    if (mesh.regions[e.region].third_medium == third_medium) return true;
  return false;
}

// d = G X on every node.
Eigen::VectorXd affine_field(const MeshModel& mesh, const Eigen::Matrix2d& G) {
  Eigen::VectorXd d(mesh.num_dofs());
  for (int n = 0; n < mesh.num_nodes(); ++n) d.segment<2>(2 * n) = G * mesh.nodes[n];
  return d;
}

}  // namespace

TEST_CASE("benchmark and level names round trip") {
  for (BenchmarkKind k : {BenchmarkKind::CShape, BenchmarkKind::ClosedBox, BenchmarkKind::PistonBox,
                          BenchmarkKind::ConfigForce})
    CHECK(parse_benchmark_kind(benchmark_name(k)) == k);
  for (MeshLevel l : {MeshLevel::M3, MeshLevel::M9, MeshLevel::M15, MeshLevel::M21})
    CHECK(parse_mesh_level(mesh_level_name(l)) == l);
  CHECK_THROWS_AS(parse_benchmark_kind("piston"), ConfigError);
  CHECK_THROWS_AS(parse_mesh_level("M4"), ConfigError);
  CHECK(beam_elements_per_height(MeshLevel::M3) == 1);
  CHECK(beam_elements_per_height(MeshLevel::M21) == 7);
  CHECK(default_kappa_Fbar(MeshLevel::M3) == 200.0);
  CHECK(default_kappa_Fbar(MeshLevel::M9) == 600.0);
  CHECK(default_kappa_Fbar(MeshLevel::M15) == 1000.0);
  CHECK(default_kappa_Fbar(MeshLevel::M21) == 1400.0);
}

TEST_CASE("E and nu map to moduli that linearize back to E and nu") {
  for (const auto& [E, nu] : {std::pair{3e5, 0.4}, std::pair{1e6, 0.0}, std::pair{2e3, 0.25}}) {
    const NeoHookeanParams p = neo_hookean_from_E_nu(E, nu);
    CHECK(p.kappa_vol == doctest::Approx(E / (3.0 * (1.0 - 2.0 * nu))));
    const LinearizedModuli lin = linearized_moduli(p);
    CHECK(lin.E == doctest::Approx(E).epsilon(1e-6));
    CHECK(lin.nu == doctest::Approx(nu).epsilon(1e-6).scale(1.0));
  }
  CHECK_THROWS_AS(neo_hookean_from_E_nu(-1.0, 0.3), ConfigError);
  CHECK_THROWS_AS(neo_hookean_from_E_nu(1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(neo_hookean_from_E_nu(1.0, 0.6), ConfigError);
}

TEST_CASE("closed-form reference quantities") {
  const CriticalLoadRef ref = critical_load_ref(2.0, 1.0 / 12.0, 2.0);
  CHECK(ref.EI == doctest::Approx(1.0 / 6.0));
  CHECK(ref.f_cr == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0));
  CHECK_THROWS_AS(critical_load_ref(0.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(critical_load_ref(1.0, 1.0, -1.0), ConfigError);

  CHECK(dimensionless_force(3.0, 2.0, 4.0, 1.0, 0.5) == doctest::Approx(3.0 * 8.0 / (4.0 * 0.0625)));
  CHECK(dimensionless_force(0.0, 1.0, 1.0, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(dimensionless_force(-1.0, 1.0, 1.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(dimensionless_force(1.0, 1.0, 0.0, 1.0, 1.0), ConfigError);

  CHECK(config_force_analytic(10.0, 30.0, 0.8, 2.0) == doctest::Approx(50.0));
  CHECK(config_force_analytic(5.0, 5.0, 1.1, 1.0) == 0.0);
}

TEST_CASE("benchmark settings validation") {
  BenchmarkSpec s;
  s.kind = BenchmarkKind::ClosedBox;
  CHECK_NOTHROW(s.validate());
  s.level = MeshLevel::M3;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  BenchmarkSpec c;
  c.kind = BenchmarkKind::ConfigForce;
  c.bvp = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.bvp = 2;
  CHECK_NOTHROW(c.validate());

  BenchmarkSpec p;
  p.kind = BenchmarkKind::PistonBox;
  p.piston_box.beam_thickness = -0.01;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("every generator yields a valid mesh with bulk and third-medium regions") {
  std::vector<BenchmarkModel> models;
  models.push_back(gen_cshape(MeshLevel::M3));
  models.push_back(gen_cshape(MeshLevel::M21));
  models.push_back(gen_closed_box());
  models.push_back(gen_piston_box());
  models.push_back(gen_config_force(1));
  models.push_back(gen_config_force(2));
  for (const BenchmarkModel& m : models) {
    CHECK_NOTHROW(m.mesh.validate());
    CHECK(has_region(m.mesh, true));
    CHECK(has_region(m.mesh, false));
    CHECK(m.constants.count("load"));
    for (const Prescription& p : m.bc.items)
      for (int n : p.nodes) CHECK((n >= 0 && n < m.mesh.num_nodes()));
  }
}

TEST_CASE("C-shape: mesh level sets the elements per height and the penalty") {
  const BenchmarkModel m3 = gen_cshape(MeshLevel::M3);
  const BenchmarkModel m9 = gen_cshape(MeshLevel::M9);
  CHECK(m9.mesh.num_elements() > 5 * m3.mesh.num_elements());
  CHECK(m3.materials.kappa_Fbar == 200.0);
  CHECK(m9.materials.kappa_Fbar == 600.0);

  const GapMetrics g = measure_gap(m3.mesh, Eigen::VectorXd::Zero(m3.mesh.num_dofs()));
  CHECK(g.initial_gap == doctest::Approx(m3.constants.at("gap")));
  CHECK(g.residual_gap == doctest::Approx(g.initial_gap));
  CHECK(g.error == doctest::Approx(1.0));

  // A rigid translation leaves the gap unchanged.
  Eigen::VectorXd shift(m3.mesh.num_dofs());
  for (int n = 0; n < m3.mesh.num_nodes(); ++n) shift.segment<2>(2 * n) = Eigen::Vector2d(0.03, -0.07);
  CHECK(measure_gap(m3.mesh, shift).residual_gap == doctest::Approx(g.initial_gap));
}

TEST_CASE("piston box: critical load uses the plane-strain bending modulus") {
  const BenchmarkModel m = gen_piston_box();
  const LinearizedModuli lin = linearized_moduli(m.materials.bulk);
  const double t = m.constants.at("b");
  const double L = m.constants.at("L");
  const double expected = std::numbers::pi * std::numbers::pi * lin.E / (1.0 - lin.nu * lin.nu) * t * t * t / 12.0 /
                          (0.25 * L * L);
  CHECK(m.constants.at("f_cr") == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("configurational force: fiber states of an affine field and of the reference state") {
  for (int bvp : {1, 2}) {
    const BenchmarkModel m = gen_config_force(bvp);
    REQUIRE_FALSE(m.left_fiber.empty());
    REQUIRE_FALSE(m.right_fiber.empty());

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m.mesh.num_dofs());
    const ConfigForceSample s0 = config_force(m, zero, zero);
    CHECK(s0.R1_numeric == 0.0);
    CHECK(s0.R1_analytic == doctest::Approx(0.0).scale(1.0));
    CHECK(s0.left.lambda1 == doctest::Approx(1.0));

    Eigen::Matrix2d G;
    G << -0.05, 0.0, 0.0, 0.02;
    const Eigen::VectorXd d = affine_field(m.mesh, G);
    for (const auto* fiber : {&m.left_fiber, &m.right_fiber}) {
      const FiberState f = fiber_state(m.mesh, d, *fiber);
      CHECK(f.lambda1 == doctest::Approx(0.95).epsilon(1e-12));
      CHECK(f.lambda2 == doctest::Approx(1.02).epsilon(1e-12));
    }
    // Equal end states carry no configurational force.
    CHECK(config_force(m, d, zero).R1_analytic == doctest::Approx(0.0).scale(1.0));
  }
  const BenchmarkModel m = gen_config_force(1);
  CHECK_THROWS_AS(fiber_state(m.mesh, Eigen::VectorXd::Zero(m.mesh.num_dofs()), {}), ConfigError);
}

TEST_CASE("a short C-shape run records one row per accepted step") {
  BenchmarkSpec spec;
  spec.kind = BenchmarkKind::CShape;
  spec.level = MeshLevel::M3;
  spec.cshape.load_over_h = 0.2;
  const BenchmarkRun run = run_benchmark(spec, default_solver_config(spec.kind));
  CHECK(run.history.completed);
  REQUIRE(run.table.columns.size() >= 2);
  CHECK(run.table.columns[0] == "step");
  CHECK(run.table.columns[1] == "lambda");
  CHECK(run.table.rows.size() == run.history.steps.size());
  const std::vector<double> lambda = run.table.values("lambda");
  for (std::size_t i = 1; i < lambda.size(); ++i) CHECK(lambda[i] > lambda[i - 1]);
  CHECK(lambda.back() == doctest::Approx(1.0));
  // Far from contact at a fifth of the travel.
  CHECK_THROWS_AS(gap_error(run.history, run.model.mesh), NotInContactError);
}
