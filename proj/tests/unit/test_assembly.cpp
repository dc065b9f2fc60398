#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "tmc/assembly.hpp"
#include "tmc/verification.hpp"

using namespace tmc;

namespace {

const NeoHookeanParams kBulk{1e6, 0.214e6, IsoForm::Classical};

Eigen::VectorXd affine_field(const MeshModel& m, const Tensor2& A) {
  Eigen::VectorXd d(m.num_dofs());
  for (int n = 0; n < m.num_nodes(); ++n) {
    d[2 * n] = A.a11 * m.nodes[n].x() + A.a12 * m.nodes[n].y();
    d[2 * n + 1] = A.a21 * m.nodes[n].x() + A.a22 * m.nodes[n].y();
  }
  return d;
}

MeshModel two_region_mesh() {
  MeshBuilder b;
  const int bulk = b.add_region({"bulk", kBulk, QuadratureSpec::Lobatto3x3, false});
  const int tm = b.add_region({"tm", ThirdMediumParams{1.0, {0.3, 0.0}, 200.0}, QuadratureSpec::Lobatto2x2, true});
  add_block(b, ElementFamily::Quad4, rectangle_map(0, 0, 4, 1), uniform_breaks(4), uniform_breaks(2), bulk);
  add_block(b, ElementFamily::Quad4, rectangle_map(0, 1, 4, 2), uniform_breaks(4), uniform_breaks(2), tm);
  return b.build();
}

}  // namespace

TEST_CASE("DOF map partitions free and prescribed DOFs") {
  const MeshModel m = rectangle_mesh(1, 1, 1.0, 1.0, kBulk, QuadratureSpec::Lobatto3x3);
  BoundaryProgram bc;
  bc.fix(m.node_set("bottom"), 0);
  bc.fix(m.node_set("bottom"), 1);
  const DofMap map = build_dof_map(m, bc);
  CHECK(map.num_free() == 4);
  CHECK(map.num_prescribed() == 4);
  CHECK(std::is_sorted(map.free_dofs.begin(), map.free_dofs.end()));

  const DofMap all = build_dof_map(m, BoundaryProgram{});
  CHECK(all.num_free() == 8);

  BoundaryProgram dup;
  dup.fix({0}, 1);
  dup.ramp({0}, 1, 0.5);
  CHECK_THROWS_AS(build_dof_map(m, dup), ConfigError);
  BoundaryProgram bad;
  bad.fix({99}, 0);
  CHECK_THROWS_AS(build_dof_map(m, bad), ConfigError);
  BoundaryProgram comp;
  comp.fix({0}, 2);
  CHECK_THROWS_AS(build_dof_map(m, comp), ConfigError);
}

TEST_CASE("prescribed values follow the load factor") {
  const MeshModel m = rectangle_mesh(1, 1, 1.0, 1.0, kBulk, QuadratureSpec::Lobatto3x3);
  BoundaryProgram bc;
  bc.ramp(m.node_set("top"), 1, -0.2);
  const DofMap map = build_dof_map(m, bc);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m.num_dofs());
  apply_prescribed(map, 0.25, d);
  for (int n : m.node_set("top")) CHECK(d[2 * n + 1] == doctest::Approx(-0.05));
  CHECK(d.sum() == doctest::Approx(-0.1));
}

TEST_CASE("zero displacement gives zero force") {
  const MeshModel m = two_region_mesh();
  const DofMap dofs = build_dof_map(m, BoundaryProgram{});
  const AssemblyResult r = assemble(m, dofs, Eigen::VectorXd::Zero(m.num_dofs()));
  CHECK(r.f_full.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(r.energy == doctest::Approx(0.0));
}

TEST_CASE("single element: K equals the restricted element stiffness") {
  const MeshModel m = rectangle_mesh(1, 1, 2.0, 1.0, kBulk, QuadratureSpec::Lobatto3x3);
  BoundaryProgram bc;
  bc.fix({0}, 0);
  bc.fix({0}, 1);
  bc.fix({1}, 1);
  const DofMap dofs = build_dof_map(m, bc);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m.num_dofs());
  d[2] = 0.05;
  d[5] = 0.02;
  const AssemblyResult r = assemble(m, dofs, d);
  const ElementOutput e = element_force_stiffness(m.elements[0].family, m.element_coords(0), m.gather(0, d),
                                                  quadrature(ElementFamily::Quad4, QuadratureSpec::Lobatto3x3),
                                                  m.regions[0].kernel);
  const Eigen::MatrixXd K(r.K);
  // Element DOF order matches the mesh's node order for a single cell.
  for (int i = 0; i < dofs.num_free(); ++i) {
    CHECK(r.f_free[i] == doctest::Approx(e.f[dofs.free_dofs[i]]));
    for (int j = 0; j < dofs.num_free(); ++j)
      CHECK(K(i, j) == doctest::Approx(e.K(dofs.free_dofs[i], dofs.free_dofs[j])));
  }
}

TEST_CASE("affine field: refined patch matches the one-element mesh") {
  const Tensor2 A{0.08, 0.03, -0.05, 0.02};
  const Tensor2 V{0.3, -0.1, 0.2, 0.5};  // affine virtual displacement
  const MeshModel one = rectangle_mesh(1, 1, 2.0, 1.0, kBulk, QuadratureSpec::Lobatto3x3);
  const MeshModel fine = rectangle_mesh(4, 2, 2.0, 1.0, kBulk, QuadratureSpec::Lobatto3x3);
  const AssemblyResult r1 = assemble(one, build_dof_map(one, {}), affine_field(one, A));
  const AssemblyResult r2 = assemble(fine, build_dof_map(fine, {}), affine_field(fine, A));
  const double scale = r1.f_full.cwiseAbs().maxCoeff();

  // Interior nodes carry no force.
  int interior = 0;
  for (int n = 0; n < fine.num_nodes(); ++n) {
    const Eigen::Vector2d& x = fine.nodes[n];
    if (x.x() < 1e-12 || x.y() < 1e-12 || x.x() > 2 - 1e-12 || x.y() > 1 - 1e-12) continue;
    ++interior;
    CHECK(std::abs(r2.f_full[2 * n]) < 1e-10 * scale);
    CHECK(std::abs(r2.f_full[2 * n + 1]) < 1e-10 * scale);
  }
  CHECK(interior == 3);

  // Same energy and the same virtual work on any affine test field.
  CHECK(std::abs(r1.energy - r2.energy) < 1e-10 * std::abs(r1.energy));
  const double w1 = r1.f_full.dot(affine_field(one, V)), w2 = r2.f_full.dot(affine_field(fine, V));
  CHECK(std::abs(w1 - w2) < 1e-10 * std::abs(w1));
  // Virtual work equals P : V times the area.
  const MaterialResponse p = evaluate(kBulk, DeformationState(Tensor2::identity() + A));
  CHECK(w1 == doctest::Approx(2.0 * p.P.dot(to_voigt(V))).epsilon(1e-10));
}

TEST_CASE("global tangent symmetry and energy consistency") {
  const CheckResult sym = check_global_symmetry(5);
  INFO(sym.detail);
  CHECK(sym.passed);
  const CheckResult grad = check_global_consistency(6);
  INFO(grad.detail);
  CHECK(grad.passed);
}

TEST_CASE("assembly is independent of element order and thread count") {
  const MeshModel m = two_region_mesh();
  BoundaryProgram bc;
  bc.fix(nodes_where(m, [](const Eigen::Vector2d& x) { return x.y() < 1e-12; }), 1);
  bc.fix({0}, 0);
  const DofMap dofs = build_dof_map(m, bc);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.03, 0.03);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m.num_dofs());
  for (int dof : dofs.free_dofs) d[dof] = u(rng);

  const Assembler serial(m, dofs, 1);
  const AssemblyResult a = serial.assemble(d);

  Assembler threaded(m, dofs, 4);
  const AssemblyResult b = threaded.assemble(d);
  CHECK(a.f_full == b.f_full);
  CHECK(Eigen::MatrixXd(a.K) == Eigen::MatrixXd(b.K));

  std::vector<int> order(m.num_elements());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  threaded.set_element_order(order);
  const AssemblyResult c = threaded.assemble(d);
  const double fs = a.f_full.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd Ka(a.K), Kc(c.K);
  CHECK((a.f_full - c.f_full).cwiseAbs().maxCoeff() <= 1e-14 * fs * 10);
  CHECK((Ka - Kc).cwiseAbs().maxCoeff() <= 1e-14 * Ka.cwiseAbs().maxCoeff() * 10);

  CHECK_THROWS_AS(threaded.set_element_order({0, 0, 1}), ConfigError);
}

TEST_CASE("coupling block reproduces the prescribed-DOF columns") {
  const MeshModel m = rectangle_mesh(2, 2, 1.0, 1.0, kBulk, QuadratureSpec::Lobatto3x3);
  BoundaryProgram bc;
  bc.fix(m.node_set("bottom"), 0);
  bc.fix(m.node_set("bottom"), 1);
  bc.ramp(m.node_set("top"), 1, -0.1);
  const DofMap dofs = build_dof_map(m, bc);
  const Assembler as(m, dofs);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m.num_dofs());
  apply_prescribed(dofs, 0.3, d);
  AssemblyOptions opts;
  opts.coupling = true;
  const AssemblyResult r = as.assemble(d, opts);
  const double h = 1e-7;
  for (int k = 0; k < dofs.num_prescribed(); ++k) {
    Eigen::VectorXd dp = d, dm = d;
    dp[dofs.prescribed_dofs[k]] += h;
    dm[dofs.prescribed_dofs[k]] -= h;
    const Eigen::VectorXd fd = (as.assemble(dp).f_free - as.assemble(dm).f_free) / (2 * h);
    const Eigen::VectorXd col = Eigen::MatrixXd(r.K_fp).col(k);
    CHECK((fd - col).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, col.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("reactions") {
  const MeshModel m = rectangle_mesh(3, 2, 3.0, 1.0, kBulk, QuadratureSpec::Lobatto3x3);
  const DofMap dofs = build_dof_map(m, {});
  const AssemblyResult zero = assemble(m, dofs, Eigen::VectorXd::Zero(m.num_dofs()));
  CHECK(reaction(zero.f_full, m.node_set("left")).norm() < 1e-8);

  // Translation invariance: internal forces of any state sum to zero.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  Eigen::VectorXd d(m.num_dofs());
  for (int i = 0; i < d.size(); ++i) d[i] = u(rng);
  const AssemblyResult r = assemble(m, dofs, d);
  std::vector<int> all(m.num_nodes());
  std::iota(all.begin(), all.end(), 0);
  CHECK(reaction(r.f_full, all).norm() < 1e-9 * r.f_full.cwiseAbs().maxCoeff());
}

TEST_CASE("element errors propagate with the element id") {
  const MeshModel m = rectangle_mesh(2, 1, 2.0, 1.0, kBulk, QuadratureSpec::Lobatto3x3);
  const DofMap dofs = build_dof_map(m, {});
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m.num_dofs());
  const int n = nearest_node(m, {2.0, 0.0});
  d[2 * n] = -1.8;
  try {
    assemble(m, dofs, d);
    FAIL("expected SingularKinematicsError");
  } catch (const SingularKinematicsError& e) {
    CHECK(e.element() == 1);
  }
}

TEST_CASE("mesh validation and builder") {
  MeshModel m = rectangle_mesh(2, 2, 1.0, 1.0, kBulk, QuadratureSpec::Lobatto3x3);
  CHECK(m.num_nodes() == 9);
  CHECK_NOTHROW(m.validate());
  double area = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) area += m.element_area(e);
  CHECK(area == doctest::Approx(1.0));

  MeshModel q8 = rectangle_mesh(2, 1, 2.0, 1.0, kBulk, QuadratureSpec::Gauss4x4, ElementFamily::Quad8);
  CHECK(q8.num_nodes() == 13);
  MeshModel t6 = rectangle_mesh(2, 1, 2.0, 1.0, kBulk, QuadratureSpec::TriDegree5, ElementFamily::Tri6);
  CHECK(t6.num_elements() == 4);
  CHECK(t6.num_nodes() == 15);

  MeshModel bad = m;
  bad.elements[0].region = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  MeshModel inverted = m;
  std::swap(inverted.elements[0].nodes[1], inverted.elements[0].nodes[3]);
  CHECK_THROWS_AS(inverted.validate(), GeometryError);
  MeshModel badnode = m;
  badnode.elements[1].nodes[2] = 100;
  CHECK_THROWS_AS(badnode.validate(), ConfigError);

  const std::vector<double> g = graded_breaks(4, 2.0);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK((g[2] - g[1]) == doctest::Approx(2.0 * (g[1] - g[0])));
}
