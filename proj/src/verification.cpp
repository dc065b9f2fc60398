#include "tmc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tmc/assembly.hpp"
#include "tmc/solver.hpp"

namespace tmc {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Tensor2 rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

std::string format_error(double e) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << e;
  return os.str();
}

}  // namespace

CheckResult make_check(std::string name, double error, double tolerance, std::string detail) {
  CheckResult c;
  c.name = std::move(name);
  c.error = error;
  c.tolerance = tolerance;
  c.passed = std::isfinite(error) && error <= tolerance;
  c.detail = std::move(detail);
  return c;
}

Tensor2 random_deformation(std::mt19937_64& rng, double J_min, double J_max) {
  std::uniform_real_distribution<double> uJ(J_min, J_max), ut(-0.4, 0.4), uang(0.0, 2.0 * std::numbers::pi);
  const double J = uJ(rng), t = ut(rng);
  const Tensor2 U = Tensor2::diag(std::sqrt(J) * std::exp(t), std::sqrt(J) * std::exp(-t));
  return dot(rotation(uang(rng)), dot(U, rotation(uang(rng))));
}

std::vector<DeformationState> random_states(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  std::vector<DeformationState> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const Tensor2 F = random_deformation(rng);
    const Tensor2 Fbar = F + Tensor2{u(rng), u(rng), u(rng), u(rng)};
    out.emplace_back(F, Fbar);
  }
  return out;
}

KernelFdErrors kernel_fd_errors(const MaterialKernel& kernel, const DeformationState& state, double h) {
  const bool averaged = uses_centroid(kernel);
  const MaterialResponse r = evaluate(kernel, state);
  const Tensor2 Fbar = state.Fbar.value_or(state.F);
  const auto eval = [&](const Tensor2& F, const Tensor2& Fb) {
    return evaluate(kernel, DeformationState(F, averaged ? std::optional<Tensor2>(Fb) : std::nullopt));
  };

  Voigt4 fdP, fdPbar = Voigt4::Zero();
  Voigt4x4 fdD1, fdD2 = Voigt4x4::Zero(), fdD3, fdD4 = Voigt4x4::Zero();
  for (int t = 0; t < 4; ++t) {
    Voigt4 e = Voigt4::Zero();
    e[t] = h;
    const MaterialResponse p = eval(state.F + from_voigt(e), Fbar);
    const MaterialResponse m = eval(state.F - from_voigt(e), Fbar);
    fdP[t] = (p.W - m.W) / (2 * h);
    fdD1.col(t) = (p.P - m.P) / (2 * h);
    fdD3.col(t) = (p.Pbar - m.Pbar) / (2 * h);
    if (averaged) {
      const MaterialResponse pb = eval(state.F, Fbar + from_voigt(e));
      const MaterialResponse mb = eval(state.F, Fbar - from_voigt(e));
      fdPbar[t] = (pb.W - mb.W) / (2 * h);
      fdD2.col(t) = (pb.P - mb.P) / (2 * h);
      fdD4.col(t) = (pb.Pbar - mb.Pbar) / (2 * h);
    }
  }

  const double stress_scale = std::max({max_abs(r.P), max_abs(r.Pbar), 1e-300});
  const double tangent_scale = std::max({max_abs(r.D1), max_abs(r.D2), max_abs(r.D3), max_abs(r.D4), 1e-300});
  KernelFdErrors e;
  e.stress = std::max(max_abs(fdP - r.P), max_abs(fdPbar - r.Pbar)) / stress_scale;
  e.tangent = std::max({max_abs(fdD1 - r.D1), max_abs(fdD2 - r.D2), max_abs(fdD3 - r.D3), max_abs(fdD4 - r.D4)}) /
              tangent_scale;
  e.symmetry = std::max({max_abs(r.D1 - r.D1.transpose()), max_abs(r.D4 - r.D4.transpose()),
                         max_abs(r.D2 - r.D3.transpose())}) /
               tangent_scale;
  return e;
}

CheckResult check_kernel_consistency(const std::string& name, const MaterialKernel& kernel, int samples,
                                     std::uint64_t seed, double tol) {
  KernelFdErrors worst;
  for (const DeformationState& s : random_states(samples, seed)) {
    const KernelFdErrors e = kernel_fd_errors(kernel, s);
    worst.stress = std::max(worst.stress, e.stress);
    worst.tangent = std::max(worst.tangent, e.tangent);
    worst.symmetry = std::max(worst.symmetry, e.symmetry);
  }
  const double err = std::max({worst.stress, worst.tangent, worst.symmetry});
  return make_check("kernel " + name + " finite differences", err, tol,
                    std::to_string(samples) + " states, stress " + format_error(worst.stress) + ", tangent " +
                        format_error(worst.tangent) + ", symmetry " + format_error(worst.symmetry));
}

CheckResult check_rotation_closed_form(double E, double theta_deg, double tol) {
  const double theta = theta_deg * std::numbers::pi / 180.0;
  const double W = linear_elastic_in_F(DeformationState(rotation(theta)), iso_elasticity_tensor(E, 0.0)).W;
  const double c = std::cos(theta) - 1.0;
  const double expected = E * c * c;
  return make_check("rotation energy theta=" + std::to_string(static_cast<int>(std::lround(theta_deg))) + "deg",
                    std::abs(W - expected) / expected, tol,
                    "W=" + format_error(W) + " closed form=" + format_error(expected));
}

NodeCoords random_element(ElementFamily family, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> usize(0.5, 2.0), ucorner(-0.15, 0.15), umid(-0.05, 0.05),
      uoff(-5.0, 5.0);
  for (;;) {
    const double h = usize(rng);
    const Eigen::Vector2d offset(uoff(rng), uoff(rng));
    const int n = node_count(family);
    NodeCoords X(n, 2);
    const int corners = is_quad(family) ? 4 : 3;
    const std::array<Eigen::Vector2d, 4> base{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1),
                                              Eigen::Vector2d(0, 1)};
    const std::array<Eigen::Vector2d, 3> tri{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
    for (int a = 0; a < corners; ++a) {
      const Eigen::Vector2d p = is_quad(family) ? base[a] : tri[a];
      X.row(a) = (offset + h * (p + Eigen::Vector2d(ucorner(rng), ucorner(rng)))).transpose();
    }
    for (int a = corners; a < n; ++a) {
      const int i = a - corners, j = (i + 1) % corners;
      const Eigen::RowVector2d mid = 0.5 * (X.row(i) + X.row(j));
      X.row(a) = mid + h * Eigen::RowVector2d(umid(rng), umid(rng));
    }
    try {
      for (const auto& xi : quadrature(family, is_quad(family) ? QuadratureSpec::Gauss4x4 : QuadratureSpec::TriDegree5)
                                .points)
        b_matrix(family, X, xi);
      for (const auto& xi : quadrature(family, is_quad(family) ? QuadratureSpec::Lobatto3x3
                                                               : QuadratureSpec::TriDegree5)
                                .points)
        b_matrix(family, X, xi);
      b_matrix(family, X, centroid(family));
      return X;
    } catch (const GeometryError&) {
    }
  }
}

ElementFdErrors element_fd_errors(ElementFamily family, const NodeCoords& X, const ElemVector& d,
                                  const QuadratureRule& rule, const MaterialKernel& kernel, double h) {
  const ElementOutput out = element_force_stiffness(family, X, d, rule, kernel);
  ElementEvalOptions no_k;
  no_k.stiffness = false;
  const int n = static_cast<int>(d.size());
  ElemVector fd_f(n);
  ElemMatrix fd_K(n, n);
  for (int i = 0; i < n; ++i) {
    ElemVector dp = d, dm = d;
    dp[i] += h;
    dm[i] -= h;
    const ElementOutput p = element_force_stiffness(family, X, dp, rule, kernel, no_k);
    const ElementOutput m = element_force_stiffness(family, X, dm, rule, kernel, no_k);
    fd_f[i] = (p.energy - m.energy) / (2 * h);
    fd_K.col(i) = (p.f - m.f) / (2 * h);
  }
  ElementFdErrors e;
  const double fscale = std::max(max_abs(out.f), 1e-300), kscale = std::max(max_abs(out.K), 1e-300);
  e.force = max_abs(fd_f - out.f) / fscale;
  e.tangent = max_abs(fd_K - out.K) / kscale;
  e.symmetry = max_abs(out.K - out.K.transpose()) / kscale;
  return e;
}

namespace {

// Displacement of a random affine map plus nodal noise, retried until J > 0 everywhere.
ElemVector random_element_displacement(ElementFamily family, const NodeCoords& X, const QuadratureRule& rule,
                                       const MaterialKernel& kernel, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  const double size = std::sqrt(std::max(1e-12, (X.row(2) - X.row(0)).squaredNorm()));
  for (;;) {
    const Tensor2 A = random_deformation(rng, 0.5, 2.0) - Tensor2::identity();
    ElemVector d(2 * X.rows());
    for (int a = 0; a < X.rows(); ++a) {
      d[2 * a] = A.a11 * X(a, 0) + A.a12 * X(a, 1) + size * noise(rng);
      d[2 * a + 1] = A.a21 * X(a, 0) + A.a22 * X(a, 1) + size * noise(rng);
    }
    try {
      element_force_stiffness(family, X, d, rule, kernel);
      return d;
    } catch (const SingularKinematicsError&) {
    }
  }
}

}  // namespace

CheckResult check_element_consistency(const std::string& name, ElementFamily family, QuadratureSpec spec,
                                      const MaterialKernel& kernel, int samples, std::uint64_t seed,
                                      double tol) {
  std::mt19937_64 rng(seed);
  const QuadratureRule rule = quadrature(family, spec);
  ElementFdErrors worst;
  for (int k = 0; k < samples; ++k) {
    const NodeCoords X = random_element(family, rng);
    const ElemVector d = random_element_displacement(family, X, rule, kernel, rng);
    const ElementFdErrors e = element_fd_errors(family, X, d, rule, kernel);
    worst.force = std::max(worst.force, e.force);
    worst.tangent = std::max(worst.tangent, e.tangent);
    worst.symmetry = std::max(worst.symmetry, e.symmetry);
  }
  // Symmetry is held to 1e-12; gradient checks to tol.
  const double err = std::max({worst.force, worst.tangent, worst.symmetry * (tol / 1e-12)});
  return make_check("element " + name + " (" + family_name(family) + ", " + quadrature_name(spec) + ")", err, tol,
                    std::to_string(samples) + " samples, force " + format_error(worst.force) + ", tangent " +
                        format_error(worst.tangent) + ", symmetry " + format_error(worst.symmetry));
}

namespace {

MeshModel distorted_patch(ElementFamily family, const MaterialKernel& kernel, QuadratureSpec spec, int n,
                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  // Perturb the interior lattice points of the unit square.
  std::vector<Eigen::Vector2d> lattice((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      Eigen::Vector2d p(static_cast<double>(i) / n, static_cast<double>(j) / n);
      if (i > 0 && i < n && j > 0 && j < n) p += Eigen::Vector2d(u(rng), u(rng)) / n;
      lattice[j * (n + 1) + i] = p;
    }
  MeshBuilder b;
  const int region = b.add_region({"patch", kernel, spec, uses_centroid(kernel)});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const BlockMap cell = bilinear_map(lattice[j * (n + 1) + i], lattice[j * (n + 1) + i + 1],
                                         lattice[(j + 1) * (n + 1) + i + 1], lattice[(j + 1) * (n + 1) + i]);
      add_block(b, family, cell, {0.0, 1.0}, {0.0, 1.0}, region);
    }
  MeshModel m = b.build();
  m.node_sets["boundary"] = nodes_where(m, [](const Eigen::Vector2d& x) {
    return x.x() < 1e-12 || x.y() < 1e-12 || x.x() > 1 - 1e-12 || x.y() > 1 - 1e-12;
  });
  return m;
}

}  // namespace

CheckResult check_patch_test(ElementFamily family, const MaterialKernel& kernel, QuadratureSpec spec,
                             std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  MeshModel mesh = distorted_patch(family, kernel, spec, 3, rng);
  const Tensor2 A{0.12, 0.2, -0.1, -0.05};  // F - I

  Eigen::VectorXd d_aff(mesh.num_dofs());
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const Eigen::Vector2d& X = mesh.nodes[n];
    d_aff[2 * n] = A.a11 * X.x() + A.a12 * X.y();
    d_aff[2 * n + 1] = A.a21 * X.x() + A.a22 * X.y();
  }

  // F at every quadrature point of every element.
  double f_err = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const MeshElement& el = mesh.elements[e];
    const NodeCoords X = mesh.element_coords(e);
    const ElemVector d = mesh.gather(e, d_aff);
    for (const auto& xi : quadrature(el.family, spec).points)
      f_err = std::max(f_err, max_abs(b_matrix(el.family, X, xi).B * d - to_voigt(A)));
  }

  BoundaryProgram bc;
  for (int n : mesh.node_set("boundary")) {
    bc.ramp({n}, 0, d_aff[2 * n], "boundary");
    bc.ramp({n}, 1, d_aff[2 * n + 1], "boundary");
  }
  const std::vector<int> interior = [&] {
    std::vector<int> v;
    const auto& bnd = mesh.node_set("boundary");
    for (int n = 0; n < mesh.num_nodes(); ++n)
      if (!std::binary_search(bnd.begin(), bnd.end(), n)) v.push_back(n);
    return v;
  }();
  Problem problem(mesh, bc);

  const AssemblyResult at_affine = problem.assembler().assemble(d_aff);
  const double force_scale = std::max(max_abs(at_affine.f_full), 1e-300);
  const double residual_err = max_abs(at_affine.f_free) / force_scale;

  std::uniform_real_distribution<double> u(-0.01, 0.01);
  Eigen::VectorXd start = d_aff;
  for (int n : interior) {
    start[2 * n] += u(rng);
    start[2 * n + 1] += u(rng);
  }
  SolverConfig cfg;
  cfg.tol_rel_residual = 1e-14;
  cfg.tol_abs_residual = 1e-300;
  cfg.tangent_predictor = false;
  const StepResult r = newton_solve(problem, 1.0, start, cfg);
  // Newton may stop on the roundoff floor before the flag is set; the
  // recovered displacement is what the patch test judges.
  const double solve_err = max_abs(r.d - d_aff) / max_abs(d_aff);

  const double err = std::max({f_err, residual_err, solve_err});
  return make_check("patch test " + family_name(family) + " " + kernel_name(kernel), err, tol,
                    "F deviation " + format_error(f_err) + ", interior residual " + format_error(residual_err) +
                        ", solve deviation " + format_error(solve_err) + " after " +
                        std::to_string(r.iterations) + " iterations");
}

CheckResult check_regularization_null_space(ElementFamily family, QuadratureSpec spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double kappa = 1000.0;
  const MaterialKernel kernel = RegularizationParams{kappa};
  const QuadratureRule rule = quadrature(family, spec);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const NodeCoords X = random_element(family, rng);
    const Tensor2 A = random_deformation(rng, 0.5, 2.0) - Tensor2::identity();
    ElemVector d(2 * X.rows());
    for (int a = 0; a < X.rows(); ++a) {
      d[2 * a] = A.a11 * X(a, 0) + A.a12 * X(a, 1);
      d[2 * a + 1] = A.a21 * X(a, 0) + A.a22 * X(a, 1);
    }
    const ElementOutput out = element_force_stiffness(family, X, d, rule, kernel);
    const double scale = kappa * std::max(1.0, frobenius_norm_sq(A));
    worst = std::max({worst, std::abs(out.energy) / scale, max_abs(out.f) / scale, max_abs(out.K * d) / scale});
  }
  return make_check("regularization null space " + family_name(family), worst, 1e-12,
                    "energy, force and K d on affine fields");
}

MeshModel rectangle_mesh(int nx, int ny, double w, double h, const MaterialKernel& kernel, QuadratureSpec spec,
                         ElementFamily family) {
  MeshBuilder b;
  const int region = b.add_region({"block", kernel, spec, uses_centroid(kernel)});
  add_block(b, family, rectangle_map(0, 0, w, h), uniform_breaks(nx), uniform_breaks(ny), region);
  MeshModel m = b.build();
  m.node_sets["bottom"] = nodes_where(m, [](const Eigen::Vector2d& x) { return std::abs(x.y()) < 1e-12; });
  m.node_sets["top"] = nodes_where(m, [h](const Eigen::Vector2d& x) { return std::abs(x.y() - h) < 1e-12; });
  m.node_sets["left"] = nodes_where(m, [](const Eigen::Vector2d& x) { return std::abs(x.x()) < 1e-12; });
  m.node_sets["right"] = nodes_where(m, [w](const Eigen::Vector2d& x) { return std::abs(x.x() - w) < 1e-12; });
  return m;
}

namespace {

// Bulk bottom row, third medium top row, bottom edge fixed.
struct SmallModel {
  MeshModel mesh;
  BoundaryProgram bc;
};

SmallModel small_mixed_model() {
  MeshBuilder b;
  const int bulk = b.add_region({"bulk", NeoHookeanParams{1e6, 0.214e6, IsoForm::Classical},
                                 QuadratureSpec::Lobatto3x3, false});
  const int tm = b.add_region({"third_medium", ThirdMediumParams{1.0, {0.3, 0.0}, 200.0},
                               QuadratureSpec::Lobatto2x2, true});
  add_block(b, ElementFamily::Quad4, rectangle_map(0, 0, 3, 1), uniform_breaks(3), uniform_breaks(1), bulk);
  add_block(b, ElementFamily::Quad4, rectangle_map(0, 1, 3, 2), uniform_breaks(3), uniform_breaks(1), tm);
  SmallModel m{b.build(), {}};
  m.bc.fix(nodes_where(m.mesh, [](const Eigen::Vector2d& x) { return x.y() < 1e-12; }), 0, "bottom");
  m.bc.fix(nodes_where(m.mesh, [](const Eigen::Vector2d& x) { return x.y() < 1e-12; }), 1, "bottom");
  return m;
}

Eigen::VectorXd random_admissible(const DofMap& dofs, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dofs.num_dofs);
  for (int dof : dofs.free_dofs) d[dof] = u(rng);
  return d;
}

}  // namespace

CheckResult check_global_consistency(std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  const SmallModel m = small_mixed_model();
  const DofMap dofs = build_dof_map(m.mesh, m.bc);
  const Assembler assembler(m.mesh, dofs);
  const Eigen::VectorXd d = random_admissible(dofs, rng, 0.05);
  const AssemblyResult r = assembler.assemble(d);

  // Directional derivative along a random admissible perturbation plus a full FD gradient.
  const double h = 1e-7;
  Eigen::VectorXd fd(dofs.num_free());
  for (int i = 0; i < dofs.num_free(); ++i) {
    Eigen::VectorXd dp = d, dm = d;
    dp[dofs.free_dofs[i]] += h;
    dm[dofs.free_dofs[i]] -= h;
    fd[i] = (assembler.energy(dp) - assembler.energy(dm)) / (2 * h);
  }
  const double grad_err = max_abs(fd - r.f_free) / std::max(max_abs(r.f_free), 1e-300);

  const Eigen::VectorXd dir = restrict_free(dofs, random_admissible(dofs, rng, 1.0));
  Eigen::VectorXd dp = d, dm = d;
  add_free(dofs, h * dir, dp);
  add_free(dofs, -h * dir, dm);
  const double slope_fd = (assembler.energy(dp) - assembler.energy(dm)) / (2 * h);
  const double slope = r.f_free.dot(dir);
  const double dir_err = std::abs(slope_fd - slope) / std::max(std::abs(slope), 1e-300);

  const AssemblyResult rp = assembler.assemble(dp), rm = assembler.assemble(dm);
  const Eigen::VectorXd kd_fd = (rp.f_free - rm.f_free) / (2 * h);
  const Eigen::VectorXd kd = r.K * dir;
  const double tan_err = max_abs(kd_fd - kd) / std::max(max_abs(kd), 1e-300);

  return make_check("global energy gradient and tangent", std::max({grad_err, dir_err, tan_err}), tol,
                    "gradient " + format_error(grad_err) + ", directional " + format_error(dir_err) +
                        ", tangent action " + format_error(tan_err));
}

CheckResult check_global_symmetry(std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  const SmallModel m = small_mixed_model();
  const DofMap dofs = build_dof_map(m.mesh, m.bc);
  const Assembler assembler(m.mesh, dofs);
  const AssemblyResult r = assembler.assemble(random_admissible(dofs, rng, 0.05));
  const Eigen::MatrixXd K(r.K);
  const double err = max_abs(K - K.transpose()) / max_abs(K);
  return make_check("global tangent symmetry", err, tol);
}

std::vector<CheckResult> run_property_suite(std::uint64_t seed) {
  const NeoHookeanParams nh{1e6, 0.214e6, IsoForm::Classical};
  const NeoHookeanParams nh_sq{1e6, 0.214e6, IsoForm::AsWritten};
  const LinearTermParams lin{3e5, 0.3};
  const RegularizationParams reg{1000.0};
  const ThirdMediumParams tm{1.0, {0.3, 0.0}, 1000.0};

  std::vector<CheckResult> out;
  out.push_back(check_kernel_consistency("neo_hookean", nh, 50, seed));
  out.push_back(check_kernel_consistency("neo_hookean_squared", nh_sq, 50, seed + 1));
  out.push_back(check_kernel_consistency("linear_in_F", lin, 50, seed + 2));
  out.push_back(check_kernel_consistency("regularization", reg, 50, seed + 3));
  out.push_back(check_kernel_consistency("third_medium", tm, 50, seed + 4));
  for (double theta : {10.0, 45.0, 90.0}) out.push_back(check_rotation_closed_form(0.3, theta));

  out.push_back(check_element_consistency("neo_hookean", ElementFamily::Quad4, QuadratureSpec::Lobatto3x3, nh, 20,
                                          seed + 5));
  out.push_back(check_element_consistency("third_medium", ElementFamily::Quad4, QuadratureSpec::Lobatto2x2, tm, 20,
                                          seed + 6));
  out.push_back(check_element_consistency("neo_hookean", ElementFamily::Quad8, QuadratureSpec::Gauss4x4, nh, 20,
                                          seed + 7));
  out.push_back(check_element_consistency("third_medium", ElementFamily::Tri6, QuadratureSpec::TriDegree5, tm, 20,
                                          seed + 8));
  out.push_back(check_patch_test(ElementFamily::Quad4, nh, QuadratureSpec::Lobatto3x3, seed + 9));
  out.push_back(check_patch_test(ElementFamily::Quad8, nh, QuadratureSpec::Gauss4x4, seed + 10));
  out.push_back(check_patch_test(ElementFamily::Tri6, tm, QuadratureSpec::TriDegree5, seed + 11));
  out.push_back(check_regularization_null_space(ElementFamily::Quad4, QuadratureSpec::Lobatto2x2, seed + 12));
  out.push_back(check_regularization_null_space(ElementFamily::Tri6, QuadratureSpec::TriDegree5, seed + 13));
  out.push_back(check_global_consistency(seed + 14));
  out.push_back(check_global_symmetry(seed + 15));
  return out;
}

}  // namespace tmc
