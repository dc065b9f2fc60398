#pragma once

// Finite-difference and closed-form checks shared by the unit tests, the
// acceptance suite and the `verify` command.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tmc/element.hpp"
#include "tmc/mesh.hpp"

namespace tmc {

struct CheckResult {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

CheckResult make_check(std::string name, double error, double tolerance, std::string detail = {});

// Deformation gradient with det F uniform in [J_min, J_max], random principal
// stretch ratio and random rotations on both sides (non-symmetric in general).
Tensor2 random_deformation(std::mt19937_64& rng, double J_min = 0.2, double J_max = 3.0);

// Random states with J in [0.2, 3]; Fbar is F plus a random perturbation.
std::vector<DeformationState> random_states(int count, std::uint64_t seed);

// FD of W against P and Pbar, and of P, Pbar against D1..D4 (central, h = 1e-6).
// Each error is normalized by the largest magnitude in its family.
struct KernelFdErrors {
  double stress = 0.0;
  double tangent = 0.0;
  double symmetry = 0.0;  // max |D1 - D1^T|, |D4 - D4^T|, |D2 - D3^T| relative
};
KernelFdErrors kernel_fd_errors(const MaterialKernel& kernel, const DeformationState& state, double h = 1e-6);

CheckResult check_kernel_consistency(const std::string& name, const MaterialKernel& kernel, int samples,
                                     std::uint64_t seed, double tol = 1e-5);

// Energy of the linear-in-F kernel under rotation theta versus E (cos theta - 1)^2 (nu = 0).
CheckResult check_rotation_closed_form(double E, double theta_deg, double tol = 1e-10);

// Randomly distorted element of the given family (positive map everywhere).
NodeCoords random_element(ElementFamily family, std::mt19937_64& rng);

struct ElementFdErrors {
  double force = 0.0;      // f_e vs FD of the element energy
  double tangent = 0.0;    // K_e vs FD of f_e
  double symmetry = 0.0;   // max |K - K^T| / max |K|
};
ElementFdErrors element_fd_errors(ElementFamily family, const NodeCoords& X, const ElemVector& d,
                                  const QuadratureRule& rule, const MaterialKernel& kernel, double h = 1e-7);

CheckResult check_element_consistency(const std::string& name, ElementFamily family, QuadratureSpec spec,
                                      const MaterialKernel& kernel, int samples, std::uint64_t seed,
                                      double tol = 1e-5);

// Distorted n x n patch of one family with every node at its affine position;
// reports the largest deviation of F from the affine gradient at any
// quadrature point, the interior residual, and an equilibrium solve from a
// perturbed interior back to the affine field.
CheckResult check_patch_test(ElementFamily family, const MaterialKernel& kernel, QuadratureSpec spec,
                             std::uint64_t seed, double tol = 1e-10);

// Regularization energy and force on affine fields of a distorted element.
CheckResult check_regularization_null_space(ElementFamily family, QuadratureSpec spec, std::uint64_t seed);

// Total energy gradient and tangent symmetry on a small mixed-material mesh.
CheckResult check_global_consistency(std::uint64_t seed, double tol = 1e-5);
CheckResult check_global_symmetry(std::uint64_t seed, double tol = 1e-12);

// Structured small mesh: nx x ny Quad4 cells on [0, w] x [0, h], one region.
MeshModel rectangle_mesh(int nx, int ny, double w, double h, const MaterialKernel& kernel, QuadratureSpec spec,
                         ElementFamily family = ElementFamily::Quad4);

// Full property report used by `verify`.
std::vector<CheckResult> run_property_suite(std::uint64_t seed);

}  // namespace tmc
