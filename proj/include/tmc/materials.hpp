#pragma once

// Point-wise constitutive kernels for the bulk and the third medium.
//
// Every kernel returns the energy density W together with its first and second
// derivatives with respect to the point deformation gradient F and, for the
// averaging regularization, the element-centroid deformation gradient Fbar:
//
//     P    = dW/dF       Pbar = dW/dFbar
//     D1   = dP/dF       D2   = dP/dFbar
//     D3   = dPbar/dF    D4   = dPbar/dFbar
//
// All blocks are in the (11, 22, 12, 21) Voigt ordering of tensor.hpp.

#include <optional>
#include <string>
#include <variant>

#include "tmc/tensor.hpp"

namespace tmc {

struct DeformationState {
  Tensor2 F = Tensor2::identity();
  std::optional<Tensor2> Fbar;
  double J = 1.0;   // det F; F33 = 1 under plane strain
  double I1 = 3.0;  // tr(F^T F) + 1

  DeformationState() = default;
  explicit DeformationState(const Tensor2& f, std::optional<Tensor2> fbar = std::nullopt)
      : F(f), Fbar(fbar), J(f.det()), I1(frobenius_norm_sq(f) + 1.0) {}
};

// Selects the isochoric neo-Hookean term:
//   AsWritten: 1/2 kappa_iso (J^{-2/3} I1 - 3)^2
//   Classical: 1/2 kappa_iso (J^{-2/3} I1 - 3)
enum class IsoForm { AsWritten, Classical };

struct NeoHookeanParams {
  double kappa_vol = 0.0;  // Pa
  double kappa_iso = 0.0;  // Pa
  IsoForm iso_form = IsoForm::Classical;
};

struct LinearTermParams {
  double E = 0.0;   // Pa
  double nu = 0.0;  // third medium uses 0
};

struct RegularizationParams {
  double kappa_Fbar = 0.0;  // Pa
};

struct ThirdMediumParams {
  double kappa_vol = 0.0;  // contact term, Pa
  LinearTermParams linear;
  double kappa_Fbar = 0.0;  // Pa
};

struct MaterialResponse {
  double W = 0.0;
  Voigt4 P = Voigt4::Zero();
  Voigt4 Pbar = Voigt4::Zero();
  Voigt4x4 D1 = Voigt4x4::Zero();
  Voigt4x4 D2 = Voigt4x4::Zero();
  Voigt4x4 D3 = Voigt4x4::Zero();
  Voigt4x4 D4 = Voigt4x4::Zero();

  MaterialResponse& operator+=(const MaterialResponse& o);
};

// Plane-strain isotropic tensor lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk).
// Throws ConfigError for E < 0 or nu outside [0, 0.5).
Voigt4x4 iso_elasticity_tensor(double E, double nu);

// Compressible neo-Hookean law. Throws SingularKinematicsError when J <= 0.
MaterialResponse neo_hookean(const DeformationState& state, const NeoHookeanParams& p);

// W = 1/2 (F - I) : D : (F - I). Valid for any F; not objective.
MaterialResponse linear_elastic_in_F(const DeformationState& state, const Voigt4x4& D);

// W = 1/2 kappa |F - Fbar|^2. Throws ConfigError when the state carries no Fbar.
MaterialResponse averaging_regularization(const DeformationState& state, double kappa_Fbar);

// Volumetric contact term + constant-stiffness linear term + averaging regularization.
MaterialResponse third_medium(const DeformationState& state, const ThirdMediumParams& p);

using MaterialKernel =
    std::variant<NeoHookeanParams, LinearTermParams, RegularizationParams, ThirdMediumParams>;

MaterialResponse evaluate(const MaterialKernel& kernel, const DeformationState& state);

// True when the kernel depends on the element-centroid deformation gradient.
bool uses_centroid(const MaterialKernel& kernel);

std::string kernel_name(const MaterialKernel& kernel);

struct LinearizedModuli {
  double E = 0.0;       // Pa
  double nu = 0.0;
  double lambda = 0.0;  // Pa
  double mu = 0.0;      // Pa

  // Modulus governing plane-strain bending and uniaxial plane-strain stretching.
  double plane_strain_modulus() const { return E / (1.0 - nu * nu); }
};

// Numerically linearizes the homogeneous response (Fbar tracking F) at F = I
// and extracts the equivalent isotropic small-strain moduli.
LinearizedModuli linearized_moduli(const MaterialKernel& kernel);

}  // namespace tmc
