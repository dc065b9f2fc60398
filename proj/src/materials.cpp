#include "tmc/materials.hpp"

#include <cmath>

namespace tmc {

namespace {

constexpr double kd(int a, int b) { return a == b ? 1.0 : 0.0; }

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

MaterialResponse& MaterialResponse::operator+=(const MaterialResponse& o) {
  W += o.W;
  P += o.P;
  Pbar += o.Pbar;
  D1 += o.D1;
  D2 += o.D2;
  D3 += o.D3;
  D4 += o.D4;
  return *this;
}

Voigt4x4 iso_elasticity_tensor(double E, double nu) {
  if (!(E >= 0.0)) throw ConfigError("Young's modulus must be non-negative");
  if (!(nu >= 0.0 && nu < 0.5)) throw ConfigError("Poisson's ratio must lie in [0, 0.5)");
  const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = E / (2.0 * (1.0 + nu));
  Voigt4x4 D;
  for (int s = 0; s < 4; ++s) {
    const auto [i, j] = voigt_pair(s);
    for (int t = 0; t < 4; ++t) {
      const auto [k, l] = voigt_pair(t);
      D(s, t) = lambda * kd(i, j) * kd(k, l) + mu * (kd(i, k) * kd(j, l) + kd(i, l) * kd(j, k));
    }
  }
  return D;
}

MaterialResponse neo_hookean(const DeformationState& state, const NeoHookeanParams& p) {
  const double J = state.J;
  if (!(J > 0.0)) throw SingularKinematicsError(J);
  const Tensor2& F = state.F;
  const Tensor2 Finv = det_inv(F).second;
  const Tensor2 FinvT = Finv.transpose();
  const double lnJ = std::log(J);

  MaterialResponse r;
  r.W = 0.5 * p.kappa_vol * lnJ * lnJ;
  r.P = p.kappa_vol * lnJ * to_voigt(FinvT);
  for (int s = 0; s < 4; ++s) {
    const auto [i, j] = voigt_pair(s);
    for (int t = 0; t < 4; ++t) {
      const auto [k, l] = voigt_pair(t);
      r.D1(s, t) = p.kappa_vol * (FinvT(i, j) * FinvT(k, l) - lnJ * Finv(j, k) * Finv(l, i));
    }
  }

  if (p.kappa_iso == 0.0) return r;

  // Ibar = J^{-2/3} I1 with its first and second derivatives.
  const double g = std::pow(J, -2.0 / 3.0);
  const double I1 = state.I1;
  const double Ibar = g * I1;
  const Voigt4 dI = g * (2.0 * to_voigt(F) - (2.0 / 3.0) * I1 * to_voigt(FinvT));
  Voigt4x4 d2I;
  for (int s = 0; s < 4; ++s) {
    const auto [i, j] = voigt_pair(s);
    for (int t = 0; t < 4; ++t) {
      const auto [k, l] = voigt_pair(t);
      d2I(s, t) = -(2.0 / 3.0) * FinvT(k, l) * dI[s] +
                  g * (2.0 * kd(i, k) * kd(j, l) - (4.0 / 3.0) * F(k, l) * FinvT(i, j) +
                       (2.0 / 3.0) * I1 * Finv(j, k) * Finv(l, i));
    }
  }

  if (p.iso_form == IsoForm::Classical) {
    r.W += 0.5 * p.kappa_iso * (Ibar - 3.0);
    r.P += 0.5 * p.kappa_iso * dI;
    r.D1 += 0.5 * p.kappa_iso * d2I;
  } else {
    const double e = Ibar - 3.0;
    r.W += 0.5 * p.kappa_iso * e * e;
    r.P += p.kappa_iso * e * dI;
    r.D1 += p.kappa_iso * (dI * dI.transpose() + e * d2I);
  }
  return r;
}

MaterialResponse linear_elastic_in_F(const DeformationState& state, const Voigt4x4& D) {
  const Voigt4 grad_u = to_voigt(state.F - Tensor2::identity());
  MaterialResponse r;
  r.P = D * grad_u;
  r.W = 0.5 * grad_u.dot(r.P);
  r.D1 = D;
  return r;
}

MaterialResponse averaging_regularization(const DeformationState& state, double kappa_Fbar) {
  if (!state.Fbar) throw ConfigError("averaging regularization requires the centroid deformation gradient");
  const Voigt4 diff = to_voigt(state.F - *state.Fbar);
  MaterialResponse r;
  r.W = 0.5 * kappa_Fbar * diff.squaredNorm();
  r.P = kappa_Fbar * diff;
  r.Pbar = -r.P;
  r.D1 = fourth_identity(kappa_Fbar);
  r.D2 = fourth_identity(-kappa_Fbar);
  r.D3 = r.D2;
  r.D4 = r.D1;
  return r;
}

MaterialResponse third_medium(const DeformationState& state, const ThirdMediumParams& p) {
  if (!state.Fbar) throw ConfigError("third medium kernel requires the centroid deformation gradient");
  MaterialResponse r = neo_hookean(state, NeoHookeanParams{p.kappa_vol, 0.0, IsoForm::Classical});
  r += linear_elastic_in_F(state, iso_elasticity_tensor(p.linear.E, p.linear.nu));
  r += averaging_regularization(state, p.kappa_Fbar);
  return r;
}

MaterialResponse evaluate(const MaterialKernel& kernel, const DeformationState& state) {
  return std::visit(
      Overloaded{
          [&](const NeoHookeanParams& p) { return neo_hookean(state, p); },
          [&](const LinearTermParams& p) {
            return linear_elastic_in_F(state, iso_elasticity_tensor(p.E, p.nu));
          },
          [&](const RegularizationParams& p) { return averaging_regularization(state, p.kappa_Fbar); },
          [&](const ThirdMediumParams& p) { return third_medium(state, p); },
      },
      kernel);
}

bool uses_centroid(const MaterialKernel& kernel) {
  return std::holds_alternative<RegularizationParams>(kernel) ||
         std::holds_alternative<ThirdMediumParams>(kernel);
}

std::string kernel_name(const MaterialKernel& kernel) {
  return std::visit(Overloaded{
                        [](const NeoHookeanParams&) { return std::string("neo_hookean"); },
                        [](const LinearTermParams&) { return std::string("linear_in_F"); },
                        [](const RegularizationParams&) { return std::string("regularization"); },
                        [](const ThirdMediumParams&) { return std::string("third_medium"); },
                    },
                    kernel);
}

LinearizedModuli linearized_moduli(const MaterialKernel& kernel) {
  // Homogeneous stress: with Fbar = F the total first variation is (P + Pbar) : dF.
  const auto homogeneous_stress = [&](const Tensor2& F) {
    const MaterialResponse r = evaluate(kernel, DeformationState(F, F));
    return Voigt4(r.P + r.Pbar);
  };

  constexpr double h = 1e-6;
  Voigt4x4 A;
  for (int t = 0; t < 4; ++t) {
    Voigt4 e = Voigt4::Zero();
    e[t] = h;
    const Voigt4 plus = homogeneous_stress(from_voigt(to_voigt(Tensor2::identity()) + e));
    const Voigt4 minus = homogeneous_stress(from_voigt(to_voigt(Tensor2::identity()) - e));
    A.col(t) = (plus - minus) / (2.0 * h);
  }
  if (!A.allFinite()) throw Error("non-finite tangent while linearizing material at F = I");

  LinearizedModuli m;
  m.lambda = A(0, 1);
  m.mu = A(2, 2);
  const double denom = m.lambda + m.mu;
  if (denom > 0.0) {
    m.E = m.mu * (3.0 * m.lambda + 2.0 * m.mu) / denom;
    m.nu = m.lambda / (2.0 * denom);
  }
  return m;
}

}  // namespace tmc
