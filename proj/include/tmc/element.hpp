#pragma once

// Isoparametric plane elements and the element force vector / tangent of the
// centroid-averaged formulation:
//
//   f_e = sum_g w_g (B^T P + Bbar^T Pbar)
//   K_e = sum_g w_g (B^T D1 B + B^T D2 Bbar + Bbar^T D3 B + Bbar^T D4 Bbar)
//
// where Bbar is B evaluated at the element centroid and w_g includes the
// isoparametric map determinant. Element DOFs are ordered (u0, v0, u1, v1, ...).

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tmc/materials.hpp"

namespace tmc {

enum class ElementFamily { Quad4, Quad8, Tri6 };

// Quad8 and Tri6 list corner nodes first, then mid-edge nodes (edge a -> a+1).
constexpr int node_count(ElementFamily f) {
  switch (f) {
    case ElementFamily::Quad4: return 4;
    case ElementFamily::Quad8: return 8;
    case ElementFamily::Tri6: return 6;
  }
  return 0;
}

constexpr bool is_quad(ElementFamily f) { return f != ElementFamily::Tri6; }

std::string family_name(ElementFamily f);

enum class QuadratureSpec { Lobatto2x2, Lobatto3x3, Gauss2x2, Gauss3x3, Gauss4x4, TriDegree5 };

std::string quadrature_name(QuadratureSpec q);

using NaturalPoint = std::array<double, 2>;

struct QuadratureRule {
  std::vector<NaturalPoint> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

inline constexpr int kMaxElementNodes = 8;
inline constexpr int kMaxElementDofs = 2 * kMaxElementNodes;

using ElemVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxElementDofs, 1>;
using ElemMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxElementDofs, kMaxElementDofs>;
using NodeCoords = Eigen::Matrix<double, Eigen::Dynamic, 2, 0, kMaxElementNodes, 2>;
using ShapeValues = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxElementNodes, 1>;
using ShapeGradients = Eigen::Matrix<double, Eigen::Dynamic, 2, 0, kMaxElementNodes, 2>;
using BMatrix = Eigen::Matrix<double, 4, Eigen::Dynamic, 0, 4, kMaxElementDofs>;

struct ShapeEval {
  ShapeValues N;
  ShapeGradients dN;  // d N_a / d xi_j
};

// Throws GeometryError when xi lies outside the reference element (tolerance 1e-12).
ShapeEval shape_functions(ElementFamily family, const NaturalPoint& xi);

// Throws ConfigError when spec does not fit the family.
QuadratureRule quadrature(ElementFamily family, QuadratureSpec spec);

NaturalPoint centroid(ElementFamily family);

struct BEval {
  BMatrix B;
  double detJ = 0.0;
};

// B maps element displacements to the Voigt displacement gradient at xi.
// Throws GeometryError when the isoparametric map determinant is not positive.
BEval b_matrix(ElementFamily family, const NodeCoords& X, const NaturalPoint& xi);

BMatrix centroid_b_matrix(ElementFamily family, const NodeCoords& X);

struct PointDiagnostics {
  double J = 1.0;
  double W = 0.0;
  double cauchy_norm = 0.0;  // Frobenius norm of the in-plane Cauchy stress, Pa
};

struct ElementOutput {
  ElemVector f;
  ElemMatrix K;
  double energy = 0.0;
  std::vector<PointDiagnostics> points;
};

struct ElementEvalOptions {
  bool stiffness = true;
  bool diagnostics = false;
  int element_id = -1;  // reported in SingularKinematicsError
};

// Throws SingularKinematicsError (with element and point index) when J <= 0
// at a quadrature point and GeometryError for an inverted reference map.
ElementOutput element_force_stiffness(ElementFamily family, const NodeCoords& X, const ElemVector& d,
                                      const QuadratureRule& rule, const MaterialKernel& kernel,
                                      const ElementEvalOptions& options = {});

}  // namespace tmc
