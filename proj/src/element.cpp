#include "tmc/element.hpp"

#include <cmath>

#include <Eigen/LU>

namespace tmc {

namespace {

constexpr double kRefTol = 1e-12;

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

Rule1D lobatto(int n) {
  if (n == 2) return {{-1.0, 1.0}, {1.0, 1.0}};
  return {{-1.0, 0.0, 1.0}, {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0}};
}

Rule1D gauss(int n) {
  switch (n) {
    case 2: {
      const double a = 1.0 / std::sqrt(3.0);
      return {{-a, a}, {1.0, 1.0}};
    }
    case 3: {
      const double a = std::sqrt(0.6);
      return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    default: {
      const double a = 0.33998104358485626, b = 0.86113631159405258;
      const double wa = 0.65214515486254614, wb = 0.34785484513745386;
      return {{-b, -a, a, b}, {wb, wa, wa, wb}};
    }
  }
}

QuadratureRule tensor_rule(const Rule1D& r) {
  QuadratureRule q;
  for (std::size_t j = 0; j < r.x.size(); ++j)
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      q.points.push_back({r.x[i], r.x[j]});
      q.weights.push_back(r.w[i] * r.w[j]);
    }
  return q;
}

QuadratureRule triangle_degree5() {
  const double s = std::sqrt(15.0);
  const double a1 = (6.0 - s) / 21.0, b1 = (9.0 + 2.0 * s) / 21.0, w1 = (155.0 - s) / 2400.0;
  const double a2 = (6.0 + s) / 21.0, b2 = (9.0 - 2.0 * s) / 21.0, w2 = (155.0 + s) / 2400.0;
  QuadratureRule q;
  q.points = {{1.0 / 3.0, 1.0 / 3.0}, {a1, a1}, {b1, a1}, {a1, b1}, {a2, a2}, {b2, a2}, {a2, b2}};
  q.weights = {9.0 / 80.0, w1, w1, w1, w2, w2, w2};
  return q;
}

// Reference node positions of the quads (corners, then mid-edges).
constexpr std::array<NaturalPoint, 8> kQuadNodes{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1},
                                                   {0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

}  // namespace

std::string family_name(ElementFamily f) {
  switch (f) {
    case ElementFamily::Quad4: return "Quad4";
    case ElementFamily::Quad8: return "Quad8";
    case ElementFamily::Tri6: return "Tri6";
  }
  return "?";
}

std::string quadrature_name(QuadratureSpec q) {
  switch (q) {
    case QuadratureSpec::Lobatto2x2: return "Lobatto2x2";
    case QuadratureSpec::Lobatto3x3: return "Lobatto3x3";
    case QuadratureSpec::Gauss2x2: return "Gauss2x2";
    case QuadratureSpec::Gauss3x3: return "Gauss3x3";
    case QuadratureSpec::Gauss4x4: return "Gauss4x4";
    case QuadratureSpec::TriDegree5: return "TriDegree5";
  }
  return "?";
}

ShapeEval shape_functions(ElementFamily family, const NaturalPoint& xi) {
  const double x = xi[0], y = xi[1];
  ShapeEval s;
  const int n = node_count(family);
  s.N.resize(n);
  s.dN.resize(n, 2);

  if (is_quad(family)) {
    if (std::abs(x) > 1.0 + kRefTol || std::abs(y) > 1.0 + kRefTol)
      throw GeometryError("natural coordinate outside the reference square");
  } else if (x < -kRefTol || y < -kRefTol || x + y > 1.0 + kRefTol) {
    throw GeometryError("natural coordinate outside the reference triangle");
  }

  switch (family) {
    case ElementFamily::Quad4:
      for (int a = 0; a < 4; ++a) {
        const double xa = kQuadNodes[a][0], ya = kQuadNodes[a][1];
        s.N[a] = 0.25 * (1 + x * xa) * (1 + y * ya);
        s.dN(a, 0) = 0.25 * xa * (1 + y * ya);
        s.dN(a, 1) = 0.25 * ya * (1 + x * xa);
      }
      break;
    case ElementFamily::Quad8:
      for (int a = 0; a < 4; ++a) {
        const double xa = kQuadNodes[a][0], ya = kQuadNodes[a][1];
        const double sx = 1 + x * xa, sy = 1 + y * ya, t = x * xa + y * ya - 1;
        s.N[a] = 0.25 * sx * sy * t;
        s.dN(a, 0) = 0.25 * xa * sy * (t + sx);
        s.dN(a, 1) = 0.25 * ya * sx * (t + sy);
      }
      for (int a = 4; a < 8; ++a) {
        const double xa = kQuadNodes[a][0], ya = kQuadNodes[a][1];
        if (xa == 0.0) {
          s.N[a] = 0.5 * (1 - x * x) * (1 + y * ya);
          s.dN(a, 0) = -x * (1 + y * ya);
          s.dN(a, 1) = 0.5 * ya * (1 - x * x);
        } else {
          s.N[a] = 0.5 * (1 + x * xa) * (1 - y * y);
          s.dN(a, 0) = 0.5 * xa * (1 - y * y);
          s.dN(a, 1) = -y * (1 + x * xa);
        }
      }
      break;
    case ElementFamily::Tri6: {
      const double L1 = 1 - x - y, L2 = x, L3 = y;
      // dL/dxi: L1 -> (-1,-1), L2 -> (1,0), L3 -> (0,1)
      s.N[0] = L1 * (2 * L1 - 1);
      s.N[1] = L2 * (2 * L2 - 1);
      s.N[2] = L3 * (2 * L3 - 1);
      s.N[3] = 4 * L1 * L2;
      s.N[4] = 4 * L2 * L3;
      s.N[5] = 4 * L3 * L1;
      s.dN << -(4 * L1 - 1), -(4 * L1 - 1),
              4 * L2 - 1, 0,
              0, 4 * L3 - 1,
              4 * (L1 - L2), -4 * L2,
              4 * L3, 4 * L2,
              -4 * L3, 4 * (L1 - L3);
      break;
    }
  }
  return s;
}

QuadratureRule quadrature(ElementFamily family, QuadratureSpec spec) {
  const bool tri_spec = spec == QuadratureSpec::TriDegree5;
  if (is_quad(family) == tri_spec)
    throw ConfigError("quadrature " + quadrature_name(spec) + " does not fit element " + family_name(family));
  switch (spec) {
    case QuadratureSpec::Lobatto2x2: return tensor_rule(lobatto(2));
    case QuadratureSpec::Lobatto3x3: return tensor_rule(lobatto(3));
    case QuadratureSpec::Gauss2x2: return tensor_rule(gauss(2));
    case QuadratureSpec::Gauss3x3: return tensor_rule(gauss(3));
    case QuadratureSpec::Gauss4x4: return tensor_rule(gauss(4));
    case QuadratureSpec::TriDegree5: return triangle_degree5();
  }
  return {};
}

NaturalPoint centroid(ElementFamily family) {
  return is_quad(family) ? NaturalPoint{0.0, 0.0} : NaturalPoint{1.0 / 3.0, 1.0 / 3.0};
}

BEval b_matrix(ElementFamily family, const NodeCoords& X, const NaturalPoint& xi) {
  const ShapeEval s = shape_functions(family, xi);
  const int n = node_count(family);
  // Jmap_ij = dX_i / dxi_j
  const Eigen::Matrix2d Jmap = X.transpose() * s.dN;
  BEval out;
  out.detJ = Jmap.determinant();
  if (!(out.detJ > 0.0))
    throw GeometryError("non-positive isoparametric Jacobian (" + std::to_string(out.detJ) + ")");
  const ShapeGradients dNdX = s.dN * Jmap.inverse();
  out.B.setZero(4, 2 * n);
  for (int a = 0; a < n; ++a) {
    const double nx = dNdX(a, 0), ny = dNdX(a, 1);
    out.B(0, 2 * a) = nx;      // F11 <- du/dX
    out.B(2, 2 * a) = ny;      // F12 <- du/dY
    out.B(1, 2 * a + 1) = ny;  // F22 <- dv/dY
    out.B(3, 2 * a + 1) = nx;  // F21 <- dv/dX
  }
  return out;
}

BMatrix centroid_b_matrix(ElementFamily family, const NodeCoords& X) {
  return b_matrix(family, X, centroid(family)).B;
}

ElementOutput element_force_stiffness(ElementFamily family, const NodeCoords& X, const ElemVector& d,
                                      const QuadratureRule& rule, const MaterialKernel& kernel,
                                      const ElementEvalOptions& options) {
  const int ndof = 2 * node_count(family);
  const bool averaged = uses_centroid(kernel);

  ElementOutput out;
  out.f.setZero(ndof);
  if (options.stiffness) out.K.setZero(ndof, ndof);
  if (options.diagnostics) out.points.reserve(rule.size());

  BMatrix Bbar;
  std::optional<Tensor2> Fbar;
  if (averaged) {
    Bbar = centroid_b_matrix(family, X);
    Fbar = Tensor2::identity() + from_voigt(Bbar * d);
  }

  for (std::size_t g = 0; g < rule.size(); ++g) {
    const BEval be = b_matrix(family, X, rule.points[g]);
    const double w = rule.weights[g] * be.detJ;
    const DeformationState state(Tensor2::identity() + from_voigt(be.B * d), Fbar);

    MaterialResponse r;
    try {
      r = evaluate(kernel, state);
    } catch (const SingularKinematicsError& e) {
      throw SingularKinematicsError(e.J(), options.element_id, static_cast<int>(g));
    }

    out.energy += w * r.W;
    out.f.noalias() += w * (be.B.transpose() * r.P);
    if (options.stiffness) {
      out.K.noalias() += w * (be.B.transpose() * r.D1 * be.B);
    }
    if (averaged) {
      out.f.noalias() += w * (Bbar.transpose() * r.Pbar);
      if (options.stiffness) {
        out.K.noalias() += w * (be.B.transpose() * r.D2 * Bbar);
        out.K.noalias() += w * (Bbar.transpose() * r.D3 * be.B);
        out.K.noalias() += w * (Bbar.transpose() * r.D4 * Bbar);
      }
    }
    if (options.diagnostics) {
      // sigma = P F^T / J, in-plane block
      const Tensor2 sigma = (1.0 / state.J) * dot(from_voigt(r.P), state.F.transpose());
      out.points.push_back({state.J, r.W, std::sqrt(frobenius_norm_sq(sigma))});
    }
  }
  return out;
}

}  // namespace tmc
