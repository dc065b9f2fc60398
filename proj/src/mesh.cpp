#include "tmc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tmc {

namespace {

NaturalPoint reference_node(ElementFamily family, int a) {
  static constexpr std::array<NaturalPoint, 8> quad{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1},
                                                      {0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
  static constexpr std::array<NaturalPoint, 6> tri{{{0, 0}, {1, 0}, {0, 1}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}}};
  return is_quad(family) ? quad[a] : tri[a];
}

}  // namespace

NodeCoords MeshModel::element_coords(int e) const {
  const MeshElement& el = elements[e];
  const int n = el.size();
  NodeCoords X(n, 2);
  for (int a = 0; a < n; ++a) X.row(a) = nodes[el.nodes[a]].transpose();
  return X;
}

ElemVector MeshModel::gather(int e, const Eigen::VectorXd& d_full) const {
  const MeshElement& el = elements[e];
  const int n = el.size();
  ElemVector d(2 * n);
  for (int a = 0; a < n; ++a) {
    d[2 * a] = d_full[2 * el.nodes[a]];
    d[2 * a + 1] = d_full[2 * el.nodes[a] + 1];
  }
  return d;
}

double MeshModel::element_area(int e) const {
  const MeshElement& el = elements[e];
  const NodeCoords X = element_coords(e);
  const QuadratureRule rule = quadrature(
      el.family, is_quad(el.family) ? QuadratureSpec::Gauss3x3 : QuadratureSpec::TriDegree5);
  double area = 0.0;
  for (std::size_t g = 0; g < rule.size(); ++g) area += rule.weights[g] * b_matrix(el.family, X, rule.points[g]).detJ;
  return area;
}

const std::vector<int>& MeshModel::node_set(const std::string& name) const {
  const auto it = node_sets.find(name);
  if (it == node_sets.end()) throw ConfigError("unknown node set '" + name + "'");
  return it->second;
}

void MeshModel::validate() const {
  for (int e = 0; e < num_elements(); ++e) {
    const MeshElement& el = elements[e];
    if (el.region < 0 || el.region >= static_cast<int>(regions.size()))
      throw ConfigError("element " + std::to_string(e) + " references unknown region");
    for (int a = 0; a < el.size(); ++a)
      if (el.nodes[a] < 0 || el.nodes[a] >= num_nodes())
        throw ConfigError("element " + std::to_string(e) + " references invalid node");
    const NodeCoords X = element_coords(e);
    const QuadratureRule rule = quadrature(el.family, regions[el.region].quadrature);
    try {
      for (const auto& xi : rule.points) b_matrix(el.family, X, xi);
      for (int a = 0; a < el.size(); ++a) b_matrix(el.family, X, reference_node(el.family, a));
    } catch (const GeometryError& err) {
      throw GeometryError("element " + std::to_string(e) + ": " + err.what());
    }
  }
  for (const auto& [name, set] : node_sets)
    for (int n : set)
      if (n < 0 || n >= num_nodes()) throw ConfigError("node set '" + name + "' references invalid node");
}


int MeshBuilder::add_node(const Eigen::Vector2d& x) {
  const long long kx = std::llround(x.x() / tol_), ky = std::llround(x.y() / tol_);
  for (long long dx = -1; dx <= 1; ++dx)
    for (long long dy = -1; dy <= 1; ++dy) {
      const auto it = index_.find({kx + dx, ky + dy});
      if (it != index_.end() && (mesh_.nodes[it->second] - x).norm() <= 2.0 * tol_) return it->second;
    }
  const int id = mesh_.num_nodes();
  mesh_.nodes.push_back(x);
  index_[{kx, ky}] = id;
  return id;
}

int MeshBuilder::add_region(Region region) {
  mesh_.regions.push_back(std::move(region));
  return static_cast<int>(mesh_.regions.size()) - 1;
}

void MeshBuilder::add_element(ElementFamily family, const std::vector<int>& nodes, int region) {
  if (static_cast<int>(nodes.size()) != node_count(family))
    throw ConfigError("element connectivity does not match family " + family_name(family));
  MeshElement el;
  el.family = family;
  el.region = region;
  std::copy(nodes.begin(), nodes.end(), el.nodes.begin());
  mesh_.elements.push_back(el);
}

void add_block(MeshBuilder& b, ElementFamily family, const BlockMap& map, const std::vector<double>& s,
               const std::vector<double>& t, int region) {
  const auto node = [&](double u, double v) { return b.add_node(map(u, v)); };
  for (std::size_t j = 0; j + 1 < t.size(); ++j)
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const double s0 = s[i], s1 = s[i + 1], sm = 0.5 * (s0 + s1);
      const double t0 = t[j], t1 = t[j + 1], tm = 0.5 * (t0 + t1);
      const int c0 = node(s0, t0), c1 = node(s1, t0), c2 = node(s1, t1), c3 = node(s0, t1);
      switch (family) {
        case ElementFamily::Quad4:
          b.add_element(family, {c0, c1, c2, c3}, region);
          break;
        case ElementFamily::Quad8:
          b.add_element(family, {c0, c1, c2, c3, node(sm, t0), node(s1, tm), node(sm, t1), node(s0, tm)}, region);
          break;
        case ElementFamily::Tri6: {
          const int diag = node(sm, tm);
          b.add_element(family, {c0, c1, c2, node(sm, t0), node(s1, tm), diag}, region);
          b.add_element(family, {c0, c2, c3, diag, node(sm, t1), node(s0, tm)}, region);
          break;
        }
      }
    }
}

std::vector<double> uniform_breaks(int n) {
  if (n < 1) throw ConfigError("a block needs at least one cell per direction");
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = static_cast<double>(i) / n;
  v[n] = 1.0;
  return v;
}

std::vector<double> graded_breaks(int n, double ratio) {
  if (n < 1 || !(ratio > 0.0)) throw ConfigError("invalid graded block subdivision");
  std::vector<double> v(n + 1, 0.0);
  double size = 1.0, total = 0.0;
  for (int i = 0; i < n; ++i, size *= ratio) total += size;
  size = 1.0;
  for (int i = 0; i < n; ++i, size *= ratio) v[i + 1] = v[i] + size / total;
  v[n] = 1.0;
  return v;
}

BlockMap bilinear_map(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                      const Eigen::Vector2d& p3) {
  return [=](double s, double t) -> Eigen::Vector2d {
    return (1 - s) * (1 - t) * p0 + s * (1 - t) * p1 + s * t * p2 + (1 - s) * t * p3;
  };
}

BlockMap rectangle_map(double x0, double y0, double x1, double y1) {
  return [=](double s, double t) -> Eigen::Vector2d { return {x0 + s * (x1 - x0), y0 + t * (y1 - y0)}; };
}

std::vector<int> nodes_where(const MeshModel& mesh, const std::function<bool(const Eigen::Vector2d&)>& pred) {
  std::vector<int> out;
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (pred(mesh.nodes[n])) out.push_back(n);
  return out;
}

int nearest_node(const MeshModel& mesh, const Eigen::Vector2d& x) {
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const double d = (mesh.nodes[n] - x).squaredNorm();
    if (d < dist) {
      dist = d;
      best = n;
    }
  }
  return best;
}

}  // namespace tmc
