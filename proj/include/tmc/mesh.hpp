#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tmc/element.hpp"

namespace tmc {

struct Region {
  std::string name;
  MaterialKernel kernel;
  QuadratureSpec quadrature = QuadratureSpec::Lobatto3x3;
  bool third_medium = false;
};

struct MeshElement {
  ElementFamily family = ElementFamily::Quad4;
  std::array<int, kMaxElementNodes> nodes{};
  int region = 0;

  int size() const { return node_count(family); }
};

// Nodes in metres; DOF 2n is the x-displacement of node n, 2n+1 the y-displacement.
struct MeshModel {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<MeshElement> elements;
  std::vector<Region> regions;
  std::map<std::string, std::vector<int>> node_sets;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_dofs() const { return 2 * num_nodes(); }
  int num_elements() const { return static_cast<int>(elements.size()); }

  NodeCoords element_coords(int e) const;
  ElemVector gather(int e, const Eigen::VectorXd& d_full) const;

  // Reference area of one element.
  double element_area(int e) const;

  const std::vector<int>& node_set(const std::string& name) const;

  // Throws GeometryError / ConfigError for invalid connectivity, unknown
  // regions, or elements whose isoparametric map is not positive at the
  // quadrature points and nodes.
  void validate() const;
};

// Prescribed value = target * lambda for lambda in [0, 1]; target 0 fixes the DOF.
struct Prescription {
  std::vector<int> nodes;
  int component = 0;  // 0: x, 1: y
  double target = 0.0;
  std::string label;

  double value(double lambda) const { return target * lambda; }
};

struct BoundaryProgram {
  std::vector<Prescription> items;

  void fix(const std::vector<int>& nodes, int component, std::string label = {}) {
    items.push_back({nodes, component, 0.0, std::move(label)});
  }
  void ramp(const std::vector<int>& nodes, int component, double target, std::string label = {}) {
    items.push_back({nodes, component, target, std::move(label)});
  }
};

// Collects nodes and elements, merging nodes that coincide within a tolerance
// so that independently generated blocks share their common edges.
class MeshBuilder {
 public:
  explicit MeshBuilder(double merge_tol = 1e-9) : tol_(merge_tol) {}

  int add_node(const Eigen::Vector2d& x);
  int add_region(Region region);
  void add_element(ElementFamily family, const std::vector<int>& nodes, int region);

  MeshModel& model() { return mesh_; }
  MeshModel build() const { return mesh_; }

 private:
  double tol_;
  MeshModel mesh_;
  std::map<std::pair<long long, long long>, int> index_;
};

// Maps block parameters (s, t) in [0, 1]^2 to material coordinates.
using BlockMap = std::function<Eigen::Vector2d(double s, double t)>;

// Structured block of ns x nt cells; s and t hold the cell boundaries in [0, 1].
// Quad8 mid-edge nodes and Tri6 nodes are placed through the map, so curved
// blocks get curved element edges. Tri6 splits each cell along its 0-2 diagonal.
void add_block(MeshBuilder& builder, ElementFamily family, const BlockMap& map, const std::vector<double>& s,
               const std::vector<double>& t, int region);

// n uniform cells: {0, 1/n, ..., 1}.
std::vector<double> uniform_breaks(int n);
// n cells whose sizes grow geometrically by `ratio` from the t = 0 end.
std::vector<double> graded_breaks(int n, double ratio);

BlockMap bilinear_map(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                      const Eigen::Vector2d& p3);
BlockMap rectangle_map(double x0, double y0, double x1, double y1);

// Nodes whose coordinates satisfy the predicate, ascending.
std::vector<int> nodes_where(const MeshModel& mesh, const std::function<bool(const Eigen::Vector2d&)>& pred);
// Closest node to a point.
int nearest_node(const MeshModel& mesh, const Eigen::Vector2d& x);

}  // namespace tmc
