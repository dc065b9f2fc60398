#pragma once

// Global DOF bookkeeping and sparse assembly on the free-DOF partition.
// Prescribed DOFs are eliminated; their internal forces are the reactions.

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "tmc/mesh.hpp"

namespace tmc {

using SparseSym = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct DofMap {
  int num_dofs = 0;
  std::vector<int> equation;         // per DOF: free index, or -1 when prescribed
  std::vector<int> free_dofs;        // ascending
  std::vector<int> prescribed_dofs;  // ascending
  std::vector<double> prescribed_target;  // value at lambda = 1, aligned with prescribed_dofs

  int num_free() const { return static_cast<int>(free_dofs.size()); }
  int num_prescribed() const { return static_cast<int>(prescribed_dofs.size()); }
  bool is_free(int dof) const { return equation[dof] >= 0; }
};

// Throws ConfigError for invalid nodes/components or a DOF prescribed twice.
DofMap build_dof_map(const MeshModel& mesh, const BoundaryProgram& bc);

// Overwrites the prescribed entries of d_full with their values at lambda.
void apply_prescribed(const DofMap& dofs, double lambda, Eigen::VectorXd& d_full);

Eigen::VectorXd prescribed_values(const DofMap& dofs, double lambda);
Eigen::VectorXd restrict_free(const DofMap& dofs, const Eigen::VectorXd& full);
void add_free(const DofMap& dofs, const Eigen::VectorXd& free_part, Eigen::VectorXd& full);

struct AssemblyOptions {
  bool stiffness = true;
  bool coupling = false;     // also assemble the free-prescribed block K_fp
  bool diagnostics = false;  // keep quadrature-point diagnostics per element
};

struct AssemblyResult {
  Eigen::VectorXd f_full;  // internal force on every DOF, N
  Eigen::VectorXd f_free;
  SparseSym K;             // free x free
  SparseSym K_fp;          // free x prescribed (columns follow prescribed_dofs)
  double energy = 0.0;     // J per unit thickness
  std::vector<std::vector<PointDiagnostics>> diagnostics;
};

// Caches quadrature rules and the sparsity pattern. Element contributions are
// evaluated in parallel into per-element buffers and then scattered serially
// in element order, so results do not depend on the thread count.
class Assembler {
 public:
  Assembler(const MeshModel& mesh, const DofMap& dofs, int threads = 1);

  AssemblyResult assemble(const Eigen::VectorXd& d_full, const AssemblyOptions& options = {}) const;
  double energy(const Eigen::VectorXd& d_full) const;

  const MeshModel& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }
  int threads() const { return threads_; }

  // Evaluate elements in the given order (used to check order independence).
  void set_element_order(std::vector<int> order);

 private:
  struct Slot {
    int index;  // position in the value array, -1 if not stored
    bool coupling;
  };

  std::vector<ElementOutput> evaluate_elements(const Eigen::VectorXd& d_full, const AssemblyOptions& options) const;

  const MeshModel& mesh_;
  const DofMap& dofs_;
  int threads_;
  std::vector<QuadratureRule> rules_;  // per region
  std::vector<std::pair<int, ElementFamily>> family_;
  std::vector<int> order_;
  SparseSym pattern_;
  SparseSym pattern_fp_;
  std::vector<std::vector<Slot>> slots_;  // per element, row-major ndof x ndof
};

// Convenience wrapper; builds an Assembler for a single evaluation.
AssemblyResult assemble(const MeshModel& mesh, const DofMap& dofs, const Eigen::VectorXd& d_full);

// Sum of internal forces over a node set: (R_x, R_y), N per unit thickness.
Eigen::Vector2d reaction(const Eigen::VectorXd& f_full, const std::vector<int>& nodes);

}  // namespace tmc
