#include "tmc/assembly.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

namespace tmc {

DofMap build_dof_map(const MeshModel& mesh, const BoundaryProgram& bc) {
  DofMap map;
  map.num_dofs = mesh.num_dofs();
  std::vector<double> target(map.num_dofs, 0.0);
  std::vector<bool> prescribed(map.num_dofs, false);

  for (const Prescription& p : bc.items) {
    if (p.component != 0 && p.component != 1)
      throw ConfigError("prescription '" + p.label + "' has invalid component " + std::to_string(p.component));
    for (int n : p.nodes) {
      if (n < 0 || n >= mesh.num_nodes())
        throw ConfigError("prescription '" + p.label + "' references invalid node " + std::to_string(n));
      const int dof = 2 * n + p.component;
      if (prescribed[dof])
        throw ConfigError("DOF " + std::to_string(dof) + " (node " + std::to_string(n) + ") prescribed twice");
      prescribed[dof] = true;
      target[dof] = p.target;
    }
  }

  map.equation.assign(map.num_dofs, -1);
  for (int dof = 0; dof < map.num_dofs; ++dof) {
    if (prescribed[dof]) {
      map.prescribed_dofs.push_back(dof);
      map.prescribed_target.push_back(target[dof]);
    } else {
      map.equation[dof] = static_cast<int>(map.free_dofs.size());
      map.free_dofs.push_back(dof);
    }
  }
  return map;
}

Eigen::VectorXd prescribed_values(const DofMap& dofs, double lambda) {
  Eigen::VectorXd v(dofs.num_prescribed());
  for (int k = 0; k < dofs.num_prescribed(); ++k) v[k] = dofs.prescribed_target[k] * lambda;
  return v;
}

void apply_prescribed(const DofMap& dofs, double lambda, Eigen::VectorXd& d_full) {
  for (int k = 0; k < dofs.num_prescribed(); ++k)
    d_full[dofs.prescribed_dofs[k]] = dofs.prescribed_target[k] * lambda;
}

Eigen::VectorXd restrict_free(const DofMap& dofs, const Eigen::VectorXd& full) {
  Eigen::VectorXd r(dofs.num_free());
  for (int i = 0; i < dofs.num_free(); ++i) r[i] = full[dofs.free_dofs[i]];
  return r;
}

void add_free(const DofMap& dofs, const Eigen::VectorXd& free_part, Eigen::VectorXd& full) {
  for (int i = 0; i < dofs.num_free(); ++i) full[dofs.free_dofs[i]] += free_part[i];
}

namespace {

int find_slot(const SparseSym& m, int row, int col) {
  const int* inner = m.innerIndexPtr();
  const int begin = m.outerIndexPtr()[col], end = m.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(inner + begin, inner + end, row);
  return static_cast<int>(it - inner);
}

std::vector<int> element_dofs(const MeshElement& el) {
  std::vector<int> g(2 * el.size());
  for (int a = 0; a < el.size(); ++a) {
    g[2 * a] = 2 * el.nodes[a];
    g[2 * a + 1] = 2 * el.nodes[a] + 1;
  }
  return g;
}

}  // namespace

Assembler::Assembler(const MeshModel& mesh, const DofMap& dofs, int threads)
    : mesh_(mesh), dofs_(dofs), threads_(std::max(1, threads)) {
  if (dofs.num_dofs != mesh.num_dofs()) throw ConfigError("DOF map does not match mesh");
  // One rule per region; a region holds a single element family.
  rules_.resize(mesh.regions.size());
  std::vector<bool> have_rule(mesh.regions.size(), false);
  for (const MeshElement& el : mesh.elements) {
    if (el.region < 0 || el.region >= static_cast<int>(mesh.regions.size()))
      throw ConfigError("element references unknown region");
    if (!have_rule[el.region]) {
      rules_[el.region] = quadrature(el.family, mesh.regions[el.region].quadrature);
      have_rule[el.region] = true;
      family_.push_back({el.region, el.family});
    } else {
      for (const auto& [region, family] : family_)
        if (region == el.region && family != el.family)
          throw ConfigError("region '" + mesh.regions[el.region].name + "' mixes element families");
    }
  }

  order_.resize(mesh.num_elements());
  std::iota(order_.begin(), order_.end(), 0);

  std::vector<int> presc_index(dofs.num_dofs, -1);
  for (int k = 0; k < dofs.num_prescribed(); ++k) presc_index[dofs.prescribed_dofs[k]] = k;

  using Trip = Eigen::Triplet<double, int>;
  std::vector<Trip> ff, fp;
  for (const MeshElement& el : mesh.elements) {
    const std::vector<int> g = element_dofs(el);
    for (int a : g) {
      if (!dofs.is_free(a)) continue;
      for (int b : g) {
        if (dofs.is_free(b))
          ff.emplace_back(dofs.equation[a], dofs.equation[b], 0.0);
        else
          fp.emplace_back(dofs.equation[a], presc_index[b], 0.0);
      }
    }
  }
  pattern_.resize(dofs.num_free(), dofs.num_free());
  pattern_.setFromTriplets(ff.begin(), ff.end());
  pattern_.makeCompressed();
  pattern_fp_.resize(dofs.num_free(), dofs.num_prescribed());
  pattern_fp_.setFromTriplets(fp.begin(), fp.end());
  pattern_fp_.makeCompressed();

  slots_.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const std::vector<int> g = element_dofs(mesh.elements[e]);
    const int n = static_cast<int>(g.size());
    std::vector<Slot>& s = slots_[e];
    s.assign(n * n, Slot{-1, false});
    for (int i = 0; i < n; ++i) {
      if (!dofs.is_free(g[i])) continue;
      for (int j = 0; j < n; ++j) {
        if (dofs.is_free(g[j]))
          s[i * n + j] = {find_slot(pattern_, dofs.equation[g[i]], dofs.equation[g[j]]), false};
        else
          s[i * n + j] = {find_slot(pattern_fp_, dofs.equation[g[i]], presc_index[g[j]]), true};
      }
    }
  }
}

void Assembler::set_element_order(std::vector<int> order) {
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < static_cast<int>(sorted.size()); ++i)
    if (sorted[i] != i || static_cast<int>(sorted.size()) != mesh_.num_elements())
      throw ConfigError("element order is not a permutation");
  order_ = std::move(order);
}

std::vector<ElementOutput> Assembler::evaluate_elements(const Eigen::VectorXd& d_full,
                                                        const AssemblyOptions& options) const {
  const int ne = mesh_.num_elements();
  std::vector<ElementOutput> out(ne);
  std::vector<std::exception_ptr> errors(ne);

  const auto work = [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      const MeshElement& el = mesh_.elements[e];
      const Region& region = mesh_.regions[el.region];
      ElementEvalOptions eo;
      eo.stiffness = options.stiffness || options.coupling;
      eo.diagnostics = options.diagnostics;
      eo.element_id = e;
      try {
        out[e] = element_force_stiffness(el.family, mesh_.element_coords(e), mesh_.gather(e, d_full),
                                         rules_[el.region], region.kernel, eo);
      } catch (...) {
        errors[e] = std::current_exception();
      }
    }
  };

  const int nt = std::min(threads_, std::max(1, ne));
  if (nt == 1) {
    work(0, ne);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (ne + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) pool.emplace_back(work, std::min(ne, t * chunk), std::min(ne, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  // Report the lowest failing element regardless of the thread schedule.
  for (int e = 0; e < ne; ++e)
    if (errors[e]) std::rethrow_exception(errors[e]);
  return out;
}

AssemblyResult Assembler::assemble(const Eigen::VectorXd& d_full, const AssemblyOptions& options) const {
  if (d_full.size() != dofs_.num_dofs) throw ConfigError("displacement vector has wrong size");
  const std::vector<ElementOutput> elems = evaluate_elements(d_full, options);

  AssemblyResult r;
  r.f_full.setZero(dofs_.num_dofs);
  if (options.stiffness) {
    r.K = pattern_;
    std::fill(r.K.valuePtr(), r.K.valuePtr() + r.K.nonZeros(), 0.0);
  }
  if (options.coupling) {
    r.K_fp = pattern_fp_;
    std::fill(r.K_fp.valuePtr(), r.K_fp.valuePtr() + r.K_fp.nonZeros(), 0.0);
  }
  if (options.diagnostics) r.diagnostics.resize(elems.size());

  for (int e : order_) {
    const MeshElement& el = mesh_.elements[e];
    const ElementOutput& eo = elems[e];
    const int n = 2 * el.size();
    r.energy += eo.energy;
    for (int a = 0; a < el.size(); ++a) {
      r.f_full[2 * el.nodes[a]] += eo.f[2 * a];
      r.f_full[2 * el.nodes[a] + 1] += eo.f[2 * a + 1];
    }
    if (options.stiffness || options.coupling) {
      const std::vector<Slot>& s = slots_[e];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Slot& slot = s[i * n + j];
          if (slot.index < 0) continue;
          if (!slot.coupling && options.stiffness)
            r.K.valuePtr()[slot.index] += eo.K(i, j);
          else if (slot.coupling && options.coupling)
            r.K_fp.valuePtr()[slot.index] += eo.K(i, j);
        }
    }
    if (options.diagnostics) r.diagnostics[e] = eo.points;
  }
  r.f_free = restrict_free(dofs_, r.f_full);
  return r;
}

double Assembler::energy(const Eigen::VectorXd& d_full) const {
  AssemblyOptions o;
  o.stiffness = false;
  return assemble(d_full, o).energy;
}

AssemblyResult assemble(const MeshModel& mesh, const DofMap& dofs, const Eigen::VectorXd& d_full) {
  return Assembler(mesh, dofs).assemble(d_full);
}

Eigen::Vector2d reaction(const Eigen::VectorXd& f_full, const std::vector<int>& nodes) {
  Eigen::Vector2d r = Eigen::Vector2d::Zero();
  for (int n : nodes) {
    r[0] += f_full[2 * n];
    r[1] += f_full[2 * n + 1];
  }
  return r;
}

}  // namespace tmc
