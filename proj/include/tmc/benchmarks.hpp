#pragma once

// Mesh generators, boundary programs and postprocessing for the four example
// problems: the C-shape mesh study, the closed box with double self-contact,
// the piston box with a buckling beam, and the configurational force problem.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tmc/solver.hpp"

namespace tmc {

enum class BenchmarkKind { CShape, ClosedBox, PistonBox, ConfigForce };

// Named after the number of third-medium elements across the contact gap.
enum class MeshLevel { M3, M9, M15, M21 };

std::string benchmark_name(BenchmarkKind kind);
BenchmarkKind parse_benchmark_kind(const std::string& name);
std::string mesh_level_name(MeshLevel level);
MeshLevel parse_mesh_level(const std::string& name);
// Bulk elements per beam height: 1, 3, 5, 7.
int beam_elements_per_height(MeshLevel level);
// Default regularization penalty per level: 200, 600, 1000, 1400 Pa.
double default_kappa_Fbar(MeshLevel level);

// Optional material overrides. Bulk parameters come either from
// (kappa_vol, kappa_iso) or from (E, nu); E also sets the characteristic
// modulus that scales gamma_e.
struct MaterialOverrides {
  std::optional<double> kappa_vol_pa;
  std::optional<double> kappa_iso_pa;
  std::optional<double> E_pa;
  std::optional<double> nu;
  std::optional<IsoForm> iso_form;
  std::optional<double> gamma_c;
  std::optional<double> gamma_e;
  std::optional<double> kappa_Fbar_pa;

  bool operator==(const MaterialOverrides&) const = default;
};

struct MaterialSettings {
  NeoHookeanParams bulk;
  double E_char = 0.0;      // Pa, characteristic modulus for gamma_e
  double gamma_c = 0.0;     // contact term: kappa_vol = gamma_c * bulk kappa_vol
  double gamma_e = 0.0;     // linear term: E = gamma_e * E_char
  double kappa_Fbar = 0.0;  // Pa

  ThirdMediumParams third_medium() const;
};

// kappa_vol = E / (3 (1 - 2 nu)), kappa_iso = E / (2 (1 + nu)) for the classical isochoric term.
// Throws ConfigError for E <= 0 or nu outside [0, 0.5).
NeoHookeanParams neo_hookean_from_E_nu(double E, double nu);

struct CShapeGeometry {
  double length = 1.2;       // m, from the clamped edge to the beam tips
  double height = 0.1;       // m, beam cross-section height h
  double gap = 0.1;          // m, initial clear gap between the beams
  double load_over_h = 2.0;  // final downward displacement of node A in multiples of h
  bool operator==(const CShapeGeometry&) const = default;
};

struct ClosedBoxGeometry {
  double width = 1.0;            // m, outer width L
  double height = 0.5;           // m, outer height
  double wall = 0.1;             // m, wall thickness d
  double envelope_side = 0.3;    // m
  double envelope_top = 0.3;     // m
  double envelope_bottom = 1.0;  // m
  int wall_elements = 3;         // elements across the wall thickness
  double envelope_grading = 1.15;
  double load_over_d = 6.5;      // final downward displacement of the loaded node in multiples of d
  bool operator==(const ClosedBoxGeometry&) const = default;
};

struct PistonBoxGeometry {
  double chamber_width = 0.5;     // m
  double beam_length = 1.0;       // m, clamp to clamp
  double beam_thickness = 0.04;   // m
  double beam_position = 0.25;    // m, x of the beam axis
  double wall_thickness = 0.1;    // m, piston and wall thickness d used for normalization
  int beam_elements_thick = 8;
  int beam_elements_long = 200;
  int side_elements = 12;         // third-medium elements between the beam and each wall
  double side_grading = 1.0;
  double imperfection = 1e-4;     // amplitude of the initial bow relative to the beam length
  double load_over_d = 7.0;       // final piston travel in multiples of d
  bool operator==(const PistonBoxGeometry&) const = default;
};

struct ConfigForceGeometry {
  double h0 = 1.0;                // m, block height
  double length_over_h0 = 4.0;    // L / h0
  double inner_fraction = 0.3;    // L_in / L, flat indenter face over the block
  double radius_over_h0 = 0.9;    // indenter corner radius R / h0
  double gap_over_h0 = 0.3;       // initial gap Delta / h0
  double column_over_h0 = 1.5;    // third-medium column beyond the block end
  int elements_per_h0 = 10;
  int gap_elements = 4;
  double travel_over_h0 = 0.6;    // final indenter travel
  bool operator==(const ConfigForceGeometry&) const = default;
};

struct BenchmarkSpec {
  BenchmarkKind kind = BenchmarkKind::CShape;
  std::optional<MeshLevel> level;  // C-shape only
  std::optional<int> bvp;          // configurational force only: 1 or 2
  CShapeGeometry cshape;
  ClosedBoxGeometry closed_box;
  PistonBoxGeometry piston_box;
  ConfigForceGeometry config_force;
  MaterialOverrides material;

  // Throws ConfigError when the level or bvp does not fit the kind or a
  // geometry value is out of range.
  void validate() const;
  bool operator==(const BenchmarkSpec&) const = default;
};

// Default materials of a benchmark with the overrides applied.
MaterialSettings resolve_materials(const BenchmarkSpec& spec);

// Quadrature point on an element edge used to sample a boundary fiber.
struct ProbePoint {
  int element = 0;
  NaturalPoint xi{};
  double weight = 0.0;  // reference length associated with the point, m
};

struct BenchmarkModel {
  BenchmarkSpec spec;
  MaterialSettings materials;
  MeshModel mesh;
  BoundaryProgram bc;
  std::map<std::string, double> constants;  // geometry values used in postprocessing
  std::vector<ProbePoint> left_fiber;       // configurational force only
  std::vector<ProbePoint> right_fiber;
  std::vector<double> stops;                // load factors every run must hit
};

BenchmarkModel gen_cshape(MeshLevel level, const CShapeGeometry& geometry = {}, const MaterialOverrides& material = {});
BenchmarkModel gen_closed_box(const ClosedBoxGeometry& geometry = {}, const MaterialOverrides& material = {});
BenchmarkModel gen_piston_box(const PistonBoxGeometry& geometry = {}, const MaterialOverrides& material = {});
BenchmarkModel gen_config_force(int bvp, const ConfigForceGeometry& geometry = {},
                                const MaterialOverrides& material = {});
BenchmarkModel generate(const BenchmarkSpec& spec);

struct GapMetrics {
  double residual_gap = 0.0;  // m
  double initial_gap = 0.0;   // m
  double error = 1.0;         // residual / initial
};

// Gap between the node pairs "gap_top" and "gap_bottom" of a C-shape mesh.
GapMetrics measure_gap(const MeshModel& mesh, const Eigen::VectorXd& d_full);
// Gap metrics of the final state; throws NotInContactError when the gap is
// above half the initial gap.
GapMetrics gap_error(const SolveHistory& history, const MeshModel& mesh);

// f L^3 / (E t d^4). Throws ConfigError unless L, E, t, d are positive and f is non-negative.
double dimensionless_force(double f, double L, double E, double t, double d);

struct CriticalLoadRef {
  double EI = 0.0;   // N m^2 per unit thickness
  double L = 0.0;    // m
  double f_cr = 0.0; // N per unit thickness
};

// pi^2 E I / (0.5 L)^2. Throws ConfigError for non-positive input.
CriticalLoadRef critical_load_ref(double E_eff, double I, double L);

// (W_r - W_l) / lambda1_r * h0, with r the horizontally restrained end.
double config_force_analytic(double W_l, double W_r, double lambda1_r, double h0);

struct FiberState {
  double W = 0.0;        // mean strain energy density, Pa
  double lambda1 = 1.0;  // mean F11
  double lambda2 = 1.0;  // mean F22
};

// Length-weighted average over the probe points. Throws ConfigError for an
// empty probe list or a probe outside the mesh.
FiberState fiber_state(const MeshModel& mesh, const Eigen::VectorXd& d_full, const std::vector<ProbePoint>& probes);

struct ConfigForceSample {
  double R1_numeric = 0.0;   // horizontal force exerted by the block on the indenter, N
  double R1_analytic = 0.0;  // N
  FiberState left;
  FiberState right;
};

ConfigForceSample config_force(const BenchmarkModel& model, const Eigen::VectorXd& d_full, const Eigen::VectorXd& f_full);

// One row per accepted step; the first two columns are the step index and lambda.
struct HistoryTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // Column index by name; throws ConfigError when absent.
  int column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

struct RunOptions {
  int threads = 1;
  IterationLogger log;
  // Called with the step record and displacement after each accepted step.
  std::function<void(const AcceptedStep&, const Eigen::VectorXd&)> on_step;
};

struct BenchmarkRun {
  BenchmarkModel model;
  SolveHistory history;
  HistoryTable table;
  std::map<std::string, double> metrics;
};

// Generates the model, runs adaptive_march, records the monitored quantities
// at every accepted step and evaluates the benchmark metrics.
BenchmarkRun run_benchmark(const BenchmarkSpec& spec, const SolverConfig& cfg, const RunOptions& options = {});

// Solver settings used for the shipped runs of each benchmark.
SolverConfig default_solver_config(BenchmarkKind kind);

}  // namespace tmc
