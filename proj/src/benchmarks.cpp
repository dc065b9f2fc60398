#include "tmc/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tmc {

namespace {

constexpr double kGeomTol = 1e-9;

// Default bulk parameters of the C-shape, closed box and piston box problems.
constexpr double kBulkKappaVol = 1e6;
constexpr double kBulkKappaIso = 0.214e6;
constexpr double kBulkNominalE = 3e5;
constexpr double kBulkNominalNu = 0.4;

// Contact is taken as established once the third medium is compressed below
// this volume ratio somewhere in the monitored region.
constexpr double kContactJ = 0.05;

std::vector<double> linspace(double a, double b, int cells) {
  std::vector<double> v;
  for (double s : uniform_breaks(cells)) v.push_back(a + s * (b - a));
  return v;
}

// Cells between a and b growing geometrically by `ratio` away from a
// (or away from b when small_at_b), with the first cell close to `first`.
std::vector<double> graded(double a, double b, double first, double ratio, bool small_at_b) {
  const double len = std::abs(b - a);
  int n = 1;
  if (ratio > 1.0 + 1e-12)
    n = std::max(1, static_cast<int>(std::ceil(std::log(1.0 + len * (ratio - 1.0) / first) / std::log(ratio))));
  else
    n = std::max(1, static_cast<int>(std::ceil(len / first)));
  const std::vector<double> t = graded_breaks(n, ratio);
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = small_at_b ? b - t[t.size() - 1 - i] * (b - a) : a + t[i] * (b - a);
  v.front() = a;
  v.back() = b;
  return v;
}

void append(std::vector<double>& to, const std::vector<double>& seg) {
  for (double x : seg)
    if (to.empty() || x > to.back() + kGeomTol) to.push_back(x);
}

// Quad4 cells over the tensor grid xs x ys; region_of returns -1 to leave a
// cell empty.
void add_grid(MeshBuilder& b, const std::vector<double>& xs, const std::vector<double>& ys,
              const std::function<int(double, double)>& region_of) {
  for (std::size_t j = 0; j + 1 < ys.size(); ++j)
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const int r = region_of(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
      if (r < 0) continue;
      const int n0 = b.add_node({xs[i], ys[j]});
      const int n1 = b.add_node({xs[i + 1], ys[j]});
      const int n2 = b.add_node({xs[i + 1], ys[j + 1]});
      const int n3 = b.add_node({xs[i], ys[j + 1]});
      b.add_element(ElementFamily::Quad4, {n0, n1, n2, n3}, r);
    }
}

bool near(double a, double b) { return std::abs(a - b) <= kGeomTol * std::max(1.0, std::abs(b)); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
}

void require_nonnegative(const std::optional<double>& v, const char* name) {
  if (v && (!(*v >= 0.0) || !std::isfinite(*v))) throw ConfigError(std::string(name) + " must be non-negative");
}

Region bulk_region(const MaterialSettings& m, QuadratureSpec q) { return {"bulk", m.bulk, q, false}; }

Region medium_region(const std::string& name, const MaterialSettings& m, QuadratureSpec q) {
  return {name, m.third_medium(), q, true};
}

BenchmarkModel start_model(const BenchmarkSpec& spec) {
  spec.validate();
  BenchmarkModel model;
  model.spec = spec;
  model.materials = resolve_materials(spec);
  return model;
}

}  // namespace

std::string benchmark_name(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::CShape: return "cshape";
    case BenchmarkKind::ClosedBox: return "closed_box";
    case BenchmarkKind::PistonBox: return "piston_box";
    case BenchmarkKind::ConfigForce: return "config_force";
  }
  return "unknown";
}

BenchmarkKind parse_benchmark_kind(const std::string& name) {
  for (BenchmarkKind k :
       {BenchmarkKind::CShape, BenchmarkKind::ClosedBox, BenchmarkKind::PistonBox, BenchmarkKind::ConfigForce})
    if (benchmark_name(k) == name) return k;
  throw ConfigError("unknown benchmark '" + name + "'");
}

std::string mesh_level_name(MeshLevel level) {
  switch (level) {
    case MeshLevel::M3: return "M3";
    case MeshLevel::M9: return "M9";
    case MeshLevel::M15: return "M15";
    case MeshLevel::M21: return "M21";
  }
  return "unknown";
}

MeshLevel parse_mesh_level(const std::string& name) {
  for (MeshLevel l : {MeshLevel::M3, MeshLevel::M9, MeshLevel::M15, MeshLevel::M21})
    if (mesh_level_name(l) == name) return l;
  throw ConfigError("unknown mesh level '" + name + "'");
}

int beam_elements_per_height(MeshLevel level) {
  switch (level) {
    case MeshLevel::M3: return 1;
    case MeshLevel::M9: return 3;
    case MeshLevel::M15: return 5;
    case MeshLevel::M21: return 7;
  }
  return 1;
}

double default_kappa_Fbar(MeshLevel level) { return 200.0 * beam_elements_per_height(level); }

ThirdMediumParams MaterialSettings::third_medium() const {
  ThirdMediumParams p;
  p.kappa_vol = gamma_c * bulk.kappa_vol;
  p.linear = LinearTermParams{gamma_e * E_char, 0.0};
  p.kappa_Fbar = kappa_Fbar;
  return p;
}

NeoHookeanParams neo_hookean_from_E_nu(double E, double nu) {
  require_positive(E, "E");
  if (!(nu >= 0.0 && nu < 0.5)) throw ConfigError("Poisson ratio must lie in [0, 0.5)");
  NeoHookeanParams p;
  p.kappa_vol = E / (3.0 * (1.0 - 2.0 * nu));
  p.kappa_iso = E / (2.0 * (1.0 + nu));
  p.iso_form = IsoForm::Classical;
  return p;
}

void BenchmarkSpec::validate() const {
  if (kind == BenchmarkKind::CShape) {
    if (!level) throw ConfigError("the C-shape benchmark needs a mesh level");
  } else if (level) {
    throw ConfigError("a mesh level is only valid for the C-shape benchmark");
  }
  if (kind == BenchmarkKind::ConfigForce) {
    if (!bvp || (*bvp != 1 && *bvp != 2)) throw ConfigError("the configurational force benchmark needs bvp 1 or 2");
  } else if (bvp) {
    throw ConfigError("bvp is only valid for the configurational force benchmark");
  }

  const MaterialOverrides& m = material;
  require_nonnegative(m.kappa_vol_pa, "kappa_vol");
  require_nonnegative(m.kappa_iso_pa, "kappa_iso");
  require_nonnegative(m.gamma_c, "gamma_c");
  require_nonnegative(m.gamma_e, "gamma_e");
  require_nonnegative(m.kappa_Fbar_pa, "kappa_Fbar");
  if (m.E_pa) require_positive(*m.E_pa, "E");
  if (m.nu && !(*m.nu >= 0.0 && *m.nu < 0.5)) throw ConfigError("Poisson ratio must lie in [0, 0.5)");

  switch (kind) {
    case BenchmarkKind::CShape: {
      const CShapeGeometry& g = cshape;
      require_positive(g.height, "cshape.height");
      require_positive(g.gap, "cshape.gap");
      require_positive(g.load_over_h, "cshape.load_over_h");
      if (!(g.length > 2.0 * g.height)) throw ConfigError("cshape.length must exceed twice the beam height");
      break;
    }
    case BenchmarkKind::ClosedBox: {
      const ClosedBoxGeometry& g = closed_box;
      for (auto [v, n] : {std::pair{g.width, "width"}, {g.height, "height"}, {g.wall, "wall"},
                          {g.envelope_side, "envelope_side"}, {g.envelope_top, "envelope_top"},
                          {g.envelope_bottom, "envelope_bottom"}, {g.load_over_d, "load_over_d"}})
        require_positive(v, (std::string("closed_box.") + n).c_str());
      if (!(g.width > 2.0 * g.wall && g.height > 2.0 * g.wall)) throw ConfigError("closed box walls leave no interior");
      if (g.wall_elements < 1) throw ConfigError("closed_box.wall_elements must be at least 1");
      if (!(g.envelope_grading >= 1.0)) throw ConfigError("closed_box.envelope_grading must be at least 1");
      break;
    }
    case BenchmarkKind::PistonBox: {
      const PistonBoxGeometry& g = piston_box;
      for (auto [v, n] : {std::pair{g.chamber_width, "chamber_width"}, {g.beam_length, "beam_length"},
                          {g.beam_thickness, "beam_thickness"}, {g.wall_thickness, "wall_thickness"},
                          {g.load_over_d, "load_over_d"}})
        require_positive(v, (std::string("piston_box.") + n).c_str());
      if (!(g.beam_position - 0.5 * g.beam_thickness > 0.0 &&
            g.beam_position + 0.5 * g.beam_thickness < g.chamber_width))
        throw ConfigError("piston_box beam must lie inside the chamber");
      if (g.beam_elements_thick < 1 || g.beam_elements_long < 1 || g.side_elements < 1)
        throw ConfigError("piston_box element counts must be at least 1");
      if (!(g.side_grading >= 1.0)) throw ConfigError("piston_box.side_grading must be at least 1");
      if (!(g.imperfection >= 0.0)) throw ConfigError("piston_box.imperfection must be non-negative");
      break;
    }
    case BenchmarkKind::ConfigForce: {
      const ConfigForceGeometry& g = config_force;
      for (auto [v, n] : {std::pair{g.h0, "h0"}, {g.length_over_h0, "length_over_h0"},
                          {g.inner_fraction, "inner_fraction"}, {g.radius_over_h0, "radius_over_h0"},
                          {g.gap_over_h0, "gap_over_h0"}, {g.column_over_h0, "column_over_h0"},
                          {g.travel_over_h0, "travel_over_h0"}})
        require_positive(v, (std::string("config_force.") + n).c_str());
      if (!(g.inner_fraction < 1.0)) throw ConfigError("config_force.inner_fraction must be below 1");
      if (!(g.length_over_h0 * (1.0 - g.inner_fraction) > g.radius_over_h0))
        throw ConfigError("config_force indenter corner does not fit on the block");
      if (g.elements_per_h0 < 1 || g.gap_elements < 1) throw ConfigError("config_force element counts must be at least 1");
      break;
    }
  }
}

MaterialSettings resolve_materials(const BenchmarkSpec& spec) {
  MaterialSettings m;
  double E_default = kBulkNominalE, nu_default = kBulkNominalNu;
  switch (spec.kind) {
    case BenchmarkKind::CShape:
      m.gamma_c = 1e-6;
      m.gamma_e = 1e-6;
      m.kappa_Fbar = default_kappa_Fbar(spec.level.value_or(MeshLevel::M3));
      break;
    case BenchmarkKind::ClosedBox:
      m.gamma_c = 1e-7;
      m.gamma_e = 1e-6;
      m.kappa_Fbar = 500.0;
      break;
    case BenchmarkKind::PistonBox:
      m.gamma_c = 1e-6;
      m.gamma_e = 1e-5;
      m.kappa_Fbar = 4000.0;
      break;
    case BenchmarkKind::ConfigForce:
      m.gamma_c = 1e-6;
      m.gamma_e = 1e-3;
      m.kappa_Fbar = 2e5;
      E_default = 3e6;
      nu_default = 0.49;
      break;
  }
  if (spec.kind == BenchmarkKind::ConfigForce) {
    m.bulk = neo_hookean_from_E_nu(E_default, nu_default);
    m.E_char = E_default;
  } else {
    m.bulk = NeoHookeanParams{kBulkKappaVol, kBulkKappaIso, IsoForm::Classical};
    m.E_char = kBulkNominalE;
  }

  const MaterialOverrides& o = spec.material;
  if (o.E_pa || o.nu) {
    const double E = o.E_pa.value_or(E_default);
    m.bulk = neo_hookean_from_E_nu(E, o.nu.value_or(nu_default));
    m.E_char = E;
  }
  if (o.kappa_vol_pa) m.bulk.kappa_vol = *o.kappa_vol_pa;
  if (o.kappa_iso_pa) m.bulk.kappa_iso = *o.kappa_iso_pa;
  if (o.iso_form) m.bulk.iso_form = *o.iso_form;
  if (o.gamma_c) m.gamma_c = *o.gamma_c;
  if (o.gamma_e) m.gamma_e = *o.gamma_e;
  if (o.kappa_Fbar_pa) m.kappa_Fbar = *o.kappa_Fbar_pa;
  return m;
}

BenchmarkModel gen_cshape(MeshLevel level, const CShapeGeometry& g, const MaterialOverrides& material) {
  BenchmarkSpec spec;
  spec.kind = BenchmarkKind::CShape;
  spec.level = level;
  spec.cshape = g;
  spec.material = material;
  BenchmarkModel model = start_model(spec);

  const int n = beam_elements_per_height(level);
  const double h = g.height, L = g.length, gap = g.gap;
  const double a = h / n;
  const int along = std::max(1, static_cast<int>(std::lround((L - h) / a)));
  const double tip_cell = (L - h) / along;

  std::vector<double> xs, ys;
  append(xs, linspace(0.0, h, n));
  append(xs, linspace(h, L, along));
  append(xs, {L, L + tip_cell});
  append(ys, linspace(0.0, h, n));
  append(ys, linspace(h, h + gap, 3 * n));
  append(ys, linspace(h + gap, 2.0 * h + gap, n));

  MeshBuilder b(kGeomTol * L);
  const int bulk = b.add_region(bulk_region(model.materials, QuadratureSpec::Lobatto3x3));
  const int medium = b.add_region(medium_region("third_medium", model.materials, QuadratureSpec::Lobatto2x2));
  add_grid(b, xs, ys, [&](double x, double y) {
    const bool in_gap = y > h && y < h + gap;
    if (x > L) return in_gap ? medium : -1;
    if (x < h) return bulk;
    return in_gap ? medium : bulk;
  });
  model.mesh = b.build();
  MeshModel& mesh = model.mesh;

  mesh.node_sets["clamp"] = nodes_where(mesh, [](const Eigen::Vector2d& x) { return std::abs(x.x()) < kGeomTol; });
  mesh.node_sets["A"] = {nearest_node(mesh, {L, 2.0 * h + gap})};
  mesh.node_sets["B"] = {nearest_node(mesh, {L, h})};
  mesh.node_sets["gap_top"] = {nearest_node(mesh, {L, h + gap})};
  mesh.node_sets["gap_bottom"] = mesh.node_sets["B"];

  model.bc.fix(mesh.node_sets["clamp"], 0, "clamp");
  model.bc.fix(mesh.node_sets["clamp"], 1, "clamp");
  model.bc.ramp(mesh.node_sets["A"], 1, -g.load_over_h * h, "A");

  model.constants = {{"h", h}, {"gap", gap}, {"L", L}, {"load", g.load_over_h * h}};
  if (g.load_over_h > 1.0) model.stops = {1.0 / g.load_over_h};
  return model;
}

BenchmarkModel gen_closed_box(const ClosedBoxGeometry& g, const MaterialOverrides& material) {
  BenchmarkSpec spec;
  spec.kind = BenchmarkKind::ClosedBox;
  spec.closed_box = g;
  spec.material = material;
  BenchmarkModel model = start_model(spec);

  const double W = g.width, H = g.height, d = g.wall;
  const double a = d / g.wall_elements;
  const auto even_cells = [&](double len) {
    int c = std::max(2, static_cast<int>(std::lround(len / a)));
    return c % 2 ? c + 1 : c;
  };

  std::vector<double> xs, ys;
  append(xs, graded(-g.envelope_side, 0.0, a, g.envelope_grading, true));
  append(xs, linspace(0.0, d, g.wall_elements));
  append(xs, linspace(d, W - d, even_cells(W - 2.0 * d)));
  append(xs, linspace(W - d, W, g.wall_elements));
  append(xs, graded(W, W + g.envelope_side, a, g.envelope_grading, false));
  append(ys, graded(-g.envelope_bottom, 0.0, a, g.envelope_grading, true));
  append(ys, linspace(0.0, d, g.wall_elements));
  append(ys, linspace(d, H - d, even_cells(H - 2.0 * d)));
  append(ys, linspace(H - d, H, g.wall_elements));
  append(ys, graded(H, H + g.envelope_top, a, g.envelope_grading, false));

  MeshBuilder b(kGeomTol * W);
  const int bulk = b.add_region(bulk_region(model.materials, QuadratureSpec::Lobatto3x3));
  const int interior = b.add_region(medium_region("interior", model.materials, QuadratureSpec::Lobatto2x2));
  const int envelope = b.add_region(medium_region("envelope", model.materials, QuadratureSpec::Lobatto2x2));
  add_grid(b, xs, ys, [&](double x, double y) {
    if (x < 0.0 || x > W || y < 0.0 || y > H) return envelope;
    if (x > d && x < W - d && y > d && y < H - d) return interior;
    return bulk;
  });
  model.mesh = b.build();
  MeshModel& mesh = model.mesh;

  const double x0 = xs.front(), x1 = xs.back(), y0 = ys.front(), y1 = ys.back();
  mesh.node_sets["envelope_boundary"] = nodes_where(mesh, [&](const Eigen::Vector2d& p) {
    return near(p.x(), x0) || near(p.x(), x1) || near(p.y(), y0) || near(p.y(), y1);
  });
  mesh.node_sets["load"] = {nearest_node(mesh, {0.5 * W, H})};
  mesh.node_sets["supports"] = {nearest_node(mesh, {0.0, 0.0}), nearest_node(mesh, {W, 0.0})};
  mesh.node_sets["bottom_center"] = {nearest_node(mesh, {0.5 * W, 0.0})};

  model.bc.fix(mesh.node_sets["envelope_boundary"], 0, "envelope");
  model.bc.fix(mesh.node_sets["envelope_boundary"], 1, "envelope");
  model.bc.fix(mesh.node_sets["supports"], 1, "supports");
  model.bc.fix(mesh.node_sets["bottom_center"], 0, "supports");
  model.bc.ramp(mesh.node_sets["load"], 1, -g.load_over_d * d, "load");

  model.constants = {{"L", W}, {"H", H}, {"d", d}, {"load", g.load_over_d * d}};
  return model;
}

BenchmarkModel gen_piston_box(const PistonBoxGeometry& g, const MaterialOverrides& material) {
  BenchmarkSpec spec;
  spec.kind = BenchmarkKind::PistonBox;
  spec.piston_box = g;
  spec.material = material;
  BenchmarkModel model = start_model(spec);

  const double W = g.chamber_width, L = g.beam_length, b_half = 0.5 * g.beam_thickness;
  const double xl = g.beam_position - b_half, xr = g.beam_position + b_half;
  const double a = g.beam_thickness / g.beam_elements_thick;

  const auto side = [&](double x0, double x1, bool small_at_end) {
    // side_elements cells graded so that the cell next to the beam matches the beam element width.
    const double len = x1 - x0;
    double ratio = g.side_grading;
    const int n = g.side_elements;
    if (n * a >= len) ratio = 1.0;
    std::vector<double> t = graded_breaks(n, ratio);
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = small_at_end ? x1 - t[t.size() - 1 - i] * len : x0 + t[i] * len;
    return v;
  };

  std::vector<double> xs, ys;
  append(xs, side(0.0, xl, true));
  append(xs, linspace(xl, xr, g.beam_elements_thick));
  append(xs, side(xr, W, false));
  append(ys, linspace(0.0, L, g.beam_elements_long));
  (void)a;

  MeshBuilder b(kGeomTol * W);
  const int bulk = b.add_region(bulk_region(model.materials, QuadratureSpec::Lobatto3x3));
  const int medium = b.add_region(medium_region("third_medium", model.materials, QuadratureSpec::Lobatto2x2));
  add_grid(b, xs, ys, [&](double x, double) { return x > xl && x < xr ? bulk : medium; });
  model.mesh = b.build();
  MeshModel& mesh = model.mesh;

  const auto in_beam = [&](const Eigen::Vector2d& p) { return p.x() > xl - kGeomTol && p.x() < xr + kGeomTol; };
  mesh.node_sets["floor"] = nodes_where(mesh, [](const Eigen::Vector2d& p) { return std::abs(p.y()) < kGeomTol; });
  mesh.node_sets["piston"] = nodes_where(mesh, [&](const Eigen::Vector2d& p) { return near(p.y(), L); });
  mesh.node_sets["walls"] = nodes_where(mesh, [&](const Eigen::Vector2d& p) {
    return (std::abs(p.x()) < kGeomTol || near(p.x(), W)) && p.y() > kGeomTol && !near(p.y(), L);
  });
  mesh.node_sets["clamp_bottom"] =
      nodes_where(mesh, [&](const Eigen::Vector2d& p) { return std::abs(p.y()) < kGeomTol && in_beam(p); });
  mesh.node_sets["clamp_top"] = nodes_where(mesh, [&](const Eigen::Vector2d& p) { return near(p.y(), L) && in_beam(p); });
  mesh.node_sets["beam"] = nodes_where(mesh, in_beam);

  // Initial bow in the shape of the first clamped-clamped mode, fading to
  // zero at the chamber walls.
  const double w0 = g.imperfection * L;
  for (Eigen::Vector2d& p : mesh.nodes) {
    double weight = 1.0;
    if (p.x() < xl) weight = p.x() / xl;
    if (p.x() > xr) weight = (W - p.x()) / (W - xr);
    p.x() -= weight * w0 * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * p.y() / L));
  }

  model.bc.fix(mesh.node_sets["floor"], 0, "floor");
  model.bc.fix(mesh.node_sets["floor"], 1, "floor");
  model.bc.fix(mesh.node_sets["piston"], 0, "piston");
  model.bc.ramp(mesh.node_sets["piston"], 1, -g.load_over_d * g.wall_thickness, "piston");
  model.bc.fix(mesh.node_sets["walls"], 0, "walls");

  const double I = std::pow(g.beam_thickness, 3) / 12.0;
  const LinearizedModuli lin = linearized_moduli(model.materials.bulk);
  const CriticalLoadRef ref = critical_load_ref(lin.plane_strain_modulus(), I, L);
  model.constants = {{"L", L},       {"b", g.beam_thickness}, {"d", g.wall_thickness}, {"I", I},
                     {"f_cr", ref.f_cr}, {"E_bending", lin.plane_strain_modulus()},
                     {"load", g.load_over_d * g.wall_thickness}};
  return model;
}

BenchmarkModel gen_config_force(int bvp, const ConfigForceGeometry& g, const MaterialOverrides& material) {
  BenchmarkSpec spec;
  spec.kind = BenchmarkKind::ConfigForce;
  spec.bvp = bvp;
  spec.config_force = g;
  spec.material = material;
  BenchmarkModel model = start_model(spec);

  const double h0 = g.h0, L = g.length_over_h0 * h0, R = g.radius_over_h0 * h0, gap = g.gap_over_h0 * h0;
  const double xc = L * (1.0 - g.inner_fraction);  // start of the flat indenter face
  const double top = h0 + gap;
  const double a = h0 / g.elements_per_h0;
  const auto cells = [&](double len) { return std::max(1, static_cast<int>(std::lround(len / a))); };

  MeshBuilder b(kGeomTol * L);
  const int bulk = b.add_region(bulk_region(model.materials, QuadratureSpec::Gauss4x4));
  const int medium = b.add_region(medium_region("third_medium", model.materials, QuadratureSpec::TriDegree5));

  // The block breaks must coincide with the third-medium breaks along y = h0.
  std::vector<double> bx;
  append(bx, linspace(0.0, xc - R, cells(xc - R)));
  append(bx, linspace(xc - R, xc, cells(R)));
  append(bx, linspace(xc, L, cells(L - xc)));
  std::vector<double> sx(bx.size());
  for (std::size_t i = 0; i < bx.size(); ++i) sx[i] = bx[i] / L;
  add_block(b, ElementFamily::Quad8, rectangle_map(0.0, 0.0, L, h0), sx, uniform_breaks(g.elements_per_h0), bulk);

  // Third medium below the rounded corner: straight bottom, circular top.
  const Eigen::Vector2d centre(xc, top + R);
  const BlockMap under_arc = [=](double s, double t) -> Eigen::Vector2d {
    const double theta = std::numbers::pi * (1.0 + 0.5 * s);
    const Eigen::Vector2d lower(xc - R + s * R, h0);
    const Eigen::Vector2d upper = centre + R * Eigen::Vector2d(std::cos(theta), std::sin(theta));
    return (1.0 - t) * lower + t * upper;
  };
  add_block(b, ElementFamily::Tri6, under_arc, uniform_breaks(cells(R)), uniform_breaks(g.gap_elements), medium);
  add_block(b, ElementFamily::Tri6, rectangle_map(xc, h0, L, top), uniform_breaks(cells(L - xc)),
            uniform_breaks(g.gap_elements), medium);
  const double xe = L + g.column_over_h0 * h0;
  add_block(b, ElementFamily::Tri6, rectangle_map(L, 0.0, xe, h0), uniform_breaks(cells(xe - L)),
            uniform_breaks(g.elements_per_h0), medium);
  add_block(b, ElementFamily::Tri6, rectangle_map(L, h0, xe, top), uniform_breaks(cells(xe - L)),
            uniform_breaks(g.gap_elements), medium);
  model.mesh = b.build();
  MeshModel& mesh = model.mesh;

  const double tol = kGeomTol * L;
  mesh.node_sets["ground"] = nodes_where(mesh, [&](const Eigen::Vector2d& p) { return std::abs(p.y()) < tol; });
  mesh.node_sets["indenter"] = nodes_where(mesh, [&](const Eigen::Vector2d& p) {
    const bool flat = std::abs(p.y() - top) < tol && p.x() > xc - tol;
    const bool arc = std::abs((p - centre).norm() - R) < 1e3 * tol && p.x() < xc + tol && p.y() < centre.y() + tol;
    return flat || arc;
  });
  const auto end_nodes = [&](double x) {
    return nodes_where(mesh, [&](const Eigen::Vector2d& p) { return std::abs(p.x() - x) < tol && p.y() < h0 + tol; });
  };
  mesh.node_sets["left_end"] = end_nodes(0.0);
  mesh.node_sets["right_end"] = end_nodes(L);

  model.bc.fix(mesh.node_sets["ground"], 1, "ground");
  model.bc.fix(mesh.node_sets[bvp == 1 ? "right_end" : "left_end"], 0, "restraint");
  model.bc.fix(mesh.node_sets["indenter"], 0, "indenter");
  model.bc.ramp(mesh.node_sets["indenter"], 1, -g.travel_over_h0 * h0, "indenter");

  // Boundary fibers: 4-point Gauss lines on the element edges at x = 0 and x = L.
  static constexpr double gp[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
  static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const MeshElement& el = mesh.elements[e];
    if (el.region != bulk) continue;
    const auto on = [&](int k, double x) { return std::abs(mesh.nodes[el.nodes[k]].x() - x) < tol; };
    const double edge = std::abs(mesh.nodes[el.nodes[3]].y() - mesh.nodes[el.nodes[0]].y());
    if (on(0, 0.0) && on(3, 0.0))
      for (int k = 0; k < 4; ++k) model.left_fiber.push_back({e, {-1.0, gp[k]}, 0.5 * edge * gw[k]});
    if (on(1, L) && on(2, L))
      for (int k = 0; k < 4; ++k) model.right_fiber.push_back({e, {1.0, gp[k]}, 0.5 * edge * gw[k]});
  }

  model.constants = {{"h0", h0}, {"L", L}, {"R", R}, {"gap", gap}, {"x_corner", xc},
                     {"restrained_right", bvp == 1 ? 1.0 : 0.0}, {"load", g.travel_over_h0 * h0}};
  return model;
}

BenchmarkModel generate(const BenchmarkSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case BenchmarkKind::CShape: return gen_cshape(*spec.level, spec.cshape, spec.material);
    case BenchmarkKind::ClosedBox: return gen_closed_box(spec.closed_box, spec.material);
    case BenchmarkKind::PistonBox: return gen_piston_box(spec.piston_box, spec.material);
    case BenchmarkKind::ConfigForce: return gen_config_force(*spec.bvp, spec.config_force, spec.material);
  }
  throw ConfigError("unknown benchmark");
}

GapMetrics measure_gap(const MeshModel& mesh, const Eigen::VectorXd& d) {
  const int top = mesh.node_set("gap_top").at(0), bottom = mesh.node_set("gap_bottom").at(0);
  GapMetrics g;
  g.initial_gap = mesh.nodes[top].y() - mesh.nodes[bottom].y();
  g.residual_gap = g.initial_gap + d[2 * top + 1] - d[2 * bottom + 1];
  g.error = g.residual_gap / g.initial_gap;
  return g;
}

GapMetrics gap_error(const SolveHistory& history, const MeshModel& mesh) {
  if (history.final_d.size() != mesh.num_dofs()) throw ConfigError("history does not match the mesh");
  const GapMetrics g = measure_gap(mesh, history.final_d);
  if (g.error > 0.5)
    throw NotInContactError("gap is " + std::to_string(100.0 * g.error) + "% of the initial gap; contact not established");
  return g;
}

double dimensionless_force(double f, double L, double E, double t, double d) {
  require_positive(L, "L");
  require_positive(E, "E");
  require_positive(t, "t");
  require_positive(d, "d");
  if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("force must be non-negative");
  return f * L * L * L / (E * t * d * d * d * d);
}

CriticalLoadRef critical_load_ref(double E_eff, double I, double L) {
  require_positive(E_eff, "E_eff");
  require_positive(I, "I");
  require_positive(L, "L");
  CriticalLoadRef r;
  r.EI = E_eff * I;
  r.L = L;
  r.f_cr = std::numbers::pi * std::numbers::pi * r.EI / (0.25 * L * L);
  return r;
}

double config_force_analytic(double W_l, double W_r, double lambda1_r, double h0) {
  require_positive(lambda1_r, "lambda1_r");
  require_positive(h0, "h0");
  return (W_r - W_l) / lambda1_r * h0;
}

FiberState fiber_state(const MeshModel& mesh, const Eigen::VectorXd& d, const std::vector<ProbePoint>& probes) {
  if (probes.empty()) throw ConfigError("no probe points on the boundary fiber");
  FiberState s{0.0, 0.0, 0.0};
  double total = 0.0;
  for (const ProbePoint& p : probes) {
    if (p.element < 0 || p.element >= mesh.num_elements()) throw ConfigError("probe outside the mesh");
    const MeshElement& el = mesh.elements[p.element];
    const NodeCoords X = mesh.element_coords(p.element);
    const ElemVector de = mesh.gather(p.element, d);
    const BEval be = b_matrix(el.family, X, p.xi);
    const Tensor2 F = Tensor2::identity() + from_voigt(be.B * de);
    const MaterialKernel& kernel = mesh.regions[el.region].kernel;
    std::optional<Tensor2> Fbar;
    if (uses_centroid(kernel)) Fbar = Tensor2::identity() + from_voigt(centroid_b_matrix(el.family, X) * de);
    const MaterialResponse r = evaluate(kernel, DeformationState(F, Fbar));
    s.W += p.weight * r.W;
    s.lambda1 += p.weight * F.a11;
    s.lambda2 += p.weight * F.a22;
    total += p.weight;
  }
  s.W /= total;
  s.lambda1 /= total;
  s.lambda2 /= total;
  return s;
}

ConfigForceSample config_force(const BenchmarkModel& model, const Eigen::VectorXd& d, const Eigen::VectorXd& f) {
  ConfigForceSample c;
  for (int n : model.mesh.node_set("indenter")) c.R1_numeric -= f[2 * n];
  c.left = fiber_state(model.mesh, d, model.left_fiber);
  c.right = fiber_state(model.mesh, d, model.right_fiber);
  const bool right = model.constants.at("restrained_right") > 0.5;
  c.R1_analytic =
      config_force_analytic(c.left.W, c.right.W, right ? c.right.lambda1 : c.left.lambda1, model.constants.at("h0"));
  return c;
}

int HistoryTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("no history column '" + name + "'");
  return static_cast<int>(it - columns.begin());
}

std::vector<double> HistoryTable::values(const std::string& name) const {
  const int c = column(name);
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r[c]);
  return v;
}

SolverConfig default_solver_config(BenchmarkKind kind) {
  SolverConfig cfg;
  cfg.dlambda_min = 1e-6;
  switch (kind) {
    case BenchmarkKind::CShape:
      cfg.dlambda_initial = 0.01;
      break;
    case BenchmarkKind::ClosedBox:
      cfg.dlambda_initial = 0.005;
      break;
    case BenchmarkKind::PistonBox:
      cfg.force_scale = 10.0;
      cfg.dlambda_initial = 0.005;
      cfg.max_newton_iters = 150;
      cfg.merit = MeritFunction::Energy;
      cfg.negative_curvature_escape = true;
      break;
    case BenchmarkKind::ConfigForce:
      cfg.force_scale = 1e6;
      cfg.dlambda_initial = 0.01;
      break;
  }
  return cfg;
}

namespace {

double sum_component(const Eigen::VectorXd& f, const std::vector<int>& nodes, int comp) {
  double s = 0.0;
  for (int n : nodes) s += f[2 * n + comp];
  return s;
}

// Smallest volume ratio at any quadrature point, per region.
std::vector<double> min_J_by_region(const MeshModel& mesh, const AssemblyResult& r) {
  std::vector<double> out(mesh.regions.size(), std::numeric_limits<double>::infinity());
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (const PointDiagnostics& p : r.diagnostics[e])
      out[mesh.elements[e].region] = std::min(out[mesh.elements[e].region], p.J);
  return out;
}

int region_index(const MeshModel& mesh, const std::string& name) {
  for (std::size_t i = 0; i < mesh.regions.size(); ++i)
    if (mesh.regions[i].name == name) return static_cast<int>(i);
  throw ConfigError("no region '" + name + "'");
}

// Columns and per-step row of each benchmark.
struct Monitor {
  std::vector<std::string> columns;
  std::function<std::vector<double>(const AcceptedStep&, const Eigen::VectorXd&, const AssemblyResult&)> row;
  bool diagnostics = false;
};

Monitor make_monitor(const BenchmarkModel& model, const Problem& problem, const SolverConfig& cfg) {
  const MeshModel& mesh = problem.mesh();
  Monitor m;
  switch (model.spec.kind) {
    case BenchmarkKind::CShape: {
      const int A = mesh.node_set("A")[0], B = mesh.node_set("B")[0];
      m.columns = {"uA_y_m", "uB_y_m", "reaction_A_N", "gap_m", "gap_error"};
      m.row = [=, &mesh](const AcceptedStep&, const Eigen::VectorXd& d, const AssemblyResult& r) {
        const GapMetrics g = measure_gap(mesh, d);
        return std::vector<double>{d[2 * A + 1], d[2 * B + 1], -r.f_full[2 * A + 1], g.residual_gap, g.error};
      };
      break;
    }
    case BenchmarkKind::ClosedBox: {
      const int load = mesh.node_set("load")[0];
      const double L = model.constants.at("L"), dwall = model.constants.at("d");
      const double E = linearized_moduli(model.materials.bulk).E;
      const int bulk = region_index(mesh, "bulk"), interior = region_index(mesh, "interior"),
                envelope = region_index(mesh, "envelope");
      const DofMap& dofs = problem.dofs();
      m.columns = {"u_y_m",       "u_over_d",    "f_N",           "f_hat",        "support_sum_N",
                   "imbalance_N", "tolerance_N", "Jmin_bulk",     "Jmin_interior", "Jmin_envelope"};
      m.diagnostics = true;
      m.row = [=, &dofs, &mesh](const AcceptedStep&, const Eigen::VectorXd& d, const AssemblyResult& r) {
        const double f_load = r.f_full[2 * load + 1];
        double support = 0.0, ref = 0.0;
        for (int dof : dofs.prescribed_dofs) {
          ref += r.f_full[dof] * r.f_full[dof];
          if (dof % 2 == 1 && dof != 2 * load + 1) support += r.f_full[dof];
        }
        const double tol = std::max(cfg.tol_abs_residual * cfg.force_scale, cfg.tol_rel_residual * std::sqrt(ref));
        const std::vector<double> J = min_J_by_region(mesh, r);
        const double u = -d[2 * load + 1];
        return std::vector<double>{d[2 * load + 1], u / dwall, -f_load,
                                   dimensionless_force(std::max(0.0, -f_load), L, E, 1.0, dwall),
                                   support, f_load + support, tol, J[bulk], J[interior], J[envelope]};
      };
      break;
    }
    case BenchmarkKind::PistonBox: {
      const std::vector<int> piston = mesh.node_set("piston"), clamp = mesh.node_set("clamp_bottom");
      const int top_node = piston.front();
      const double dwall = model.constants.at("d"), fcr = model.constants.at("f_cr");
      const int medium = region_index(mesh, "third_medium");
      std::vector<int> floor_layer;  // third-medium elements touching the floor
      for (int e = 0; e < mesh.num_elements(); ++e) {
        if (mesh.elements[e].region != medium) continue;
        for (int k = 0; k < mesh.elements[e].size(); ++k)
          if (std::abs(mesh.nodes[mesh.elements[e].nodes[k]].y()) < kGeomTol) {
            floor_layer.push_back(e);
            break;
          }
      }
      m.columns = {"u_y_m", "u_over_d", "piston_force_N", "clamp_force_N", "piston_over_fcr", "clamp_over_fcr",
                   "Jmin_floor_layer", "max_shift"};
      m.diagnostics = true;
      m.row = [=](const AcceptedStep& s, const Eigen::VectorXd& d, const AssemblyResult& r) {
        const double fp = -sum_component(r.f_full, piston, 1), fc = sum_component(r.f_full, clamp, 1);
        double jmin = std::numeric_limits<double>::infinity();
        for (int e : floor_layer)
          for (const PointDiagnostics& p : r.diagnostics[e]) jmin = std::min(jmin, p.J);
        const double u = -d[2 * top_node + 1];
        return std::vector<double>{d[2 * top_node + 1], u / dwall, fp, fc, fp / fcr, fc / fcr, jmin, s.max_shift};
      };
      break;
    }
    case BenchmarkKind::ConfigForce: {
      const int probe = mesh.node_set("indenter").front();
      m.columns = {"indenter_u_y_m", "log_stretch2_right", "R1_numeric_N", "R1_analytic_N",
                   "W_left_Pa",      "W_right_Pa",         "lambda1_left",  "lambda1_right"};
      m.row = [=, &model](const AcceptedStep&, const Eigen::VectorXd& d, const AssemblyResult& r) {
        const ConfigForceSample c = config_force(model, d, r.f_full);
        return std::vector<double>{d[2 * probe + 1], std::log(c.right.lambda2), c.R1_numeric, c.R1_analytic,
                                   c.left.W, c.right.W, c.left.lambda1, c.right.lambda1};
      };
      break;
    }
  }
  return m;
}

double interpolate_at(const std::vector<double>& x, const std::vector<double>& y, double at) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if ((x[i - 1] - at) * (x[i] - at) <= 0.0 && x[i] != x[i - 1])
      return y[i - 1] + (y[i] - y[i - 1]) * (at - x[i - 1]) / (x[i] - x[i - 1]);
  return std::numeric_limits<double>::quiet_NaN();
}

void evaluate_metrics(BenchmarkRun& run) {
  const HistoryTable& t = run.table;
  auto& m = run.metrics;
  m["completed"] = run.history.completed ? 1.0 : 0.0;
  m["accepted_steps"] = static_cast<double>(run.history.steps.size() - 1);
  m["rejected_steps"] = run.history.rejected_steps;
  m["final_lambda"] = run.history.steps.back().lambda;
  switch (run.model.spec.kind) {
    case BenchmarkKind::CShape: {
      const std::vector<double> err = t.values("gap_error");
      m["gap_error"] = err.back();
      m["min_gap_error"] = *std::min_element(err.begin(), err.end());
      const double h = run.model.constants.at("h");
      std::vector<double> u = t.values("uA_y_m");
      for (double& v : u) v = -v;
      m["reaction_at_h_N"] = interpolate_at(u, t.values("reaction_A_N"), h);
      break;
    }
    case BenchmarkKind::ClosedBox: {
      const std::vector<double> u = t.values("u_over_d"), ji = t.values("Jmin_interior"),
                                je = t.values("Jmin_envelope"), imb = t.values("imbalance_N"),
                                tol = t.values("tolerance_N");
      double jmin = std::numeric_limits<double>::infinity(), worst = 0.0;
      for (const auto& r : t.rows)
        for (const char* c : {"Jmin_bulk", "Jmin_interior", "Jmin_envelope"}) jmin = std::min(jmin, r[t.column(c)]);
      for (std::size_t i = 0; i < imb.size(); ++i) worst = std::max(worst, std::abs(imb[i]) / tol[i]);
      m["min_J"] = jmin;
      m["max_imbalance_over_tol"] = worst;
      m["inner_contact_u_over_d"] = std::numeric_limits<double>::quiet_NaN();
      m["outer_contact_u_over_d"] = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (ji[i] < kContactJ && std::isnan(m["inner_contact_u_over_d"])) m["inner_contact_u_over_d"] = u[i];
        if (je[i] < kContactJ && std::isnan(m["outer_contact_u_over_d"])) m["outer_contact_u_over_d"] = u[i];
      }
      m["final_f_hat"] = t.values("f_hat").back();
      break;
    }
    case BenchmarkKind::PistonBox: {
      const std::vector<double> fp = t.values("piston_force_N"), fc = t.values("clamp_force_N"),
                                jf = t.values("Jmin_floor_layer");
      const double fcr = run.model.constants.at("f_cr");
      m["f_cr_N"] = fcr;
      // First limit load: the force at the first step whose incremental
      // stiffness falls below a tenth of the initial stiffness.
      const std::vector<double> u = t.values("u_y_m");
      double k0 = 0.0, limit = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t i = 1; i < fp.size(); ++i) {
        const double k = (fp[i] - fp[i - 1]) / (u[i - 1] - u[i]);
        if (i == 1) k0 = k;
        if (k < 0.1 * k0) {
          limit = fp[i - 1];
          break;
        }
      }
      m["first_limit_load_N"] = limit;
      m["first_limit_over_fcr"] = limit / fcr;
      std::size_t contact = fp.size();
      for (std::size_t i = 0; i < jf.size(); ++i)
        if (jf[i] < kContactJ) {
          contact = i;
          break;
        }
      double peak = 0.0, dev = 0.0;
      for (std::size_t i = 0; i < contact; ++i) {
        peak = std::max({peak, std::abs(fp[i]), std::abs(fc[i])});
        dev = std::max(dev, std::abs(fp[i] - fc[i]));
      }
      m["floor_contact_u_over_d"] =
          contact < fp.size() ? t.values("u_over_d")[contact] : std::numeric_limits<double>::quiet_NaN();
      m["reaction_overlap_over_peak"] = peak > 0.0 ? dev / peak : 0.0;
      break;
    }
    case BenchmarkKind::ConfigForce: {
      const std::vector<double> num = t.values("R1_numeric_N"), ana = t.values("R1_analytic_N");
      double peak = 0.0, dev = 0.0;
      for (std::size_t i = 0; i < num.size(); ++i) {
        peak = std::max(peak, std::abs(ana[i]));
        dev = std::max(dev, std::abs(num[i] - ana[i]));
      }
      m["peak_R1_analytic_N"] = peak;
      m["max_R1_deviation_over_peak"] = peak > 0.0 ? dev / peak : 0.0;
      break;
    }
  }
}

}  // namespace

BenchmarkRun run_benchmark(const BenchmarkSpec& spec, const SolverConfig& cfg, const RunOptions& options) {
  BenchmarkRun run;
  run.model = generate(spec);
  const Problem problem(run.model.mesh, run.model.bc, options.threads);
  const Monitor monitor = make_monitor(run.model, problem, cfg);

  run.table.columns = {"step", "lambda"};
  run.table.columns.insert(run.table.columns.end(), monitor.columns.begin(), monitor.columns.end());

  AssemblyOptions opts;
  opts.stiffness = false;
  opts.diagnostics = monitor.diagnostics;
  const AcceptCallback on_accept = [&](const AcceptedStep& s, const Eigen::VectorXd& d) {
    const AssemblyResult r = problem.assembler().assemble(d, opts);
    std::vector<double> row{static_cast<double>(s.step), s.lambda};
    const std::vector<double> values = monitor.row(s, d, r);
    row.insert(row.end(), values.begin(), values.end());
    run.table.rows.push_back(std::move(row));
    if (options.on_step) options.on_step(s, d);
    return true;
  };
  run.history = adaptive_march(problem, cfg, on_accept, options.log, run.model.stops);
  evaluate_metrics(run);
  return run;
}

}  // namespace tmc
