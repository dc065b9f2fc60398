#include "tmc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tmc {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_parent(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory '" + parent.string() + "': " + ec.message());
}

std::ofstream open_output(const std::string& path) {
  ensure_parent(path);
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

void finish_output(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string iso_form_name(IsoForm f) { return f == IsoForm::Classical ? "classical" : "as_written"; }

IsoForm parse_iso_form(const std::string& s) {
  if (s == "classical") return IsoForm::Classical;
  if (s == "as_written") return IsoForm::AsWritten;
  throw ConfigError("material.iso_form must be \"classical\" or \"as_written\"");
}

std::string merit_name(MeritFunction m) { return m == MeritFunction::Energy ? "energy" : "residual_norm"; }

MeritFunction parse_merit(const std::string& s) {
  if (s == "energy") return MeritFunction::Energy;
  if (s == "residual_norm") return MeritFunction::ResidualNorm;
  throw ConfigError("solver.merit must be \"residual_norm\" or \"energy\"");
}

// Key table for one JSON object: each entry reads a value into the config and
// writes it back out.
class Section {
 public:
  explicit Section(std::string name) : name_(std::move(name)) {}

  void number(const std::string& key, double& ref) {
    add(key, [this, key, &ref](const json& v) { ref = as_number(key, v); }, [&ref] { return json(ref); });
  }
  void integer(const std::string& key, int& ref) {
    add(
        key,
        [this, key, &ref](const json& v) {
          if (!v.is_number_integer()) throw ConfigError(path(key) + " must be an integer");
          const auto x = v.get<long long>();
          if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(path(key) + " is out of range");
          ref = static_cast<int>(x);
        },
        [&ref] { return json(ref); });
  }
  void optional_number(const std::string& key, std::optional<double>& ref) {
    add(key, [this, key, &ref](const json& v) { ref = as_number(key, v); },
        [&ref] { return ref ? json(*ref) : json(); });
  }
  void boolean(const std::string& key, bool& ref) {
    add(
        key,
        [this, key, &ref](const json& v) {
          if (!v.is_boolean()) throw ConfigError(path(key) + " must be true or false");
          ref = v.get<bool>();
        },
        [&ref] { return json(ref); });
  }
  void text(const std::string& key, std::function<void(const std::string&)> read, std::function<json()> write) {
    add(
        key,
        [this, key, read = std::move(read)](const json& v) {
          if (!v.is_string()) throw ConfigError(path(key) + " must be a string");
          read(v.get<std::string>());
        },
        std::move(write));
  }

  void read(const json& obj) const {
    if (!obj.is_object()) throw ConfigError(name_ + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const auto f = find(it.key());
      if (!f) throw ConfigError("unknown key '" + path(it.key()) + "'");
      f->read(it.value());
    }
  }

  json write() const {
    json out = json::object();
    for (const Entry& e : entries_) {
      json v = e.write();
      if (!v.is_null()) out[e.key] = std::move(v);
    }
    return out;
  }

 private:
  struct Entry {
    std::string key;
    std::function<void(const json&)> read;
    std::function<json()> write;
  };

  void add(const std::string& key, std::function<void(const json&)> read, std::function<json()> write) {
    entries_.push_back({key, std::move(read), std::move(write)});
  }
  const Entry* find(const std::string& key) const {
    for (const Entry& e : entries_)
      if (e.key == key) return &e;
    return nullptr;
  }
  std::string path(const std::string& key) const { return name_ + "." + key; }
  double as_number(const std::string& key, const json& v) const {
    if (!v.is_number()) throw ConfigError(path(key) + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key) + " must be finite");
    return x;
  }

  std::string name_;
  std::vector<Entry> entries_;
};

Section geometry_section(BenchmarkSpec& spec) {
  Section s("geometry");
  switch (spec.kind) {
    case BenchmarkKind::CShape: {
      CShapeGeometry& g = spec.cshape;
      s.number("length_m", g.length);
      s.number("height_m", g.height);
      s.number("gap_m", g.gap);
      s.number("load_over_h", g.load_over_h);
      break;
    }
    case BenchmarkKind::ClosedBox: {
      ClosedBoxGeometry& g = spec.closed_box;
      s.number("width_m", g.width);
      s.number("height_m", g.height);
      s.number("wall_m", g.wall);
      s.number("envelope_side_m", g.envelope_side);
      s.number("envelope_top_m", g.envelope_top);
      s.number("envelope_bottom_m", g.envelope_bottom);
      s.integer("wall_elements", g.wall_elements);
      s.number("envelope_grading", g.envelope_grading);
      s.number("load_over_d", g.load_over_d);
      break;
    }
    case BenchmarkKind::PistonBox: {
      PistonBoxGeometry& g = spec.piston_box;
      s.number("chamber_width_m", g.chamber_width);
      s.number("beam_length_m", g.beam_length);
      s.number("beam_thickness_m", g.beam_thickness);
      s.number("beam_position_m", g.beam_position);
      s.number("wall_thickness_m", g.wall_thickness);
      s.integer("beam_elements_thick", g.beam_elements_thick);
      s.integer("beam_elements_long", g.beam_elements_long);
      s.integer("side_elements", g.side_elements);
      s.number("side_grading", g.side_grading);
      s.number("imperfection", g.imperfection);
      s.number("load_over_d", g.load_over_d);
      break;
    }
    case BenchmarkKind::ConfigForce: {
      ConfigForceGeometry& g = spec.config_force;
      s.number("h0_m", g.h0);
      s.number("length_over_h0", g.length_over_h0);
      s.number("inner_fraction", g.inner_fraction);
      s.number("radius_over_h0", g.radius_over_h0);
      s.number("gap_over_h0", g.gap_over_h0);
      s.number("column_over_h0", g.column_over_h0);
      s.integer("elements_per_h0", g.elements_per_h0);
      s.integer("gap_elements", g.gap_elements);
      s.number("travel_over_h0", g.travel_over_h0);
      break;
    }
  }
  return s;
}

Section material_section(MaterialOverrides& m) {
  Section s("material");
  s.optional_number("kappa_vol_pa", m.kappa_vol_pa);
  s.optional_number("kappa_iso_pa", m.kappa_iso_pa);
  s.optional_number("E_pa", m.E_pa);
  s.optional_number("nu", m.nu);
  s.text(
      "iso_form", [&m](const std::string& v) { m.iso_form = parse_iso_form(v); },
      [&m] { return m.iso_form ? json(iso_form_name(*m.iso_form)) : json(); });
  s.optional_number("gamma_c", m.gamma_c);
  s.optional_number("gamma_e", m.gamma_e);
  s.optional_number("kappa_Fbar_pa", m.kappa_Fbar_pa);
  return s;
}

Section solver_section(SolverConfig& c) {
  Section s("solver");
  s.number("tol_rel_residual", c.tol_rel_residual);
  s.number("tol_abs_residual_n", c.tol_abs_residual);
  s.number("force_scale_n", c.force_scale);
  s.integer("max_newton_iters", c.max_newton_iters);
  s.number("ls_backtrack", c.ls_backtrack);
  s.number("ls_sufficient_decrease", c.ls_sufficient_decrease);
  s.integer("ls_max_trials", c.ls_max_trials);
  s.text(
      "merit", [&c](const std::string& v) { c.merit = parse_merit(v); }, [&c] { return json(merit_name(c.merit)); });
  s.number("dlambda_initial", c.dlambda_initial);
  s.number("dlambda_min", c.dlambda_min);
  s.number("dlambda_growth", c.dlambda_growth);
  s.number("dlambda_cut", c.dlambda_cut);
  s.number("dlambda_max_factor", c.dlambda_max_factor);
  s.integer("growth_streak", c.growth_streak);
  s.number("shift_initial", c.shift_initial);
  s.number("shift_growth", c.shift_growth);
  s.number("shift_max", c.shift_max);
  s.boolean("tangent_predictor", c.tangent_predictor);
  s.boolean("negative_curvature_escape", c.negative_curvature_escape);
  s.integer("max_escapes", c.max_escapes);
  return s;
}

Section output_section(OutputSettings& o) {
  Section s("output");
  s.text(
      "directory", [&o](const std::string& v) { o.directory = v; }, [&o] { return json(o.directory); });
  s.integer("snapshot_every", o.snapshot_every);
  return s;
}

// Line and column (1-based) of a byte offset.
std::pair<int, int> locate(const std::string& text, std::size_t offset) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based index of the offending character.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, column] = locate(text, offset);
    std::string msg = e.what();
    const auto pos = msg.find("syntax error");
    throw ParseError(pos == std::string::npos ? msg : msg.substr(pos), line, column);
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ConfigError("the configuration must be a JSON object");
  static const std::set<std::string> top = {"benchmark", "geometry", "material", "solver", "output"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!top.count(it.key())) throw ConfigError("unknown key '" + it.key() + "'");
  if (!doc.contains("benchmark")) throw ConfigError("no benchmark");

  RunConfig cfg;
  const json& b = doc["benchmark"];
  if (!b.is_object()) throw ConfigError("benchmark must be an object");
  for (auto it = b.begin(); it != b.end(); ++it)
    if (it.key() != "kind" && it.key() != "level" && it.key() != "bvp")
      throw ConfigError("unknown key 'benchmark." + it.key() + "'");
  if (!b.contains("kind") || !b["kind"].is_string()) throw ConfigError("benchmark.kind must be a string");
  cfg.benchmark.kind = parse_benchmark_kind(b["kind"].get<std::string>());
  if (b.contains("level")) {
    if (!b["level"].is_string()) throw ConfigError("benchmark.level must be a string");
    cfg.benchmark.level = parse_mesh_level(b["level"].get<std::string>());
  }
  if (b.contains("bvp")) {
    if (!b["bvp"].is_number_integer()) throw ConfigError("benchmark.bvp must be an integer");
    cfg.benchmark.bvp = b["bvp"].get<int>();
  }

  cfg.solver = default_solver_config(cfg.benchmark.kind);
  if (doc.contains("geometry")) geometry_section(cfg.benchmark).read(doc["geometry"]);
  if (doc.contains("material")) material_section(cfg.benchmark.material).read(doc["material"]);
  if (doc.contains("solver")) solver_section(cfg.solver).read(doc["solver"]);
  if (doc.contains("output")) output_section(cfg.output).read(doc["output"]);

  cfg.benchmark.validate();
  cfg.solver.validate();
  if (cfg.output.directory.empty()) throw ConfigError("output.directory must not be empty");
  if (cfg.output.snapshot_every < -1) throw ConfigError("output.snapshot_every must be -1 (automatic), 0 or positive");
  return cfg;
}

int snapshot_interval(const OutputSettings& output, int elements) {
  if (output.snapshot_every >= 0) return output.snapshot_every;
  return elements < 5000 ? 1 : 5;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string serialize_config(const RunConfig& config) {
  RunConfig c = config;
  json doc;
  json b;
  b["kind"] = benchmark_name(c.benchmark.kind);
  if (c.benchmark.level) b["level"] = mesh_level_name(*c.benchmark.level);
  if (c.benchmark.bvp) b["bvp"] = *c.benchmark.bvp;
  doc["benchmark"] = b;
  doc["geometry"] = geometry_section(c.benchmark).write();
  doc["material"] = material_section(c.benchmark.material).write();
  doc["solver"] = solver_section(c.solver).write();
  doc["output"] = output_section(c.output).write();
  return doc.dump(2) + "\n";
}

void write_history_csv(const HistoryTable& table, const std::string& path) {
  if (table.rows.empty()) throw ConfigError("history table is empty");
  std::ofstream os = open_output(path);
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const std::vector<double>& row : table.rows) {
    if (row.size() != table.columns.size()) throw ConfigError("history row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  finish_output(os, path);
}

HistoryTable read_history_csv(const std::string& path) {
  std::istringstream is(read_file(path));
  HistoryTable t;
  std::string line;
  if (!std::getline(is, line) || line.empty()) throw ConfigError("'" + path + "' has no header row");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  }
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream rs(line);
    std::string cell;
    while (std::getline(rs, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ConfigError("'" + path + "' line " + std::to_string(line_no) + ": invalid number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.columns.size())
      throw ConfigError("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                        std::to_string(t.columns.size()) + " values");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_summary_json(const BenchmarkRun& run, const std::string& path) {
  json doc;
  doc["benchmark"] = benchmark_name(run.model.spec.kind);
  if (run.model.spec.level) doc["level"] = mesh_level_name(*run.model.spec.level);
  if (run.model.spec.bvp) doc["bvp"] = *run.model.spec.bvp;
  doc["termination"] = run.history.termination;
  doc["completed"] = run.history.completed;
  doc["accepted_steps"] = static_cast<int>(run.history.steps.size()) - 1;
  doc["rejected_steps"] = run.history.rejected_steps;
  if (!run.history.last_failure.empty()) doc["last_failure"] = run.history.last_failure;
  doc["elements"] = run.model.mesh.num_elements();
  doc["nodes"] = run.model.mesh.num_nodes();
  json metrics = json::object();
  for (const auto& [k, v] : run.metrics) metrics[k] = std::isfinite(v) ? json(v) : json();
  doc["metrics"] = metrics;
  json constants = json::object();
  for (const auto& [k, v] : run.model.constants) constants[k] = v;
  doc["constants"] = constants;
  std::ofstream os = open_output(path);
  os << doc.dump(2) << '\n';
  finish_output(os, path);
}

PointFields snapshot_fields(const MeshModel& mesh, const Eigen::VectorXd& d_full) {
  if (d_full.size() != mesh.num_dofs()) throw ConfigError("displacement size does not match the mesh");
  const int n = mesh.num_nodes();
  std::vector<double> J(n, 0.0), W(n, 0.0), S(n, 0.0), count(n, 0.0);
  ElementEvalOptions opts;
  opts.stiffness = false;
  opts.diagnostics = true;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const MeshElement& el = mesh.elements[e];
    const Region& region = mesh.regions[el.region];
    opts.element_id = e;
    const ElementOutput out = element_force_stiffness(el.family, mesh.element_coords(e), mesh.gather(e, d_full),
                                                      quadrature(el.family, region.quadrature), region.kernel, opts);
    double j = 0.0, w = 0.0, s = 0.0;
    for (const PointDiagnostics& p : out.points) {
      j += p.J;
      w += p.W;
      s += p.cauchy_norm;
    }
    const double m = static_cast<double>(out.points.size());
    for (int a = 0; a < el.size(); ++a) {
      const int node = el.nodes[a];
      J[node] += j / m;
      W[node] += w / m;
      S[node] += s / m;
      count[node] += 1.0;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (count[i] > 0.0) {
      J[i] /= count[i];
      W[i] /= count[i];
      S[i] /= count[i];
    } else {
      J[i] = 1.0;
    }
  }
  return {{"J", std::move(J)}, {"W_Pa", std::move(W)}, {"cauchy_norm_Pa", std::move(S)}};
}

void write_mesh_snapshot(const MeshModel& mesh, const Eigen::VectorXd& d_full, const PointFields& fields,
                         const std::string& path) {
  const int n = mesh.num_nodes();
  if (d_full.size() != mesh.num_dofs()) throw ConfigError("displacement size does not match the mesh");
  for (const auto& [name, values] : fields) {
    if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
      throw ConfigError("point field name '" + name + "' is not a single token");
    if (static_cast<int>(values.size()) != n) throw ConfigError("point field '" + name + "' has the wrong size");
  }

  std::ofstream os = open_output(path);
  os << "# vtk DataFile Version 3.0\n"
     << "third medium contact snapshot\n"
     << "ASCII\n"
     << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n << " double\n";
  for (const Eigen::Vector2d& x : mesh.nodes) os << format_double(x.x()) << ' ' << format_double(x.y()) << " 0\n";

  long long cell_size = 0;
  for (const MeshElement& e : mesh.elements) cell_size += 1 + e.size();
  os << "CELLS " << mesh.num_elements() << ' ' << cell_size << '\n';
  for (const MeshElement& e : mesh.elements) {
    os << e.size();
    for (int a = 0; a < e.size(); ++a) os << ' ' << e.nodes[a];
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (const MeshElement& e : mesh.elements) {
    switch (e.family) {
      case ElementFamily::Quad4: os << "9\n"; break;
      case ElementFamily::Quad8: os << "23\n"; break;
      case ElementFamily::Tri6: os << "22\n"; break;
    }
  }

  os << "CELL_DATA " << mesh.num_elements() << '\n';
  os << "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (const MeshElement& e : mesh.elements) os << e.region << '\n';
  os << "SCALARS third_medium int 1\nLOOKUP_TABLE default\n";
  for (const MeshElement& e : mesh.elements) os << (mesh.regions[e.region].third_medium ? 1 : 0) << '\n';

  os << "POINT_DATA " << n << '\n';
  os << "VECTORS displacement double\n";
  for (int i = 0; i < n; ++i) os << format_double(d_full[2 * i]) << ' ' << format_double(d_full[2 * i + 1]) << " 0\n";
  for (const auto& [name, values] : fields) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) os << format_double(v) << '\n';
  }
  finish_output(os, path);
}

}  // namespace tmc
