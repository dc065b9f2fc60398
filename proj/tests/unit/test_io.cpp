#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tmc/io.hpp"

using namespace tmc;

namespace {

std::filesystem::path scratch_dir() {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "tmc_test_io";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Lines following a "SCALARS name ..." header and its lookup table line.
std::vector<std::string> scalar_block(const std::string& vtk, const std::string& name, int count) {
  std::istringstream is(vtk);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind("SCALARS " + name + " ", 0) == 0) break;
  std::getline(is, line);
  std::vector<std::string> out;
  for (int i = 0; i < count && std::getline(is, line); ++i) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("config: a minimal document takes the benchmark defaults") {
  const RunConfig c = parse_config(R"({"benchmark": {"kind": "closed_box"}})");
  CHECK(c.benchmark.kind == BenchmarkKind::ClosedBox);
  CHECK(c.benchmark.closed_box == ClosedBoxGeometry{});
  CHECK(c.solver == default_solver_config(BenchmarkKind::ClosedBox));
  CHECK(c.output == OutputSettings{});
  CHECK(snapshot_interval(c.output, 4999) == 1);
  CHECK(snapshot_interval(c.output, 5000) == 5);
  CHECK(snapshot_interval(OutputSettings{"out", 0}, 100) == 0);
  CHECK(snapshot_interval(OutputSettings{"out", 3}, 100000) == 3);
}

TEST_CASE("config: overrides reach the spec, the solver and the output") {
  const RunConfig c = parse_config(R"({
    "benchmark": {"kind": "cshape", "level": "M21"},
    "geometry": {"length_m": 1.5, "load_over_h": 1.0},
    "material": {"kappa_Fbar_pa": 1400, "iso_form": "as_written"},
    "solver": {"merit": "energy", "max_newton_iters": 40, "negative_curvature_escape": true},
    "output": {"directory": "runs/m21", "snapshot_every": 5}
  })");
  CHECK(c.benchmark.level == MeshLevel::M21);
  CHECK(c.benchmark.cshape.length == 1.5);
  CHECK(c.benchmark.cshape.load_over_h == 1.0);
  CHECK(c.benchmark.material.kappa_Fbar_pa == 1400.0);
  CHECK(c.benchmark.material.iso_form == IsoForm::AsWritten);
  CHECK(c.solver.merit == MeritFunction::Energy);
  CHECK(c.solver.max_newton_iters == 40);
  CHECK(c.solver.negative_curvature_escape);
  CHECK(c.output.directory == "runs/m21");
  CHECK(c.output.snapshot_every == 5);
}

TEST_CASE("config: serialize then parse reproduces the config for every benchmark") {
  for (const char* text : {R"({"benchmark": {"kind": "cshape", "level": "M9"}, "material": {"E_pa": 3e5, "nu": 0.3}})",
                           R"({"benchmark": {"kind": "closed_box"}, "solver": {"dlambda_initial": 0.0025}})",
                           R"({"benchmark": {"kind": "piston_box"}, "geometry": {"imperfection": 2e-4}})",
                           R"({"benchmark": {"kind": "config_force", "bvp": 2}, "output": {"snapshot_every": 3}})"}) {
    const RunConfig c = parse_config(text);
    const std::string once = serialize_config(c);
    const RunConfig back = parse_config(once);
    CHECK(back == c);
    CHECK(serialize_config(back) == once);
  }
}

TEST_CASE("config: malformed JSON reports line and column") {
  try {
    parse_config("{\n  \"benchmark\": {\"kind\": \"cshape\",}\n}");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 34);
    CHECK(std::string(e.what()).rfind("line 2, column 34: ", 0) == 0);
  }
}

TEST_CASE("config: rejected documents") {
  CHECK_THROWS_WITH_AS(parse_config(""), "no benchmark", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("{}"), "no benchmark", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"benchmark": {"kind": "closed_box"}, "geometry": {"length_m": 2}})"),
                       "unknown key 'geometry.length_m'", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"benchmark": {"kind": "cshape", "level": "M3"}, "extra": 1})"),
                       "unknown key 'extra'", ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"benchmark": {"kind": "cshape", "level": "M3"}, "material": {"nu": 0.6, "E_pa": 1e5}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"benchmark": {"kind": "cshape", "level": "M3"}, "solver": {"max_newton_iters": "many"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"benchmark": {"kind": "cshape", "level": "M4"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"benchmark": {"kind": "config_force", "bvp": 3}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"benchmark": {"kind": "cshape", "level": "M3"}, "output": {"directory": ""}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"benchmark": {"kind": "cshape", "level": "M3"}, "output": {"snapshot_every": -2}})"),
                  ConfigError);
  CHECK_THROWS_AS(load_config((scratch_dir() / "does_not_exist.json").string()), IoError);
}

TEST_CASE("config: the finest C-shape level with its own penalty is accepted") {
  const RunConfig c =
      parse_config(R"({"benchmark": {"kind": "cshape", "level": "M21"}, "material": {"kappa_Fbar_pa": 1400}})");
  CHECK(resolve_materials(c.benchmark).kappa_Fbar == 1400.0);
}

TEST_CASE("history CSV: two rows read back bit for bit") {
  HistoryTable t;
  t.columns = {"step", "lambda", "force_N"};
  t.rows = {{0.0, 0.0, 0.0}, {1.0, 0.1 + 0.2, -1.0 / 3.0}, {2.0, 1.0, std::nextafter(1e-300, 1.0)}};
  const std::string path = (scratch_dir() / "history.csv").string();
  write_history_csv(t, path);
  const HistoryTable back = read_history_csv(path);
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.columns.size(); ++j) CHECK(back.rows[i][j] == t.rows[i][j]);
  CHECK(back.values("force_N")[1] == -1.0 / 3.0);
  CHECK_THROWS_AS(back.column("missing"), ConfigError);
  CHECK_THROWS_AS(write_history_csv(HistoryTable{{"step"}, {}}, path), ConfigError);

  std::ofstream(scratch_dir() / "bad.csv") << "step,lambda\n1,abc\n";
  CHECK_THROWS_AS(read_history_csv((scratch_dir() / "bad.csv").string()), ConfigError);
}

TEST_CASE("VTK snapshot: cell count, zero displacement and region tags") {
  const BenchmarkModel model = gen_cshape(MeshLevel::M3);
  const MeshModel& mesh = model.mesh;
  const Eigen::VectorXd d = Eigen::VectorXd::Zero(mesh.num_dofs());
  const PointFields fields = snapshot_fields(mesh, d);
  for (const char* name : {"J", "W_Pa", "cauchy_norm_Pa"}) REQUIRE(fields.count(name));
  for (double j : fields.at("J")) CHECK(j == doctest::Approx(1.0).epsilon(1e-14));
  for (double w : fields.at("W_Pa")) CHECK(std::abs(w) < 1e-9);

  const std::filesystem::path path = scratch_dir() / "nested" / "snap.vtk";
  std::filesystem::remove_all(scratch_dir() / "nested");
  write_mesh_snapshot(mesh, d, fields, path.string());
  const std::string vtk = slurp(path);
  CHECK(vtk.find("CELLS " + std::to_string(mesh.num_elements()) + " " + std::to_string(5 * mesh.num_elements())) !=
        std::string::npos);
  CHECK(vtk.find("POINTS " + std::to_string(mesh.num_nodes()) + " double") != std::string::npos);

  const auto disp_pos = vtk.find("VECTORS displacement double\n");
  REQUIRE(disp_pos != std::string::npos);
  std::istringstream disp(vtk.substr(disp_pos));
  std::string line;
  std::getline(disp, line);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    double ux = 1, uy = 1, uz = 1;
    disp >> ux >> uy >> uz;
    CHECK((ux == 0.0 && uy == 0.0 && uz == 0.0));
  }

  const auto tags = scalar_block(vtk, "third_medium", mesh.num_elements());
  const auto regions = scalar_block(vtk, "region", mesh.num_elements());
  REQUIRE(tags.size() == static_cast<std::size_t>(mesh.num_elements()));
  int third = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const int region = mesh.elements[e].region;
    CHECK(regions[e] == std::to_string(region));
    CHECK(tags[e] == (mesh.regions[region].third_medium ? "1" : "0"));
    third += tags[e] == "1";
  }
  CHECK(third > 0);
  CHECK(third < mesh.num_elements());

  PointFields wrong = fields;
  wrong["J"].pop_back();
  CHECK_THROWS_AS(write_mesh_snapshot(mesh, d, wrong, path.string()), ConfigError);
}

TEST_CASE("shipped configs equal the benchmark defaults") {
  const std::filesystem::path dir = TMC_CONFIG_DIR;
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const RunConfig c = load_config(entry.path().string());
    CAPTURE(entry.path().string());
    CHECK(c.solver == default_solver_config(c.benchmark.kind));
    CHECK(c.benchmark.material == MaterialOverrides{});
    CHECK(c.benchmark.cshape == CShapeGeometry{});
    CHECK(c.benchmark.closed_box == ClosedBoxGeometry{});
    CHECK(c.benchmark.piston_box == PistonBoxGeometry{});
    CHECK(c.benchmark.config_force == ConfigForceGeometry{});
    CHECK(c.output.snapshot_every == -1);
  }
  CHECK(count == 8);
}
