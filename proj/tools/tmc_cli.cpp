// Command-line entry point: run one configuration, run a benchmark suite,
// run the property checks, or write the mesh of a configuration.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tmc/benchmarks.hpp"
#include "tmc/io.hpp"
#include "tmc/verification.hpp"

namespace fs = std::filesystem;
using namespace tmc;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kTerminated = 3, kVerification = 4 };

struct Options {
  std::string config;
  std::string out;
  int threads = 1;
  std::uint64_t seed = 20240613;
  std::string suite = "all";
};

std::string run_label(const BenchmarkSpec& spec) {
  std::string label = benchmark_name(spec.kind);
  if (spec.level) label += "_" + mesh_level_name(*spec.level);
  if (spec.bvp) label += "_bvp" + std::to_string(*spec.bvp);
  return label;
}

RunConfig load_or_throw(const std::string& path) {
  if (path.empty()) throw ConfigError("no configuration file given");
  return load_config(path);
}

// Runs one configuration into `dir`: config echo, history CSV, summary JSON
// and mesh snapshots. Returns the finished run.
BenchmarkRun execute(const RunConfig& config, const fs::path& dir, int threads) {
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "config.json");
    os << serialize_config(config);
    if (!os) throw IoError("cannot write '" + (dir / "config.json").string() + "'");
  }

  const BenchmarkModel model = generate(config.benchmark);
  const int every = snapshot_interval(config.output, model.mesh.num_elements());
  RunOptions options;
  options.threads = threads;
  if (every > 0) {
    const fs::path snap_dir = dir / "snapshots";
    options.on_step = [&model, snap_dir, every](const AcceptedStep& s, const Eigen::VectorXd& d) {
      if (s.step % every != 0) return;
      char name[32];
      std::snprintf(name, sizeof name, "step_%05d.vtk", s.step);
      write_mesh_snapshot(model.mesh, d, snapshot_fields(model.mesh, d), (snap_dir / name).string());
    };
  }

  BenchmarkRun run = run_benchmark(config.benchmark, config.solver, options);
  write_history_csv(run.table, (dir / "history.csv").string());
  write_summary_json(run, (dir / "summary.json").string());
  if (every > 0 && !run.history.steps.empty())
    write_mesh_snapshot(run.model.mesh, run.history.final_d, snapshot_fields(run.model.mesh, run.history.final_d),
                        (dir / "snapshots" / "final.vtk").string());
  return run;
}

void print_metrics(const BenchmarkRun& run) {
  std::cout << "termination: " << run.history.termination;
  if (!run.history.last_failure.empty()) std::cout << " (" << run.history.last_failure << ")";
  std::cout << "\n";
  for (const auto& [key, value] : run.metrics) std::cout << "  " << key << " = " << value << "\n";
}

int cmd_run(const Options& opt) {
  RunConfig config = load_or_throw(opt.config);
  if (!opt.out.empty()) config.output.directory = opt.out;
  const BenchmarkRun run = execute(config, config.output.directory, opt.threads);
  std::cout << run_label(config.benchmark) << " -> " << config.output.directory << "\n";
  print_metrics(run);
  return run.history.completed ? kOk : kTerminated;
}

std::vector<BenchmarkSpec> suite_specs(const std::string& suite) {
  std::vector<BenchmarkSpec> specs;
  auto add = [&specs](BenchmarkKind kind, std::optional<MeshLevel> level = {}, std::optional<int> bvp = {}) {
    BenchmarkSpec s;
    s.kind = kind;
    s.level = level;
    s.bvp = bvp;
    specs.push_back(s);
  };
  const bool all = suite == "all";
  if (all || suite == "cshape")
    for (MeshLevel l : {MeshLevel::M3, MeshLevel::M9, MeshLevel::M15, MeshLevel::M21}) add(BenchmarkKind::CShape, l);
  if (all || suite == "closed_box") add(BenchmarkKind::ClosedBox);
  if (all || suite == "piston_box") add(BenchmarkKind::PistonBox);
  if (all || suite == "config_force")
    for (int bvp : {1, 2}) add(BenchmarkKind::ConfigForce, std::nullopt, bvp);
  if (specs.empty())
    throw ConfigError("unknown suite '" + suite + "' (all, cshape, closed_box, piston_box, config_force)");
  return specs;
}

std::string metric_text(const BenchmarkRun& run, const std::string& key, const char* format = "%.4g") {
  const auto it = run.metrics.find(key);
  if (it == run.metrics.end() || !std::isfinite(it->second)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, format, it->second);
  return buf;
}

// One headline quantity per benchmark for the summary table.
std::string headline(const BenchmarkRun& run) {
  switch (run.model.spec.kind) {
    case BenchmarkKind::CShape:
      return "gap error " + metric_text(run, "gap_error", "%.4f");
    case BenchmarkKind::ClosedBox:
      return "f_hat(end) " + metric_text(run, "final_f_hat") + ", contact inner/outer at u/d " +
             metric_text(run, "inner_contact_u_over_d", "%.2f") + "/" +
             metric_text(run, "outer_contact_u_over_d", "%.2f");
    case BenchmarkKind::PistonBox:
      return "first limit / f_cr " + metric_text(run, "first_limit_over_fcr") + ", floor contact at u/d " +
             metric_text(run, "floor_contact_u_over_d", "%.2f");
    case BenchmarkKind::ConfigForce:
      return "max |R1_num - R1_an| / peak " + metric_text(run, "max_R1_deviation_over_peak");
  }
  return {};
}

int cmd_bench(const Options& opt) {
  const std::vector<BenchmarkSpec> specs = suite_specs(opt.suite);
  const fs::path root = opt.out.empty() ? fs::path("bench_out") : fs::path(opt.out);
  fs::create_directories(root);
  std::ofstream table(root / "summary.csv");
  table << "run,termination,accepted_steps,headline\n";
  bool all_completed = true;
  for (const BenchmarkSpec& spec : specs) {
    RunConfig config;
    config.benchmark = spec;
    config.solver = default_solver_config(spec.kind);
    const std::string label = run_label(spec);
    config.output.directory = (root / label).string();
    std::cout << "running " << label << "..." << std::flush;
    const BenchmarkRun run = execute(config, config.output.directory, opt.threads);
    const std::string line = headline(run);
    std::cout << " " << run.history.termination << ", " << line << "\n";
    table << label << "," << run.history.termination << "," << run.history.steps.size() - 1 << ",\"" << line
          << "\"\n";
    all_completed = all_completed && run.history.completed;
  }
  if (!table) throw IoError("cannot write '" + (root / "summary.csv").string() + "'");
  std::cout << "summary table: " << (root / "summary.csv").string() << "\n";
  return all_completed ? kOk : kTerminated;
}

int cmd_verify(const Options& opt) {
  const std::vector<CheckResult> checks = run_property_suite(opt.seed);
  nlohmann::json report = nlohmann::json::array();
  bool ok = true;
  for (const CheckResult& c : checks) {
    std::printf("%s  %-60s error %.3e  tol %.1e%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.error,
                c.tolerance, c.detail.empty() ? "" : "  ", c.detail.c_str());
    report.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"error", std::isfinite(c.error) ? nlohmann::json(c.error) : nlohmann::json()},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
    ok = ok && c.passed;
  }
  std::printf("%zu checks, %s\n", checks.size(), ok ? "all passed" : "FAILURES");
  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    std::ofstream os(fs::path(opt.out) / "verify_report.json");
    os << nlohmann::json{{"seed", opt.seed}, {"passed", ok}, {"checks", report}}.dump(2) << "\n";
    if (!os) throw IoError("cannot write the verification report in '" + opt.out + "'");
  }
  return ok ? kOk : kVerification;
}

int cmd_mesh(const Options& opt) {
  RunConfig config = load_or_throw(opt.config);
  if (!opt.out.empty()) config.output.directory = opt.out;
  const BenchmarkModel model = generate(config.benchmark);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.mesh.num_dofs());
  const fs::path path = fs::path(config.output.directory) / (run_label(config.benchmark) + "_mesh.vtk");
  write_mesh_snapshot(model.mesh, zero, snapshot_fields(model.mesh, zero), path.string());
  std::cout << model.mesh.num_elements() << " elements, " << model.mesh.num_nodes() << " nodes -> " << path.string()
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Third-medium contact benchmarks"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--threads", opt.threads, "Assembly threads")->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "Run one configuration");
  run->add_option("config,--config", opt.config, "Configuration file");
  add_common(run);

  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark suite and write a summary table");
  bench->add_option("suite", opt.suite, "all, cshape, closed_box, piston_box or config_force");
  add_common(bench);

  CLI::App* verify = app.add_subcommand("verify", "Run the consistency and property checks");
  verify->add_option("--seed", opt.seed, "Seed of the randomized checks");
  verify->add_option("--out", opt.out, "Directory for verify_report.json");

  CLI::App* mesh = app.add_subcommand("mesh", "Write the reference mesh of a configuration");
  mesh->add_option("config,--config", opt.config, "Configuration file");
  mesh->add_option("--out", opt.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(opt);
    if (*bench) return cmd_bench(opt);
    if (*verify) return cmd_verify(opt);
    if (*mesh) return cmd_mesh(opt);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTerminated;
  }
  return kUsage;
}
