#pragma once

// Run configuration (strict JSON with unit-tagged keys), history and summary
// files, and legacy VTK mesh snapshots.

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tmc/benchmarks.hpp"

namespace tmc {

class IoError : public Error {
 public:
  using Error::Error;
};

// JSON syntax error; line and column are 1-based.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& message, int line, int column)
      : ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct OutputSettings {
  std::string directory = "out";
  // Write a mesh snapshot every k-th accepted step; 0 disables snapshots and
  // -1 selects every step below 5000 elements and every 5th step above.
  int snapshot_every = -1;

  bool operator==(const OutputSettings&) const = default;
};

// Effective snapshot interval for a mesh of the given size; 0 means none.
int snapshot_interval(const OutputSettings& output, int elements);

struct RunConfig {
  BenchmarkSpec benchmark;
  SolverConfig solver;  // benchmark defaults with the overrides applied
  OutputSettings output;

  bool operator==(const RunConfig&) const = default;
};

// Parses a JSON document of the form
//   { "benchmark": {"kind": "cshape", "level": "M15"},
//     "geometry": {...}, "material": {...}, "solver": {...}, "output": {...} }
// Throws ParseError for malformed JSON and ConfigError for a missing
// benchmark, unknown keys, wrong value types or out-of-range values.
RunConfig parse_config(const std::string& text);
// Throws IoError when the file cannot be read.
RunConfig load_config(const std::string& path);
// Complete JSON form of a config; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

// Header row followed by one row per accepted step, 17 significant digits.
// Throws ConfigError for an empty table and IoError on write failure.
void write_history_csv(const HistoryTable& table, const std::string& path);
// Throws IoError for an unreadable file and ConfigError for malformed content.
HistoryTable read_history_csv(const std::string& path);

// JSON summary: benchmark, termination, step counts and metrics (NaN as null).
void write_summary_json(const BenchmarkRun& run, const std::string& path);

using PointFields = std::map<std::string, std::vector<double>>;

// Nodal averages of the element-mean J, W and Cauchy stress norm
// ("J", "W_Pa", "cauchy_norm_Pa").
PointFields snapshot_fields(const MeshModel& mesh, const Eigen::VectorXd& d_full);

// Legacy ASCII unstructured grid with reference coordinates, a displacement
// vector, per-cell region and third-medium tags, and the given point fields.
// Throws ConfigError for inconsistent sizes and IoError on write failure.
void write_mesh_snapshot(const MeshModel& mesh, const Eigen::VectorXd& d_full, const PointFields& fields,
                         const std::string& path);

}  // namespace tmc
