#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "snmesh/analysis.hpp"
#include "snmesh/dgcore.hpp"

namespace snmesh {

inline constexpr const char* kVersion = "snmesh 1.0.0";

/// Bad flags, unknown presets, or a configuration the solver refuses. Exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Preset {
  std::string name;
  std::string description;
  RunConfig config;
};

const std::vector<Preset>& presets();
RunConfig preset_config(std::string_view name);

/// Applies one key=value setting (keys: kind c x0 t0 sigma amplitude N M K mesh source_mode t_final
/// rtol atol). UsageError for unknown keys or unparsable values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Reads a flat key=value file ('#' comments, blank lines ignored) and applies every entry.
void apply_config_file(RunConfig& config, const std::string& path);

/// One of the four method variants: source treatment x mesh.
struct Variant {
  SourceMode mode;
  MeshMode mesh;
};
std::string variant_name(const Variant& v);  // e.g. "uncollided-moving"
Variant variant_from_string(std::string_view name);
const std::vector<Variant>& all_variants();  // uncollided-moving, uncollided-static, standard-moving, standard-static

/// Empty when the variant can run this problem, otherwise the reason it is skipped.
std::string unsupported_reason(const RunConfig& config);

struct RunManifest {
  std::string config_echo;
  double wall_seconds = 0.0;
  IntegrationStats stats;
  std::vector<std::string> outputs;
  double gate_rmse = -1.0;  // negative when no oracle was involved
};

/// Writes a manifest as JSON.
void write_manifest(const std::string& path, const RunManifest& manifest, const std::string& command);

// solve

struct SolveReport {
  RunManifest manifest;
  ScalarFlux flux;
};
SolveReport cmd_solve(const RunConfig& config, const std::string& out_dir);

// converge

struct ConvergeRequest {
  RunConfig base;                  // problem, N, t_final, and the fixed M or K
  std::string sweep = "K";         // "K" or "M"
  std::vector<int> values;         // swept K or M values, increasing
  std::vector<Variant> variants;   // empty: all four
  OracleOptions oracle;
};

struct ConvergeReport {
  std::vector<ConvergenceRecord> records;
  std::vector<std::string> skipped;  // "variant value: reason"
  ReferenceSolution reference;
  std::optional<double> improvement;  // uncollided-moving over standard-static intercept, K sweeps only
  std::vector<std::string> outputs;
};
ConvergeReport cmd_converge(const ConvergeRequest& request, const std::string& out_dir);

// scalecheck

struct ScaleReport {
  double c = 1.0;
  double max_difference = 0.0;
  double t_direct = 0.0;  // time of the c problem
  std::vector<std::string> outputs;
};
/// `base` is the c = 1 problem (x0, sigma, t_final); the direct solve uses x0/c, sigma/c, t_final/c.
ScaleReport cmd_scalecheck(const RunConfig& base, double c, const std::string& out_dir);

// bench

struct BenchRow {
  Variant variant;
  int order;
  int cells;
  double mean_seconds;
  double rmse;
};
struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<std::string> outputs;
};
BenchReport cmd_bench(const ConvergeRequest& request, int repeats, const std::string& out_dir);

/// Full command-line entry point. Returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace snmesh
