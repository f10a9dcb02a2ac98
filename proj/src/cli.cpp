#include "snmesh/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "snmesh/errors.hpp"

namespace snmesh {

namespace {

RunConfig make_preset(SourceKind kind, int n, int m, int k, SourceMode mode, double t_final) {
  RunConfig c;
  c.spec.kind = kind;
  c.angles = n;
  c.order = m;
  c.cells = k;
  c.mode = mode;
  c.mesh = MeshMode::moving;
  c.t_final = t_final;
  return c;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw UsageError("value for '" + std::string(key) + "' is not a number: '" + s + "'");
  return v;
}

int parse_int(std::string_view key, std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw UsageError("value for '" + std::string(key) + "' is not an integer: '" + s + "'");
  return static_cast<int>(v);
}

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir.empty() ? "." : dir) / file).string();
}

}  // namespace

// ---------------------------------------------------------------------------
// Presets and settings

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = [] {
    std::vector<Preset> p;
    RunConfig mms = make_preset(SourceKind::mms, 32, 8, 4, SourceMode::standard, 1.0);
    mms.spec.x0 = 0.1;
    p.push_back({"mms", "manufactured solution, x0 = 0.1", mms});

    RunConfig gp = make_preset(SourceKind::gaussian_pulse, 64, 6, 8, SourceMode::uncollided, 1.0);
    gp.spec.sigma = 0.5;
    p.push_back({"gaussian-pulse", "Gaussian pulse, sigma = 0.5", gp});

    RunConfig gs = make_preset(SourceKind::gaussian_source, 64, 6, 8, SourceMode::uncollided, 1.0);
    gs.spec.sigma = 0.5;
    gs.spec.t0 = 5.0;
    p.push_back({"gaussian-source", "Gaussian source, sigma = 0.5, t0 = 5", gs});

    RunConfig pl = make_preset(SourceKind::plane_pulse, 256, 6, 8, SourceMode::uncollided, 1.0);
    pl.spec.x0 = 0.5;  // box half-width of the static-mesh standard treatment
    p.push_back({"plane-pulse", "plane pulse (static standard treatment uses a box of half-width x0)", pl});

    RunConfig sp = make_preset(SourceKind::square_pulse, 64, 6, 8, SourceMode::uncollided, 1.0);
    sp.spec.x0 = 0.5;
    p.push_back({"square-pulse", "square pulse, x0 = 0.5", sp});

    RunConfig ss = make_preset(SourceKind::square_source, 128, 6, 8, SourceMode::uncollided, 1.0);
    ss.spec.x0 = 0.5;
    ss.spec.t0 = 5.0;
    p.push_back({"square-source", "square source, x0 = 0.5, t0 = 5", ss});

    for (double c : {0.8, 1.2}) {
      RunConfig sc = sp;
      sc.spec.c = c;
      sc.spec.x0 = 0.5 / c;
      sc.t_final = 1.0 / c;
      p.push_back({c < 1.0 ? "square-pulse-c0.8" : "square-pulse-c1.2",
                   "square pulse with c != 1 and rescaled x0, t (maps onto the c = 1 problem at t = 1)", sc});
    }
    return p;
  }();
  return list;
}

RunConfig preset_config(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p.config;
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw UsageError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  try {
    if (key == "kind") config.spec.kind = source_kind_from_string(value);
    else if (key == "c") config.spec.c = parse_double(key, value);
    else if (key == "x0") config.spec.x0 = parse_double(key, value);
    else if (key == "t0") config.spec.t0 = parse_double(key, value);
    else if (key == "sigma") config.spec.sigma = parse_double(key, value);
    else if (key == "amplitude") config.spec.amplitude = parse_double(key, value);
    else if (key == "N") config.angles = parse_int(key, value);
    else if (key == "M") config.order = parse_int(key, value);
    else if (key == "K") config.cells = parse_int(key, value);
    else if (key == "mesh") config.mesh = mesh_mode_from_string(value);
    else if (key == "source_mode") config.mode = source_mode_from_string(value);
    else if (key == "t_final") config.t_final = parse_double(key, value);
    else if (key == "rtol") config.integrator.rtol = parse_double(key, value);
    else if (key == "atol") config.integrator.atol = parse_double(key, value);
    else throw UsageError("unknown setting '" + std::string(key) + "'");
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

// ---------------------------------------------------------------------------
// Variants

std::string variant_name(const Variant& v) {
  return std::string(to_string(v.mode)) + "-" + std::string(to_string(v.mesh));
}

Variant variant_from_string(std::string_view name) {
  for (const auto& v : all_variants())
    if (variant_name(v) == name) return v;
  throw UsageError("unknown variant '" + std::string(name) + "'");
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v{{SourceMode::uncollided, MeshMode::moving},
                                      {SourceMode::uncollided, MeshMode::static_mesh},
                                      {SourceMode::standard, MeshMode::moving},
                                      {SourceMode::standard, MeshMode::static_mesh}};
  return v;
}

std::string unsupported_reason(const RunConfig& config) {
  if (config.spec.kind == SourceKind::plane_pulse && config.mode == SourceMode::standard &&
      config.mesh == MeshMode::moving)
    return "the plane pulse with the standard source on a moving mesh does not converge and is not offered";
  try {
    config.validate();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

// ---------------------------------------------------------------------------
// Output

namespace {

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(c.spec.kind));
  j["c"] = c.spec.c;
  j["x0"] = c.spec.x0;
  j["t0"] = c.spec.t0;
  j["sigma"] = c.spec.sigma;
  j["amplitude"] = c.spec.amplitude;
  j["N"] = c.angles;
  j["M"] = c.order;
  j["K"] = c.cells;
  j["mesh"] = std::string(to_string(c.mesh));
  j["source_mode"] = std::string(to_string(c.mode));
  j["t_final"] = c.t_final;
  j["rtol"] = c.integrator.rtol;
  j["atol"] = c.integrator.atol;
  j["echo"] = c.describe();
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

nlohmann::ordered_json stats_json(const IntegrationStats& s) {
  return {{"accepted", s.accepted}, {"rejected", s.rejected}, {"rhs_evaluations", s.rhs_evaluations}};
}

}  // namespace

void write_manifest(const std::string& path, const RunManifest& manifest, const std::string& command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["config"] = manifest.config_echo;
  j["wall_seconds"] = manifest.wall_seconds;
  j["integrator"] = stats_json(manifest.stats);
  j["outputs"] = manifest.outputs;
  if (manifest.gate_rmse >= 0.0) j["gate_rmse"] = manifest.gate_rmse;
  write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// solve

SolveReport cmd_solve(const RunConfig& config, const std::string& out_dir) {
  if (const std::string why = unsupported_reason(config); !why.empty()) throw UsageError(why);
  const TransportSolver solver(config);
  const SolveResult result = solver.solve();
  const std::vector<double> grid = analysis_grid(config.spec, config.t_final);
  SolveReport report;
  report.flux = solver.scalar_flux(result.state, grid);

  ensure_dir(out_dir);
  const std::string csv = join_path(out_dir, "solution.csv");
  std::string text = "x,phi,phi_u,phi_collided\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    text += num(grid[i]) + "," + num(report.flux.total[i]) + "," + num(report.flux.uncollided[i]) + "," +
            num(report.flux.collided[i]) + "\n";
  write_text(csv, text);

  report.manifest.config_echo = config.describe();
  report.manifest.wall_seconds = result.wall_seconds;
  report.manifest.stats = result.stats;
  report.manifest.outputs = {csv};
  const std::string json = join_path(out_dir, "manifest.json");
  report.manifest.outputs.push_back(json);
  write_manifest(json, report.manifest, "solve");
  return report;
}

// ---------------------------------------------------------------------------
// converge

namespace {

RunConfig variant_config(const RunConfig& base, const Variant& v, const std::string& sweep, int value) {
  RunConfig c = base;
  c.mode = v.mode;
  c.mesh = v.mesh;
  if (sweep == "K") c.cells = value;
  else c.order = value;
  return c;
}

std::vector<Variant> requested_variants(const ConvergeRequest& r) {
  return r.variants.empty() ? all_variants() : r.variants;
}

void check_request(const ConvergeRequest& r) {
  if (r.sweep != "K" && r.sweep != "M") throw UsageError("sweep must be K or M");
  if (r.values.empty()) throw UsageError("no sweep values given");
  for (std::size_t i = 1; i < r.values.size(); ++i)
    if (r.values[i] <= r.values[i - 1]) throw UsageError("sweep values must be strictly increasing");
}

}  // namespace

ConvergeReport cmd_converge(const ConvergeRequest& request, const std::string& out_dir) {
  check_request(request);
  ConvergeReport report;
  const RunConfig& base = request.base;
  const std::vector<double> grid = analysis_grid(base.spec, base.t_final);
  const int k_max = request.sweep == "K" ? request.values.back() : base.cells;
  report.reference = reference_solution(base, k_max, grid, request.oracle);

  for (const Variant& v : requested_variants(request)) {
    std::vector<ConvergencePoint> points;
    for (int value : request.values) {
      const RunConfig cfg = variant_config(base, v, request.sweep, value);
      if (const std::string why = unsupported_reason(cfg); !why.empty()) {
        report.skipped.push_back(variant_name(v) + " " + request.sweep + "=" + std::to_string(value) + ": " + why);
        continue;
      }
      const TransportSolver solver(cfg);
      const SolveResult res = solver.solve();
      const ScalarFlux flux = solver.scalar_flux(res.state, grid);
      points.push_back({static_cast<double>(value), rmse(flux.total, report.reference.phi)});
    }
    if (points.empty()) continue;
    report.records.push_back(make_record(variant_name(v), request.sweep,
                                         request.sweep == "K" ? FitKind::algebraic : FitKind::spectral,
                                         std::move(points), report.reference.gate_rmse));
  }

  const ConvergenceRecord* baseline = nullptr;
  const ConvergenceRecord* best = nullptr;
  for (const auto& r : report.records) {
    if (r.variant == "standard-static") baseline = &r;
    if (r.variant == "uncollided-moving") best = &r;
  }
  if (request.sweep == "K" && baseline && best && baseline->fit && best->fit)
    report.improvement = intercept_improvement(*baseline, *best);

  ensure_dir(out_dir);
  const std::string csv = join_path(out_dir, "convergence.csv");
  std::string text = "variant,sweep,value,rmse,fit_A_or_c1,fit_C\n";
  for (const auto& r : report.records)
    for (const auto& p : r.points)
      text += r.variant + "," + r.sweep + "," + num(p.value) + "," + num(p.rmse) + "," +
              (r.fit ? num(r.fit->rate) : "") + "," + (r.fit ? num(r.fit->intercept) : "") + "\n";
  write_text(csv, text);

  nlohmann::ordered_json j;
  j["command"] = "converge";
  j["version"] = kVersion;
  j["config"] = config_json(base);
  j["sweep"] = request.sweep;
  j["values"] = request.values;
  j["reference"] = {{"fingerprint", report.reference.fingerprint},
                    {"path", report.reference.path},
                    {"gate_rmse", report.reference.gate_rmse},
                    {"gate", request.oracle.gate},
                    {"from_cache", report.reference.from_cache}};
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json e;
    e["variant"] = r.variant;
    e["fit_kind"] = r.kind == FitKind::algebraic ? "algebraic" : "spectral";
    if (r.fit) {
      e[r.kind == FitKind::algebraic ? "A" : "c1"] = r.fit->rate;
      e["C"] = r.fit->intercept;
      e["fit_residual"] = r.fit->residual;
    }
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i)
      pts.push_back({{"value", r.points[i].value}, {"rmse", r.points[i].rmse}, {"in_fit", static_cast<bool>(r.used[i])}});
    e["points"] = pts;
    recs.push_back(e);
  }
  j["records"] = recs;
  if (report.improvement) j["intercept_improvement"] = *report.improvement;
  j["skipped"] = report.skipped;
  const std::string json = join_path(out_dir, "convergence.json");
  write_text(json, j.dump(2) + "\n");
  report.outputs = {csv, json};
  return report;
}

// ---------------------------------------------------------------------------
// scalecheck

ScaleReport cmd_scalecheck(const RunConfig& base, double c, const std::string& out_dir) {
  if (!base.spec.is_pulse())
    throw UsageError("scalecheck applies to pulse problems only: the scaling holds for initial value problems "
                     "without a source");
  if (!(c > 0.0)) throw UsageError("scalecheck: c must be positive");
  RunConfig unit = base;
  unit.spec.c = 1.0;
  unit.spec.amplitude = base.spec.amplitude / c;  // the transform carries a factor c on the initial condition
  RunConfig direct = base;
  const ScaledParameters sp = scale_parameters(c, base.spec.x0, base.spec.sigma, base.t_final);
  direct.spec.c = c;
  direct.spec.x0 = sp.x0;
  direct.spec.sigma = sp.sigma;
  direct.t_final = sp.t;
  for (const RunConfig* cfg : {&unit, &direct})
    if (const std::string why = unsupported_reason(*cfg); !why.empty()) throw UsageError(why);

  const std::vector<double> grid = analysis_grid(direct.spec, direct.t_final);
  const TransportSolver direct_solver(direct);
  const ScalarFlux direct_flux = direct_solver.scalar_flux(direct_solver.solve().state, grid);

  std::vector<double> mapped(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) mapped[i] = c * grid[i];
  const TransportSolver unit_solver(unit);
  const ScalarFlux unit_flux = unit_solver.scalar_flux(unit_solver.solve().state, mapped);

  ScaleReport report;
  report.c = c;
  report.t_direct = direct.t_final;
  std::string text = "x,phi_direct,phi_scaled,difference\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double scaled =
        scale_solution([&](double, double, double) { return unit_flux.total[i]; }, c, grid[i], 0.0, direct.t_final);
    const double diff = direct_flux.total[i] - scaled;
    report.max_difference = std::max(report.max_difference, std::abs(diff));
    text += num(grid[i]) + "," + num(direct_flux.total[i]) + "," + num(scaled) + "," + num(diff) + "\n";
  }
  ensure_dir(out_dir);
  const std::string csv = join_path(out_dir, "scalecheck.csv");
  write_text(csv, text);
  nlohmann::ordered_json j;
  j["command"] = "scalecheck";
  j["version"] = kVersion;
  j["c"] = c;
  j["direct"] = config_json(direct);
  j["unit"] = config_json(unit);
  j["max_difference"] = report.max_difference;
  const std::string json = join_path(out_dir, "scalecheck.json");
  write_text(json, j.dump(2) + "\n");
  report.outputs = {csv, json};
  return report;
}

// ---------------------------------------------------------------------------
// bench

BenchReport cmd_bench(const ConvergeRequest& request, int repeats, const std::string& out_dir) {
  check_request(request);
  if (repeats < 1) throw UsageError("bench: repeats must be >= 1");
  const RunConfig& base = request.base;
  const std::vector<double> grid = analysis_grid(base.spec, base.t_final);
  const int k_max = request.sweep == "K" ? request.values.back() : base.cells;
  const ReferenceSolution ref = reference_solution(base, k_max, grid, request.oracle);

  BenchReport report;
  for (const Variant& v : requested_variants(request)) {
    for (int value : request.values) {
      const RunConfig cfg = variant_config(base, v, request.sweep, value);
      if (!unsupported_reason(cfg).empty()) continue;
      double total = 0.0;
      double error = 0.0;
      for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const TransportSolver solver(cfg);
        const SolutionState s = solver.solve().state;
        total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        error = rmse(solver.scalar_flux(s, grid).total, ref.phi);
      }
      report.rows.push_back({v, cfg.order, cfg.cells, total / repeats, error});
    }
  }
  ensure_dir(out_dir);
  const std::string csv = join_path(out_dir, "timing.csv");
  std::string text = "variant,M,K,mean_seconds,rmse\n";
  for (const auto& r : report.rows)
    text += variant_name(r.variant) + "," + std::to_string(r.order) + "," + std::to_string(r.cells) + "," +
            num(r.mean_seconds) + "," + num(r.rmse) + "\n";
  write_text(csv, text);
  report.outputs = {csv};
  return report;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

struct CommonFlags {
  std::string preset;
  std::string config_file;
  std::string out_dir = "snmesh-out";
  std::map<std::string, std::string> values;  // setting key -> flag text
  std::map<std::string, CLI::Option*> options;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--preset", f.preset, "problem preset");
  app->add_option("--config", f.config_file, "key=value settings file (applied after the preset)");
  app->add_option("--out-dir", f.out_dir, "output directory");
  const std::vector<std::pair<std::string, std::string>> flags{
      {"--kind", "kind"}, {"--c", "c"},          {"--x0", "x0"},       {"--t0", "t0"},
      {"--sigma", "sigma"}, {"--amplitude", "amplitude"}, {"--N", "N"}, {"--M", "M"},
      {"--K", "K"},       {"--mesh", "mesh"},    {"--source-mode", "source_mode"},
      {"--t,--t-final", "t_final"}, {"--rtol", "rtol"}, {"--atol", "atol"}};
  for (const auto& [flag, key] : flags) f.options[key] = app->add_option(flag, f.values[key], key);
}

RunConfig build_config(const CommonFlags& f) {
  RunConfig cfg = f.preset.empty() ? RunConfig{} : preset_config(f.preset);
  if (!f.config_file.empty()) apply_config_file(cfg, f.config_file);
  for (const auto& [key, opt] : f.options)
    if (opt->count() > 0) apply_setting(cfg, key, f.values.at(key));
  return cfg;
}

struct SweepFlags {
  std::string sweep = "K";
  std::vector<int> values;
  std::vector<std::string> variants;
  OracleOptions oracle;
};

void add_sweep(CLI::App* app, SweepFlags& s) {
  app->add_option("--sweep", s.sweep, "swept quantity: K or M")->check(CLI::IsMember({"K", "M"}));
  app->add_option("--values", s.values, "swept values, e.g. 2,4,8,16")->delimiter(',')->required();
  app->add_option("--variants", s.variants, "subset of uncollided-moving,uncollided-static,standard-moving,standard-static")
      ->delimiter(',');
  app->add_option("--ref-M", s.oracle.order, "oracle basis degree");
  app->add_option("--ref-cell-factor", s.oracle.cell_factor, "oracle K = factor * max K");
  app->add_option("--ref-angle-factor", s.oracle.angle_factor, "oracle N = factor * N");
  app->add_option("--gate", s.oracle.gate, "oracle self-convergence gate");
  app->add_option("--cache-dir", s.oracle.cache_dir, "oracle cache directory (default $SNMESH_CACHE_DIR)");
}

ConvergeRequest build_request(const CommonFlags& f, const SweepFlags& s) {
  ConvergeRequest r;
  r.base = build_config(f);
  r.sweep = s.sweep;
  r.values = s.values;
  for (const auto& v : s.variants) r.variants.push_back(variant_from_string(v));
  r.oracle = s.oracle;
  return r;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moving-mesh DG S_N transport solver and verification harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonFlags solve_flags, conv_flags, scale_flags, bench_flags;
  SweepFlags conv_sweep, bench_sweep;
  int repeats = 5;

  CLI::App* solve = app.add_subcommand("solve", "run one solve and write the scalar flux");
  add_common(solve, solve_flags);
  CLI::App* converge = app.add_subcommand("converge", "convergence sweep against the reference");
  add_common(converge, conv_flags);
  add_sweep(converge, conv_sweep);
  CLI::App* scale = app.add_subcommand("scalecheck", "compare a c != 1 pulse with the scaled c = 1 solve");
  add_common(scale, scale_flags);
  CLI::App* bench = app.add_subcommand("bench", "timed sweep (mean wall time and RMSE)");
  add_common(bench, bench_flags);
  add_sweep(bench, bench_sweep);
  bench->add_option("--repeats", repeats, "timed runs per configuration");
  app.add_subcommand("presets", "list the problem presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("presets")) {
      for (const auto& p : presets()) out << p.name << "  " << p.description << "\n    " << p.config.describe() << "\n";
    } else if (solve->parsed()) {
      const SolveReport r = cmd_solve(build_config(solve_flags), solve_flags.out_dir);
      out << "solved " << r.manifest.config_echo << "\n"
          << "wall " << r.manifest.wall_seconds << " s, steps " << r.manifest.stats.accepted << " accepted / "
          << r.manifest.stats.rejected << " rejected\n";
      for (const auto& p : r.manifest.outputs) out << "wrote " << p << "\n";
    } else if (converge->parsed()) {
      const ConvergeReport r = cmd_converge(build_request(conv_flags, conv_sweep), conv_flags.out_dir);
      out << "reference gate RMSE " << r.reference.gate_rmse << (r.reference.from_cache ? " (cached)" : "") << "\n";
      for (const auto& rec : r.records) {
        out << rec.variant;
        if (rec.fit)
          out << (rec.kind == FitKind::algebraic ? "  A=" : "  c1=") << rec.fit->rate << "  C=" << rec.fit->intercept;
        else
          out << "  (no fit)";
        out << "\n";
      }
      if (r.improvement) out << "intercept improvement (uncollided-moving over standard-static): " << *r.improvement << "\n";
      for (const auto& s : r.skipped) out << "skipped " << s << "\n";
      for (const auto& p : r.outputs) out << "wrote " << p << "\n";
    } else if (scale->parsed()) {
      RunConfig cfg = build_config(scale_flags);
      const double c = cfg.spec.c;
      const ScaleReport r = cmd_scalecheck(cfg, c, scale_flags.out_dir);
      out << "c=" << r.c << " t=" << r.t_direct << " max |difference| = " << r.max_difference << "\n";
      for (const auto& p : r.outputs) out << "wrote " << p << "\n";
    } else if (bench->parsed()) {
      const BenchReport r = cmd_bench(build_request(bench_flags, bench_sweep), repeats, bench_flags.out_dir);
      for (const auto& row : r.rows)
        out << variant_name(row.variant) << " M=" << row.order << " K=" << row.cells << "  " << row.mean_seconds
            << " s  rmse " << row.rmse << "\n";
      for (const auto& p : r.outputs) out << "wrote " << p << "\n";
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace snmesh
