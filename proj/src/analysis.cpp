#include "snmesh/analysis.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "snmesh/errors.hpp"

namespace snmesh {

double rmse(std::span<const double> computed, std::span<const double> reference) {
  if (computed.empty()) throw InvalidArgument("rmse: empty input");
  if (computed.size() != reference.size()) throw InvalidArgument("rmse: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < computed.size(); ++i) {
    const double d = computed[i] - reference[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(computed.size()));
}

namespace {

FitResult fit_line(std::span<const ConvergencePoint> points, bool log_x, const char* who) {
  if (points.size() < 2) throw InvalidArgument(std::string(who) + ": need at least two points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    if (!(p.rmse > 0.0) || (log_x && !(p.value > 0.0)))
      throw DomainError(std::string(who) + ": sweep values and RMSE must be positive");
    xs.push_back(log_x ? std::log(p.value) : p.value);
    ys.push_back(std::log(p.rmse));
    sx += xs.back();
    sy += ys.back();
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError(std::string(who) + ": sweep values must differ");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    res += r * r;
  }
  return {-slope, std::exp(intercept), std::sqrt(res / n)};
}

}  // namespace

FitResult fit_algebraic(std::span<const ConvergencePoint> points) {
  return fit_line(points, true, "fit_algebraic");
}

FitResult fit_spectral(std::span<const ConvergencePoint> points) { return fit_line(points, false, "fit_spectral"); }

ConvergenceRecord make_record(std::string variant, std::string sweep, FitKind kind,
                              std::vector<ConvergencePoint> points, double gate) {
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].value > points[i - 1].value)) throw InvalidArgument("make_record: sweep values must increase");
  ConvergenceRecord rec;
  rec.variant = std::move(variant);
  rec.sweep = std::move(sweep);
  rec.kind = kind;
  rec.points = std::move(points);
  std::vector<ConvergencePoint> usable;
  for (const auto& p : rec.points) {
    const bool ok = p.rmse > 0.0 && p.rmse >= 10.0 * gate;
    rec.used.push_back(ok);
    if (ok) usable.push_back(p);
  }
  if (kind == FitKind::algebraic) {
    if (usable.size() >= 3 && usable.back().value >= 4.0 * usable.front().value) rec.fit = fit_algebraic(usable);
  } else if (usable.size() >= 2) {
    rec.fit = fit_spectral(usable);
  }
  return rec;
}

double intercept_improvement(const ConvergenceRecord& baseline, const ConvergenceRecord& candidate) {
  if (!baseline.fit || !candidate.fit) throw NumericalError("intercept_improvement: record without a fit");
  if (baseline.kind != FitKind::algebraic || candidate.kind != FitKind::algebraic)
    throw InvalidArgument("intercept_improvement: both records need the algebraic model");
  if (candidate.fit->intercept == 0.0) throw NumericalError("intercept_improvement: candidate intercept is zero");
  return baseline.fit->intercept / candidate.fit->intercept;
}

double analysis_half_width(const SourceSpec& spec, double t) {
  switch (spec.kind) {
    case SourceKind::gaussian_pulse:
    case SourceKind::gaussian_source:
      return t + 3.0 * spec.sigma;
    case SourceKind::plane_pulse:
      return t;
    default:
      return t + spec.x0;
  }
}

std::vector<double> analysis_grid(const SourceSpec& spec, double t, int points) {
  if (points < 2) throw InvalidArgument("analysis_grid: need at least two points");
  const double w = analysis_half_width(spec, t);
  std::vector<double> x(points);
  for (int i = 0; i < points; ++i) x[i] = -w + 2.0 * w * i / (points - 1);
  x.front() = -w;
  x.back() = w;
  return x;
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

std::string fingerprint(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string cache_directory(const OracleOptions& options) {
  if (!options.cache_dir.empty()) return options.cache_dir;
  if (const char* env = std::getenv("SNMESH_CACHE_DIR"); env && *env) return env;
  return "snmesh-cache";
}

RunConfig oracle_config(const RunConfig& study, int k_max, const OracleOptions& options, bool half_cells) {
  if (k_max < 1) throw InvalidArgument("oracle_config: K_max must be positive");
  RunConfig ref = study;
  ref.mode = SourceMode::uncollided;
  ref.mesh = MeshMode::moving;
  ref.order = options.order;
  ref.cells = options.cell_factor * k_max / (half_cells ? 2 : 1);
  ref.angles = options.angle_factor * study.angles;
  return ref;
}

namespace {

std::string format_row(double x, double y) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, y);
  return buf;
}

bool read_cache(const std::filesystem::path& path, const std::string& header, std::span<const double> points,
                ReferenceSolution& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line) || line != header) return false;
  if (!std::getline(in, line) || line.rfind("# gate_rmse=", 0) != 0) return false;
  out.gate_rmse = std::strtod(line.c_str() + 12, nullptr);
  if (!std::getline(in, line) || line != "x,phi") return false;
  out.x.clear();
  out.phi.clear();
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) return false;
    out.x.push_back(std::strtod(line.c_str(), nullptr));
    out.phi.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  if (out.x.size() != points.size()) return false;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (out.x[i] != points[i]) return false;
  return true;
}

void write_cache(const std::filesystem::path& path, const std::string& header, const ReferenceSolution& ref) {
  std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  static std::atomic<int> serial{0};
  tmp += ".tmp." + std::to_string(static_cast<long long>(::getpid())) + "." + std::to_string(serial++);
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw NumericalError("cannot write oracle cache " + tmp.string());
    out << header << '\n';
    char gate[64];
    std::snprintf(gate, sizeof gate, "# gate_rmse=%.17g\n", ref.gate_rmse);
    out << gate << "x,phi\n";
    for (std::size_t i = 0; i < ref.x.size(); ++i) out << format_row(ref.x[i], ref.phi[i]);
    if (!out) throw NumericalError("failed writing oracle cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

ReferenceSolution reference_solution(const RunConfig& study, int k_max, std::span<const double> points,
                                     const OracleOptions& options) {
  ReferenceSolution out;
  out.x.assign(points.begin(), points.end());
  if (study.spec.kind == SourceKind::mms) {
    for (double x : points) out.phi.push_back(study.spec.amplitude * mms_solution(x, study.t_final, study.spec.x0).phi);
    out.fingerprint = "exact";
    return out;
  }

  const RunConfig ref = oracle_config(study, k_max, options);
  const RunConfig half = oracle_config(study, k_max, options, true);
  std::ostringstream key;
  key << ref.describe() << " | gate_cells=" << half.cells << " | points=" << points.size();
  for (double x : points) key << ' ' << format_row(x, 0.0);
  out.fingerprint = fingerprint(key.str());
  const std::string header = "# oracle " + ref.describe() + " gate_cells=" + std::to_string(half.cells);
  const std::filesystem::path path = std::filesystem::path(cache_directory(options)) / ("oracle-" + out.fingerprint + ".csv");
  out.path = path.string();

  if (read_cache(path, header, points, out)) {
    out.from_cache = true;
    if (!(out.gate_rmse < options.gate))
      throw NumericalError("oracle gate failed (cached): RMSE " + sci(out.gate_rmse) + " >= " +
                           sci(options.gate) + " for " + ref.describe());
    return out;
  }

  const TransportSolver fine(ref);
  const SolutionState fine_state = fine.solve().state;
  out.phi = fine.scalar_flux(fine_state, points).total;
  const TransportSolver coarse(half);
  const SolutionState coarse_state = coarse.solve().state;
  const std::vector<double> coarse_phi = coarse.scalar_flux(coarse_state, points).total;
  out.gate_rmse = rmse(out.phi, coarse_phi);
  write_cache(path, header, out);
  if (!(out.gate_rmse < options.gate))
    throw NumericalError("oracle gate failed: RMSE " + sci(out.gate_rmse) + " between K=" +
                         std::to_string(ref.cells) + " and K=" + std::to_string(half.cells) + " exceeds " +
                         sci(options.gate) + " for " + ref.describe());
  return out;
}

}  // namespace snmesh
