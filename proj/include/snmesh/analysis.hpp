#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snmesh/dgcore.hpp"

namespace snmesh {

/// sqrt(mean |a_i - b_i|^2). InvalidArgument on empty input or length mismatch.
double rmse(std::span<const double> computed, std::span<const double> reference);

struct ConvergencePoint {
  double value;  // K or M
  double rmse;
};

/// RMSE = C K^-A (algebraic) or RMSE = C exp(-c1 M) (spectral).
struct FitResult {
  double rate;       // A or c1
  double intercept;  // C
  double residual;   // root-mean-square residual of the line fit in log RMSE
};

/// Least squares on (log K, log RMSE). DomainError for non-positive data, InvalidArgument for < 2 points.
FitResult fit_algebraic(std::span<const ConvergencePoint> points);

/// Least squares on (M, log RMSE). Same error rules.
FitResult fit_spectral(std::span<const ConvergencePoint> points);

enum class FitKind { algebraic, spectral };

struct ConvergenceRecord {
  std::string variant;
  std::string sweep;  // "K" or "M"
  FitKind kind = FitKind::algebraic;
  std::vector<ConvergencePoint> points;  // all measured points, sweep value increasing
  std::vector<bool> used;                // points that entered the fit
  std::optional<FitResult> fit;
};

/// Fits the points whose RMSE is at least 10 * gate (the rest sit at the reference's accuracy).
/// An algebraic fit is kept only with >= 3 usable points spanning a factor >= 4 in K; a spectral
/// fit needs >= 2 usable points.
ConvergenceRecord make_record(std::string variant, std::string sweep, FitKind kind,
                              std::vector<ConvergencePoint> points, double gate = 0.0);

/// baseline C / candidate C. NumericalError if either record lacks a fit or the candidate C is 0.
double intercept_improvement(const ConvergenceRecord& baseline, const ConvergenceRecord& candidate);

/// Half-width of the light cone used for error evaluation: t + x0, t + 3 sigma for Gaussian kinds,
/// t for the plane pulse (whose moving mesh only covers [-t, t]).
double analysis_half_width(const SourceSpec& spec, double t);

/// 201 (by default) equally spaced points on [-w, w], w = analysis_half_width.
std::vector<double> analysis_grid(const SourceSpec& spec, double t, int points = 201);

struct OracleOptions {
  int order = 10;        // M_ref
  int cell_factor = 4;   // K_ref = cell_factor * K_max
  int angle_factor = 4;  // N_ref = angle_factor * N_study
  double gate = 1e-9;    // required RMSE between the K_ref and K_ref/2 oracles
  std::string cache_dir;  // empty: $SNMESH_CACHE_DIR, else ./snmesh-cache
};

struct ReferenceSolution {
  std::vector<double> x;
  std::vector<double> phi;
  double gate_rmse = 0.0;  // measured oracle self-convergence (0 for exact references)
  bool from_cache = false;
  std::string fingerprint;
  std::string path;  // cache file, empty for exact references
};

/// The oracle configuration for a study config: uncollided source, moving mesh, elevated resolution.
RunConfig oracle_config(const RunConfig& study, int k_max, const OracleOptions& options, bool half_cells = false);

/// Exact scalar flux for MMS; otherwise the gated high-resolution solve, cached by fingerprint.
/// NumericalError when the gate fails.
ReferenceSolution reference_solution(const RunConfig& study, int k_max, std::span<const double> points,
                                     const OracleOptions& options = {});

/// 64-bit FNV-1a hash, hex encoded.
std::string fingerprint(const std::string& text);

/// Directory for oracle files: options value, then $SNMESH_CACHE_DIR, then ./snmesh-cache.
std::string cache_directory(const OracleOptions& options);

}  // namespace snmesh
