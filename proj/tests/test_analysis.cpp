#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "snmesh/analysis.hpp"
#include "snmesh/errors.hpp"

using namespace snmesh;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("snmesh-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("rmse examples") {
  CHECK(rmse(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0.0);
  CHECK(rmse(std::vector<double>{1, 0}, std::vector<double>{0, 0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(rmse(std::vector<double>{3}, std::vector<double>{1}) == 2.0);
  CHECK_THROWS_AS(rmse(std::vector<double>{1, 2}, std::vector<double>{1}), InvalidArgument);
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("property: rmse is a metric") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 17;
    std::vector<double> a(n), b(n), c(n);
    for (int i = 0; i < n; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
      c[i] = g(rng);
    }
    CHECK(rmse(a, b) == rmse(b, a));
    CHECK(rmse(a, a) == 0.0);
    CHECK(rmse(a, b) > 0.0);
    CHECK(rmse(a, c) <= rmse(a, b) + rmse(b, c) + 1e-15);
  }
}

TEST_CASE("fit_algebraic examples") {
  const std::vector<ConvergencePoint> two{{2, 1e-2}, {4, 2.5e-3}};
  const FitResult f = fit_algebraic(two);
  CHECK(f.rate == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(0.04).epsilon(1e-14));

  const std::vector<ConvergencePoint> flat{{2, 0.1}, {4, 0.1}};
  CHECK(std::abs(fit_algebraic(flat).rate) < 1e-15);
  CHECK(fit_algebraic(flat).intercept == doctest::Approx(0.1).epsilon(1e-14));

  std::vector<ConvergencePoint> model;
  for (double K : {2.0, 4.0, 8.0, 16.0}) model.push_back({K, 0.5 * std::pow(K, -3.0)});
  const FitResult m = fit_algebraic(model);
  CHECK(std::abs(m.rate - 3.0) < 1e-12);
  CHECK(std::abs(m.intercept - 0.5) < 1e-12);
  CHECK(m.residual < 1e-12);

  CHECK_THROWS_AS(fit_algebraic(std::vector<ConvergencePoint>{{2, 0.1}}), InvalidArgument);
  CHECK_THROWS_AS(fit_algebraic(std::vector<ConvergencePoint>{{2, 0.1}, {4, 0.0}}), DomainError);
  CHECK_THROWS_AS(fit_algebraic(std::vector<ConvergencePoint>{{0, 0.1}, {4, 0.2}}), DomainError);
}

TEST_CASE("fit_spectral examples") {
  std::vector<ConvergencePoint> model;
  for (double M : {2.0, 4.0, 6.0, 8.0}) model.push_back({M, std::exp(-1.3 * M)});
  const FitResult f = fit_spectral(model);
  CHECK(std::abs(f.rate - 1.3) < 1e-12);
  CHECK(std::abs(f.intercept - 1.0) < 1e-12);
  const std::vector<ConvergencePoint> flat{{2, 0.3}, {4, 0.3}, {6, 0.3}};
  CHECK(std::abs(fit_spectral(flat).rate) < 1e-15);
  CHECK_THROWS_AS(fit_spectral(std::vector<ConvergencePoint>{{2, -1.0}, {4, 0.1}}), DomainError);
}

TEST_CASE("property: fits recover model parameters under 1% noise") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(-0.01, 0.01);
  std::uniform_real_distribution<double> rate(0.5, 4.0);
  std::uniform_real_distribution<double> lc(-8.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double A = rate(rng);
    const double C = std::exp(lc(rng));
    std::vector<ConvergencePoint> alg, spec, alg_clean;
    for (double K : {2.0, 4.0, 8.0, 16.0, 32.0}) {
      alg.push_back({K, C * std::pow(K, -A) * (1.0 + unit(rng))});
      alg_clean.push_back({K, C * std::pow(K, -A)});
    }
    for (double M : {2.0, 4.0, 6.0, 8.0, 10.0}) spec.push_back({M, C * std::exp(-A * M) * (1.0 + unit(rng))});
    CHECK(std::abs(fit_algebraic(alg).rate - A) < 0.05);
    CHECK(std::abs(fit_spectral(spec).rate - A) < 0.05);
    CHECK(std::abs(fit_algebraic(alg_clean).rate - A) < 1e-12);
    CHECK(std::abs(fit_algebraic(alg_clean).intercept / C - 1.0) < 1e-12);
  }
}

TEST_CASE("make_record: gate exclusion and minimum span") {
  const std::vector<ConvergencePoint> pts{{2, 1e-3}, {4, 1.25e-4}, {8, 1.5625e-5}, {16, 1e-9}};
  const ConvergenceRecord r = make_record("v", "K", FitKind::algebraic, pts, 1e-9);
  CHECK(r.used == std::vector<bool>{true, true, true, false});
  REQUIRE(r.fit);
  CHECK(r.fit->rate == doctest::Approx(3.0).epsilon(1e-12));

  // two usable points (RMSE >= 1e-4): no algebraic fit
  const ConvergenceRecord r2 = make_record("v", "K", FitKind::algebraic, pts, 1e-5);
  CHECK(r2.used == std::vector<bool>{true, true, false, false});
  CHECK(!r2.fit);
  // three points spanning only a factor 3
  const std::vector<ConvergencePoint> narrow{{2, 1e-3}, {3, 5e-4}, {6, 1e-4}};
  CHECK(!make_record("v", "K", FitKind::algebraic, narrow).fit);
  // spectral needs two
  CHECK(make_record("v", "M", FitKind::spectral, pts, 1e-6).fit);
  CHECK_THROWS_AS(make_record("v", "K", FitKind::algebraic, {{4, 1e-3}, {2, 1e-4}}), InvalidArgument);
}

TEST_CASE("intercept_improvement") {
  std::vector<ConvergencePoint> base, cand;
  for (double K : {2.0, 4.0, 8.0, 16.0}) {
    base.push_back({K, 0.04705 * std::pow(K, -1.0)});
    cand.push_back({K, 0.0006706 * std::pow(K, -1.0)});
  }
  const ConvergenceRecord b = make_record("standard-static", "K", FitKind::algebraic, base);
  const ConvergenceRecord c = make_record("uncollided-moving", "K", FitKind::algebraic, cand);
  CHECK(intercept_improvement(b, b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(intercept_improvement(b, c) == doctest::Approx(0.04705 / 0.0006706).epsilon(1e-10));
  CHECK(0.04705 / 0.0006706 == doctest::Approx(70.0).epsilon(0.01));
  CHECK(0.4140 / 0.0004731 == doctest::Approx(875.0).epsilon(0.001));
  ConvergenceRecord none = c;
  none.fit.reset();
  CHECK_THROWS_AS(intercept_improvement(b, none), NumericalError);
  ConvergenceRecord zero = c;
  zero.fit->intercept = 0.0;
  CHECK_THROWS_AS(intercept_improvement(b, zero), NumericalError);
}

TEST_CASE("analysis grid") {
  SourceSpec s;
  s.kind = SourceKind::square_source;
  s.x0 = 0.5;
  const std::vector<double> x = analysis_grid(s, 1.0);
  CHECK(x.size() == 201);
  CHECK(x.front() == -1.5);
  CHECK(x.back() == 1.5);
  CHECK(x[100] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  s.kind = SourceKind::gaussian_pulse;
  s.sigma = 0.5;
  CHECK(analysis_half_width(s, 1.0) == 2.5);
  s.kind = SourceKind::plane_pulse;
  CHECK(analysis_half_width(s, 1.0) == 1.0);
}

TEST_CASE("fingerprint") {
  CHECK(fingerprint("") == "cbf29ce484222325");
  CHECK(fingerprint("a") == "af63dc4c8601ec8c");
  CHECK(fingerprint("kind=mms") != fingerprint("kind=mms "));
}

TEST_CASE("oracle configuration") {
  RunConfig study;
  study.spec.kind = SourceKind::square_source;
  study.mode = SourceMode::standard;
  study.mesh = MeshMode::static_mesh;
  study.angles = 16;
  study.order = 6;
  const OracleOptions opts;
  const RunConfig ref = oracle_config(study, 16, opts);
  CHECK(ref.mode == SourceMode::uncollided);
  CHECK(ref.mesh == MeshMode::moving);
  CHECK(ref.order == 10);
  CHECK(ref.cells == 64);
  CHECK(ref.angles == 64);
  CHECK(oracle_config(study, 16, opts, true).cells == 32);
}

TEST_CASE("reference_solution: MMS is exact") {
  RunConfig cfg;
  cfg.spec.kind = SourceKind::mms;
  cfg.spec.x0 = 0.1;
  cfg.mode = SourceMode::standard;
  const std::vector<double> x = analysis_grid(cfg.spec, 1.0);
  const ReferenceSolution r = reference_solution(cfg, 4, x);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(r.phi[i] == mms_solution(x[i], 1.0, 0.1).phi);
  CHECK(r.path.empty());
}

TEST_CASE("reference_solution: cache is deterministic and gated") {
  RunConfig cfg;
  cfg.spec.kind = SourceKind::gaussian_pulse;
  cfg.angles = 4;
  cfg.order = 2;
  cfg.cells = 2;
  cfg.t_final = 0.5;
  const std::vector<double> x = analysis_grid(cfg.spec, cfg.t_final, 21);
  OracleOptions opts;
  opts.order = 4;
  opts.cell_factor = 2;
  opts.angle_factor = 1;
  opts.gate = 1.0;
  opts.cache_dir = scratch("cache").string();

  const ReferenceSolution first = reference_solution(cfg, 2, x, opts);
  CHECK(!first.from_cache);
  REQUIRE(std::filesystem::exists(first.path));
  const std::string bytes = slurp(first.path);
  CHECK(bytes.rfind("# oracle kind=gaussian-pulse", 0) == 0);

  const ReferenceSolution second = reference_solution(cfg, 2, x, opts);
  CHECK(second.from_cache);
  CHECK(second.phi == first.phi);
  CHECK(second.gate_rmse == first.gate_rmse);

  // recomputation writes the same bytes
  std::filesystem::remove(first.path);
  const ReferenceSolution third = reference_solution(cfg, 2, x, opts);
  CHECK(!third.from_cache);
  CHECK(slurp(third.path) == bytes);

  // no temporary files are left behind
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(opts.cache_dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);

  // a different problem gets a different file; a failing gate throws
  cfg.t_final = 0.6;
  OracleOptions strict = opts;
  strict.gate = 1e-30;
  CHECK_THROWS_AS(reference_solution(cfg, 2, analysis_grid(cfg.spec, 0.6, 21), strict), NumericalError);
  std::filesystem::remove_all(opts.cache_dir);
}

TEST_CASE("cache directory precedence") {
  OracleOptions o;
  o.cache_dir = "/tmp/explicit";
  CHECK(cache_directory(o) == "/tmp/explicit");
  o.cache_dir.clear();
  ::setenv("SNMESH_CACHE_DIR", "/tmp/from-env", 1);
  CHECK(cache_directory(o) == "/tmp/from-env");
  ::unsetenv("SNMESH_CACHE_DIR");
  CHECK(cache_directory(o) == "snmesh-cache");
}
