#include "snmesh/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "snmesh/errors.hpp"

namespace snmesh {

namespace {

constexpr double kNewtonTolerance = 1e-15;
constexpr int kMaxNewtonIterations = 100;

// Mirror the positive half onto the negative half so the rule is exactly symmetric.
void symmetrize(QuadratureSet& rule) {
  const std::size_t n = rule.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
}

QuadratureSet build_lobatto(int n) {
  // Interior nodes are the roots of P'_{n-1}; Newton on (x P_N - P_{N-1}) with N = n-1,
  // seeded by the Chebyshev-Gauss-Lobatto points.
  const int order = n - 1;
  QuadratureSet rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * i / order);
    double p_n = 0.0;
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
      double p_prev = 1.0;
      double p_cur = x;
      for (int k = 2; k <= order; ++k) {
        const double p_next = ((2.0 * k - 1.0) * x * p_cur - (k - 1.0) * p_prev) / k;
        p_prev = p_cur;
        p_cur = p_next;
      }
      p_n = p_cur;
      const double step = (x * p_cur - p_prev) / (n * p_cur);
      x -= step;
      if (std::abs(step) < kNewtonTolerance) break;
    }
    double p_prev = 1.0;
    double p_cur = x;
    for (int k = 2; k <= order; ++k) {
      const double p_next = ((2.0 * k - 1.0) * x * p_cur - (k - 1.0) * p_prev) / k;
      p_prev = p_cur;
      p_cur = p_next;
    }
    p_n = p_cur;
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / (static_cast<double>(order) * n * p_n * p_n);
  }
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;
  symmetrize(rule);
  return rule;
}

QuadratureSet build_legendre(int n) {
  QuadratureSet rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Roots ordered from -1 upward.
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    LegendrePair p{};
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
      p = legendre(n, x);
      const double step = p.value / p.derivative;
      x -= step;
      if (std::abs(step) < kNewtonTolerance) break;
    }
    p = legendre(n, x);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * p.derivative * p.derivative);
  }
  symmetrize(rule);
  return rule;
}

template <typename Builder>
const QuadratureSet& cached(std::map<int, std::unique_ptr<QuadratureSet>>& cache,
                            std::mutex& mutex, int n, Builder build) {
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<QuadratureSet>(build(n));
  return *slot;
}

}  // namespace

LegendrePair legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0;
  double p_cur = x;
  double d_prev = 0.0;
  double d_cur = 1.0;
  for (int k = 2; k <= n; ++k) {
    const double p_next = ((2.0 * k - 1.0) * x * p_cur - (k - 1.0) * p_prev) / k;
    // P'_k = P'_{k-2} + (2k-1) P_{k-1}
    const double d_next = d_prev + (2.0 * k - 1.0) * p_cur;
    p_prev = p_cur;
    p_cur = p_next;
    d_prev = d_cur;
    d_cur = d_next;
  }
  return {p_cur, d_cur};
}

void legendre_values(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t k = 2; k < out.size(); ++k) {
    out[k] = ((2.0 * k - 1.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / static_cast<double>(k);
  }
}

const QuadratureSet& gauss_lobatto(int n_points) {
  if (n_points < 2) {
    throw InvalidArgument("gauss_lobatto: need at least 2 points, got " + std::to_string(n_points));
  }
  static std::map<int, std::unique_ptr<QuadratureSet>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n_points, build_lobatto);
}

const QuadratureSet& gauss_legendre(int n_points) {
  if (n_points < 1) {
    throw InvalidArgument("gauss_legendre: need at least 1 point, got " + std::to_string(n_points));
  }
  static std::map<int, std::unique_ptr<QuadratureSet>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n_points, build_legendre);
}

}  // namespace snmesh
