#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "aptlab/errors.hpp"

namespace aptlab {

/// Gauss-Hermite rule rewritten for the standard normal:
/// E[g(Z)] ~ sum_i w_i g(z_i), exact for polynomials of degree < 2n.
struct NormalRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Roots of the physicists' H_n by Newton iteration on the orthonormal
// three-term recursion (Golub-Welsch-free, as in the classical gauher).
inline NormalRule build_normal_rule(int n) {
  require(n >= 1 && n <= 512, "Gauss-Hermite: node count must be in [1, 512]");
  using R = long double;
  const R pim4 = 0.7511255444649424828587030047762276930510L;  // pi^{-1/4}
  std::vector<R> x(n), w(n);
  const int m = (n + 1) / 2;
  R z = 0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(R(2 * n + 1)) - 1.85575L * std::pow(R(2 * n + 1), R(-0.16667L));
    } else if (i == 1) {
      z -= 1.14L * std::pow(R(n), R(0.426L)) / z;
    } else if (i == 2) {
      z = 1.86L * z - 0.86L * x[0];
    } else if (i == 3) {
      z = 1.91L * z - 0.91L * x[1];
    } else {
      z = 2.0L * z - x[i - 2];
    }
    R pp = 0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      R p1 = pim4, p2 = 0;
      for (int j = 0; j < n; ++j) {
        const R p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(R(2) / R(j + 1)) * p2 - std::sqrt(R(j) / R(j + 1)) * p3;
      }
      pp = std::sqrt(R(2 * n)) * p2;
      const R z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-17L * std::max<R>(1, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalError("Gauss-Hermite: Newton iteration did not converge");
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0L / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  NormalRule rule;
  const R inv_sqrt_pi = 1.0L / std::sqrt(std::numbers::pi_v<long double>);
  for (int i = n - 1; i >= 0; --i) {
    rule.nodes.push_back(static_cast<double>(std::numbers::sqrt2_v<long double> * x[i]));
    rule.weights.push_back(static_cast<double>(w[i] * inv_sqrt_pi));
  }
  return rule;
}

}  // namespace detail

/// Cached rule for n nodes.
inline const NormalRule& normal_rule(int n = 64) {
  static std::mutex mutex;
  static std::map<int, NormalRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::build_normal_rule(n)).first;
  return it->second;
}

}  // namespace aptlab
