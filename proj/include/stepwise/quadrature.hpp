#pragma once

#include <cmath>
#include <span>

#include "stepwise/error.hpp"

namespace stepwise::quadrature {

/// Rule for E[g(Z)], Z ~ N(0,1): sum_i w_i g(z_i).
struct NormalRule {
  std::span<const double> nodes;
  std::span<const double> weights;
};

/// Cached rule with n nodes (a multiple of kPanelNodes, at most kMaxNodes). Thread-safe.
NormalRule normal_rule(int n);

inline constexpr int kDefaultNodes = 64;
inline constexpr int kMaxNodes = 4096;
inline constexpr int kPanelNodes = 16;
inline constexpr double kHalfWidth = 10.0;
inline constexpr double kDefaultTolerance = 1e-10;

/// E[g(Z)] for Z ~ N(0,1), doubling the node count from 64 until two
/// successive estimates agree within tol.
template <class F>
double expect_normal(F&& g, double tol = kDefaultTolerance) {
  auto apply = [&](int n) {
    const NormalRule rule = normal_rule(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (rule.weights[i] == 0.0) continue;
      sum += rule.weights[i] * g(rule.nodes[i]);
    }
    return sum;
  };
  double prev = apply(kDefaultNodes);
  for (int n = 2 * kDefaultNodes; n <= kMaxNodes; n *= 2) {
    const double cur = apply(n);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  throw NumericalError("normal quadrature did not converge within 4096 nodes");
}

}  // namespace stepwise::quadrature
