#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cokrig/errors.hpp"

namespace cokrig::quadrature {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on P_n started from the Chebyshev-like guess.
GaussLegendreRule make_gauss_legendre(std::size_t n);

/// Shared 64-point rule, built once.
const GaussLegendreRule& gauss_legendre_64();

template <class F>
double integrate_fixed(const F& f, double a, double b, const GaussLegendreRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

namespace detail {

template <class F>
void adaptive_step(const F& f, double a, double b, double whole, double tol, int depth,
                   int max_depth, const GaussLegendreRule& rule, AdaptiveResult& out) {
  const double mid = 0.5 * (a + b);
  const double left = integrate_fixed(f, a, mid, rule);
  const double right = integrate_fixed(f, mid, b, rule);
  const double diff = std::abs(left + right - whole);
  if (diff <= tol) {
    out.value += left + right;
    out.error_estimate += diff;
    out.intervals += 2;
    return;
  }
  if (depth >= max_depth)
    throw ConvergenceError("adaptive quadrature: no convergence on [" + std::to_string(a) +
                           ", " + std::to_string(b) + "] after " + std::to_string(depth) +
                           " bisections");
  adaptive_step(f, a, mid, left, 0.5 * tol, depth + 1, max_depth, rule, out);
  adaptive_step(f, mid, b, right, 0.5 * tol, depth + 1, max_depth, rule, out);
}

}  // namespace detail

/// Recursive bisection: an interval is accepted once the rule on its two
/// halves agrees with the rule on the whole to the (halved) tolerance.
template <class F>
AdaptiveResult integrate_adaptive(const F& f, double a, double b, double abs_tol,
                                  int max_depth = 48,
                                  const GaussLegendreRule& rule = gauss_legendre_64()) {
  AdaptiveResult out;
  if (a == b) return out;
  const double whole = integrate_fixed(f, a, b, rule);
  detail::adaptive_step(f, a, b, whole, abs_tol, 0, max_depth, rule, out);
  return out;
}

}  // namespace cokrig::quadrature
