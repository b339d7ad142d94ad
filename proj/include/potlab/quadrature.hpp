#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace potlab {

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;  // |I_n - I_{n/2}| at the last refinement
  bool converged = false;
  std::size_t nodes = 0;
};

/// Mean of a 2*pi-periodic function, (1/2pi) * integral over one period, by the
/// trapezoid rule with dyadic refinement. Nodes sit at 2*pi*(k + offset)/n so
/// that singular points at theta = 0, pi/2, pi are never sampled for the
/// default offset.
template <class F>
auto periodic_mean(F&& f, double tol = 1e-10, int max_log2 = 18, int min_log2 = 4,
                   double offset = 0.5) {
  using T = decltype(f(0.0));
  QuadratureResult<T> out;
  T previous{};
  bool have_previous = false;
  for (int level = min_log2; level <= max_log2; ++level) {
    const std::size_t n = std::size_t{1} << level;
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    T sum{};
    for (std::size_t k = 0; k < n; ++k) sum += f(h * (static_cast<double>(k) + offset));
    const T estimate = sum / static_cast<double>(n);
    out.value = estimate;
    out.nodes = n;
    if (have_previous) {
      out.error = std::abs(estimate - previous);
      if (out.error < tol) {
        out.converged = true;
        return out;
      }
    }
    previous = estimate;
    have_previous = true;
  }
  return out;
}

/// Adaptive Gauss-Kronrod on [a, b]; infinite limits are allowed. `tol` is
/// relative to the L1 norm of f; bisection stops after max_depth levels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, double* error = nullptr, unsigned max_depth = 20);

/// Same, splitting at the given interior breakpoints (kinks of the integrand).
double integrate_pieces(const std::function<double(double)>& f, std::span<const double> knots,
                        double tol = 1e-12);

struct CubatureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t regions = 0;
  bool converged = false;
};

using Integrand = std::function<double(std::span<const double>)>;

/// Adaptive cubature over a box with the degree-7/5 Genz-Malik embedded rule
/// (dimension >= 2). Regions are bisected along the axis with the largest
/// fourth divided difference; the region with the largest error estimate is
/// refined first.
CubatureResult adaptive_cubature(const Integrand& f, std::span<const double> lower,
                                 std::span<const double> upper, double rel_tol,
                                 double abs_tol = 0.0, std::size_t max_evaluations = 20'000'000);

/// Nodes and weights of the n-point Gauss-Legendre rule on [a, b].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n, double a, double b);

}  // namespace potlab
