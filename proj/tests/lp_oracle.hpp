#pragma once

// Dense tableau simplex for max c^T x, A x <= b, x >= 0 with b >= 0
// (the origin is feasible). Bland's rule, so it terminates.

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "potlab/types.hpp"

namespace oracle {

inline double simplex_max(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                          const std::vector<double>& c) {
  const std::size_t m = a.size(), n = c.size();
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][n + m] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
  constexpr double eps = 1e-12;
  while (true) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == n + m) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > eps) {
        const double ratio = t[i][n + m] / t[i][enter];
        if (ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) return std::numeric_limits<double>::infinity();
    const double p = t[leave][enter];
    for (double& v : t[leave]) v /= p;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (std::size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  return t[m][n + m];
}

// Primal bounded-Lipschitz LP: max sum (mu_i - nu_i) f_i over |f_i| <= 1,
// |f_i - f_j| <= |x_i - x_j|, with the substitution g = f + 1 >= 0.
inline double bl_primal(const std::vector<potlab::cplx>& x, const std::vector<double>& mu,
                        const std::vector<double>& nu) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> a;
  std::vector<double> b, c(n);
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = mu[i] - nu[i];
    shift += c[i];
    std::vector<double> row(n, 0.0);
    row[i] = 1.0;
    a.push_back(row);
    b.push_back(2.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> row(n, 0.0);
      row[i] = 1.0;
      row[j] = -1.0;
      a.push_back(row);
      b.push_back(std::abs(x[i] - x[j]));
    }
  }
  return simplex_max(a, b, c) - shift;
}

}  // namespace oracle
