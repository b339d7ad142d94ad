#pragma once

#include <optional>

#include "potlab/fekete.hpp"
#include "potlab/potential.hpp"
#include "potlab/sampler.hpp"

namespace potlab {

/// Leading coefficient of the n-th orthonormal polynomial for the weight
/// exp(-2 s g) on the unit disk: sqrt((n+1)(s-n-1)/(pi s)); s = inf gives
/// sqrt((n+1)/pi). Requires s > n + 1.
double kappa_disk(std::size_t n, double s);

/// log n! by exact summation.
double log_factorial(std::size_t n);

/// log Z_{N,s,2} on the unit disk: log N! - 2 sum_{n<N} log kappa_disk(n, s).
double log_partition_disk_exact(std::size_t n, double s);

/// log pi + 1 + x^{-1}(1 - x) log(1 - x) with the limits at x = 0 and x = 1.
double theta(double x);

/// log_partition_disk_exact(N, s) - theta(N/s) N.
double asymptotic_residual(std::size_t n, double s);

/// log Z_{N,s,2} - [log Z_{N,inf,2} - sum_{k=1}^{N} log(s - k) + N log s] on the disk.
double bridge_residual(std::size_t n, double s);

struct LowerBoundConfig {
  std::size_t m = 8;        // inner curve at dilation 1 - 1/m
  double epsilon = 0.05;    // smoothing radius
  std::size_t atoms = 256;  // atoms on the inner curve
};

struct PartitionBounds {
  double lower = 0.0;
  double upper = 0.0;
  double lower_energy = 0.0;    // I[nu~]
  double lower_green = 0.0;     // int g_K d nu~
  double lower_entropy = 0.0;   // int log a d nu~
  double upper_field = 0.0;     // log int w_K^{beta (s+1-N)} dA
};

/// The smoothed test measure of the lower bound: atoms equally spaced in the
/// uniformizing angle on the curve psi(r e^{i theta}), r = 1 - 1/m, for sets
/// with interior, and on the boundary itself for a segment.
SmoothedMeasure lower_bound_measure(const CompactSet& k, const LowerBoundConfig& cfg);

/// upper = beta log_delta(fekete) + N log int exp(-beta (s+1-N) g_K) dA;
/// lower = -beta N(N-1)/2 I[nu~] - beta s N int g_K d nu~ - N int log a d nu~.
PartitionBounds partition_bounds(const CompactSet& k, const EnsembleParams& p, const FeketeResult& fekete,
                                 const LowerBoundConfig& cfg = {});

struct CubatureValue {
  double log_value = 0.0;
  double value = 0.0;
  double error = 0.0;  // absolute error estimate of value
  double radius = 1.0; // exterior truncation in the uniformizing variable
  bool converged = false;
};

/// Z_{N,s,beta} by adaptive cubature over interior and exterior patches of
/// every coordinate (N <= 3). The exterior is truncated at |w| = R with the
/// neglected tail below 1e-9 relative.
CubatureValue partition_cubature(const CompactSet& k, const EnsembleParams& p, double rel_tol = 1e-9);

struct PartitionReport {
  EnsembleParams params;
  std::optional<double> exact;     // disk, beta = 2
  std::optional<double> cubature;  // N <= 3
  std::optional<double> cubature_error;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> asymptote;  // -N(N+1) I[omega_K] + theta(ell) N (beta = 2)
  std::optional<double> residual;
};

PartitionReport partition_report(const CompactSet& k, const EnsembleParams& p, const FeketeResult& fekete,
                                 const LowerBoundConfig& cfg = {});

}  // namespace potlab
