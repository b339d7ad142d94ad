#pragma once

#include <cstdint>
#include <vector>

#include "potlab/potential.hpp"
#include "potlab/types.hpp"

namespace potlab {

/// log delta_N(w_K) at c: sum_{m<n} log|z_n - z_m| - (N-1) sum_n g_K(z_n).
/// -inf when two points coincide.
double log_delta(const CompactSet& k, const Configuration& c);

/// Complex gradient (d/dx + i d/dy per point) of log_delta, with pair
/// distances floored at `floor`.
std::vector<cplx> log_delta_gradient(const CompactSet& k, const Configuration& c, double floor = 0.0);

struct FeketeOptions {
  std::size_t starts = 0;  // 0: max(8, ceil(N/8))
  std::size_t max_iterations = 5000;
  double gradient_tol = 1e-8;  // multiplied by N
  double jitter = 0.1;         // multiplied by cap(K)
  unsigned threads = 0;        // 0: POTLAB_THREADS or 1
};

struct FeketeResult {
  Configuration configuration;
  double log_delta = 0.0;
  double max_green_violation = 0.0;
  std::vector<double> trace;  // objective per iteration of the winning start
  std::size_t iterations = 0;
  std::size_t best_start = 0;
  std::size_t converged_starts = 0;
  bool converged = false;
};

/// Multistart projected gradient ascent (Barzilai-Borwein steps with
/// monotone backtracking) for the weighted Fekete problem; iterates are kept
/// in K by CompactSet::project. Returns the best start.
FeketeResult solve_fekete(const CompactSet& k, std::size_t n, std::uint64_t seed,
                          const FeketeOptions& opts = {});

/// exp(2 log_delta / (N (N - 1))) for the solved configuration.
double capacity_estimate(const FeketeResult& r);
double capacity_estimate(const CompactSet& k, std::size_t n, std::uint64_t seed,
                         const FeketeOptions& opts = {});

/// Worker count from POTLAB_THREADS (default 1).
unsigned default_threads();

/// Deterministic 64-bit stream seed derived from (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace potlab
