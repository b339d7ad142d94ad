#pragma once

#include <cstddef>
#include <span>

#include "potlab/types.hpp"

namespace potlab {

struct TransportResult {
  double cost = 0.0;
  bool optimal = false;
  std::size_t pivots = 0;
};

/// Minimum-cost transport of `supply` at `sources` onto `demand` at `sinks`
/// with ground cost min(|x - y|, truncation), by the primal network simplex
/// method on the complete bipartite graph. Total supply and demand are
/// rescaled to their common mean before solving. max_pivots = 0 picks a
/// size-dependent default.
TransportResult solve_transport(std::span<const cplx> sources, std::span<const double> supply,
                                std::span<const cplx> sinks, std::span<const double> demand,
                                double truncation, std::size_t max_pivots = 0);

}  // namespace potlab
