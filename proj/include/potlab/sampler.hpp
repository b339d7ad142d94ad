#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "potlab/potential.hpp"
#include "potlab/types.hpp"

namespace potlab {

/// Parameters of the ensemble with density proportional to
/// prod |z_n - z_m|^beta * prod exp(-beta s g_K(z_n)). s = +inf confines the
/// points to K.
struct EnsembleParams {
  std::size_t N = 2;
  double s = 4.0;
  double beta = 2.0;
  double c0 = 0.5;

  double ell() const { return std::isinf(s) ? 0.0 : static_cast<double>(N) / s; }
  /// Throws ConstraintError unless N >= 1, beta > 0, c0 > 0, s > N and
  /// beta (s - N + 1) > 2 + c0.
  void validate() const;
};

/// -beta s sum_n g_K(z_n) + beta sum_{m<n} log|z_n - z_m|; -inf on
/// coincident points (and off K when s = inf).
double log_density_unnormalized(const EnsembleParams& p, const CompactSet& k, const Configuration& c);

/// Membership in the low-energy set
/// sum_{m<n} log|z_n - z_m| - (N-1) sum_n g_K(z_n) >= -(I[omega_K] + eps) N(N-1)/2.
bool in_low_energy_set(const EnsembleParams& p, const CompactSet& k, const Configuration& c, double eps);

struct ChainConfig {
  std::size_t steps = 200000;   // single-site proposals after burn-in
  std::size_t burn_in = 20000;  // single-site proposals used for tuning
  std::size_t thin = 16;        // store every thin-th post-burn-in state
  double step_scale = 0.0;      // initial proposal sd; 0: 0.5 cap(K) / sqrt(N)
  double target_acceptance = 0.35;
  std::size_t recompute_every = 10000;
};

/// Metropolis chain with single-site isotropic Gaussian proposals.
struct Chain {
  EnsembleParams params;
  CompactSet set;
  ChainConfig config;
  std::uint64_t seed = 0;

  std::vector<Configuration> states;  // thinned post-burn-in states
  std::vector<double> log_densities;  // unnormalized log density per stored state

  double step_scale = 0.0;  // frozen value after burn-in tuning
  double burn_in_acceptance = 0.0;
  double acceptance_rate = 0.0;  // post-burn-in
  std::size_t accepted = 0;      // post-burn-in accepted proposals
  std::size_t steps_done = 0;    // post-burn-in proposals performed
  bool stuck = false;            // no acceptance at all during burn-in

  Configuration current;
  double current_log_density = 0.0;
  std::string rng_state;  // serialized std::mt19937_64 engine
};

/// Burn-in with Robbins-Monro step tuning toward target_acceptance, then
/// cfg.steps proposals with the step frozen. Starts from equilibrium_sample.
Chain run_chain(const EnsembleParams& p, const CompactSet& k, const ChainConfig& cfg, std::uint64_t seed);

/// Continue a chain (fresh or loaded from disk) for `steps` more proposals;
/// bit-identical to a single longer run.
void extend_chain(Chain& chain, std::size_t steps);

/// Fraction of stored states outside the low-energy set; needs >= 1000 states.
double tail_mass_estimate(const Chain& chain, double eps);

/// Split-chain potential scale reduction of a scalar trace (two halves).
double split_rhat(std::span<const double> trace);

}  // namespace potlab
