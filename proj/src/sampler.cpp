#include "potlab/sampler.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "potlab/errors.hpp"

namespace potlab {

void EnsembleParams::validate() const {
  if (N < 1) throw ConstraintError("ensemble: N must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConstraintError("ensemble: beta must be positive");
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw ConstraintError("ensemble: c0 must be positive");
  const auto n = static_cast<double>(N);
  if (!(s > n)) throw ConstraintError("ensemble: s must exceed N");
  if (!std::isinf(s) && !(beta * (s - n + 1.0) > 2.0 + c0)) {
    throw ConstraintError("ensemble: beta (s - N + 1) must exceed 2 + c0");
  }
}

namespace {

double field_term(const EnsembleParams& p, const CompactSet& k, cplx z) {
  const double g = k.green(z);
  if (std::isinf(p.s)) return g > kContainmentTol ? -kInf : 0.0;
  return -p.beta * p.s * g;
}

double full_log_density(const EnsembleParams& p, const CompactSet& k, std::span<const cplx> z) {
  double pairs = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      const double d = std::abs(z[i] - z[j]);
      if (d == 0.0) return -kInf;
      pairs += std::log(d);
    }
  }
  double field = 0.0;
  for (cplx x : z) field += field_term(p, k, x);
  return field + p.beta * pairs;
}

std::string save_rng(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

std::mt19937_64 load_rng(const std::string& state) {
  std::mt19937_64 rng;
  std::istringstream is(state);
  is >> rng;
  if (!is) throw SchemaError("chain: malformed rng state");
  return rng;
}

// One single-site Metropolis proposal; returns true when accepted.
bool metropolis_step(const EnsembleParams& p, const CompactSet& k, std::vector<cplx>& z,
                     double& log_density, double sd, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, z.size() - 1);
  std::normal_distribution<double> gauss(0.0, sd);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t i = pick(rng);
  const double dx = gauss(rng);
  const double dy = gauss(rng);
  const double u = unif(rng);
  const cplx old = z[i];
  const cplx proposal = old + cplx(dx, dy);
  const double field_new = field_term(p, k, proposal);
  if (field_new == -kInf) return false;
  double delta = field_new - field_term(p, k, old);
  double pairs = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (j == i) continue;
    const double dn = std::abs(proposal - z[j]);
    if (dn == 0.0) return false;
    pairs += std::log(dn) - std::log(std::abs(old - z[j]));
  }
  delta += p.beta * pairs;
  if (delta >= 0.0 || u < std::exp(delta)) {
    z[i] = proposal;
    log_density += delta;
    return true;
  }
  return false;
}

}  // namespace

double log_density_unnormalized(const EnsembleParams& p, const CompactSet& k, const Configuration& c) {
  if (c.size() != p.N) throw ConstraintError("log_density: configuration size differs from N");
  return full_log_density(p, k, c.points());
}

bool in_low_energy_set(const EnsembleParams& /*p*/, const CompactSet& k, const Configuration& c, double eps) {
  const std::size_t n = c.size();
  double pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::abs(c[i] - c[j]);
      if (d == 0.0) return false;
      pairs += std::log(d);
    }
  }
  double field = 0.0;
  for (cplx z : c.points()) field += k.green(z);
  const double nn = static_cast<double>(n);
  const double lhs = pairs - (nn - 1.0) * field;
  return lhs >= -(k.robin_energy() + eps) * nn * (nn - 1.0) / 2.0;
}

Chain run_chain(const EnsembleParams& p, const CompactSet& k, const ChainConfig& cfg, std::uint64_t seed) {
  p.validate();
  if (cfg.thin == 0) throw ConstraintError("chain: thin must be >= 1");
  if (!(cfg.target_acceptance > 0.0 && cfg.target_acceptance < 1.0)) {
    throw ConstraintError("chain: target acceptance must lie in (0, 1)");
  }
  Chain chain{p, k, cfg, seed, {}, {}, 0.0, 0.0, 0.0, 0, 0, false, equilibrium_sample(k, p.N, seed), 0.0, {}};
  std::mt19937_64 rng(seed ^ 0xa0761d6478bd642fULL);
  std::vector<cplx> z(chain.current.points().begin(), chain.current.points().end());
  double log_density = full_log_density(p, k, z);
  double log_sd = std::log(cfg.step_scale > 0.0 ? cfg.step_scale
                                                : 0.5 * k.capacity() / std::sqrt(static_cast<double>(p.N)));
  std::size_t accepted = 0;
  for (std::size_t t = 0; t < cfg.burn_in; ++t) {
    const bool ok = metropolis_step(p, k, z, log_density, std::exp(log_sd), rng);
    accepted += ok;
    const double gain = 1.0 / std::pow(1.0 + static_cast<double>(t) / static_cast<double>(p.N), 0.6);
    log_sd += gain * ((ok ? 1.0 : 0.0) - cfg.target_acceptance);
    if ((t + 1) % cfg.recompute_every == 0) log_density = full_log_density(p, k, z);
  }
  chain.burn_in_acceptance = cfg.burn_in > 0 ? static_cast<double>(accepted) / cfg.burn_in : 0.0;
  chain.stuck = cfg.burn_in > 0 && accepted == 0;
  chain.step_scale = std::exp(log_sd);
  chain.current = Configuration(z);
  chain.current_log_density = full_log_density(p, k, z);
  chain.rng_state = save_rng(rng);
  extend_chain(chain, cfg.steps);
  return chain;
}

void extend_chain(Chain& chain, std::size_t steps) {
  const EnsembleParams& p = chain.params;
  const CompactSet& k = chain.set;
  std::mt19937_64 rng = load_rng(chain.rng_state);
  std::vector<cplx> z(chain.current.points().begin(), chain.current.points().end());
  double log_density = chain.current_log_density;
  for (std::size_t t = 0; t < steps; ++t) {
    chain.accepted += metropolis_step(p, k, z, log_density, chain.step_scale, rng);
    ++chain.steps_done;
    if (chain.steps_done % chain.config.recompute_every == 0) log_density = full_log_density(p, k, z);
    if (chain.steps_done % chain.config.thin == 0) {
      chain.states.emplace_back(z);
      chain.log_densities.push_back(log_density);
    }
  }
  chain.acceptance_rate =
      chain.steps_done > 0 ? static_cast<double>(chain.accepted) / static_cast<double>(chain.steps_done) : 0.0;
  chain.current = Configuration(z);
  chain.current_log_density = log_density;
  chain.rng_state = save_rng(rng);
}

double tail_mass_estimate(const Chain& chain, double eps) {
  if (chain.states.size() < 1000) throw ConstraintError("tail_mass_estimate: needs >= 1000 stored states");
  std::size_t outside = 0;
  for (const Configuration& c : chain.states) {
    if (!in_low_energy_set(chain.params, chain.set, c, eps)) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(chain.states.size());
}

double split_rhat(std::span<const double> trace) {
  const std::size_t half = trace.size() / 2;
  if (half < 2) throw ConstraintError("split_rhat: trace too short");
  double means[2], vars[2];
  for (int c = 0; c < 2; ++c) {
    const auto part = trace.subspan(c * half, half);
    double m = 0.0;
    for (double x : part) m += x;
    m /= static_cast<double>(half);
    double v = 0.0;
    for (double x : part) v += (x - m) * (x - m);
    means[c] = m;
    vars[c] = v / static_cast<double>(half - 1);
  }
  const double n = static_cast<double>(half);
  const double w = 0.5 * (vars[0] + vars[1]);
  const double grand = 0.5 * (means[0] + means[1]);
  const double b = n * ((means[0] - grand) * (means[0] - grand) + (means[1] - grand) * (means[1] - grand));
  if (w == 0.0) return b == 0.0 ? 1.0 : kInf;
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

}  // namespace potlab
