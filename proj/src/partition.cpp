#include "potlab/partition.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "potlab/errors.hpp"
#include "potlab/measures.hpp"

namespace potlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

double kappa_disk(std::size_t n, double s) {
  const auto n1 = static_cast<double>(n + 1);
  if (std::isinf(s) && s > 0) return std::sqrt(n1 / kPi);
  if (!(s > n1)) throw ConstraintError("kappa_disk: requires s > n + 1");
  return std::sqrt(n1 * (s - n1) / (kPi * s));
}

double log_factorial(std::size_t n) {
  double v = 0.0;
  for (std::size_t k = 2; k <= n; ++k) v += std::log(static_cast<double>(k));
  return v;
}

double log_partition_disk_exact(std::size_t n, double s) {
  if (n < 1) throw ConstraintError("log_partition_disk_exact: N must be >= 1");
  if (!(s > static_cast<double>(n))) throw ConstraintError("log_partition_disk_exact: requires s > N");
  double v = log_factorial(n);
  for (std::size_t k = 0; k < n; ++k) v -= 2.0 * std::log(kappa_disk(k, s));
  return v;
}

double theta(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ConstraintError("theta: x must lie in [0, 1]");
  if (x == 0.0) return std::log(kPi);
  if (x == 1.0) return std::log(kPi) + 1.0;
  return std::log(kPi) + 1.0 + (1.0 - x) * std::log1p(-x) / x;
}

double asymptotic_residual(std::size_t n, double s) {
  const double ell = std::isinf(s) ? 0.0 : static_cast<double>(n) / s;
  return log_partition_disk_exact(n, s) - theta(ell) * static_cast<double>(n);
}

double bridge_residual(std::size_t n, double s) {
  if (std::isinf(s)) return 0.0;
  double bridge = log_partition_disk_exact(n, kInf) + static_cast<double>(n) * std::log(s);
  for (std::size_t k = 1; k <= n; ++k) bridge -= std::log(s - static_cast<double>(k));
  return log_partition_disk_exact(n, s) - bridge;
}

SmoothedMeasure lower_bound_measure(const CompactSet& k, const LowerBoundConfig& cfg) {
  if (cfg.m < 2 || cfg.atoms < 1 || !(cfg.epsilon > 0.0)) {
    throw ConstraintError("lower bound: requires m >= 2, atoms >= 1, epsilon > 0");
  }
  const bool thin = std::holds_alternative<Segment>(k.shape());
  const CurveMeasure curve = thin ? CurveMeasure::equilibrium(k)
                                  : CurveMeasure::dilation(k, 1.0 - 1.0 / static_cast<double>(cfg.m));
  std::vector<cplx> pts(cfg.atoms);
  for (std::size_t i = 0; i < cfg.atoms; ++i) {
    pts[i] = curve.point(2.0 * kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(cfg.atoms));
  }
  return SmoothedMeasure(AtomicMeasure::uniform(pts), cfg.epsilon);
}

PartitionBounds partition_bounds(const CompactSet& k, const EnsembleParams& p, const FeketeResult& fekete,
                                 const LowerBoundConfig& cfg) {
  p.validate();
  if (fekete.configuration.size() != p.N) throw ConstraintError("partition_bounds: Fekete size differs from N");
  const auto n = static_cast<double>(p.N);
  PartitionBounds b;
  const double gamma = std::isinf(p.s) ? kInf : p.beta * (p.s + 1.0 - n);
  b.upper_field = std::log(k.field_integral(gamma));
  b.upper = p.beta * fekete.log_delta + n * b.upper_field;

  const SmoothedMeasure nu = lower_bound_measure(k, cfg);
  b.lower_energy = continuous_energy(nu).value;
  b.lower_green = nu.integrate([&](cplx z) { return k.green(z); }, 24, 96);
  b.lower_entropy = nu.integrate([&](cplx z) { return std::log(nu.density(z)); }, 32, 128);
  if (std::isinf(p.s) && b.lower_green > 0.0) {
    b.lower = -kInf;
  } else {
    const double field = std::isinf(p.s) ? 0.0 : p.beta * p.s * n * b.lower_green;
    b.lower = -p.beta * n * (n - 1.0) / 2.0 * b.lower_energy - field - n * b.lower_entropy;
  }
  return b;
}

namespace {

// Coordinates of one point on a patch: interior (rho in [0,1], phi) or
// exterior (u = log|w| in [0, log R], phi). Returns the point and dA weight.
struct PatchPoint {
  cplx z;
  double jacobian;
  double green;
};

PatchPoint interior_point(const CompactSet& k, double rho, double phi) {
  if (const auto* d = std::get_if<Disk>(&k.shape())) {
    return {d->center + std::polar(d->radius * rho, phi), d->radius * d->radius * rho, 0.0};
  }
  const auto& e = std::get<Ellipse>(k.shape());
  return {e.center + cplx(e.semi_major * rho * std::cos(phi), e.semi_minor * rho * std::sin(phi)),
          e.semi_major * e.semi_minor * rho, 0.0};
}

PatchPoint exterior_point(const CompactSet& k, double u, double phi) {
  const double rho = std::exp(u);
  const cplx w = std::polar(rho, phi);
  return {k.map()(w), std::norm(k.map().derivative(w)) * rho * rho, u};
}

}  // namespace

CubatureValue partition_cubature(const CompactSet& k, const EnsembleParams& p, double rel_tol) {
  p.validate();
  if (p.N > 3) throw ConstraintError("partition_cubature: N must be <= 3");
  if (std::holds_alternative<ExteriorMap>(k.shape())) {
    throw ConstraintError("partition_cubature: needs a closed-form interior parametrization");
  }
  const std::size_t n = p.N;
  const bool has_interior = !std::holds_alternative<Segment>(k.shape());
  const bool has_exterior = !std::isinf(p.s);
  CubatureValue out;
  if (has_exterior) {
    const double gamma = p.beta * (p.s - static_cast<double>(n) + 1.0) - 2.0;
    out.radius = std::exp(std::log(1e9) / gamma);
  }
  const double log_r = std::log(out.radius);

  std::vector<int> patches;
  if (has_interior) patches.push_back(0);
  if (has_exterior) patches.push_back(1);
  const std::size_t combos = static_cast<std::size_t>(std::pow(patches.size(), n));
  std::vector<double> lower(2 * n, 0.0), upper(2 * n, 0.0);
  out.converged = true;
  for (std::size_t combo = 0; combo < combos; ++combo) {
    std::vector<int> kind(n);
    std::size_t c = combo;
    for (std::size_t i = 0; i < n; ++i) {
      kind[i] = patches[c % patches.size()];
      c /= patches.size();
    }
    for (std::size_t i = 0; i < n; ++i) {
      lower[2 * i] = 0.0;
      upper[2 * i] = kind[i] == 0 ? 1.0 : log_r;
      lower[2 * i + 1] = 0.0;
      upper[2 * i + 1] = 2.0 * kPi;
    }
    const Integrand f = [&](std::span<const double> x) {
      double log_w = 0.0, weight = 1.0;
      cplx z[3];
      for (std::size_t i = 0; i < n; ++i) {
        const PatchPoint pt = kind[i] == 0 ? interior_point(k, x[2 * i], x[2 * i + 1])
                                           : exterior_point(k, x[2 * i], x[2 * i + 1]);
        z[i] = pt.z;
        weight *= pt.jacobian;
        if (pt.green > 0.0) log_w -= p.beta * p.s * pt.green;
      }
      double pairs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) pairs += std::log(std::abs(z[i] - z[j]));
      }
      if (weight == 0.0) return 0.0;
      return weight * std::exp(log_w + p.beta * pairs);
    };
    const CubatureResult r = adaptive_cubature(f, lower, upper, rel_tol * 0.1, 0.0, 50'000'000);
    out.value += r.value;
    out.error += r.error;
    out.converged = out.converged && r.converged;
  }
  out.log_value = std::log(out.value);
  return out;
}

PartitionReport partition_report(const CompactSet& k, const EnsembleParams& p, const FeketeResult& fekete,
                                 const LowerBoundConfig& cfg) {
  PartitionReport r;
  r.params = p;
  const PartitionBounds b = partition_bounds(k, p, fekete, cfg);
  r.lower = b.lower;
  r.upper = b.upper;
  const bool unit_disk = [&] {
    const auto* d = std::get_if<Disk>(&k.shape());
    return d && d->radius == 1.0 && d->center == cplx{};
  }();
  if (p.beta == 2.0) {
    const auto n = static_cast<double>(p.N);
    r.asymptote = -n * (n + 1.0) * k.robin_energy() + theta(p.ell()) * n;
    if (unit_disk) {
      r.exact = log_partition_disk_exact(p.N, p.s);
      r.residual = asymptotic_residual(p.N, p.s);
    }
  }
  if (p.N <= 3 && !std::holds_alternative<ExteriorMap>(k.shape())) {
    const CubatureValue c = partition_cubature(k, p);
    r.cubature = c.log_value;
    r.cubature_error = c.error / c.value;
  }
  return r;
}

}  // namespace potlab
