#include "potlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "potlab/errors.hpp"

namespace potlab {

namespace {

constexpr double kPi = std::numbers::pi;

void check_order(std::size_t n) {
  if (n < 1 || n > 3) throw ConstraintError("statistics: order n must be 1, 2 or 3");
}

void check_chain(const Chain& chain) {
  if (chain.states.size() < 1000) throw ConstraintError("statistics: chain needs >= 1000 stored states");
}

double batch_stderr(std::span<const double> x, std::size_t batches, double* variance) {
  const std::size_t size = x.size() / batches;
  const std::size_t skip = x.size() - size * batches;
  std::vector<double> means(batches, 0.0);
  double mean = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < size; ++i) means[b] += x[skip + b * size + i];
    means[b] /= static_cast<double>(size);
    mean += means[b];
  }
  mean /= static_cast<double>(batches);
  double v = 0.0;
  for (double m : means) v += (m - mean) * (m - mean);
  v /= static_cast<double>(batches - 1);
  if (variance) {
    double s = 0.0, mu = 0.0;
    for (double xi : x) mu += xi;
    mu /= static_cast<double>(x.size());
    for (double xi : x) s += (xi - mu) * (xi - mu);
    *variance = s / static_cast<double>(x.size() - 1);
  }
  return std::sqrt(v / static_cast<double>(batches));
}

double z_component(double estimate, double target, double se) {
  const double diff = std::abs(estimate - target);
  if (se > 0.0) return diff / se;
  return diff <= 1e-12 * std::max(1.0, std::abs(target)) ? 0.0 : kInf;
}

}  // namespace

cplx symmetrize(const PointFunction& f, std::size_t n, const Configuration& c) {
  check_order(n);
  const std::size_t N = c.size();
  if (n > N) throw ConstraintError("symmetrize: n exceeds N");
  const auto z = c.points();
  cplx sum{};
  double count = 0.0;
  cplx buf[3];
  for (std::size_t i = 0; i < N; ++i) {
    buf[0] = z[i];
    if (n == 1) {
      sum += f({buf, 1});
      count += 1.0;
      continue;
    }
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i) continue;
      buf[1] = z[j];
      if (n == 2) {
        sum += f({buf, 2});
        count += 1.0;
        continue;
      }
      for (std::size_t l = 0; l < N; ++l) {
        if (l == i || l == j) continue;
        buf[2] = z[l];
        sum += f({buf, 3});
        count += 1.0;
      }
    }
  }
  return sum / count;
}

cplx tensor_integral(const PointFunction& f, std::size_t n, const Configuration& c) {
  check_order(n);
  const std::size_t N = c.size();
  const auto z = c.points();
  cplx sum{};
  cplx buf[3];
  const std::size_t total = static_cast<std::size_t>(std::pow(N, n));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (std::size_t d = 0; d < n; ++d) {
      buf[d] = z[r % N];
      r /= N;
    }
    sum += f({buf, n});
  }
  return sum / static_cast<double>(total);
}

cplx equilibrium_tensor_integral(const CompactSet& k, const PointFunction& f, std::size_t n, std::size_t nodes) {
  check_order(n);
  if (nodes == 0) nodes = n == 1 ? 512 : n == 2 ? 256 : 64;
  std::vector<cplx> pts(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    pts[i] = k.boundary_point(2.0 * kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(nodes));
  }
  return tensor_integral(f, n, Configuration(std::move(pts)));
}

LinearStatReport summarize(std::span<const cplx> values, cplx target) {
  LinearStatReport r;
  r.samples = values.size();
  if (r.samples < 4) throw ConstraintError("summarize: needs at least 4 values");
  r.batches = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(r.samples))));
  std::vector<double> re(values.size()), im(values.size());
  cplx mean{};
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
    mean += values[i];
  }
  r.estimate = mean / static_cast<double>(values.size());
  r.target = target;
  double var_re = 0.0;
  r.stderr_re = batch_stderr(re, r.batches, &var_re);
  r.stderr_im = batch_stderr(im, r.batches, nullptr);
  r.ess = r.stderr_re > 0.0 ? var_re / (r.stderr_re * r.stderr_re) : static_cast<double>(r.samples);
  r.z_score = std::max(z_component(r.estimate.real(), target.real(), r.stderr_re),
                       z_component(r.estimate.imag(), target.imag(), r.stderr_im));
  return r;
}

LinearStatReport linear_statistic(const Chain& chain, const PointFunction& f, std::size_t n) {
  check_order(n);
  check_chain(chain);
  std::vector<cplx> values;
  values.reserve(chain.states.size());
  for (const Configuration& c : chain.states) values.push_back(symmetrize(f, n, c));
  return summarize(values, equilibrium_tensor_integral(chain.set, f, n));
}

LinearStatReport moment_statistic(const Chain& chain, const std::function<cplx(cplx)>& f, unsigned k,
                                  unsigned m) {
  check_chain(chain);
  const auto power = [k, m](cplx a) { return std::pow(a, static_cast<double>(k)) * std::pow(std::conj(a), static_cast<double>(m)); };
  std::vector<cplx> values;
  values.reserve(chain.states.size());
  for (const Configuration& c : chain.states) {
    cplx a{};
    for (cplx z : c.points()) a += f(z);
    a /= static_cast<double>(c.size());
    values.push_back(k + m == 0 ? cplx{1.0} : power(a));
  }
  const cplx target_mean = equilibrium_tensor_integral(
      chain.set, [&](std::span<const cplx> z) { return f(z[0]); }, 1);
  return summarize(values, k + m == 0 ? cplx{1.0} : power(target_mean));
}

cplx Histogram::bin_center(std::size_t ix, std::size_t iy) const {
  const double hx = (grid.xmax - grid.xmin) / static_cast<double>(grid.nx);
  const double hy = (grid.ymax - grid.ymin) / static_cast<double>(grid.ny);
  return {grid.xmin + hx * (static_cast<double>(ix) + 0.5), grid.ymin + hy * (static_cast<double>(iy) + 0.5)};
}

double Histogram::cell_area() const {
  return (grid.xmax - grid.xmin) / static_cast<double>(grid.nx) * (grid.ymax - grid.ymin) /
         static_cast<double>(grid.ny);
}

Histogram intensity_histogram(const Chain& chain, const Grid& grid) {
  if (grid.nx == 0 || grid.ny == 0 || !(grid.xmax > grid.xmin) || !(grid.ymax > grid.ymin)) {
    throw ConstraintError("intensity_histogram: empty grid");
  }
  Histogram h;
  h.grid = grid;
  std::vector<double> counts(grid.nx * grid.ny, 0.0);
  std::size_t inside = 0;
  const double hx = (grid.xmax - grid.xmin) / static_cast<double>(grid.nx);
  const double hy = (grid.ymax - grid.ymin) / static_cast<double>(grid.ny);
  for (const Configuration& c : chain.states) {
    for (cplx z : c.points()) {
      ++h.particles;
      const double fx = (z.real() - grid.xmin) / hx, fy = (z.imag() - grid.ymin) / hy;
      if (fx < 0.0 || fy < 0.0 || fx >= static_cast<double>(grid.nx) || fy >= static_cast<double>(grid.ny)) continue;
      counts[static_cast<std::size_t>(fx) * grid.ny + static_cast<std::size_t>(fy)] += 1.0;
      ++inside;
    }
  }
  h.density.resize(counts.size());
  const double norm = h.particles > 0 ? 1.0 / (static_cast<double>(h.particles) * h.cell_area()) : 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) h.density[i] = counts[i] * norm;
  h.inside_fraction = h.particles > 0 ? static_cast<double>(inside) / static_cast<double>(h.particles) : 0.0;
  return h;
}

double annulus_fraction(const Chain& chain, cplx center, double r0, double r1) {
  std::size_t total = 0, hit = 0;
  for (const Configuration& c : chain.states) {
    for (cplx z : c.points()) {
      const double r = std::abs(z - center);
      ++total;
      if (r >= r0 && r <= r1) ++hit;
    }
  }
  return total > 0 ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

AngularProfile angular_profile(const Chain& chain, std::size_t bins, cplx center) {
  check_chain(chain);
  if (bins == 0) throw ConstraintError("angular_profile: bins must be positive");
  std::vector<std::vector<double>> per_bin(bins, std::vector<double>(chain.states.size(), 0.0));
  for (std::size_t t = 0; t < chain.states.size(); ++t) {
    const Configuration& c = chain.states[t];
    for (cplx z : c.points()) {
      double a = std::arg(z - center);
      if (a < 0.0) a += 2.0 * kPi;
      const auto b = std::min(bins - 1, static_cast<std::size_t>(a / (2.0 * kPi) * static_cast<double>(bins)));
      per_bin[b][t] += 1.0 / static_cast<double>(c.size());
    }
  }
  AngularProfile out;
  const auto batches = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(chain.states.size()))));
  for (const auto& x : per_bin) {
    double m = 0.0;
    for (double v : x) m += v;
    out.mass.push_back(m / static_cast<double>(x.size()));
    out.standard_error.push_back(batch_stderr(x, batches, nullptr));
  }
  return out;
}

RateReport rate_function(const Measure& nu, const CompactSet& k, double ell, double beta, std::string descriptor) {
  if (!(beta > 0.0)) throw ConstraintError("rate_function: beta must be positive");
  RateReport r;
  r.descriptor = std::move(descriptor);
  r.ell = ell;
  r.beta = beta;
  r.weighted_energy = weighted_energy(nu, k, ell);
  r.robin_energy = k.robin_energy();
  r.rate = r.weighted_energy == kInf ? kInf : 0.5 * beta * (r.weighted_energy - r.robin_energy);
  if (std::abs(r.rate) <= 1e-8) {
    constexpr std::size_t kAtoms = 512;
    std::vector<cplx> eq(kAtoms);
    for (std::size_t i = 0; i < kAtoms; ++i) eq[i] = k.boundary_point(2.0 * kPi * (i + 0.5) / kAtoms);
    const AtomicMeasure omega = AtomicMeasure::uniform(eq);
    const AtomicMeasure proxy = std::visit(
        [&](const auto& m) -> AtomicMeasure {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, AtomicMeasure>) {
            return m;
          } else if constexpr (std::is_same_v<T, SmoothedMeasure>) {
            return m.polar_proxy(4, 16);
          } else {
            std::vector<cplx> pts(kAtoms);
            for (std::size_t i = 0; i < kAtoms; ++i) pts[i] = m.point(2.0 * kPi * (i + 0.5) / kAtoms);
            return AtomicMeasure::uniform(pts);
          }
        },
        nu);
    r.at_minimizer = bl_distance(proxy, omega).value <= 1e-2;
  }
  return r;
}

RateReport rate_function(const Measure& nu, const CompactSet& k, const EnsembleParams& p, std::string descriptor) {
  return rate_function(nu, k, p.ell(), p.beta, std::move(descriptor));
}

std::vector<ScanRow> positivity_scan(const CompactSet& k, std::span<const double> factors,
                                     std::span<const double> ells, double beta) {
  std::vector<ScanRow> rows;
  for (double r : factors) {
    const Measure nu = CurveMeasure::dilation(k, r);
    for (double ell : ells) rows.push_back({r, ell, rate_function(nu, k, ell, beta).rate});
  }
  return rows;
}

}  // namespace potlab
