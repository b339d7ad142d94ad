#include "potlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "potlab/errors.hpp"

namespace potlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Pair energy of two unit disks at center distance delta.
double unit_pair_energy(double delta, double tol, double* error) {
  if (error) *error = 0.0;
  if (delta <= 0.0) return 0.25;
  if (delta >= 2.0) return -std::log(delta);
  const auto alpha = [delta](double t) {
    if (delta < 1.0 && t <= 1.0 - delta) return kPi;
    const double c = (t * t + delta * delta - 1.0) / (2.0 * t * delta);
    return std::acos(std::clamp(c, -1.0, 1.0));
  };
  const auto integrand = [&](double t) {
    const double v = t >= 1.0 ? -std::log(t) : 0.5 * (1.0 - t * t);
    return v * 2.0 * t * alpha(t) / kPi;
  };
  std::vector<double> knots{std::max(0.0, delta - 1.0), std::abs(1.0 - delta), 1.0, delta + 1.0};
  std::sort(knots.begin(), knots.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] <= knots[i]) continue;
    // cosine substitution smooths the square-root endpoint behaviour of alpha
    const double a = knots[i], h = knots[i + 1] - knots[i];
    const auto smoothed = [&](double u) {
      return integrand(a + 0.5 * h * (1.0 - std::cos(kPi * u))) * 0.5 * h * kPi * std::sin(kPi * u);
    };
    double err = 0.0;
    total += integrate(smoothed, 0.0, 1.0, tol, &err, 8);
    if (error) *error += err;
  }
  return total;
}

double antiderivative_half_chord(double r, double x) {
  const double h = std::sqrt(std::max(0.0, r * r - x * x));
  return 0.5 * (x * h + r * r * std::asin(std::clamp(x / r, -1.0, 1.0)));
}

}  // namespace

double disk_potential(double t, double eps) {
  if (t >= eps) return -std::log(t);
  return -std::log(eps) + 0.5 * (1.0 - (t * t) / (eps * eps));
}

double disk_pair_energy(double d, double eps) {
  return -std::log(eps) + unit_pair_energy(d / eps, 1e-13, nullptr);
}

double disk_quadrant_area(double r, double x, double y) {
  if (x <= -r || y <= -r) return 0.0;
  x = std::min(x, r);
  y = std::min(y, r);
  const auto H = [r](double u) { return antiderivative_half_chord(r, u); };
  const auto full = [&](double a, double b) {
    b = std::min(b, x);
    return b > a ? 2.0 * (H(b) - H(a)) : 0.0;
  };
  const auto capped = [&](double a, double b) {
    b = std::min(b, x);
    return b > a ? y * (b - a) + H(b) - H(a) : 0.0;
  };
  const double s = std::sqrt(std::max(0.0, r * r - y * y));
  if (y >= 0.0) return full(-r, -s) + capped(-s, s) + full(s, r);
  return capped(-s, s);
}

// ---- SmoothedMeasure -------------------------------------------------------------

SmoothedMeasure::SmoothedMeasure(AtomicMeasure base, double epsilon)
    : base_(std::move(base)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw ConstraintError("SmoothedMeasure: epsilon must be positive");
  }
  if (base_.empty()) throw ConstraintError("SmoothedMeasure: empty base measure");
}

double SmoothedMeasure::density(cplx z) const {
  double a = 0.0;
  for (const Atom& at : base_.atoms()) {
    if (std::abs(z - at.position) < epsilon_) a += at.weight;
  }
  return a / (kPi * epsilon_ * epsilon_);
}

double SmoothedMeasure::mass_in_box(double x0, double x1, double y0, double y1) const {
  if (!(x1 > x0) || !(y1 > y0)) return 0.0;
  const double r = epsilon_;
  double total = 0.0;
  for (const Atom& a : base_.atoms()) {
    const double cx = a.position.real(), cy = a.position.imag();
    if (cx + r <= x0 || cx - r >= x1 || cy + r <= y0 || cy - r >= y1) continue;
    const double area = disk_quadrant_area(r, x1 - cx, y1 - cy) - disk_quadrant_area(r, x0 - cx, y1 - cy) -
                        disk_quadrant_area(r, x1 - cx, y0 - cy) + disk_quadrant_area(r, x0 - cx, y0 - cy);
    total += a.weight * area;
  }
  return total / (kPi * r * r);
}

Box SmoothedMeasure::bounding_box() const {
  Box b{kInf, -kInf, kInf, -kInf};
  for (const Atom& a : base_.atoms()) {
    b.xmin = std::min(b.xmin, a.position.real());
    b.xmax = std::max(b.xmax, a.position.real());
    b.ymin = std::min(b.ymin, a.position.imag());
    b.ymax = std::max(b.ymax, a.position.imag());
  }
  b.xmin -= epsilon_;
  b.xmax += epsilon_;
  b.ymin -= epsilon_;
  b.ymax += epsilon_;
  return b;
}

AtomicMeasure SmoothedMeasure::quantize(double cell) const {
  if (!(cell > 0.0)) throw ConstraintError("quantize: cell size must be positive");
  const Box box = bounding_box();
  const auto nx = static_cast<std::size_t>(std::ceil((box.xmax - box.xmin) / cell));
  const auto ny = static_cast<std::size_t>(std::ceil((box.ymax - box.ymin) / cell));
  std::vector<double> mass(nx * ny, 0.0);
  const double r = epsilon_;
  const auto index_range = [&](double lo, double hi, double origin, std::size_t n) {
    const auto clampi = [n](double v) {
      return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
    };
    return std::pair{clampi(std::floor((lo - origin) / cell)), clampi(std::floor((hi - origin) / cell))};
  };
  for (const Atom& a : base_.atoms()) {
    const double cx = a.position.real(), cy = a.position.imag();
    const auto [i0, i1] = index_range(cx - r, cx + r, box.xmin, nx);
    const auto [j0, j1] = index_range(cy - r, cy + r, box.ymin, ny);
    for (std::size_t i = i0; i <= i1; ++i) {
      const double x0 = box.xmin + cell * i - cx, x1 = x0 + cell;
      for (std::size_t j = j0; j <= j1; ++j) {
        const double y0 = box.ymin + cell * j - cy, y1 = y0 + cell;
        const double area = disk_quadrant_area(r, x1, y1) - disk_quadrant_area(r, x0, y1) -
                            disk_quadrant_area(r, x1, y0) + disk_quadrant_area(r, x0, y0);
        mass[i * ny + j] += a.weight * area / (kPi * r * r);
      }
    }
  }
  std::vector<Atom> atoms;
  double total = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double m = mass[i * ny + j];
      if (m <= 1e-16) continue;
      atoms.push_back({cplx{box.xmin + cell * (i + 0.5), box.ymin + cell * (j + 0.5)}, m});
      total += m;
    }
  }
  const double scale = base_.total_mass() / total;
  for (Atom& a : atoms) a.weight *= scale;
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure SmoothedMeasure::polar_proxy(int rings, int spokes) const {
  if (rings < 1 || spokes < 1) throw ConstraintError("polar_proxy: rings and spokes must be positive");
  const GaussRule radial = gauss_legendre(rings, 0.0, epsilon_);
  const double dphi = 2.0 * kPi / spokes;
  const double norm = dphi / (kPi * epsilon_ * epsilon_);
  std::vector<Atom> atoms;
  atoms.reserve(base_.size() * static_cast<std::size_t>(rings * spokes));
  for (const Atom& a : base_.atoms()) {
    for (int i = 0; i < rings; ++i) {
      const double r = radial.nodes[i];
      for (int k = 0; k < spokes; ++k) {
        atoms.push_back({a.position + std::polar(r, dphi * (k + 0.5)), a.weight * radial.weights[i] * r * norm});
      }
    }
  }
  return AtomicMeasure(std::move(atoms));
}

bool SmoothedMeasure::support_within(const CompactSet& k) const {
  if (const auto* d = std::get_if<Disk>(&k.shape())) {
    return std::all_of(base_.atoms().begin(), base_.atoms().end(), [&](const Atom& a) {
      return std::abs(a.position - d->center) + epsilon_ <= d->radius * (1.0 + kContainmentTol);
    });
  }
  constexpr int kProbes = 256;
  for (const Atom& a : base_.atoms()) {
    if (!k.contains(a.position)) return false;
    for (int i = 0; i < kProbes; ++i) {
      if (!k.contains(a.position + std::polar(epsilon_, 2.0 * kPi * i / kProbes))) return false;
    }
  }
  return true;
}

// ---- CurveMeasure ----------------------------------------------------------------

CurveMeasure CurveMeasure::circle(cplx center, double radius) {
  if (!(radius > 0.0)) throw ConstraintError("CurveMeasure::circle: radius must be positive");
  return CurveMeasure(LaurentMap{cplx{radius, 0.0}, {center}});
}

CurveMeasure CurveMeasure::dilation(const CompactSet& k, double factor) {
  if (!(factor > 0.0)) throw ConstraintError("CurveMeasure::dilation: factor must be positive");
  LaurentMap m = k.map();
  m.lead *= factor;
  for (std::size_t i = 1; i < m.coeffs.size(); ++i) m.coeffs[i] *= factor;
  return CurveMeasure(std::move(m));
}

double CurveMeasure::potential(cplx z) const {
  return periodic_mean([&](double t) { return -std::log(std::abs(z - point(t))); }, 1e-12, 18).value;
}

bool CurveMeasure::support_within(const CompactSet& k) const {
  constexpr int kProbes = 4096;
  for (int i = 0; i < kProbes; ++i) {
    if (!k.contains(point(2.0 * kPi * (i + 0.5) / kProbes))) return false;
  }
  return true;
}

// ---- energies --------------------------------------------------------------------

double discrete_energy(const Configuration& c) {
  const std::size_t n = c.size();
  if (n == 0) throw ConstraintError("discrete_energy: empty configuration");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::abs(c[i] - c[j]);
      if (d == 0.0) return kInf;
      sum -= std::log(d);
    }
  }
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n));
}

QuadratureResult<double> continuous_energy(const SmoothedMeasure& mu) {
  const auto atoms = mu.base().atoms();
  const double eps = mu.epsilon();
  QuadratureResult<double> out;
  out.converged = true;
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    total += atoms[i].weight * atoms[i].weight * (0.25 - std::log(eps));
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const double d = std::abs(atoms[i].position - atoms[j].position);
      double err = 0.0;
      const double e = -std::log(eps) + unit_pair_energy(d / eps, 1e-13, &err);
      const double w = 2.0 * atoms[i].weight * atoms[j].weight;
      total += w * e;
      out.error += w * err;
      ++out.nodes;
    }
  }
  out.value = total;
  return out;
}

QuadratureResult<double> continuous_energy(const CurveMeasure& mu) {
  const LaurentMap& psi = mu.map();
  // The first Laurent coefficient contributes log|1 - q/(ab)| with q = c1/lead;
  // its torus mean vanishes for |q| <= 1 and it is singular when |q| = 1.
  const cplx q = psi.coeffs.size() >= 2 ? psi.coeffs[1] / psi.lead : cplx{};
  const bool subtract = std::abs(q) <= 1.0 + 1e-14;
  QuadratureResult<double> out;
  double previous = 0.0;
  for (int level = 4; level <= 11; ++level) {
    const std::size_t n = std::size_t{1} << level;
    std::vector<cplx> w(n), z(n), dz(n);
    for (std::size_t k = 0; k < n; ++k) {
      w[k] = std::polar(1.0, 2.0 * kPi * (k + 0.25) / static_cast<double>(n));
      z[k] = psi(w[k]);
      dz[k] = psi.derivative(w[k]);
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        double r = a == b ? std::log(std::abs(dz[a])) : std::log(std::abs((z[a] - z[b]) / (w[a] - w[b])));
        if (subtract) r -= std::log(std::abs(1.0 - q / (w[a] * w[b])));
        sum += r;
      }
    }
    const double estimate = -sum / (static_cast<double>(n) * static_cast<double>(n));
    out.value = estimate;
    out.nodes = n * n;
    if (level > 4) {
      out.error = std::abs(estimate - previous);
      if (out.error < 1e-10) {
        out.converged = true;
        break;
      }
    }
    previous = estimate;
  }
  return out;
}

double log_energy(const Measure& mu) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return kInf;
        } else {
          return continuous_energy(m).value;
        }
      },
      mu);
}

double green_integral(const Measure& mu, const CompactSet& k) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        const auto g = [&](cplx z) { return k.green(z); };
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          double s = 0.0;
          for (const Atom& a : m.atoms()) s += a.weight * g(a.position);
          return s;
        } else if constexpr (std::is_same_v<T, SmoothedMeasure>) {
          return m.integrate(g, 24, 96);
        } else {
          return m.integrate(g, 1e-12).value;
        }
      },
      mu);
}

bool support_within(const Measure& mu, const CompactSet& k) {
  return std::visit(
      [&](const auto& m) -> bool {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return std::all_of(m.atoms().begin(), m.atoms().end(),
                             [&](const Atom& a) { return k.contains(a.position); });
        } else {
          return m.support_within(k);
        }
      },
      mu);
}

double weighted_energy(const Measure& mu, const CompactSet& k, double ell) {
  if (!(ell >= 0.0 && ell <= 1.0)) throw ConstraintError("weighted_energy: ell must lie in [0, 1]");
  const double energy = log_energy(mu);
  if (ell == 0.0) return support_within(mu, k) ? energy : kInf;
  if (energy == kInf) return kInf;
  return energy + 2.0 / ell * green_integral(mu, k);
}

SmoothedMeasure smooth(const AtomicMeasure& nu, double epsilon) { return SmoothedMeasure(nu, epsilon); }

// ---- discretization --------------------------------------------------------------

double min_separation(const Configuration& c) {
  double best = kInf;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) best = std::min(best, std::abs(c[i] - c[j]));
  }
  return best;
}

namespace {

// Lowest point of the support inside the vertical strip [xl, xr].
double strip_floor(const SmoothedMeasure& nu, double xl, double xr) {
  const double r = nu.epsilon();
  double lowest = kInf;
  for (const Atom& a : nu.base().atoms()) {
    const double cx = a.position.real();
    if (cx + r <= xl || cx - r >= xr) continue;
    const double nearest = std::clamp(cx, xl, xr) - cx;
    lowest = std::min(lowest, a.position.imag() - std::sqrt(std::max(0.0, r * r - nearest * nearest)));
  }
  return lowest;
}

}  // namespace

Discretization discretize(const SmoothedMeasure& nu, std::size_t n) {
  if (n < 4) throw ConstraintError("discretize: N must be >= 4");
  if (!nu.base().is_probability()) throw ConstraintError("discretize: base measure must be a probability");
  const auto nd = static_cast<double>(n);
  const auto strips = static_cast<std::size_t>(std::ceil(std::sqrt(nd)));
  const Box box = nu.bounding_box();
  const double width = (box.xmax - box.xmin) / static_cast<double>(strips);

  struct Strip {
    double x;
    double remainder;
    std::vector<double> heights;
  };
  std::vector<Strip> used;
  for (std::size_t j = 0; j < strips; ++j) {
    const double xl = box.xmin + width * static_cast<double>(j);
    const double xr = j + 1 == strips ? box.xmax : xl + width;
    const double mass = nu.mass_in_box(xl, xr, -kInf, kInf);
    if (mass <= 1e-15) continue;
    const auto count = static_cast<std::size_t>(std::floor(mass * nd + 1e-9));
    Strip s{xl, mass * nd - static_cast<double>(count), {}};
    s.heights.push_back(strip_floor(nu, xl, xr));
    for (std::size_t k = 1; k <= count; ++k) {
      const double target = static_cast<double>(k) / nd;
      double lo = s.heights.back(), hi = box.ymax;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (nu.mass_in_box(xl, xr, -kInf, mid) < target) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      s.heights.push_back(0.5 * (lo + hi));
    }
    used.push_back(std::move(s));
  }

  std::size_t generated = 0;
  for (const Strip& s : used) generated += s.heights.size();
  if (generated < n) throw std::logic_error("discretize: fewer candidate points than N");
  std::vector<std::size_t> order(used.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return used[a].remainder < used[b].remainder; });
  std::size_t excess = generated - n;
  for (std::size_t idx = 0; idx < order.size() && excess > 0; ++idx, --excess) {
    used[order[idx]].heights.pop_back();
  }
  if (excess > 0) throw std::logic_error("discretize: could not trim to N points");

  std::vector<cplx> pts;
  pts.reserve(n);
  for (const Strip& s : used) {
    for (double y : s.heights) pts.emplace_back(s.x, y);
  }
  Discretization out;
  out.configuration = Configuration(std::move(pts));
  out.strips = strips;
  out.generated = generated;
  out.min_separation = min_separation(out.configuration);
  out.separation_constant = out.min_separation * std::sqrt(nd);
  return out;
}

// ---- perturbation neighbourhoods -------------------------------------------------

PerturbationBall::PerturbationBall(Configuration center, double separation_constant)
    : center_(std::move(center)) {
  if (!(separation_constant > 0.0)) throw ConstraintError("perturbation_ball: c' must be positive");
  radius_ = separation_constant / (3.0 * std::sqrt(static_cast<double>(center_.size())));
  center_energy_ = discrete_energy(center_);
}

bool PerturbationBall::contains(const Configuration& eta) const {
  if (eta.size() != center_.size()) return false;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (std::abs(eta[i] - center_[i]) > radius_ * (1.0 + 1e-12)) return false;
  }
  return true;
}

Configuration PerturbationBall::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> pts(center_.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = radius_ * std::sqrt(u(rng));
    pts[i] = center_[i] + std::polar(r, 2.0 * kPi * u(rng));
  }
  return Configuration(std::move(pts));
}

double PerturbationBall::energy_deviation(const Configuration& eta) const {
  return std::abs(discrete_energy(eta) - center_energy_);
}

PerturbationBall perturbation_ball(const Configuration& c, double separation_constant) {
  return PerturbationBall(c, separation_constant);
}

}  // namespace potlab
