#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <variant>

#include "potlab/potential.hpp"
#include "potlab/quadrature.hpp"
#include "potlab/types.hpp"

namespace potlab {

/// Potential at distance t of the uniform probability measure on a disk of
/// radius eps: -log t outside, -log eps + (1 - t^2/eps^2)/2 inside.
double disk_potential(double t, double eps);

/// Mutual logarithmic energy of two uniform eps-disks whose centers are a
/// distance d apart. Exact for d = 0 (1/4 - log eps) and d >= 2 eps (-log d);
/// a one-dimensional quadrature over the distance law in between.
double disk_pair_energy(double d, double eps);

/// Area of {|u| <= r, Re u <= x, Im u <= y}.
double disk_quadrant_area(double r, double x, double y);

struct Box {
  double xmin, xmax, ymin, ymax;
};

/// The mollification nu_eps = a_eps dA with
/// a_eps(z) = (pi eps^2)^{-1} sum_i w_i 1{|x_i - z| < eps}.
class SmoothedMeasure {
 public:
  SmoothedMeasure(AtomicMeasure base, double epsilon);

  const AtomicMeasure& base() const { return base_; }
  double epsilon() const { return epsilon_; }

  double density(cplx z) const;
  /// Exact nu_eps mass of [x0, x1] x [y0, y1].
  double mass_in_box(double x0, double x1, double y0, double y1) const;
  /// Bounding box of the support (union of closed eps-disks).
  Box bounding_box() const;

  /// Integral of f against nu_eps by a Gauss-Legendre x trapezoid polar rule
  /// on every eps-disk.
  template <class F>
  double integrate(F&& f, int rings = 16, int spokes = 48) const;

  /// Atomic representation on a square grid of the given cell size: one atom
  /// at each cell center carrying the exact cell mass.
  AtomicMeasure quantize(double cell) const;
  /// Atomic representation with every eps-disk replaced by a polar product
  /// rule; each atom stays inside its own disk.
  AtomicMeasure polar_proxy(int rings, int spokes) const;

  /// True when every eps-disk lies in K (checked on the disk boundaries).
  bool support_within(const CompactSet& k) const;

 private:
  AtomicMeasure base_;
  double epsilon_;
};

/// Push-forward of d theta / 2 pi under theta -> psi(e^{i theta}) for a
/// Laurent curve psi. Covers omega_K for every CompactSet, and uniform
/// measures on circles.
class CurveMeasure {
 public:
  explicit CurveMeasure(LaurentMap map) : map_(std::move(map)) {}

  static CurveMeasure circle(cplx center, double radius);
  static CurveMeasure equilibrium(const CompactSet& k) { return CurveMeasure(k.map()); }
  /// omega_K pushed forward by z -> center + factor (z - center).
  static CurveMeasure dilation(const CompactSet& k, double factor);

  const LaurentMap& map() const { return map_; }
  cplx point(double theta) const { return map_.on_circle(theta); }

  template <class F>
  auto integrate(F&& f, double tol = 1e-10) const {
    return periodic_mean([&](double theta) { return f(point(theta)); }, tol, 18);
  }
  double potential(cplx z) const;
  bool support_within(const CompactSet& k) const;

 private:
  LaurentMap map_;
};

using Measure = std::variant<AtomicMeasure, SmoothedMeasure, CurveMeasure>;

/// N^-2 sum_{n != m} log 1/|z_n - z_m|; +inf when two points coincide.
double discrete_energy(const Configuration& c);

/// I[nu] for a smoothed measure: closed-form self blocks plus numeric
/// overlap blocks.
QuadratureResult<double> continuous_energy(const SmoothedMeasure& mu);
/// I[nu] for a curve measure: log|a - b| is subtracted analytically and the
/// smooth remainder is integrated by a dyadically refined double trapezoid.
QuadratureResult<double> continuous_energy(const CurveMeasure& mu);
/// Point masses have infinite logarithmic energy.
double log_energy(const Measure& mu);

/// Integral of g_K against mu.
double green_integral(const Measure& mu, const CompactSet& k);
bool support_within(const Measure& mu, const CompactSet& k);

/// I_ell[mu] = I[mu] + (2/ell) int g_K d mu; for ell = 0 this is +inf when
/// mu charges the exterior of K and I[mu] otherwise.
double weighted_energy(const Measure& mu, const CompactSet& k, double ell);

SmoothedMeasure smooth(const AtomicMeasure& nu, double epsilon);

struct BLOptions {
  /// Larger unions of supports are replaced by multinomial resamples.
  std::size_t max_support = 8000;
  std::uint64_t seed = 0x5eed;
};

struct BLResult {
  double value = 0.0;
  bool converged = true;
  bool subsampled = false;
  std::size_t support = 0;
};

/// sup |int f d mu - int f d nu| over |f| <= 1, Lip(f) <= 1 on the union of
/// supports. Solved exactly as the dual transport problem with ground cost
/// min(|x - y|, 2).
BLResult bl_distance(const AtomicMeasure& mu, const AtomicMeasure& nu, const BLOptions& opts = {});

struct Discretization {
  Configuration configuration;
  std::size_t strips = 0;     // M = ceil(sqrt N)
  std::size_t generated = 0;  // points before trimming to N
  double min_separation = 0.0;
  double separation_constant = 0.0;  // min_separation * sqrt(N)
};

/// Strip/rectangle construction: M equal-width vertical strips, rectangles of
/// nu_eps-mass exactly 1/N inside each strip, one point at the lower-left
/// corner of every rectangle plus the top corner; trimmed to exactly N points.
Discretization discretize(const SmoothedMeasure& nu, std::size_t n);

double min_separation(const Configuration& c);

/// Product of disks of radius c'/(3 sqrt N) about the points of a configuration.
class PerturbationBall {
 public:
  PerturbationBall(Configuration center, double separation_constant);

  const Configuration& center() const { return center_; }
  double radius() const { return radius_; }
  bool contains(const Configuration& eta) const;
  Configuration sample(std::mt19937_64& rng) const;
  /// |I_*[omega_eta] - I_*[omega_center]|.
  double energy_deviation(const Configuration& eta) const;

 private:
  Configuration center_;
  double radius_;
  double center_energy_;
};

PerturbationBall perturbation_ball(const Configuration& c, double separation_constant);

// ---- template definitions ---------------------------------------------------------

template <class F>
double SmoothedMeasure::integrate(F&& f, int rings, int spokes) const {
  const GaussRule radial = gauss_legendre(rings, 0.0, epsilon_);
  const double norm = 1.0 / (std::numbers::pi * epsilon_ * epsilon_);
  const double dphi = 2.0 * std::numbers::pi / spokes;
  double total = 0.0;
  for (const Atom& a : base_.atoms()) {
    double disk = 0.0;
    for (int i = 0; i < rings; ++i) {
      const double r = radial.nodes[i];
      double ring = 0.0;
      for (int k = 0; k < spokes; ++k) ring += f(a.position + std::polar(r, dphi * (k + 0.5)));
      disk += radial.weights[i] * r * ring * dphi;
    }
    total += a.weight * norm * disk;
  }
  return total;
}

}  // namespace potlab
