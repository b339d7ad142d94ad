#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "potlab/measures.hpp"
#include "potlab/potential.hpp"
#include "potlab/sampler.hpp"

namespace potlab {

/// Function of n points (n <= 3), possibly complex valued.
using PointFunction = std::function<cplx(std::span<const cplx>)>;

/// ((N-n)!/N!) sum of f over ordered n-tuples of distinct indices.
cplx symmetrize(const PointFunction& f, std::size_t n, const Configuration& c);

/// Integral of f against the n-fold product of the empirical measure of c.
cplx tensor_integral(const PointFunction& f, std::size_t n, const Configuration& c);

/// Integral of f against omega_K^{(x)n} by a tensorized trapezoid rule in the
/// uniformizing angles (nodes per axis: 0 picks 512, 256, 64 for n = 1, 2, 3).
cplx equilibrium_tensor_integral(const CompactSet& k, const PointFunction& f, std::size_t n,
                                 std::size_t nodes = 0);

struct LinearStatReport {
  cplx estimate;
  cplx target;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  double z_score = 0.0;  // max over real and imaginary parts
  double ess = 0.0;      // effective sample size of the real part
  std::size_t samples = 0;
  std::size_t batches = 0;
};

/// Batch-means summary of per-state values against a target, with
/// ceil(sqrt(L)) batches.
LinearStatReport summarize(std::span<const cplx> values, cplx target);

/// Chain average of symmetrize(f, n, state) against the omega_K^{(x)n} target.
LinearStatReport linear_statistic(const Chain& chain, const PointFunction& f, std::size_t n);

/// Chain average of (int f d omega_eta)^k (int conj f d omega_eta)^m against
/// (int f d omega_K)^k (int conj f d omega_K)^m.
LinearStatReport moment_statistic(const Chain& chain, const std::function<cplx(cplx)>& f, unsigned k,
                                  unsigned m);

struct Grid {
  double xmin = -2.0, xmax = 2.0, ymin = -2.0, ymax = 2.0;
  std::size_t nx = 64, ny = 64;
};

struct Histogram {
  Grid grid;
  std::vector<double> density;  // row-major in x, normalized by all particles
  std::size_t particles = 0;
  double inside_fraction = 0.0;  // fraction of particles that fell in the grid

  cplx bin_center(std::size_t ix, std::size_t iy) const;
  double cell_area() const;
  double at(std::size_t ix, std::size_t iy) const { return density[ix * grid.ny + iy]; }
};

/// One-point intensity estimate from every particle of every stored state.
Histogram intensity_histogram(const Chain& chain, const Grid& grid);

/// Fraction of all particles with r0 <= |z - center| <= r1.
double annulus_fraction(const Chain& chain, cplx center, double r0, double r1);

struct AngularProfile {
  std::vector<double> mass;    // mean fraction of particles per angular bin
  std::vector<double> standard_error;  // batch-means standard errors
};

AngularProfile angular_profile(const Chain& chain, std::size_t bins, cplx center);

struct RateReport {
  std::string descriptor;
  double ell = 0.0;
  double beta = 2.0;
  double weighted_energy = 0.0;
  double robin_energy = 0.0;
  double rate = 0.0;
  bool at_minimizer = false;  // rate within tolerance and nu BL-close to omega_K
};

/// (beta/2)(I_ell[nu] - I[omega_K]).
RateReport rate_function(const Measure& nu, const CompactSet& k, double ell, double beta,
                         std::string descriptor = {});
RateReport rate_function(const Measure& nu, const CompactSet& k, const EnsembleParams& p,
                         std::string descriptor = {});

struct ScanRow {
  double parameter = 0.0;  // dilation factor about the center of K
  double ell = 0.0;
  double rate = 0.0;
};

/// Rates of the dilated equilibrium measures (circles of radius r for the
/// unit disk) over a grid of ell.
std::vector<ScanRow> positivity_scan(const CompactSet& k, std::span<const double> factors,
                                     std::span<const double> ells, double beta = 2.0);

}  // namespace potlab
