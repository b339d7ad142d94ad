#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace potlab {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A point z is treated as lying in K when g_K(z) does not exceed this value.
inline constexpr double kContainmentTol = 1e-12;

struct Atom {
  cplx position;
  double weight;
};

/// Finite positive point measure. Weights are strictly positive; probability
/// measures sum to one within 1e-12.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms);

  static AtomicMeasure dirac(cplx x);
  /// Equal weights 1/n on the given points.
  static AtomicMeasure uniform(std::span<const cplx> points);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double total_mass() const;
  bool is_probability(double tol = 1e-12) const;

 private:
  std::vector<Atom> atoms_;
};

/// Ordered list of N >= 1 planar points.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<cplx> points);

  std::size_t size() const { return points_.size(); }
  std::span<const cplx> points() const { return points_; }
  cplx operator[](std::size_t i) const { return points_[i]; }
  void set(std::size_t i, cplx z) { points_[i] = z; }

  /// Uniform probability measure with mass 1/N on each point.
  AtomicMeasure empirical_measure() const;

 private:
  std::vector<cplx> points_;
};

/// Truncated Laurent series psi(w) = lead*w + c[0] + c[1]/w + ... + c[k]/w^k.
struct LaurentMap {
  cplx lead{1.0, 0.0};
  std::vector<cplx> coeffs;

  cplx operator()(cplx w) const;
  cplx derivative(cplx w) const;
  cplx on_circle(double theta) const { return (*this)(std::polar(1.0, theta)); }
  cplx center() const { return coeffs.empty() ? cplx{} : coeffs[0]; }
};

}  // namespace potlab
