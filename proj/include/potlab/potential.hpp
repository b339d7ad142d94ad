#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "potlab/measures_fwd.hpp"
#include "potlab/quadrature.hpp"
#include "potlab/types.hpp"

namespace potlab {

struct Disk {
  cplx center{};
  double radius = 1.0;
};

struct Segment {
  double a = -2.0;
  double b = 2.0;
};

/// Axis-aligned ellipse with semi_major along the real axis.
struct Ellipse {
  cplx center{};
  double semi_major = 1.0;
  double semi_minor = 1.0;
};

/// K is the complement of psi({|w| > 1}) where
/// psi(w) = cap*w + coeffs[0] + coeffs[1]/w + ... (univalent on |w| > 1).
struct ExteriorMap {
  double cap = 1.0;
  std::vector<cplx> coeffs;
};

/// Regular compact set with connected complement and a closed-form (or
/// Newton-inverted) exterior conformal map. Immutable after construction.
class CompactSet {
 public:
  using Shape = std::variant<Disk, Segment, Ellipse, ExteriorMap>;

  explicit CompactSet(Shape shape);

  static CompactSet unit_disk() { return CompactSet(Disk{}); }
  static CompactSet disk(cplx center, double radius) { return CompactSet(Disk{center, radius}); }
  static CompactSet segment(double a, double b) { return CompactSet(Segment{a, b}); }
  static CompactSet ellipse(cplx center, double semi_major, double semi_minor) {
    return CompactSet(Ellipse{center, semi_major, semi_minor});
  }
  /// Laurent coefficients beyond `order` (i.e. coeffs[k] with k > order) are dropped.
  static CompactSet exterior_map(double cap, std::vector<cplx> coeffs, std::size_t order);

  const Shape& shape() const { return shape_; }
  const LaurentMap& map() const { return map_; }
  std::string kind() const;

  double capacity() const;
  /// I[omega_K] = -log cap(K).
  double robin_energy() const { return -std::log(capacity()); }

  /// Green function with pole at infinity; exactly 0 on K.
  double green(cplx z) const;
  /// (d/dx + i d/dy) g_K at z: one-sided exterior gradient off K, zero on K.
  cplx green_gradient(cplx z) const;
  bool contains(cplx z) const { return green(z) <= kContainmentTol; }

  /// Preimage w of z under the exterior map. For closed-form sets this is the
  /// root of larger modulus (|w| < 1 means z is inside K); for ExteriorMap it
  /// is the Newton root when one with |w| >= 1 exists.
  std::optional<cplx> preimage(cplx z) const;

  /// psi(e^{i theta}); the push-forward of d theta / 2 pi is omega_K.
  cplx boundary_point(double theta) const { return map_.on_circle(theta); }
  cplx center() const { return map_.center(); }
  /// Radius of a disk about center() containing K.
  double bounding_radius() const;

  /// Lebesgue area of K (area theorem for ExteriorMap).
  double area() const;
  /// Integral over C of exp(-gamma g_K) dA; requires gamma > 2. gamma = +inf
  /// gives area(K).
  double field_integral(double gamma) const;

  /// A retraction of C onto K: identity on K, boundary point along the
  /// exterior-map radial line otherwise (nearest point for disk, segment and ellipse).
  cplx project(cplx z) const;
  /// Component of the direction v that stays in the tangent cone of K at z.
  cplx tangent_cone_projection(cplx z, cplx v) const;

 private:
  Shape shape_;
  LaurentMap map_;
};

/// Serialization as the tagged JSON object {"type": ..., ...}.
std::string to_json_string(const CompactSet& k);
CompactSet compact_set_from_json_string(const std::string& text);

/// n independent draws from omega_K.
Configuration equilibrium_sample(const CompactSet& k, std::size_t n, std::uint64_t seed);

/// Integral of f against omega_K by periodic trapezoid quadrature in the
/// uniformizing angle with dyadic refinement (stop when successive estimates
/// differ by < 1e-10, or at 2^18 nodes).
template <class F>
auto equilibrium_integral(const CompactSet& k, F&& f, double tol = 1e-10) {
  return periodic_mean([&](double theta) { return f(k.boundary_point(theta)); }, tol, 18);
}

/// Logarithmic potential sum_i w_i log(1/|z - x_i|); +inf at an atom.
double log_potential(const AtomicMeasure& mu, cplx z);
/// Closed-form potential of the mollified measure (each atom spread uniformly
/// over its epsilon-disk).
double log_potential(const SmoothedMeasure& mu, cplx z);

/// Polynomial with complex coefficients in ascending degree order.
class Polynomial {
 public:
  explicit Polynomial(std::vector<cplx> coeffs);

  std::size_t degree() const { return coeffs_.size() - 1; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  cplx leading() const { return coeffs_.back(); }
  cplx operator()(cplx z) const;
  Polynomial operator*(const Polynomial& other) const;
  /// Roots via eigenvalues of the companion matrix.
  std::vector<cplx> roots() const;

 private:
  std::vector<cplx> coeffs_;
};

/// exp(int log|p| d omega_K) = |a_p| prod exp(g_K(root)); requires cap(K) = 1
/// within 1e-12.
double mahler_measure(const CompactSet& k, const Polynomial& p);

/// Balayage of an atomic measure onto a disk: exterior atoms are swept to
/// exterior Poisson densities on the circle, atoms on the circle or inside
/// are kept.
class DiskBalayage {
 public:
  DiskBalayage(const AtomicMeasure& mu, const Disk& disk);

  /// Density with respect to d theta of the swept part at boundary angle theta.
  double density(double theta) const;
  double total_mass() const;
  std::span<const Atom> kept_atoms() const { return kept_; }
  std::span<const Atom> swept_atoms() const { return swept_; }
  /// V of the balayage at z (by quadrature over the circle for the swept part).
  double potential(cplx z) const;

 private:
  Disk disk_;
  std::vector<Atom> swept_;
  std::vector<Atom> kept_;
};

DiskBalayage balayage_disk(const AtomicMeasure& mu, const CompactSet& k);

}  // namespace potlab
