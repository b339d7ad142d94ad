#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "potlab/errors.hpp"
#include "potlab/measures.hpp"
#include "potlab/partition.hpp"

using namespace potlab;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// ||z^n||^2 for the weight exp(-2 s g) = min(1, |z|^{-2s}) on C.
double monomial_norm2(std::size_t n, double s) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double k = static_cast<double>(n);
  const double inner = GK::integrate([&](double r) { return std::pow(r, 2 * k + 1); }, 0.0, 1.0, 15, 1e-13);
  double outer = 0.0;
  if (std::isfinite(s)) {
    outer = GK::integrate([&](double r) { return std::pow(r, 2 * k + 1 - 2 * s); }, 1.0,
                          std::numeric_limits<double>::infinity(), 15, 1e-13);
  }
  return 2.0 * kPi * (inner + outer);
}

double log_partition_oracle(std::size_t n, double s) {
  double v = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::size_t k = 0; k < n; ++k) v += std::log(monomial_norm2(k, s));
  return v;
}

}  // namespace

TEST_SUITE("partition") {
  TEST_CASE("kappa matches radial integrals") {
    for (double s : {4.0, 9.5, 40.0, kInf}) {
      for (std::size_t n = 0; n + 1 < s && n < 6; ++n) {
        CHECK(kappa_disk(n, s) == Approx(1.0 / std::sqrt(monomial_norm2(n, s))).epsilon(1e-10));
      }
    }
    CHECK_THROWS_AS(kappa_disk(3, 4.0), ConstraintError);
  }

  TEST_CASE("exact disk partition function") {
    CHECK(log_factorial(0) == 0.0);
    CHECK(log_factorial(5) == Approx(std::log(120.0)));
    CHECK(log_partition_disk_exact(1, 4.0) == Approx(std::log(4.0 * kPi / 3.0)));
    CHECK(log_partition_disk_exact(2, 8.0) == Approx(std::log(kPi * kPi * 64.0 / 42.0)));
    for (std::size_t n : {1u, 3u, 8u, 20u}) {
      for (double s : {2.0 * n + 1.0, 5.0 * n, kInf}) {
        CHECK(log_partition_disk_exact(n, s) == Approx(log_partition_oracle(n, s)).epsilon(1e-10));
      }
    }
    CHECK_THROWS_AS(log_partition_disk_exact(4, 4.0), ConstraintError);
  }

  TEST_CASE("theta") {
    CHECK(theta(0.0) == Approx(std::log(kPi)));
    CHECK(theta(1.0) == Approx(std::log(kPi) + 1.0));
    CHECK(theta(0.5) == Approx(std::log(kPi) + 1.0 - std::log(2.0)));
    CHECK(theta(1e-9) == Approx(std::log(kPi)).epsilon(1e-8));
    double previous = -kInf;
    for (int i = 0; i <= 20; ++i) {
      const double v = theta(i / 20.0);
      CHECK(v > previous);
      previous = v;
    }
    CHECK_THROWS_AS(theta(1.5), ConstraintError);
  }

  TEST_CASE("residuals") {
    CHECK(asymptotic_residual(10, 20.0) == Approx(log_partition_disk_exact(10, 20.0) - 10.0 * theta(0.5)));
    // log Z_{N,s} - log Z_{N,inf} = sum_k log(s/(s - k)) exactly on the disk.
    for (std::size_t n : {1u, 4u, 16u}) CHECK(std::abs(bridge_residual(n, 3.0 * n)) <= 1e-9);
  }

  TEST_CASE("cubature on the disk") {
    const CompactSet disk = CompactSet::unit_disk();
    const CubatureValue one = partition_cubature(disk, {1, 4.0, 2.0, 0.5});
    CHECK(one.converged);
    CHECK(one.value == Approx(4.0 * kPi / 3.0).epsilon(1e-8));
    // beta = 1 has no closed form: compare with the radial integral.
    const double radial = 2.0 * kPi *
                          boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                              [](double r) { return r * std::min(1.0, std::pow(r, -6.0)); }, 0.0,
                              std::numeric_limits<double>::infinity(), 15, 1e-13);
    CHECK(partition_cubature(disk, {1, 6.0, 1.0, 0.5}).value == Approx(radial).epsilon(1e-8));
    const CubatureValue two = partition_cubature(disk, {2, 8.0, 2.0, 0.5});
    CHECK(two.log_value == Approx(log_partition_disk_exact(2, 8.0)).epsilon(1e-8));
    CHECK_THROWS_AS(partition_cubature(disk, {4, 16.0, 2.0, 0.5}), ConstraintError);
  }

  TEST_CASE("bounds sandwich the exact value") {
    const CompactSet disk = CompactSet::unit_disk();
    const EnsembleParams p{8, 16.0, 2.0, 0.5};
    const PartitionBounds b = partition_bounds(disk, p, solve_fekete(disk, 8, 1));
    const double exact = log_partition_disk_exact(8, 16.0);
    CHECK(b.lower <= exact);
    CHECK(exact <= b.upper);
    CHECK(b.upper == Approx(2.0 * 4.0 * std::log(8.0) + 8.0 * std::log(disk.field_integral(2.0 * 9.0))).epsilon(1e-8));
  }

  TEST_CASE("segment bounds sandwich the cubature value") {
    const CompactSet seg = CompactSet::segment(-2.0, 2.0);
    const EnsembleParams p{2, 8.0, 2.0, 0.5};
    const PartitionBounds b = partition_bounds(seg, p, solve_fekete(seg, 2, 1));
    const CubatureValue c = partition_cubature(seg, p, 1e-5);
    CHECK(c.converged);
    CHECK(b.lower <= c.log_value);
    CHECK(c.log_value <= b.upper);
  }

  TEST_CASE("lower-bound measure lies in K") {
    for (const CompactSet& k : {CompactSet::unit_disk(), CompactSet::ellipse({}, 2.0, 1.0)}) {
      const SmoothedMeasure nu = lower_bound_measure(k, {});
      CHECK(nu.base().size() == 256);
      CHECK(nu.support_within(k));
    }
  }
}
