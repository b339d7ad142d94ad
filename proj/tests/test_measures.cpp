#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lp_oracle.hpp"
#include "potlab/errors.hpp"
#include "potlab/measures.hpp"
#include "potlab/potential.hpp"

using namespace potlab;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cplx> roots_of_unity(std::size_t n) {
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(1.0, 2.0 * kPi * k / n);
  return z;
}

SmoothedMeasure smoothed_circle(std::size_t atoms, double eps) {
  std::vector<cplx> pts(atoms);
  for (std::size_t i = 0; i < atoms; ++i) pts[i] = std::polar(1.0, 2.0 * kPi * (i + 0.5) / atoms);
  return smooth(AtomicMeasure::uniform(pts), eps);
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("discrete energy examples") {
    CHECK(discrete_energy(Configuration({0.0, 1.0})) == Approx(0.0));
    CHECK(discrete_energy(Configuration({0.0, std::numbers::e})) == Approx(-0.5));
    CHECK(discrete_energy(Configuration({0.5, 0.5, 1.0})) == kInf);
    for (std::size_t n = 2; n <= 12; ++n) {
      const auto z = roots_of_unity(n);
      double product = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i != j) product *= std::abs(z[i] - z[j]);
        }
      }
      const double expected = -std::log(product) / static_cast<double>(n * n);
      CHECK(discrete_energy(Configuration(z)) == Approx(expected).epsilon(1e-12));
      CHECK(expected == Approx(-std::log(double(n)) / double(n)).epsilon(1e-12));
    }
  }

  TEST_CASE("continuous energy examples") {
    for (double r : {0.5, 1.0, 2.0}) {
      CHECK(continuous_energy(CurveMeasure::circle({}, r)).value == Approx(-std::log(r)).epsilon(1e-10));
    }
    for (double a : {0.1, 0.5, 2.0}) {
      CHECK(continuous_energy(smooth(AtomicMeasure::dirac({0.3, 0.1}), a)).value ==
            Approx(0.25 - std::log(a)).epsilon(1e-9));
    }
    // Two disjoint disks: self terms 1/4 - log eps, cross term log 1/|distance| = 0.
    const AtomicMeasure pair({{0.0, 0.5}, {1.0, 0.5}});
    CHECK(continuous_energy(smooth(pair, 0.1)).value == Approx(0.5 * (0.25 + std::log(10.0))).epsilon(1e-9));
    CHECK(continuous_energy(CurveMeasure::equilibrium(CompactSet::segment(-2.0, 2.0))).value ==
          Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(continuous_energy(CurveMeasure::equilibrium(CompactSet::ellipse({}, 2.0, 1.0))).value ==
          Approx(-std::log(1.5)).epsilon(1e-9));
  }

  TEST_CASE("overlapping smoothed disks match brute-force quadrature") {
    const SmoothedMeasure nu = smooth(AtomicMeasure({{0.0, 0.5}, {cplx{0.06, 0.0}, 0.5}}), 0.1);
    const double got = continuous_energy(nu).value;
    // Mutual energy of two eps-disks: polar midpoint average of the closed-form
    // disk potential over the second disk.
    const auto disk_potential_at = [](double t, double eps) {
      return t >= eps ? -std::log(t) : -std::log(eps) + 0.5 * (1.0 - t * t / (eps * eps));
    };
    const auto pair = [&](double d, double eps) {
      double s = 0.0;
      const int nr = 800, nt = 400;
      for (int i = 0; i < nr; ++i) {
        const double r = eps * (i + 0.5) / nr;
        for (int j = 0; j < nt; ++j) {
          const double th = 2.0 * kPi * (j + 0.5) / nt;
          s += disk_potential_at(std::abs(std::polar(r, th) + d), eps) * r;
        }
      }
      return s * (eps / nr) * (2.0 * kPi / nt) / (kPi * eps * eps);
    };
    const double expected = 0.5 * (0.25 - std::log(0.1)) + 0.5 * pair(0.06, 0.1);
    CHECK(got == Approx(expected).epsilon(1e-4));
  }

  TEST_CASE("weighted energy") {
    const CompactSet disk = CompactSet::unit_disk();
    for (double ell : {0.0, 0.5, 1.0}) {
      CHECK(std::abs(weighted_energy(CurveMeasure::equilibrium(disk), disk, ell)) <= 1e-10);
    }
    CHECK(weighted_energy(CurveMeasure::circle({}, 0.5), disk, 1.0) == Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(weighted_energy(CurveMeasure::circle({}, 2.0), disk, 1.0) == Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(weighted_energy(CurveMeasure::circle({}, 2.0), disk, 0.0) == kInf);
    const Measure off = smooth(AtomicMeasure::dirac(1.5), 0.2);
    double previous = kInf;
    for (double ell : {0.1, 0.25, 0.5, 1.0}) {
      const double v = weighted_energy(off, disk, ell);
      CHECK(v <= previous);
      previous = v;
    }
    CHECK_THROWS_AS(weighted_energy(off, disk, 1.5), ConstraintError);
  }

  TEST_CASE("weighted energy exceeds the Robin energy") {
    const CompactSet disk = CompactSet::unit_disk();
    const Measure tests[] = {CurveMeasure::circle({}, 0.5), CurveMeasure::circle({}, 1.5),
                             CurveMeasure::circle({0.2, 0.0}, 1.0), smooth(AtomicMeasure::dirac(0.0), 0.5),
                             smoothed_circle(64, 0.1)};
    for (const Measure& mu : tests) {
      for (double ell : {0.0, 0.25, 0.5, 1.0}) CHECK(weighted_energy(mu, disk, ell) > disk.robin_energy());
    }
  }

  TEST_CASE("smooth density") {
    const SmoothedMeasure nu = smooth(AtomicMeasure({{0.0, 0.5}, {1.0, 0.5}}), 0.1);
    CHECK(nu.density(0.0) == Approx(0.5 / (kPi * 0.01)));
    CHECK(nu.density({1.05, 0.0}) == Approx(0.5 / (kPi * 0.01)));
    CHECK(nu.density(0.5) == 0.0);
    CHECK_THROWS(smooth(AtomicMeasure::dirac(0.0), 0.0));
  }

  TEST_CASE("mass in box matches grid integration of the density") {
    const SmoothedMeasure nu = smooth(AtomicMeasure({{0.0, 0.3}, {cplx{0.1, 0.05}, 0.7}}), 0.2);
    const double x0 = -0.05, x1 = 0.17, y0 = -0.3, y1 = 0.11;
    const int n = 1500;
    double grid = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        grid += nu.density({x0 + (x1 - x0) * (i + 0.5) / n, y0 + (y1 - y0) * (j + 0.5) / n});
      }
    }
    grid *= (x1 - x0) * (y1 - y0) / (double(n) * n);
    CHECK(nu.mass_in_box(x0, x1, y0, y1) == Approx(grid).epsilon(2e-3));
    CHECK(nu.mass_in_box(-1.0, 1.0, -1.0, 1.0) == Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("bounded-Lipschitz distance examples") {
    const AtomicMeasure mu({{0.0, 0.25}, {cplx{1.0, 1.0}, 0.75}});
    CHECK(bl_distance(mu, mu).value == Approx(0.0).scale(1.0));
    for (double x : {0.3, 1.0, 1.9, 2.5, 5.0}) {
      CHECK(bl_distance(AtomicMeasure::dirac(0.0), AtomicMeasure::dirac(x)).value == Approx(std::min(x, 2.0)));
    }
    const Configuration c({0.0, 1.0, cplx{0.0, 2.0}});
    const Configuration p({cplx{0.0, 2.0}, 0.0, 1.0});
    CHECK(bl_distance(c.empirical_measure(), p.empirical_measure()).value == Approx(0.0).scale(1.0));
  }

  TEST_CASE("bounded-Lipschitz distance equals the primal LP") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> coord(-1.5, 1.5), w(0.1, 1.0);
    for (int t = 0; t < 40; ++t) {
      const std::size_t n = 2 + t % 5, m = 1 + t % 4;
      std::vector<Atom> a(n), b(m);
      double sa = 0.0, sb = 0.0;
      for (Atom& x : a) sa += (x = {cplx{coord(rng), coord(rng)}, w(rng)}).weight;
      for (Atom& x : b) sb += (x = {cplx{coord(rng), coord(rng)}, w(rng)}).weight;
      for (Atom& x : a) x.weight /= sa;
      for (Atom& x : b) x.weight /= sb;
      std::vector<cplx> pts;
      std::vector<double> mu, nu;
      for (const Atom& x : a) pts.push_back(x.position), mu.push_back(x.weight), nu.push_back(0.0);
      for (const Atom& x : b) pts.push_back(x.position), mu.push_back(0.0), nu.push_back(x.weight);
      const double lp = oracle::bl_primal(pts, mu, nu);
      CHECK(bl_distance(AtomicMeasure(a), AtomicMeasure(b)).value == Approx(lp).epsilon(1e-9));
    }
  }

  TEST_CASE("bounded-Lipschitz metric axioms") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    const auto random_measure = [&] {
      std::vector<cplx> p(5);
      for (cplx& z : p) z = {coord(rng), coord(rng)};
      return AtomicMeasure::uniform(p);
    };
    for (int t = 0; t < 20; ++t) {
      const AtomicMeasure a = random_measure(), b = random_measure(), c = random_measure();
      const double ab = bl_distance(a, b).value, ba = bl_distance(b, a).value;
      CHECK(ab == Approx(ba).epsilon(1e-12));
      CHECK(ab <= bl_distance(a, c).value + bl_distance(c, b).value + 1e-8);
      CHECK(ab <= 2.0);
    }
  }

  TEST_CASE("mollification moves mass by at most eps") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (double eps : {0.5, 0.1, 0.01}) {
      for (int t = 0; t < 30; ++t) {
        std::vector<cplx> p(1 + t % 4);
        for (cplx& z : p) z = {coord(rng), coord(rng)};
        const AtomicMeasure nu = AtomicMeasure::uniform(p);
        CHECK(bl_distance(nu, smooth(nu, eps).polar_proxy(6, 24)).value <= eps);
      }
    }
  }

  TEST_CASE("discretization") {
    const SmoothedMeasure nu = smoothed_circle(256, 0.1);
    for (std::size_t n : {16u, 64u, 100u}) {
      const Discretization d = discretize(nu, n);
      CHECK(d.configuration.size() == n);
      CHECK(d.strips == static_cast<std::size_t>(std::ceil(std::sqrt(double(n)))));
      CHECK(d.generated >= n);
      CHECK(d.generated - n <= d.strips);
      CHECK(d.min_separation == Approx(min_separation(d.configuration)));
      CHECK(d.separation_constant == Approx(d.min_separation * std::sqrt(double(n))));
      CHECK(d.separation_constant > 0.3);
      const Box box = nu.bounding_box();
      for (cplx z : d.configuration.points()) {
        CHECK(z.real() >= box.xmin - 1e-12);
        CHECK(z.real() <= box.xmax + 1e-12);
        CHECK(z.imag() >= box.ymin - 1e-12);
        CHECK(z.imag() <= box.ymax + 1e-12);
      }
    }
    CHECK_THROWS_AS(discretize(nu, 3), ConstraintError);
  }

  TEST_CASE("perturbation ball") {
    const Discretization d = discretize(smoothed_circle(128, 0.1), 64);
    const PerturbationBall ball = perturbation_ball(d.configuration, 0.4);
    CHECK(ball.radius() == Approx(0.4 / (3.0 * 8.0)));
    CHECK(ball.contains(d.configuration));
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
      const Configuration eta = ball.sample(rng);
      CHECK(ball.contains(eta));
      CHECK(bl_distance(eta.empirical_measure(), d.configuration.empirical_measure()).value <= ball.radius() + 1e-12);
      CHECK(ball.energy_deviation(eta) ==
            Approx(std::abs(discrete_energy(eta) - discrete_energy(d.configuration))).epsilon(1e-9));
    }
  }
}
