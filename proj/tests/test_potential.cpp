#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "potlab/errors.hpp"
#include "potlab/io.hpp"
#include "potlab/potential.hpp"

using namespace potlab;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("potential") {
  TEST_CASE("disk green function and capacity") {
    const CompactSet k = CompactSet::unit_disk();
    CHECK(k.green({0.3, -0.4}) == 0.0);
    CHECK(k.green({1.0, 0.0}) == 0.0);
    CHECK(k.green(2.0) == Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(k.capacity() == 1.0);
    CHECK(k.robin_energy() == 0.0);
    CHECK(CompactSet::disk({}, 0.5).robin_energy() == Approx(std::log(2.0)));
  }

  TEST_CASE("segment green function via inverse Joukowski") {
    const CompactSet k = CompactSet::segment(-2.0, 2.0);
    CHECK(k.capacity() == Approx(1.0));
    CHECK(k.robin_energy() == Approx(0.0));
    CHECK(k.green(3.0) == Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-14));
    CHECK(k.green(0.7) == 0.0);
    // Off the real axis: |w| of the larger root of w^2 - z w + 1 = 0.
    const cplx z{0.5, 1.5};
    const cplx r = std::sqrt(z * z - 4.0);
    const double expected = std::log(std::max(std::abs((z + r) / 2.0), std::abs((z - r) / 2.0)));
    CHECK(k.green(z) == Approx(expected).epsilon(1e-13));
  }

  TEST_CASE("ellipse capacity and exterior-map agreement") {
    const CompactSet e = CompactSet::ellipse({}, 2.0, 1.0);
    CHECK(e.capacity() == Approx(1.5));
    // psi(w) = w + 0.25/w maps |w| > 1 onto the exterior of the (1.25, 0.75) ellipse.
    const CompactSet a = CompactSet::ellipse({}, 1.25, 0.75);
    const CompactSet b = CompactSet::exterior_map(1.0, {0.0, 0.25}, 1);
    for (cplx z : {cplx{2.0, 0.3}, cplx{-0.4, 1.1}, cplx{0.0, 3.0}, cplx{1.3, -0.2}}) {
      CHECK(b.green(z) == Approx(a.green(z)).epsilon(1e-9));
    }
    CHECK(b.green({0.2, 0.1}) == 0.0);
  }

  TEST_CASE("green asymptote recovers the Robin constant") {
    for (const CompactSet& k : {CompactSet::unit_disk(), CompactSet::segment(-2.0, 2.0),
                                CompactSet::ellipse({0.5, 0.0}, 2.0, 1.0), CompactSet::disk({1.0, 1.0}, 0.5)}) {
      // g_K(z) = log|z| - log cap(K) + O(1/|z|).
      const cplx z = 1e7 * std::polar(1.0, 0.7);
      CHECK(std::abs(k.green(z) - std::log(std::abs(z)) + std::log(k.capacity())) <= 1e-6);
    }
  }

  TEST_CASE("green is harmonic off K (mean value on small circles)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (const CompactSet& k : {CompactSet::segment(-2.0, 2.0), CompactSet::ellipse({}, 2.0, 1.0)}) {
      int tested = 0;
      while (tested < 200) {
        const cplx z{u(rng), u(rng)};
        const double g = k.green(z);
        if (g < 0.2) continue;
        const double h = 0.05;
        double mean = 0.0;
        for (int i = 0; i < 64; ++i) mean += k.green(z + std::polar(h, 2.0 * kPi * i / 64.0)) / 64.0;
        CHECK(std::abs(mean - g) <= 1e-6 * g);
        ++tested;
      }
    }
  }

  TEST_CASE("equilibrium samples and integrals") {
    const Configuration c = equilibrium_sample(CompactSet::unit_disk(), 1000, 3);
    double mean_re = 0.0;
    for (cplx z : c.points()) {
      CHECK(std::abs(std::abs(z) - 1.0) <= 1e-14);
      mean_re += z.real() / 1000.0;
    }
    CHECK(std::abs(mean_re) <= 4.0 / std::sqrt(2000.0));

    const Configuration s = equilibrium_sample(CompactSet::segment(-2.0, 2.0), 20000, 5);
    double m2 = 0.0;
    for (cplx z : s.points()) m2 += z.real() * z.real() / 20000.0;
    // Arcsine law: E x^2 = 2, Var x^2 = 6 - 4.
    CHECK(std::abs(m2 - 2.0) <= 4.0 * std::sqrt(2.0 / 20000.0));

    CHECK(equilibrium_integral(CompactSet::unit_disk(), [](cplx z) { return std::norm(z); }).value ==
          Approx(1.0).epsilon(1e-12));
    const double arcsine = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [](double t) { return 4.0 * std::sin(t) * std::sin(t) / kPi; }, -kPi / 2.0, kPi / 2.0, 15, 1e-14);
    CHECK(equilibrium_integral(CompactSet::segment(-2.0, 2.0), [](cplx z) { return z.real() * z.real(); }).value ==
          Approx(arcsine).epsilon(1e-8));
    CHECK(equilibrium_integral(CompactSet::unit_disk(), [](cplx) { return 1.0; }).value == Approx(1.0));
  }

  TEST_CASE("logarithmic potential") {
    CHECK(log_potential(AtomicMeasure::dirac(0.0), std::numbers::e) == Approx(-1.0));
    CHECK(log_potential(AtomicMeasure::dirac(0.0), 0.0) == kInf);
    std::vector<cplx> pts(512);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = std::polar(1.0, 2.0 * kPi * i / 512.0);
    CHECK(std::abs(log_potential(AtomicMeasure::uniform(pts), 0.0)) <= 1e-12);
  }

  TEST_CASE("mahler measure") {
    const CompactSet disk = CompactSet::unit_disk();
    CHECK(mahler_measure(disk, Polynomial({-2.0, 0.0, 1.0})) == Approx(2.0).epsilon(1e-12));
    CHECK(mahler_measure(disk, Polynomial({0.0, 1.0})) == Approx(1.0));
    CHECK(mahler_measure(CompactSet::segment(-2.0, 2.0), Polynomial({0.0, 1.0})) == Approx(1.0).epsilon(1e-12));
    const Polynomial p({cplx{1.0, 2.0}, -3.0, 1.0}), q({0.5, cplx{0.0, 4.0}});
    CHECK(mahler_measure(disk, p * q) ==
          Approx(mahler_measure(disk, p) * mahler_measure(disk, q)).epsilon(1e-12));
    // Cross-check with the equilibrium integral of log|p| on an ellipse of capacity 1.
    const CompactSet e = CompactSet::ellipse({}, 1.5, 0.5);
    const double direct = std::exp(equilibrium_integral(e, [&](cplx z) { return std::log(std::abs(p(z))); }).value);
    CHECK(mahler_measure(e, p) == Approx(direct).epsilon(1e-8));
    CHECK_THROWS_AS(mahler_measure(CompactSet::disk({}, 2.0), p), std::invalid_argument);
    CHECK_THROWS(Polynomial({0.0, 0.0}));
  }

  TEST_CASE("disk balayage") {
    const CompactSet disk = CompactSet::unit_disk();
    const DiskBalayage b = balayage_disk(AtomicMeasure::dirac(2.0), disk);
    CHECK(b.total_mass() == Approx(1.0).epsilon(1e-10));
    for (double t : {0.0, 1.0, 2.5}) {
      CHECK(b.density(t) == Approx(3.0 / (2.0 * kPi * std::norm(2.0 - std::polar(1.0, t)))).epsilon(1e-12));
    }
    for (cplx z : {cplx{0.0}, cplx{0.3, 0.4}, cplx{-0.7, 0.1}}) {
      CHECK(b.potential(z) == Approx(log_potential(AtomicMeasure::dirac(2.0), z) + std::log(2.0)).epsilon(1e-9));
    }
    const DiskBalayage far = balayage_disk(AtomicMeasure::dirac(1e6), disk);
    CHECK(far.density(1.0) == Approx(1.0 / (2.0 * kPi)).epsilon(1e-5));
    const DiskBalayage edge = balayage_disk(AtomicMeasure::dirac(std::polar(1.0, 0.3)), disk);
    CHECK(edge.kept_atoms().size() == 1);
    CHECK(edge.swept_atoms().empty());
  }

  TEST_CASE("projection is the nearest point") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (const CompactSet& k : {CompactSet::ellipse({0.2, -0.1}, 2.0, 1.0), CompactSet::segment(-2.0, 2.0),
                                CompactSet::disk({1.0, 0.0}, 0.5)}) {
      for (int t = 0; t < 20; ++t) {
        const cplx z{u(rng), u(rng)};
        const cplx p = k.project(z);
        CHECK(k.contains(p));
        double best = kInf;
        for (int i = 0; i < 20000; ++i) best = std::min(best, std::abs(z - k.boundary_point(2.0 * kPi * i / 20000.0)));
        if (!k.contains(z)) CHECK(std::abs(z - p) <= best + 1e-6);
      }
    }
  }

  TEST_CASE("compact set serialization") {
    for (const CompactSet& k : {CompactSet::disk({0.5, -1.0}, 2.0), CompactSet::segment(-1.0, 3.0),
                                CompactSet::ellipse({}, 2.0, 1.0), CompactSet::exterior_map(1.0, {0.0, 0.25}, 1)}) {
      const CompactSet back = compact_set_from_json_string(to_json_string(k));
      CHECK(back.kind() == k.kind());
      CHECK(back.green({3.0, 1.0}) == k.green({3.0, 1.0}));
    }
    CHECK_THROWS_AS(compact_set_from_json_string(R"({"type":"disk","radius":1,"color":"red"})"), SchemaError);
    CHECK_THROWS_AS(compact_set_from_json_string(R"({"type":"segment","a":2,"b":1})"), SchemaError);
    CHECK_THROWS_AS(compact_set_from_json_string(R"({"type":"torus"})"), SchemaError);
    CHECK_THROWS_AS(compact_set_from_json_string("{"), SchemaError);
  }
}
