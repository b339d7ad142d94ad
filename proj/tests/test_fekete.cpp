#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "potlab/errors.hpp"
#include "potlab/fekete.hpp"

using namespace potlab;
using doctest::Approx;

TEST_SUITE("fekete") {
  TEST_CASE("log delta examples") {
    const CompactSet disk = CompactSet::unit_disk();
    CHECK(log_delta(disk, Configuration({-1.0, 1.0})) == Approx(std::log(2.0)));
    CHECK(log_delta(disk, Configuration({0.0, 0.0})) == -kInf);
    // Outside points pay (N-1) g_K each.
    CHECK(log_delta(disk, Configuration({0.0, 3.0})) == Approx(std::log(3.0) - std::log(3.0)));
    CHECK(log_delta(disk, Configuration({-2.0, 2.0, cplx{0.0, 2.0}})) ==
          Approx(std::log(4.0) + 2.0 * std::log(std::sqrt(8.0)) - 2.0 * 3.0 * std::log(2.0)));
    CHECK_THROWS_AS(log_delta(disk, Configuration({0.0})), ConstraintError);
  }

  TEST_CASE("gradient matches central differences") {
    const CompactSet k = CompactSet::ellipse({}, 2.0, 1.0);
    const Configuration c({cplx{0.3, 0.1}, cplx{-1.0, 0.4}, cplx{2.5, 0.3}, cplx{0.0, -1.6}});
    const auto g = log_delta_gradient(k, c);
    const double h = 1e-6;
    for (std::size_t i = 0; i < c.size(); ++i) {
      Configuration xp = c, xm = c, yp = c, ym = c;
      xp.set(i, c[i] + h);
      xm.set(i, c[i] - h);
      yp.set(i, c[i] + cplx{0.0, h});
      ym.set(i, c[i] - cplx{0.0, h});
      CHECK(g[i].real() == Approx((log_delta(k, xp) - log_delta(k, xm)) / (2 * h)).epsilon(1e-6));
      CHECK(g[i].imag() == Approx((log_delta(k, yp) - log_delta(k, ym)) / (2 * h)).epsilon(1e-6));
    }
  }

  TEST_CASE("small exact Fekete problems") {
    const FeketeResult d = solve_fekete(CompactSet::unit_disk(), 2, 1);
    CHECK(d.converged);
    CHECK(d.log_delta == Approx(std::log(2.0)).epsilon(1e-10));

    // Three Fekete points of [-2, 2] are the endpoints and the midpoint.
    const FeketeResult s = solve_fekete(CompactSet::segment(-2.0, 2.0), 3, 1);
    std::vector<double> x;
    for (cplx z : s.configuration.points()) x.push_back(z.real());
    std::sort(x.begin(), x.end());
    CHECK(x[0] == Approx(-2.0).epsilon(1e-6));
    CHECK(x[1] == Approx(0.0).scale(1.0).epsilon(1e-6));
    CHECK(x[2] == Approx(2.0).epsilon(1e-6));
    CHECK(s.log_delta == Approx(std::log(16.0)).epsilon(1e-10));
  }

  TEST_CASE("iterates stay in K") {
    for (const CompactSet& k : {CompactSet::unit_disk(), CompactSet::segment(-2.0, 2.0),
                                CompactSet::ellipse({0.5, 0.0}, 2.0, 1.0)}) {
      const FeketeResult r = solve_fekete(k, 12, 7);
      CHECK(r.max_green_violation <= 1e-8);
      for (cplx z : r.configuration.points()) CHECK(k.green(z) <= 1e-8);
      CHECK(r.trace.size() == r.iterations + 1);
      for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] - 1e-12 * std::abs(r.trace[i - 1]));
    }
  }

  TEST_CASE("disk of radius 2 at N = 60 attains the roots-of-unity value") {
    // |prod_{i<j} (z_i - z_j)| = r^{N(N-1)/2} N^{N/2} for scaled roots of unity.
    const double expected = 2.0 * std::pow(60.0, 1.0 / 59.0);
    CHECK(capacity_estimate(CompactSet::disk({}, 2.0), 60, 20240611) == Approx(expected).epsilon(1e-8));
  }

  TEST_CASE("scaling and translation covariance") {
    const double base = capacity_estimate(CompactSet::ellipse({}, 2.0, 1.0), 10, 3);
    for (double r : {0.5, 2.0}) {
      CHECK(capacity_estimate(CompactSet::ellipse({}, 2.0 * r, r), 10, 3) == Approx(r * base).epsilon(1e-6));
    }
    CHECK(capacity_estimate(CompactSet::ellipse({1.0, -2.0}, 2.0, 1.0), 10, 3) == Approx(base).epsilon(1e-6));
  }

  TEST_CASE("disk estimate decreases toward the capacity") {
    double previous = kInf;
    for (std::size_t n : {8u, 16u, 32u}) {
      const double c = capacity_estimate(CompactSet::unit_disk(), n, 1);
      CHECK(c == Approx(std::pow(double(n), 1.0 / double(n - 1))).epsilon(1e-8));
      CHECK(c < previous);
      CHECK(c > 1.0);
      previous = c;
    }
  }

  TEST_CASE("capacity estimate needs N >= 8") {
    CHECK_THROWS_AS(capacity_estimate(CompactSet::unit_disk(), 7, 1), ConstraintError);
  }

  TEST_CASE("determinism across runs and thread counts") {
    const CompactSet k = CompactSet::segment(-1.0, 3.0);
    FeketeOptions one, two;
    one.threads = 1;
    two.threads = 2;
    const FeketeResult a = solve_fekete(k, 16, 99, one), b = solve_fekete(k, 16, 99, one),
                       c = solve_fekete(k, 16, 99, two);
    CHECK(a.log_delta == b.log_delta);
    CHECK(a.log_delta == c.log_delta);
    CHECK(a.best_start == c.best_start);
    for (std::size_t i = 0; i < 16; ++i) CHECK(a.configuration[i] == c.configuration[i]);
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  }
}
