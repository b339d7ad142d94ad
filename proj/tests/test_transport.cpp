#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "lp_oracle.hpp"
#include "potlab/transport.hpp"

using namespace potlab;
using doctest::Approx;

namespace {

// Equal uniform masses: an optimal plan is a permutation (Birkhoff).
double assignment_brute_force(const std::vector<cplx>& a, const std::vector<cplx>& b, double cap) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) c += std::min(std::abs(a[i] - b[perm[i]]), cap);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(a.size());
}

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("uniform transport equals the best assignment") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (std::size_t n = 1; n <= 6; ++n) {
      for (int t = 0; t < 8; ++t) {
        std::vector<cplx> a(n), b(n);
        for (cplx& z : a) z = {u(rng), u(rng)};
        for (cplx& z : b) z = {u(rng), u(rng)};
        const std::vector<double> w(n, 1.0 / static_cast<double>(n));
        const TransportResult r = solve_transport(a, w, b, w, 2.0);
        CHECK(r.optimal);
        CHECK(r.cost == Approx(assignment_brute_force(a, b, 2.0)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("unequal masses match the bounded-Lipschitz LP dual") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.2, 1.0);
    for (int t = 0; t < 20; ++t) {
      std::vector<cplx> a(3 + t % 3), b(2 + t % 4);
      std::vector<double> wa(a.size()), wb(b.size());
      for (cplx& z : a) z = {u(rng), u(rng)};
      for (cplx& z : b) z = {u(rng), u(rng)};
      for (double& x : wa) x = w(rng);
      for (double& x : wb) x = w(rng);
      const double sa = std::accumulate(wa.begin(), wa.end(), 0.0), sb = std::accumulate(wb.begin(), wb.end(), 0.0);
      for (double& x : wa) x /= sa;
      for (double& x : wb) x /= sb;
      std::vector<cplx> pts(a);
      pts.insert(pts.end(), b.begin(), b.end());
      std::vector<double> mu(wa), nu(wa.size(), 0.0);
      mu.resize(pts.size(), 0.0);
      nu.insert(nu.end(), wb.begin(), wb.end());
      const TransportResult r = solve_transport(a, wa, b, wb, 2.0);
      CHECK(r.optimal);
      CHECK(r.cost == Approx(oracle::bl_primal(pts, mu, nu)).epsilon(1e-9));
    }
  }

  TEST_CASE("truncation caps the ground cost") {
    const std::vector<cplx> a{0.0}, b{10.0};
    const std::vector<double> w{1.0};
    CHECK(solve_transport(a, w, b, w, 2.0).cost == Approx(2.0));
    CHECK(solve_transport(a, w, b, w, 20.0).cost == Approx(10.0));
  }

  TEST_CASE("size mismatch throws") {
    const std::vector<cplx> a{0.0, 1.0}, b{1.0};
    const std::vector<double> w{1.0};
    CHECK_THROWS(solve_transport(a, w, b, w, 2.0));
  }
}
