#include "potlab/fekete.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>

#include "potlab/errors.hpp"

namespace potlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double objective(const CompactSet& k, std::span<const cplx> z, double floor) {
  const std::size_t n = z.size();
  double pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::max(std::abs(z[i] - z[j]), floor);
      if (d == 0.0) return -kInf;
      pairs += std::log(d);
    }
  }
  double field = 0.0;
  for (cplx p : z) field += k.green(p);
  return pairs - static_cast<double>(n - 1) * field;
}

std::vector<cplx> gradient(const CompactSet& k, std::span<const cplx> z, double floor) {
  const std::size_t n = z.size();
  std::vector<cplx> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx d = z[i] - z[j];
      const double r2 = std::max(std::norm(d), floor * floor);
      g[i] += d / r2;
      g[j] -= d / r2;
    }
  }
  for (std::size_t i = 0; i < n; ++i) g[i] -= static_cast<double>(n - 1) * k.green_gradient(z[i]);
  return g;
}

struct StartResult {
  std::vector<cplx> points;
  double value = -kInf;
  std::vector<double> trace;
  std::size_t iterations = 0;
  bool converged = false;
};

constexpr double kFloor = 1e-14;
// objective changes below this relative size are rounding noise
constexpr double kRoundoff = 1e-13;

// Per-point curvature scale sum_j |z_i - z_j|^-2, used as a diagonal
// preconditioner for the ascent direction.
std::vector<double> curvature(std::span<const cplx> z, double floor) {
  const std::size_t n = z.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = 1.0 / std::max(std::norm(z[i] - z[j]), floor * floor);
      d[i] += w;
      d[j] += w;
    }
  }
  return d;
}

double tangent_residual(const CompactSet& k, std::span<const cplx> x, std::span<const cplx> g) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(k.tangent_cone_projection(x[i], g[i])));
  return m;
}

// Uniformizing angles of points on the boundary; nullopt if any point is off it.
std::optional<Eigen::VectorXd> boundary_angles(const CompactSet& k, std::span<const cplx> z) {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (k.green(z[i]) > kContainmentTol) return std::nullopt;
    const auto w = k.preimage(z[i]);
    if (!w || std::abs(std::abs(*w) - 1.0) > 1e-9) return std::nullopt;
    theta[static_cast<Eigen::Index>(i)] = std::arg(*w);
  }
  return theta;
}

std::vector<cplx> boundary_points(const CompactSet& k, const Eigen::VectorXd& theta) {
  std::vector<cplx> z(static_cast<std::size_t>(theta.size()));
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = k.project(k.boundary_point(theta[static_cast<Eigen::Index>(i)]));
  return z;
}

// d/d theta_i of sum_{m<n} log|z_n - z_m| with z_i = psi(e^{i theta_i}).
Eigen::VectorXd angle_gradient(const CompactSet& k, const Eigen::VectorXd& theta) {
  const std::size_t n = static_cast<std::size_t>(theta.size());
  std::vector<cplx> z(n), dz(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx w = std::polar(1.0, theta[static_cast<Eigen::Index>(i)]);
    z[i] = k.map()(w);
    dz[i] = cplx(0.0, 1.0) * w * k.map().derivative(w);
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
  for (std::size_t i = 0; i < n; ++i) {
    cplx gi{};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const cplx d = z[i] - z[j];
      gi += d / std::max(std::norm(d), kFloor * kFloor);
    }
    grad[static_cast<Eigen::Index>(i)] = std::real(std::conj(gi) * dz[i]);
  }
  return grad;
}

// Newton iterations in the boundary angles with eigenvalue-floored Hessian.
// Every weighted Fekete point lies on the boundary of K (the objective is
// harmonic in each point inside K), so this finishes stalled ascents.
void polish(const CompactSet& k, std::vector<cplx>& x, double& f, std::vector<cplx>& g, double tol,
            StartResult& out) {
  constexpr int kMaxNewton = 50;
  constexpr double kStep = 1e-6;
  for (int it = 0; it < kMaxNewton; ++it) {
    if (tangent_residual(k, x, g) <= tol) {
      out.converged = true;
      return;
    }
    const auto theta = boundary_angles(k, x);
    if (!theta) return;
    const Eigen::Index n = theta->size();
    const Eigen::VectorXd grad = angle_gradient(k, *theta);
    Eigen::MatrixXd hess(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd up = *theta, down = *theta;
      up[j] += kStep;
      down[j] -= kStep;
      hess.col(j) = (angle_gradient(k, up) - angle_gradient(k, down)) / (2.0 * kStep);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
    const Eigen::VectorXd lambda = eig.eigenvalues().cwiseAbs();
    const double floor = std::max(1e-10 * lambda.maxCoeff(), 1e-300);
    const Eigen::VectorXd coeff = (eig.eigenvectors().transpose() * grad).cwiseQuotient(lambda.cwiseMax(floor));
    const Eigen::VectorXd step = eig.eigenvectors() * coeff;
    bool accepted = false;
    for (double alpha = 1.0; alpha > 1e-6; alpha *= 0.5) {
      std::vector<cplx> y = boundary_points(k, *theta + alpha * step);
      const double fy = objective(k, y, kFloor);
      if (fy > -kInf && fy >= f - kRoundoff * std::max(1.0, std::abs(f))) {
        x.swap(y);
        f = fy;
        g = gradient(k, x, kFloor);
        out.trace.push_back(f);
        ++out.iterations;
        accepted = true;
        break;
      }
    }
    if (!accepted) return;
  }
  out.converged = tangent_residual(k, x, g) <= tol;
}

StartResult ascend(const CompactSet& k, std::vector<cplx> x, const FeketeOptions& opts) {
  const std::size_t n = x.size();
  const double tol = opts.gradient_tol * static_cast<double>(n);
  StartResult out;
  double f = objective(k, x, kFloor);
  std::vector<cplx> g = gradient(k, x, kFloor);
  std::vector<double> scale = curvature(x, kFloor);
  double step = 0.1;
  std::vector<cplx> y(n);
  out.trace.push_back(f);
  constexpr std::size_t kStallWindow = 100;
  double window_start = f;
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    if (tangent_residual(k, x, g) <= tol) {
      out.converged = true;
      break;
    }
    if (it > 0 && it % kStallWindow == 0) {
      if (f - window_start <= 1e-6 * std::max(1.0, std::abs(f))) {
        polish(k, x, f, g, tol, out);
        if (out.converged) break;
        scale = curvature(x, kFloor);
      }
      window_start = f;
    }
    bool accepted = false;
    double fy = f;
    for (int bt = 0; bt < 60; ++bt) {
      double ascent = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = k.project(x[i] + step * g[i] / scale[i]);
        ascent += std::real(std::conj(g[i]) * (y[i] - x[i]));
      }
      fy = objective(k, y, kFloor);
      if (fy > -kInf &&
          fy >= f + 1e-4 * std::max(ascent, 0.0) - kRoundoff * std::max(1.0, std::abs(f))) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    std::vector<cplx> gy = gradient(k, y, kFloor);
    std::vector<double> scale_y = curvature(y, kFloor);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx s = y[i] - x[i];
      ss += scale_y[i] * std::norm(s);
      sy += std::real(std::conj(s) * (gy[i] - g[i]));
    }
    // Barzilai-Borwein step in the preconditioned metric
    step = sy < 0.0 ? ss / -sy : 2.0 * step;
    step = std::clamp(step, 1e-12, 1e3);
    x.swap(y);
    g.swap(gy);
    scale.swap(scale_y);
    f = fy;
    out.trace.push_back(f);
    ++out.iterations;
  }
  if (!out.converged) polish(k, x, f, g, tol, out);
  out.points = std::move(x);
  out.value = objective(k, out.points, 0.0);
  return out;
}

std::vector<cplx> starting_points(const CompactSet& k, std::size_t n, std::uint64_t stream,
                                  double jitter) {
  std::mt19937_64 rng(stream);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, jitter * k.capacity());
  std::vector<cplx> base(n), pts(n);
  for (cplx& z : base) z = k.boundary_point(angle(rng));
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = noise(rng);
    const double dy = noise(rng);
    pts[i] = k.project(base[i] + cplx(dx, dy));
  }
  // Projection can merge jittered points; fall back to the unjittered one.
  const double tiny = 1e-9 * k.capacity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(pts[i] - pts[j]) <= tiny) {
        pts[i] = base[i];
        break;
      }
    }
  }
  return pts;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

unsigned default_threads() {
  if (const char* env = std::getenv("POTLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
  }
  return 1;
}

double log_delta(const CompactSet& k, const Configuration& c) {
  if (c.size() < 2) throw ConstraintError("log_delta: N must be >= 2");
  return objective(k, c.points(), 0.0);
}

std::vector<cplx> log_delta_gradient(const CompactSet& k, const Configuration& c, double floor) {
  return gradient(k, c.points(), floor);
}

FeketeResult solve_fekete(const CompactSet& k, std::size_t n, std::uint64_t seed,
                          const FeketeOptions& opts) {
  if (n < 2) throw ConstraintError("solve_fekete: N must be >= 2");
  const std::size_t starts =
      opts.starts > 0 ? opts.starts : std::max<std::size_t>(8, (n + 7) / 8);
  std::vector<StartResult> results(starts);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t s = next++; s < starts; s = next++) {
      results[s] = ascend(k, starting_points(k, n, derive_seed(seed, s), opts.jitter), opts);
    }
  };
  const unsigned threads = std::min<unsigned>(opts.threads > 0 ? opts.threads : default_threads(),
                                              static_cast<unsigned>(starts));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  FeketeResult out;
  std::size_t best = 0;
  for (std::size_t s = 0; s < starts; ++s) {
    if (results[s].converged) ++out.converged_starts;
    if (results[s].value > results[best].value) best = s;
  }
  StartResult& r = results[best];
  out.configuration = Configuration(std::move(r.points));
  out.log_delta = r.value;
  out.trace = std::move(r.trace);
  out.iterations = r.iterations;
  out.best_start = best;
  out.converged = r.converged;
  for (cplx z : out.configuration.points()) {
    out.max_green_violation = std::max(out.max_green_violation, k.green(z));
  }
  return out;
}

double capacity_estimate(const FeketeResult& r) {
  const auto n = static_cast<double>(r.configuration.size());
  return std::exp(2.0 * r.log_delta / (n * (n - 1.0)));
}

double capacity_estimate(const CompactSet& k, std::size_t n, std::uint64_t seed,
                         const FeketeOptions& opts) {
  if (n < 8) throw ConstraintError("capacity_estimate: N must be >= 8");
  const FeketeResult r = solve_fekete(k, n, seed, opts);
  if (!r.converged) throw ConvergenceError("capacity_estimate: Fekete solver did not converge");
  return capacity_estimate(r);
}

}  // namespace potlab
