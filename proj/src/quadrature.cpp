#include "potlab/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <queue>
#include <stdexcept>

namespace potlab {

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 double* error, unsigned max_depth) {
  if (a == b) {
    if (error) *error = 0.0;
    return 0.0;
  }
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol, &err);
  if (error) *error = err;
  return value;
}

double integrate_pieces(const std::function<double(double)>& f, std::span<const double> knots,
                        double tol) {
  std::vector<double> pts(knots.begin(), knots.end());
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] > pts[i]) total += integrate(f, pts[i], pts[i + 1], tol);
  }
  return total;
}

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  if (n == 1) {
    rule.nodes[0] = mid;
    rule.weights[0] = b - a;
    return rule;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // final derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

namespace {

struct Region {
  std::vector<double> center;
  std::vector<double> half;
  double value = 0.0;
  double error = 0.0;
  std::size_t split_dim = 0;
  bool operator<(const Region& other) const { return error < other.error; }
};

class GenzMalik {
 public:
  explicit GenzMalik(std::size_t dim) : dim_(dim) {
    const double n = static_cast<double>(dim);
    w1_ = (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0;
    w2_ = 980.0 / 6561.0;
    w3_ = (1820.0 - 400.0 * n) / 19683.0;
    w4_ = 200.0 / 19683.0;
    w5_ = 6859.0 / 19683.0 / std::ldexp(1.0, static_cast<int>(dim));
    e1_ = (729.0 - 950.0 * n + 50.0 * n * n) / 729.0;
    e2_ = 245.0 / 486.0;
    e3_ = (265.0 - 100.0 * n) / 1458.0;
    e4_ = 25.0 / 729.0;
  }

  std::size_t points_per_region() const {
    return (std::size_t{1} << dim_) + 2 * dim_ * dim_ + 2 * dim_ + 1;
  }

  void evaluate(const Integrand& f, Region& r) const {
    constexpr double l2 = 0.35856858280031809;  // sqrt(9/70)
    constexpr double l4 = 0.94868329805051380;  // sqrt(9/10)
    constexpr double l5 = 0.68824720161168529;  // sqrt(9/19)
    constexpr double ratio = (l2 * l2) / (l4 * l4);
    std::vector<double> x(r.center);
    const double f0 = f(x);
    double sum2 = 0.0, sum3 = 0.0, sum4 = 0.0, sum5 = 0.0;
    double best_diff = -1.0;
    r.split_dim = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
      x[i] = r.center[i] - l2 * r.half[i];
      const double a = f(x);
      x[i] = r.center[i] + l2 * r.half[i];
      const double b = f(x);
      x[i] = r.center[i] - l4 * r.half[i];
      const double c = f(x);
      x[i] = r.center[i] + l4 * r.half[i];
      const double d = f(x);
      x[i] = r.center[i];
      sum2 += a + b;
      sum3 += c + d;
      const double diff = std::abs(a + b - 2.0 * f0 - ratio * (c + d - 2.0 * f0));
      if (diff > best_diff + 1e-15 * std::abs(best_diff) ||
          (std::abs(diff - best_diff) <= 1e-15 * std::abs(best_diff) &&
           r.half[i] > r.half[r.split_dim])) {
        best_diff = diff;
        r.split_dim = i;
      }
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i + 1; j < dim_; ++j) {
        for (int si = -1; si <= 1; si += 2) {
          for (int sj = -1; sj <= 1; sj += 2) {
            x[i] = r.center[i] + si * l4 * r.half[i];
            x[j] = r.center[j] + sj * l4 * r.half[j];
            sum4 += f(x);
          }
        }
        x[i] = r.center[i];
        x[j] = r.center[j];
      }
    }
    const std::size_t corners = std::size_t{1} << dim_;
    for (std::size_t mask = 0; mask < corners; ++mask) {
      for (std::size_t i = 0; i < dim_; ++i) {
        x[i] = r.center[i] + ((mask >> i) & 1u ? l5 : -l5) * r.half[i];
      }
      sum5 += f(x);
    }
    double volume = 1.0;
    for (double h : r.half) volume *= 2.0 * h;
    const double seventh = volume * (w1_ * f0 + w2_ * sum2 + w3_ * sum3 + w4_ * sum4 + w5_ * sum5);
    const double fifth = volume * (e1_ * f0 + e2_ * sum2 + e3_ * sum3 + e4_ * sum4);
    r.value = seventh;
    r.error = std::abs(seventh - fifth);
  }

 private:
  std::size_t dim_;
  double w1_, w2_, w3_, w4_, w5_;
  double e1_, e2_, e3_, e4_;
};

}  // namespace

CubatureResult adaptive_cubature(const Integrand& f, std::span<const double> lower,
                                 std::span<const double> upper, double rel_tol, double abs_tol,
                                 std::size_t max_evaluations) {
  const std::size_t dim = lower.size();
  if (dim < 2 || upper.size() != dim) {
    throw std::invalid_argument("adaptive_cubature: dimension must be >= 2 and bounds must agree");
  }
  GenzMalik rule(dim);
  Region root;
  root.center.resize(dim);
  root.half.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    root.center[i] = 0.5 * (lower[i] + upper[i]);
    root.half[i] = 0.5 * (upper[i] - lower[i]);
  }
  CubatureResult out;
  rule.evaluate(f, root);
  out.evaluations = rule.points_per_region();
  std::priority_queue<Region> heap;
  double total = root.value;
  double total_error = root.error;
  heap.push(std::move(root));
  while (true) {
    if (total_error <= std::max(abs_tol, rel_tol * std::abs(total))) {
      out.converged = true;
      break;
    }
    if (out.evaluations + 2 * rule.points_per_region() > max_evaluations) break;
    Region r = heap.top();
    heap.pop();
    total -= r.value;
    total_error -= r.error;
    Region left = r, right = r;
    const std::size_t d = r.split_dim;
    left.half[d] = right.half[d] = 0.5 * r.half[d];
    left.center[d] = r.center[d] - 0.5 * r.half[d];
    right.center[d] = r.center[d] + 0.5 * r.half[d];
    rule.evaluate(f, left);
    rule.evaluate(f, right);
    out.evaluations += 2 * rule.points_per_region();
    total += left.value + right.value;
    total_error += left.error + right.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
  }
  // re-sum to shed accumulated cancellation from the running totals
  double value = 0.0, error = 0.0;
  out.regions = heap.size();
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  if (!out.converged) out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  return out;
}

}  // namespace potlab
