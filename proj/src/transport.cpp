#include "potlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "potlab/errors.hpp"
#include "potlab/measures.hpp"

namespace potlab {

namespace {

// Spanning-tree network simplex on sources -> sinks plus an artificial root
// joined to every node. Arc ids: [0, ns*nt) real, then ns source->root arcs,
// then nt root->sink arcs.
class NetworkSimplex {
 public:
  NetworkSimplex(std::span<const cplx> xs, std::span<const double> supply, std::span<const cplx> ys,
                 std::span<const double> demand, double truncation)
      : xs_(xs), ys_(ys), ns_(xs.size()), nt_(ys.size()), truncation_(truncation) {
    nodes_ = ns_ + nt_ + 1;
    root_ = nodes_ - 1;
    real_arcs_ = ns_ * nt_;
    big_ = 2.0 * truncation_ * static_cast<double>(nodes_ + 1) + 1.0;
    parent_.assign(nodes_, root_);
    parent_arc_.assign(nodes_, 0);
    flow_.assign(nodes_, 0.0);
    up_.assign(nodes_, false);
    depth_.assign(nodes_, 1);
    potential_.assign(nodes_, 0.0);
    adj_.assign(nodes_, {});
    depth_[root_] = 0;
    for (std::size_t i = 0; i < ns_; ++i) {
      parent_arc_[i] = real_arcs_ + i;
      flow_[i] = supply[i];
      up_[i] = true;
      potential_[i] = -big_;
      link(i, root_, parent_arc_[i]);
    }
    for (std::size_t j = 0; j < nt_; ++j) {
      const std::size_t v = ns_ + j;
      parent_arc_[v] = real_arcs_ + ns_ + j;
      flow_[v] = demand[j];
      up_[v] = false;
      potential_[v] = big_;
      link(v, root_, parent_arc_[v]);
    }
  }

  TransportResult run(std::size_t max_pivots) {
    TransportResult out;
    const std::size_t total_arcs = real_arcs_ + ns_ + nt_;
    const std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(double(total_arcs))));
    std::size_t next = 0;
    while (true) {
      // block pricing: best violating arc within the first block that has one
      std::size_t entering = total_arcs;
      double best = -kReducedCostTol;
      std::size_t scanned = 0;
      while (scanned < total_arcs) {
        const std::size_t stop = std::min(total_arcs - scanned, block);
        for (std::size_t k = 0; k < stop; ++k) {
          const std::size_t a = next;
          next = next + 1 == total_arcs ? 0 : next + 1;
          const double rc = cost(a) + potential_[tail(a)] - potential_[head(a)];
          if (rc < best) {
            best = rc;
            entering = a;
          }
        }
        scanned += stop;
        if (entering != total_arcs) break;
      }
      if (entering == total_arcs) {
        out.optimal = true;
        break;
      }
      if (out.pivots >= max_pivots) break;
      pivot(entering);
      ++out.pivots;
    }
    double total = 0.0;
    for (std::size_t v = 0; v < nodes_; ++v) {
      if (v != root_ && parent_arc_[v] < real_arcs_) total += flow_[v] * cost(parent_arc_[v]);
    }
    out.cost = total;
    return out;
  }

 private:
  static constexpr double kReducedCostTol = 1e-10;

  std::size_t tail(std::size_t a) const {
    if (a < real_arcs_) return a / nt_;
    if (a < real_arcs_ + ns_) return a - real_arcs_;
    return root_;
  }
  std::size_t head(std::size_t a) const {
    if (a < real_arcs_) return ns_ + a % nt_;
    if (a < real_arcs_ + ns_) return root_;
    return ns_ + (a - real_arcs_ - ns_);
  }
  double cost(std::size_t a) const {
    if (a >= real_arcs_) return big_;
    const cplx d = xs_[a / nt_] - ys_[a % nt_];
    return std::min(std::sqrt(d.real() * d.real() + d.imag() * d.imag()), truncation_);
  }

  void link(std::size_t a, std::size_t b, std::size_t arc) {
    adj_[a].push_back({b, arc});
    adj_[b].push_back({a, arc});
  }
  void unlink(std::size_t a, std::size_t b) {
    const auto drop = [](std::vector<std::pair<std::size_t, std::size_t>>& list, std::size_t other) {
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (list[k].first == other) {
          list[k] = list.back();
          list.pop_back();
          return;
        }
      }
    };
    drop(adj_[a], b);
    drop(adj_[b], a);
  }

  void pivot(std::size_t entering) {
    const std::size_t u = tail(entering), v = head(entering);
    // climb to the apex, recording both halves of the cycle
    std::vector<std::size_t>& us = path_u_;
    std::vector<std::size_t>& vs = path_v_;
    us.clear();
    vs.clear();
    std::size_t a = u, b = v;
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        us.push_back(a);
        a = parent_[a];
      } else {
        vs.push_back(b);
        b = parent_[b];
      }
    }
    // u-side arcs are traversed downward (parent -> x): backward when the arc points up.
    // v-side arcs are traversed upward (x -> parent): backward when the arc points down.
    double delta = kInf;
    for (std::size_t x : us) {
      if (up_[x]) delta = std::min(delta, flow_[x]);
    }
    for (std::size_t x : vs) {
      if (!up_[x]) delta = std::min(delta, flow_[x]);
    }
    if (!std::isfinite(delta)) throw std::logic_error("network simplex: unbounded cycle");
    // last blocking arc in cycle order (apex -> u, entering arc, v -> apex)
    std::size_t leaving = nodes_;
    bool leaving_on_u = false;
    for (auto it = us.rbegin(); it != us.rend(); ++it) {
      if (up_[*it] && flow_[*it] <= delta) {
        leaving = *it;
        leaving_on_u = true;
      }
    }
    for (std::size_t x : vs) {
      if (!up_[x] && flow_[x] <= delta) {
        leaving = x;
        leaving_on_u = false;
      }
    }
    for (std::size_t x : us) flow_[x] += up_[x] ? -delta : delta;
    for (std::size_t x : vs) flow_[x] += up_[x] ? delta : -delta;

    const std::size_t old_parent = parent_[leaving];
    unlink(leaving, old_parent);
    link(u, v, entering);
    // re-hang the detached subtree from the entering arc
    std::size_t x = leaving_on_u ? u : v;
    std::size_t prev = leaving_on_u ? v : u;
    std::size_t prev_arc = entering;
    double prev_flow = delta;
    const std::size_t subtree_root = x;
    while (true) {
      const std::size_t p = parent_[x], pa = parent_arc_[x];
      const double pf = flow_[x];
      parent_[x] = prev;
      parent_arc_[x] = prev_arc;
      flow_[x] = prev_flow;
      up_[x] = tail(prev_arc) == x;
      if (x == leaving) break;
      prev = x;
      prev_arc = pa;
      prev_flow = pf;
      x = p;
    }
    refresh(subtree_root);
  }

  // depth and potentials below `top`, whose parent data are already current
  void refresh(std::size_t top) {
    std::vector<std::size_t>& stack = stack_;
    stack.clear();
    stack.push_back(top);
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      const std::size_t p = parent_[x];
      depth_[x] = depth_[p] + 1;
      const double c = cost(parent_arc_[x]);
      potential_[x] = up_[x] ? potential_[p] - c : potential_[p] + c;
      for (const auto& [y, arc] : adj_[x]) {
        if (y != p) stack.push_back(y);
      }
    }
  }

  std::span<const cplx> xs_, ys_;
  std::size_t ns_, nt_, nodes_ = 0, root_ = 0, real_arcs_ = 0;
  double truncation_, big_ = 0.0;
  std::vector<std::size_t> parent_, parent_arc_, depth_;
  std::vector<double> flow_, potential_;
  std::vector<bool> up_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj_;
  std::vector<std::size_t> path_u_, path_v_, stack_;
};

struct LessCplx {
  bool operator()(cplx a, cplx b) const {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  }
};

AtomicMeasure resample(const AtomicMeasure& mu, std::size_t count, std::mt19937_64& rng) {
  std::vector<double> w;
  for (const Atom& a : mu.atoms()) w.push_back(a.weight);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::vector<cplx> pts(count);
  for (cplx& z : pts) z = mu.atoms()[pick(rng)].position;
  return AtomicMeasure::uniform(pts);
}

std::size_t distinct_points(const AtomicMeasure& mu) {
  std::map<cplx, int, LessCplx> seen;
  for (const Atom& a : mu.atoms()) seen[a.position] = 1;
  return seen.size();
}

}  // namespace

TransportResult solve_transport(std::span<const cplx> sources, std::span<const double> supply,
                                std::span<const cplx> sinks, std::span<const double> demand,
                                double truncation, std::size_t max_pivots) {
  if (sources.size() != supply.size() || sinks.size() != demand.size()) {
    throw std::invalid_argument("solve_transport: size mismatch");
  }
  if (sources.empty() || sinks.empty()) return {0.0, true, 0};
  const double s = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double d = std::accumulate(demand.begin(), demand.end(), 0.0);
  const double target = 0.5 * (s + d);
  std::vector<double> a(supply.begin(), supply.end()), b(demand.begin(), demand.end());
  for (double& x : a) x *= target / s;
  for (double& x : b) x *= target / d;
  if (max_pivots == 0) max_pivots = 50 * (sources.size() + sinks.size()) + 100000;
  NetworkSimplex solver(sources, a, sinks, b, truncation);
  return solver.run(max_pivots);
}

BLResult bl_distance(const AtomicMeasure& mu, const AtomicMeasure& nu, const BLOptions& opts) {
  if (!mu.is_probability(1e-9) || !nu.is_probability(1e-9)) {
    throw ConstraintError("bl_distance: both measures must be probability measures");
  }
  BLResult out;
  const AtomicMeasure* m1 = &mu;
  const AtomicMeasure* m2 = &nu;
  AtomicMeasure r1, r2;
  const std::size_t n1 = distinct_points(mu), n2 = distinct_points(nu);
  if (n1 + n2 > opts.max_support) {
    std::mt19937_64 rng(opts.seed);
    const std::size_t half = opts.max_support / 2;
    if (n1 > half) {
      r1 = resample(mu, half, rng);
      m1 = &r1;
    }
    if (n2 > opts.max_support - std::min(n1, half)) {
      r2 = resample(nu, opts.max_support - std::min(n1, half), rng);
      m2 = &r2;
    }
    out.subsampled = true;
  }
  std::map<cplx, double, LessCplx> net;
  for (const Atom& a : m1->atoms()) net[a.position] += a.weight;
  for (const Atom& a : m2->atoms()) net[a.position] -= a.weight;
  out.support = net.size();
  std::vector<cplx> xs, ys;
  std::vector<double> supply, demand;
  for (const auto& [z, c] : net) {
    if (c > 0.0) {
      xs.push_back(z);
      supply.push_back(c);
    } else if (c < 0.0) {
      ys.push_back(z);
      demand.push_back(-c);
    }
  }
  const double excess = std::accumulate(supply.begin(), supply.end(), 0.0);
  if (xs.empty() || ys.empty() || excess <= 1e-15) {
    out.value = 0.0;
    return out;
  }
  const TransportResult t = solve_transport(xs, supply, ys, demand, 2.0);
  out.value = std::clamp(t.cost, 0.0, 2.0);
  out.converged = t.optimal;
  return out;
}

}  // namespace potlab
