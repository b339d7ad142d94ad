#include "potlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "potlab/errors.hpp"
#include "potlab/measures.hpp"

namespace potlab {

using json = nlohmann::json;

// ---- types.hpp -------------------------------------------------------------

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const Atom& a : atoms_) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw std::invalid_argument("AtomicMeasure: weights must be positive and finite");
    }
    if (!std::isfinite(a.position.real()) || !std::isfinite(a.position.imag())) {
      throw std::invalid_argument("AtomicMeasure: atom positions must be finite");
    }
  }
}

AtomicMeasure AtomicMeasure::dirac(cplx x) { return AtomicMeasure({Atom{x, 1.0}}); }

AtomicMeasure AtomicMeasure::uniform(std::span<const cplx> points) {
  std::vector<Atom> atoms;
  atoms.reserve(points.size());
  const double w = 1.0 / static_cast<double>(points.size());
  for (cplx z : points) atoms.push_back({z, w});
  return AtomicMeasure(std::move(atoms));
}

double AtomicMeasure::total_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.weight;
  return m;
}

bool AtomicMeasure::is_probability(double tol) const {
  return !atoms_.empty() && std::abs(total_mass() - 1.0) <= tol;
}

Configuration::Configuration(std::vector<cplx> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("Configuration: needs at least one point");
}

AtomicMeasure Configuration::empirical_measure() const { return AtomicMeasure::uniform(points_); }

cplx LaurentMap::operator()(cplx w) const {
  // Horner in 1/w for the principal part
  cplx tail{};
  if (coeffs.size() > 1) {
    const cplx inv = 1.0 / w;
    for (std::size_t k = coeffs.size() - 1; k >= 1; --k) tail = (tail + coeffs[k]) * inv;
  }
  return lead * w + center() + tail;
}

cplx LaurentMap::derivative(cplx w) const {
  cplx d = lead;
  if (coeffs.size() > 1) {
    const cplx inv = 1.0 / w;
    cplx p = inv * inv;  // w^{-2}
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
      d -= static_cast<double>(k) * coeffs[k] * p;
      p *= inv;
    }
  }
  return d;
}

// ---- CompactSet --------------------------------------------------------------

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

constexpr int kNewtonIterations = 64;
constexpr int kNewtonStarts = 8;

}  // namespace

CompactSet::CompactSet(Shape shape) : shape_(std::move(shape)) {
  std::visit(overloaded{
                 [&](const Disk& d) {
                   if (!(d.radius > 0.0) || !std::isfinite(d.radius) || !finite(d.center)) {
                     throw std::invalid_argument("Disk: radius must be positive");
                   }
                   map_.lead = d.radius;
                   map_.coeffs = {d.center};
                 },
                 [&](const Segment& s) {
                   if (!(s.a < s.b) || !std::isfinite(s.a) || !std::isfinite(s.b)) {
                     throw std::invalid_argument("Segment: requires a < b");
                   }
                   const double h = 0.5 * (s.b - s.a);
                   map_.lead = 0.5 * h;
                   map_.coeffs = {cplx(0.5 * (s.a + s.b), 0.0), cplx(0.5 * h, 0.0)};
                 },
                 [&](const Ellipse& e) {
                   if (!(e.semi_minor > 0.0) || !(e.semi_major >= e.semi_minor) ||
                       !std::isfinite(e.semi_major) || !finite(e.center)) {
                     throw std::invalid_argument("Ellipse: requires semi_major >= semi_minor > 0");
                   }
                   map_.lead = 0.5 * (e.semi_major + e.semi_minor);
                   map_.coeffs = {e.center, cplx(0.5 * (e.semi_major - e.semi_minor), 0.0)};
                 },
                 [&](const ExteriorMap& m) {
                   if (!(m.cap > 0.0) || !std::isfinite(m.cap)) {
                     throw std::invalid_argument("ExteriorMap: cap must be positive");
                   }
                   for (cplx c : m.coeffs) {
                     if (!finite(c)) throw std::invalid_argument("ExteriorMap: non-finite coefficient");
                   }
                   map_.lead = m.cap;
                   map_.coeffs = m.coeffs.empty() ? std::vector<cplx>{cplx{}} : m.coeffs;
                 },
             },
             shape_);
}

CompactSet CompactSet::exterior_map(double cap, std::vector<cplx> coeffs, std::size_t order) {
  if (coeffs.size() > order + 1) coeffs.resize(order + 1);
  return CompactSet(ExteriorMap{cap, std::move(coeffs)});
}

std::string CompactSet::kind() const {
  return std::visit(overloaded{[](const Disk&) { return std::string("disk"); },
                               [](const Segment&) { return std::string("segment"); },
                               [](const Ellipse&) { return std::string("ellipse"); },
                               [](const ExteriorMap&) { return std::string("exterior_map"); }},
                    shape_);
}

double CompactSet::capacity() const { return std::abs(map_.lead); }

std::optional<cplx> CompactSet::preimage(cplx z) const {
  if (const auto* d = std::get_if<Disk>(&shape_)) return (z - d->center) / d->radius;
  if (!std::holds_alternative<ExteriorMap>(shape_)) {
    // lead*w^2 - zeta*w + sigma = 0, take the root of larger modulus
    const cplx zeta = z - map_.coeffs[0];
    const cplx rho = map_.lead;
    const cplx sigma = map_.coeffs.size() > 1 ? map_.coeffs[1] : cplx{};
    if (sigma == cplx{}) return zeta / rho;
    const cplx disc = std::sqrt(zeta * zeta - 4.0 * rho * sigma);
    const cplx q = (std::real(std::conj(zeta) * disc) >= 0.0) ? zeta + disc : zeta - disc;
    return q / (2.0 * rho);
  }
  const cplx c0 = map_.coeffs[0];
  const double cap = capacity();
  const double radius0 = std::max(std::abs(z - c0) / cap, 1.0);
  const double angle0 = std::arg(z - c0);
  const double scale = 1.0 + std::abs(z);
  std::optional<cplx> best;
  for (int start = 0; start < kNewtonStarts; ++start) {
    cplx w = std::polar(radius0, angle0 + 2.0 * std::numbers::pi * start / kNewtonStarts);
    bool converged = false;
    for (int it = 0; it < kNewtonIterations; ++it) {
      const cplx residual = map_(w) - z;
      if (std::abs(residual) <= 1e-14 * scale) {
        converged = true;
        break;
      }
      const cplx dpsi = map_.derivative(w);
      if (dpsi == cplx{}) break;
      w -= residual / dpsi;
      if (!finite(w) || std::abs(w) < 1e-8) break;
    }
    if (!converged) continue;
    if (!best || std::abs(w) > std::abs(*best)) best = w;
    if (std::abs(w) > 1.0) break;
  }
  return best;
}

double CompactSet::green(cplx z) const {
  if (const auto* d = std::get_if<Disk>(&shape_)) {
    return std::max(0.0, std::log(std::abs(z - d->center) / d->radius));
  }
  const auto w = preimage(z);
  if (!w) return 0.0;  // Newton failure classifies z as a point of K
  return std::max(0.0, std::log(std::abs(*w)));
}

cplx CompactSet::green_gradient(cplx z) const {
  if (green(z) <= kContainmentTol) return {};
  const cplx w = *preimage(z);
  return std::conj(1.0 / (w * map_.derivative(w)));
}

double CompactSet::bounding_radius() const {
  double r = std::abs(map_.lead);
  for (std::size_t k = 1; k < map_.coeffs.size(); ++k) r += std::abs(map_.coeffs[k]);
  return r;
}

double CompactSet::area() const {
  double a = std::norm(map_.lead);
  for (std::size_t k = 1; k < map_.coeffs.size(); ++k) {
    a -= static_cast<double>(k) * std::norm(map_.coeffs[k]);
  }
  return std::numbers::pi * std::max(0.0, a);
}

double CompactSet::field_integral(double gamma) const {
  if (std::isinf(gamma) && gamma > 0) return area();
  if (!(gamma > 2.0)) {
    throw std::domain_error("field_integral: exp(-gamma g_K) is not integrable for gamma <= 2");
  }
  double outside = std::norm(map_.lead) / (gamma - 2.0);
  for (std::size_t k = 1; k < map_.coeffs.size(); ++k) {
    const double kk = static_cast<double>(k);
    outside += kk * kk * std::norm(map_.coeffs[k]) / (gamma + 2.0 * kk);
  }
  return area() + 2.0 * std::numbers::pi * outside;
}

cplx CompactSet::project(cplx z) const {
  if (contains(z)) return z;
  if (const auto* d = std::get_if<Disk>(&shape_)) {
    const cplx u = z - d->center;
    return d->center + d->radius * u / std::abs(u);
  }
  if (const auto* s = std::get_if<Segment>(&shape_)) {
    return cplx(std::clamp(z.real(), s->a, s->b), 0.0);
  }
  if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    // nearest point: root t > 0 of (a x/(t+a^2))^2 + (b y/(t+b^2))^2 = 1
    const cplx u = z - e->center;
    const double a = e->semi_major, b = e->semi_minor;
    const double x = std::abs(u.real()), y = std::abs(u.imag());
    const auto excess = [&](double t) {
      const double p = a * x / (t + a * a), q = b * y / (t + b * b);
      return p * p + q * q - 1.0;
    };
    double lo = 0.0, hi = std::hypot(a * x, b * y);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double px = std::copysign(a * a * x / (t + a * a), u.real());
    const double py = std::copysign(b * b * y / (t + b * b), u.imag());
    return e->center + cplx(px, py);
  }
  const cplx w = *preimage(z);
  return map_(w / std::abs(w));
}

cplx CompactSet::tangent_cone_projection(cplx z, cplx v) const {
  if (green(z) > kContainmentTol) return v;
  if (const auto* s = std::get_if<Segment>(&shape_)) {
    const double x = z.real();
    const double tol = 1e-12 * (s->b - s->a);
    double vt = v.real();
    if ((x >= s->b - tol && vt > 0.0) || (x <= s->a + tol && vt < 0.0)) vt = 0.0;
    return cplx(vt, 0.0);
  }
  cplx normal;
  if (const auto* d = std::get_if<Disk>(&shape_)) {
    const cplx u = z - d->center;
    if (std::abs(u) < d->radius * (1.0 - 1e-10)) return v;
    normal = u / std::abs(u);
  } else {
    const auto w = preimage(z);
    if (!w || std::abs(*w) < 1.0 - 1e-9) return v;
    const cplx n = *w * map_.derivative(*w);
    if (std::abs(n) == 0.0) return {};
    normal = n / std::abs(n);
  }
  const double outward = std::real(v * std::conj(normal));
  if (outward > 0.0) v -= outward * normal;
  return v;
}

// ---- serialization -------------------------------------------------------------

namespace {

json point_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx point_from_json(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError(std::string("compact set: field '") + field + "' must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  std::initializer_list<const char*> required) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw SchemaError("compact set: unknown key '" + it.key() + "'");
  }
  for (const char* k : required) {
    if (!j.contains(k)) throw SchemaError(std::string("compact set: missing key '") + k + "'");
  }
}

double number(const json& j, const char* key) {
  if (!j.at(key).is_number()) throw SchemaError(std::string("compact set: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

json compact_set_to_json(const CompactSet& k) {
  return std::visit(
      overloaded{
          [](const Disk& d) {
            return json{{"type", "disk"}, {"center", point_json(d.center)}, {"radius", d.radius}};
          },
          [](const Segment& s) { return json{{"type", "segment"}, {"a", s.a}, {"b", s.b}}; },
          [](const Ellipse& e) {
            return json{{"type", "ellipse"},
                        {"center", point_json(e.center)},
                        {"semi_major", e.semi_major},
                        {"semi_minor", e.semi_minor}};
          },
          [](const ExteriorMap& m) {
            json coeffs = json::array();
            for (cplx c : m.coeffs) coeffs.push_back(point_json(c));
            return json{{"type", "exterior_map"}, {"cap", m.cap}, {"coeffs", coeffs}};
          },
      },
      k.shape());
}

CompactSet compact_set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw SchemaError("compact set: expected an object with a string 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "disk") {
      require_keys(j, {"type", "center", "radius"}, {"radius"});
      const cplx c = j.contains("center") ? point_from_json(j["center"], "center") : cplx{};
      return CompactSet::disk(c, number(j, "radius"));
    }
    if (type == "segment") {
      require_keys(j, {"type", "a", "b"}, {"a", "b"});
      return CompactSet::segment(number(j, "a"), number(j, "b"));
    }
    if (type == "ellipse") {
      require_keys(j, {"type", "center", "semi_major", "semi_minor"}, {"semi_major", "semi_minor"});
      const cplx c = j.contains("center") ? point_from_json(j["center"], "center") : cplx{};
      return CompactSet::ellipse(c, number(j, "semi_major"), number(j, "semi_minor"));
    }
    if (type == "exterior_map") {
      require_keys(j, {"type", "cap", "coeffs", "order"}, {"cap", "coeffs"});
      if (!j["coeffs"].is_array()) throw SchemaError("compact set: 'coeffs' must be an array");
      std::vector<cplx> coeffs;
      for (const json& c : j["coeffs"]) coeffs.push_back(point_from_json(c, "coeffs"));
      std::size_t order = coeffs.empty() ? 0 : coeffs.size() - 1;
      if (j.contains("order")) {
        if (!j["order"].is_number_unsigned()) throw SchemaError("compact set: 'order' must be a count");
        order = j["order"].get<std::size_t>();
      }
      return CompactSet::exterior_map(number(j, "cap"), std::move(coeffs), order);
    }
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("compact set: ") + e.what());
  }
  throw SchemaError("compact set: unknown type '" + type + "'");
}

std::string to_json_string(const CompactSet& k) { return compact_set_to_json(k).dump(); }

CompactSet compact_set_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("compact set: ") + e.what());
  }
  return compact_set_from_json(j);
}

// ---- equilibrium objects -----------------------------------------------------------

Configuration equilibrium_sample(const CompactSet& k, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("equilibrium_sample: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<cplx> pts(n);
  for (cplx& z : pts) z = k.boundary_point(angle(rng));
  return Configuration(std::move(pts));
}

double log_potential(const AtomicMeasure& mu, cplx z) {
  double v = 0.0;
  for (const Atom& a : mu.atoms()) {
    const double d = std::abs(z - a.position);
    if (d == 0.0) return kInf;
    v -= a.weight * std::log(d);
  }
  return v;
}

double log_potential(const SmoothedMeasure& mu, cplx z) {
  const double eps = mu.epsilon();
  double v = 0.0;
  for (const Atom& a : mu.base().atoms()) v += a.weight * disk_potential(std::abs(z - a.position), eps);
  return v;
}

double mahler_measure(const CompactSet& k, const Polynomial& p) {
  if (std::abs(k.capacity() - 1.0) > 1e-12) {
    throw std::invalid_argument("mahler_measure: requires cap(K) = 1");
  }
  double log_m = std::log(std::abs(p.leading()));
  for (cplx r : p.roots()) log_m += k.green(r);
  return std::exp(log_m);
}

// ---- balayage --------------------------------------------------------------------

DiskBalayage::DiskBalayage(const AtomicMeasure& mu, const Disk& disk) : disk_(disk) {
  for (const Atom& a : mu.atoms()) {
    if (std::abs(a.position - disk.center) > disk.radius * (1.0 + 1e-12)) {
      swept_.push_back(a);
    } else {
      kept_.push_back(a);
    }
  }
}

double DiskBalayage::density(double theta) const {
  const cplx e = std::polar(1.0, theta);
  double rho = 0.0;
  for (const Atom& a : swept_) {
    const cplx y = (a.position - disk_.center) / disk_.radius;
    rho += a.weight * (std::norm(y) - 1.0) / (2.0 * std::numbers::pi * std::norm(y - e));
  }
  return rho;
}

double DiskBalayage::total_mass() const {
  double m = 0.0;
  for (const Atom& a : swept_) m += a.weight;
  for (const Atom& a : kept_) m += a.weight;
  return m;
}

double DiskBalayage::potential(cplx z) const {
  double v = 0.0;
  for (const Atom& a : kept_) {
    const double d = std::abs(z - a.position);
    if (d == 0.0) return kInf;
    v -= a.weight * std::log(d);
  }
  if (!swept_.empty()) {
    const auto q = periodic_mean(
        [&](double theta) {
          const cplx x = disk_.center + disk_.radius * std::polar(1.0, theta);
          return -density(theta) * std::log(std::abs(z - x));
        },
        1e-13, 16);
    v += 2.0 * std::numbers::pi * q.value;
  }
  return v;
}

DiskBalayage balayage_disk(const AtomicMeasure& mu, const CompactSet& k) {
  const auto* d = std::get_if<Disk>(&k.shape());
  if (!d) throw std::invalid_argument("balayage_disk: K must be a disk");
  return DiskBalayage(mu, *d);
}

}  // namespace potlab
