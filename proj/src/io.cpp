#include "potlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "potlab/errors.hpp"

namespace potlab {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json point_json(cplx z) { return json::array({real_to_json(z.real()), real_to_json(z.imag())}); }

double real_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw SchemaError(what + " must be a number");
}

json optional_real(const std::optional<double>& x) { return x ? real_to_json(*x) : json(nullptr); }

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string header_line(const Provenance& prov) {
  return "# config_hash=" + prov.config_hash + " seed=" + std::to_string(prov.seed) + "\n";
}

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw SchemaError("malformed number '" + cell + "' in '" + path.string() + "'");
    }
  }
  return out;
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw SchemaError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j[key];
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw SchemaError(where + ": '" + key + "' must be a boolean");
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_unsigned()) throw SchemaError(where + ": '" + key + "' must be a non-negative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw SchemaError(where + ": '" + key + "' must be an integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw SchemaError(where + ": '" + key + "' must be a number");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw SchemaError(where + ": '" + key + "' must be a string");
  }
  out = v.get<T>();
}

template <class T>
void read_list(const json& j, const char* key, std::vector<T>& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j[key];
  if (!v.is_array() || v.empty()) throw SchemaError(where + ": '" + key + "' must be a non-empty array");
  std::vector<T> values;
  for (const json& x : v) {
    if (std::is_unsigned_v<T> ? !x.is_number_unsigned() : !x.is_number()) {
      throw SchemaError(where + ": '" + key + "' has a malformed entry");
    }
    values.push_back(x.get<T>());
  }
  out = std::move(values);
}

}  // namespace

ExperimentConfig experiment_from_json(const json& j) {
  only_keys(j, {"version", "set", "params", "seed", "output", "sampler", "fekete", "partition", "rate", "linstat",
                "discretize"},
            "config");
  if (!j.contains("version")) throw SchemaError("config: missing 'version'");
  ExperimentConfig c;
  read(j, "version", c.version, "config");
  if (c.version != kConfigVersion) throw SchemaError("config: unsupported version " + std::to_string(c.version));
  if (j.contains("set")) c.set = compact_set_from_json(j["set"]);
  if (j.contains("params")) c.params = params_from_json(j["params"]);
  read(j, "seed", c.seed, "config");
  read(j, "output", c.output, "config");
  if (j.contains("sampler")) {
    const json& b = j["sampler"];
    only_keys(b, {"steps", "burn_in", "thin", "step_scale", "target_acceptance", "recompute_every"}, "sampler");
    read(b, "steps", c.sampler.steps, "sampler");
    read(b, "burn_in", c.sampler.burn_in, "sampler");
    read(b, "thin", c.sampler.thin, "sampler");
    read(b, "step_scale", c.sampler.step_scale, "sampler");
    read(b, "target_acceptance", c.sampler.target_acceptance, "sampler");
    read(b, "recompute_every", c.sampler.recompute_every, "sampler");
  }
  if (j.contains("fekete")) {
    const json& b = j["fekete"];
    only_keys(b, {"starts", "max_iterations", "gradient_tol", "jitter"}, "fekete");
    read(b, "starts", c.fekete.starts, "fekete");
    read(b, "max_iterations", c.fekete.max_iterations, "fekete");
    read(b, "gradient_tol", c.fekete.gradient_tol, "fekete");
    read(b, "jitter", c.fekete.jitter, "fekete");
  }
  if (j.contains("partition")) {
    const json& b = j["partition"];
    only_keys(b, {"m", "epsilon", "atoms"}, "partition");
    read(b, "m", c.partition.m, "partition");
    read(b, "epsilon", c.partition.epsilon, "partition");
    read(b, "atoms", c.partition.atoms, "partition");
  }
  if (j.contains("rate")) {
    const json& b = j["rate"];
    only_keys(b, {"radii", "ells"}, "rate");
    read_list(b, "radii", c.radii, "rate");
    read_list(b, "ells", c.ells, "rate");
  }
  if (j.contains("linstat")) {
    const json& b = j["linstat"];
    only_keys(b, {"grid", "angular_bins"}, "linstat");
    read(b, "angular_bins", c.angular_bins, "linstat");
    if (b.contains("grid")) {
      const json& g = b["grid"];
      only_keys(g, {"xmin", "xmax", "ymin", "ymax", "nx", "ny"}, "linstat.grid");
      read(g, "xmin", c.grid.xmin, "linstat.grid");
      read(g, "xmax", c.grid.xmax, "linstat.grid");
      read(g, "ymin", c.grid.ymin, "linstat.grid");
      read(g, "ymax", c.grid.ymax, "linstat.grid");
      read(g, "nx", c.grid.nx, "linstat.grid");
      read(g, "ny", c.grid.ny, "linstat.grid");
    }
  }
  if (j.contains("discretize")) {
    const json& b = j["discretize"];
    only_keys(b, {"epsilon", "atoms", "N"}, "discretize");
    read(b, "epsilon", c.discretize_epsilon, "discretize");
    read(b, "atoms", c.discretize_atoms, "discretize");
    read_list(b, "N", c.discretize_n, "discretize");
  }
  return c;
}

json experiment_to_json(const ExperimentConfig& c) {
  return json{{"version", c.version},
              {"set", compact_set_to_json(c.set)},
              {"params", params_to_json(c.params)},
              {"seed", c.seed},
              {"output", c.output},
              {"sampler", to_json(c.sampler)},
              {"fekete",
               {{"starts", c.fekete.starts},
                {"max_iterations", c.fekete.max_iterations},
                {"gradient_tol", c.fekete.gradient_tol},
                {"jitter", c.fekete.jitter}}},
              {"partition", {{"m", c.partition.m}, {"epsilon", c.partition.epsilon}, {"atoms", c.partition.atoms}}},
              {"rate", {{"radii", c.radii}, {"ells", c.ells}}},
              {"linstat",
               {{"grid",
                 {{"xmin", c.grid.xmin},
                  {"xmax", c.grid.xmax},
                  {"ymin", c.grid.ymin},
                  {"ymax", c.grid.ymax},
                  {"nx", c.grid.nx},
                  {"ny", c.grid.ny}}},
                {"angular_bins", c.angular_bins}}},
              {"discretize",
               {{"epsilon", c.discretize_epsilon}, {"atoms", c.discretize_atoms}, {"N", c.discretize_n}}}};
}

json real_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json params_to_json(const EnsembleParams& p) {
  return json{{"N", p.N}, {"s", real_to_json(p.s)}, {"beta", p.beta}, {"c0", p.c0}};
}

EnsembleParams params_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("params: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "N" && it.key() != "s" && it.key() != "beta" && it.key() != "c0") {
      throw SchemaError("params: unknown key '" + it.key() + "'");
    }
  }
  if (!j.contains("N") || !j.contains("s")) throw SchemaError("params: 'N' and 's' are required");
  if (!j["N"].is_number_unsigned()) throw SchemaError("params: 'N' must be a positive integer");
  EnsembleParams p;
  p.N = j["N"].get<std::size_t>();
  p.s = real_from_json(j["s"], "params: 's'");
  if (j.contains("beta")) p.beta = real_from_json(j["beta"], "params: 'beta'");
  if (j.contains("c0")) p.c0 = real_from_json(j["c0"], "params: 'c0'");
  if (std::isnan(p.s) || (std::isinf(p.s) && p.s < 0)) throw SchemaError("params: 's' must be a number or \"inf\"");
  return p;
}

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const FeketeResult& r) {
  json pts = json::array();
  for (cplx z : r.configuration.points()) pts.push_back(point_json(z));
  return json{{"N", r.configuration.size()},
              {"log_delta", real_to_json(r.log_delta)},
              {"capacity_estimate", r.configuration.size() >= 2 ? real_to_json(capacity_estimate(r)) : json(nullptr)},
              {"max_green_violation", r.max_green_violation},
              {"iterations", r.iterations},
              {"best_start", r.best_start},
              {"converged_starts", r.converged_starts},
              {"converged", r.converged},
              {"configuration", pts}};
}

json to_json(const PartitionReport& r) {
  return json{{"params", params_to_json(r.params)},
              {"exact", optional_real(r.exact)},
              {"cubature", optional_real(r.cubature)},
              {"cubature_rel_error", optional_real(r.cubature_error)},
              {"lower", real_to_json(r.lower)},
              {"upper", real_to_json(r.upper)},
              {"asymptote", optional_real(r.asymptote)},
              {"residual", optional_real(r.residual)}};
}

json to_json(const LinearStatReport& r) {
  return json{{"estimate", point_json(r.estimate)},
              {"target", point_json(r.target)},
              {"stderr", json::array({r.stderr_re, r.stderr_im})},
              {"z_score", real_to_json(r.z_score)},
              {"ess", r.ess},
              {"samples", r.samples},
              {"batches", r.batches}};
}

json to_json(const RateReport& r) {
  return json{{"measure", r.descriptor},
              {"ell", r.ell},
              {"beta", r.beta},
              {"weighted_energy", real_to_json(r.weighted_energy)},
              {"robin_energy", r.robin_energy},
              {"rate", real_to_json(r.rate)},
              {"at_minimizer", r.at_minimizer}};
}

json to_json(const Discretization& d) {
  return json{{"N", d.configuration.size()},
              {"strips", d.strips},
              {"generated", d.generated},
              {"min_separation", d.min_separation},
              {"separation_constant", d.separation_constant}};
}

json to_json(const ChainConfig& c) {
  return json{{"steps", c.steps},
              {"burn_in", c.burn_in},
              {"thin", c.thin},
              {"step_scale", c.step_scale},
              {"target_acceptance", c.target_acceptance},
              {"recompute_every", c.recompute_every}};
}

void write_json(const std::filesystem::path& path, json body, const Provenance& prov) {
  body["config_hash"] = prov.config_hash;
  body["seed"] = prov.seed;
  std::ofstream out = open_out(path);
  out << body.dump(2) << '\n';
  close_out(out, path);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("'" + path.string() + "': " + e.what());
  }
}

void write_configuration_csv(const std::filesystem::path& path, const Configuration& c, const Provenance& prov) {
  std::ofstream out = open_out(path);
  out << header_line(prov) << "re,im\n";
  for (cplx z : c.points()) out << fmt(z.real()) << ',' << fmt(z.imag()) << '\n';
  close_out(out, path);
}

Configuration read_configuration_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<cplx> pts;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line.rfind("re,im", 0) == 0) continue;
    }
    const auto row = parse_row(line, path);
    if (row.size() != 2) throw SchemaError("'" + path.string() + "': expected two columns re,im");
    pts.emplace_back(row[0], row[1]);
  }
  return Configuration(std::move(pts));
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h, const Provenance& prov) {
  std::ofstream out = open_out(path);
  out << header_line(prov) << "bin_center_re,bin_center_im,density\n";
  for (std::size_t ix = 0; ix < h.grid.nx; ++ix) {
    for (std::size_t iy = 0; iy < h.grid.ny; ++iy) {
      const cplx c = h.bin_center(ix, iy);
      out << fmt(c.real()) << ',' << fmt(c.imag()) << ',' << fmt(h.at(ix, iy)) << '\n';
    }
  }
  close_out(out, path);
}

void save_chain(const std::filesystem::path& dir, const std::string& stem, const Chain& chain,
                const Provenance& prov) {
  const auto csv = dir / (stem + ".csv");
  std::ofstream out = open_out(csv);
  out << header_line(prov) << "log_density";
  for (std::size_t i = 0; i < chain.params.N; ++i) out << ",re_" << i << ",im_" << i;
  out << '\n';
  for (std::size_t t = 0; t < chain.states.size(); ++t) {
    out << fmt(chain.log_densities[t]);
    for (cplx z : chain.states[t].points()) out << ',' << fmt(z.real()) << ',' << fmt(z.imag());
    out << '\n';
  }
  close_out(out, csv);

  json current = json::array();
  for (cplx z : chain.current.points()) current.push_back(json::array({fmt(z.real()), fmt(z.imag())}));
  json meta{{"params", params_to_json(chain.params)},
            {"set", compact_set_to_json(chain.set)},
            {"config", to_json(chain.config)},
            {"chain_seed", std::to_string(chain.seed)},
            {"step_scale", fmt(chain.step_scale)},
            {"burn_in_acceptance", chain.burn_in_acceptance},
            {"acceptance_rate", chain.acceptance_rate},
            {"accepted", chain.accepted},
            {"steps_done", chain.steps_done},
            {"stuck", chain.stuck},
            {"current", current},
            {"current_log_density", fmt(chain.current_log_density)},
            {"rng_state", chain.rng_state},
            {"states", chain.states.size()}};
  write_json(dir / (stem + ".json"), std::move(meta), prov);
}

Chain load_chain(const std::filesystem::path& dir, const std::string& stem) {
  const json meta = read_json(dir / (stem + ".json"));
  const auto exact = [](const json& j) {
    if (!j.is_string()) throw SchemaError("chain: expected a decimal string");
    try {
      return std::stod(j.get<std::string>());
    } catch (const std::exception&) {
      throw SchemaError("chain: malformed number");
    }
  };
  if (!meta.is_object() || !meta.contains("set")) throw SchemaError("chain metadata: missing 'set'");
  Chain chain{{}, compact_set_from_json(meta["set"]), {}, 0, {}, {}, 0.0, 0.0, 0.0, 0, 0, false, {}, 0.0, {}};
  try {
    chain.params = params_from_json(meta.at("params"));
    const json& cfg = meta.at("config");
    chain.config.steps = cfg.at("steps").get<std::size_t>();
    chain.config.burn_in = cfg.at("burn_in").get<std::size_t>();
    chain.config.thin = cfg.at("thin").get<std::size_t>();
    chain.config.step_scale = cfg.at("step_scale").get<double>();
    chain.config.target_acceptance = cfg.at("target_acceptance").get<double>();
    chain.config.recompute_every = cfg.at("recompute_every").get<std::size_t>();
    chain.seed = std::stoull(meta.at("chain_seed").get<std::string>());
    chain.step_scale = exact(meta.at("step_scale"));
    chain.burn_in_acceptance = meta.at("burn_in_acceptance").get<double>();
    chain.acceptance_rate = meta.at("acceptance_rate").get<double>();
    chain.accepted = meta.at("accepted").get<std::size_t>();
    chain.steps_done = meta.at("steps_done").get<std::size_t>();
    chain.stuck = meta.at("stuck").get<bool>();
    std::vector<cplx> cur;
    for (const json& z : meta.at("current")) cur.emplace_back(exact(z.at(0)), exact(z.at(1)));
    chain.current = Configuration(std::move(cur));
    chain.current_log_density = exact(meta.at("current_log_density"));
    chain.rng_state = meta.at("rng_state").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("chain metadata: ") + e.what());
  }

  const auto csv = dir / (stem + ".csv");
  std::ifstream in = open_in(csv);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto row = parse_row(line, csv);
    if (row.size() != 1 + 2 * chain.params.N) throw SchemaError("chain: row width does not match N");
    std::vector<cplx> pts(chain.params.N);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {row[1 + 2 * i], row[2 + 2 * i]};
    chain.log_densities.push_back(row[0]);
    chain.states.emplace_back(std::move(pts));
  }
  return chain;
}

}  // namespace potlab
