// potlab: batch experiment runner.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "potlab/acceptance.hpp"
#include "potlab/errors.hpp"
#include "potlab/fekete.hpp"
#include "potlab/io.hpp"
#include "potlab/measures.hpp"
#include "potlab/partition.hpp"
#include "potlab/sampler.hpp"
#include "potlab/stats.hpp"

namespace fs = std::filesystem;
using namespace potlab;

namespace {

enum Exit : int {
  kOk = 0,
  kChecksFailed = 1,
  kSchema = 2,
  kConstraint = 3,
  kNonConvergence = 4,
  kIo = 5,
};

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> n;
  std::optional<std::string> s;
  std::optional<double> beta;
  std::optional<double> c0;
  // sample / linstat
  std::optional<std::size_t> steps, burn_in, thin;
  bool resume = false;
  // fekete
  std::optional<std::size_t> starts;
  // rate
  std::vector<double> ells;
  // discretize
  std::optional<double> epsilon;
  std::vector<std::size_t> sizes;
  // verify
  std::vector<int> criteria;
  bool quiet = false;
};

double parse_s(const std::string& text) {
  if (text == "inf" || text == "+inf") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw SchemaError("--s: expected a number or \"inf\"");
  }
  if (used != text.size()) throw SchemaError("--s: expected a number or \"inf\"");
  return v;
}

ExperimentConfig load_config(const Overrides& o) {
  ExperimentConfig c;
  if (!o.config.empty()) c = experiment_from_json(read_json(o.config));
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output = *o.out;
  if (o.n) c.params.N = *o.n;
  if (o.s) c.params.s = parse_s(*o.s);
  if (o.beta) c.params.beta = *o.beta;
  if (o.c0) c.params.c0 = *o.c0;
  if (o.steps) c.sampler.steps = *o.steps;
  if (o.burn_in) c.sampler.burn_in = *o.burn_in;
  if (o.thin) c.sampler.thin = *o.thin;
  if (o.starts) c.fekete.starts = *o.starts;
  if (!o.ells.empty()) c.ells = o.ells;
  if (o.epsilon) c.discretize_epsilon = *o.epsilon;
  if (!o.sizes.empty()) c.discretize_n = o.sizes;
  c.params.validate();
  return c;
}

Provenance provenance(const ExperimentConfig& c) {
  json j = experiment_to_json(c);
  j.erase("output");
  j.erase("seed");
  return {config_hash(j), c.seed};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush()) throw IoError("write to '" + path.string() + "' failed");
}

std::string csv_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_opt(const std::optional<double>& x) { return x ? csv_real(*x) : ""; }

std::string header(const Provenance& p) {
  return "# config_hash=" + p.config_hash + " seed=" + std::to_string(p.seed) + "\n";
}

FeketeResult fekete_for(const ExperimentConfig& c) {
  if (c.params.N >= 2) return solve_fekete(c.set, c.params.N, c.seed, c.fekete);
  FeketeResult r;
  r.configuration = Configuration({c.set.boundary_point(0.0)});
  r.converged = true;
  return r;
}

int cmd_sample(const Overrides& o) {
  const ExperimentConfig c = load_config(o);
  const Provenance prov = provenance(c);
  const fs::path out(c.output);
  Chain chain = [&] {
    if (!o.resume) return run_chain(c.params, c.set, c.sampler, c.seed);
    Chain loaded = load_chain(out, "chain");
    extend_chain(loaded, c.sampler.steps);
    return loaded;
  }();
  save_chain(out, "chain", chain, prov);
  std::cout << "states " << chain.states.size() << ", acceptance " << chain.acceptance_rate << ", step "
            << chain.step_scale << "\n";
  if (chain.stuck) {
    std::cerr << "sample: no proposal accepted during burn-in\n";
    return kNonConvergence;
  }
  return kOk;
}

int cmd_fekete(const Overrides& o) {
  const ExperimentConfig c = load_config(o);
  const Provenance prov = provenance(c);
  const FeketeResult r = solve_fekete(c.set, c.params.N, c.seed, c.fekete);
  json body = to_json(r);
  body["capacity"] = c.set.capacity();
  write_json(fs::path(c.output) / "fekete.json", body, prov);
  write_configuration_csv(fs::path(c.output) / "fekete_configuration.csv", r.configuration, prov);
  std::cout << "log_delta " << csv_real(r.log_delta) << ", capacity estimate "
            << csv_real(r.configuration.size() >= 2 ? capacity_estimate(r) : kInf) << ", converged "
            << (r.converged ? "yes" : "no") << "\n";
  return r.converged ? kOk : kNonConvergence;
}

int cmd_partition(const Overrides& o) {
  const ExperimentConfig c = load_config(o);
  const Provenance prov = provenance(c);
  const FeketeResult f = fekete_for(c);
  const PartitionReport r = partition_report(c.set, c.params, f, c.partition);
  json body = to_json(r);
  body["fekete_converged"] = f.converged;
  write_json(fs::path(c.output) / "partition.json", body, prov);
  const std::string row = std::to_string(c.params.N) + "," + csv_real(c.params.s) + "," + csv_opt(r.exact) + "," +
                          csv_real(r.lower) + "," + csv_real(r.upper) + "," + csv_opt(r.asymptote) + "," +
                          csv_opt(r.residual) + "," + csv_opt(r.cubature) + "\n";
  write_text(fs::path(c.output) / "partition.csv",
             header(prov) + "N,s,exact,lower,upper,asymptote,residual,cubature\n" + row);
  std::cout << body.dump(2) << "\n";
  return f.converged ? kOk : kNonConvergence;
}

int cmd_rate(const Overrides& o) {
  const ExperimentConfig c = load_config(o);
  const Provenance prov = provenance(c);
  const auto rows = positivity_scan(c.set, c.radii, c.ells, c.params.beta);
  std::string csv = header(prov) + "parameter,ell,rate\n";
  for (const ScanRow& row : rows) csv += csv_real(row.parameter) + "," + csv_real(row.ell) + "," + csv_real(row.rate) + "\n";
  write_text(fs::path(c.output) / "rate.csv", csv);
  json reports = json::array();
  reports.push_back(to_json(rate_function(CurveMeasure::equilibrium(c.set), c.set, c.params, "omega_K")));
  for (double r : c.radii) {
    reports.push_back(to_json(
        rate_function(CurveMeasure::dilation(c.set, r), c.set, c.params, "omega_K dilated by " + csv_real(r))));
  }
  write_json(fs::path(c.output) / "rate.json", json{{"params", params_to_json(c.params)}, {"reports", reports}}, prov);
  std::cout << csv;
  return kOk;
}

int cmd_linstat(const Overrides& o) {
  const ExperimentConfig c = load_config(o);
  const Provenance prov = provenance(c);
  const Chain chain = run_chain(c.params, c.set, c.sampler, c.seed);
  const cplx center = c.set.map().center();
  json stats{
      {"abs2", to_json(linear_statistic(
                   chain, [&](std::span<const cplx> z) { return cplx(std::norm(z[0] - center)); }, 1))},
      {"z", to_json(linear_statistic(chain, [&](std::span<const cplx> z) { return z[0] - center; }, 1))},
      {"moment_abs2_k1_m1",
       to_json(moment_statistic(chain, [&](cplx z) { return cplx(std::norm(z - center)); }, 1, 1))}};
  if (c.params.N >= 2) {
    stats["pair_product"] = to_json(linear_statistic(
        chain, [&](std::span<const cplx> z) { return cplx(((z[0] - center) * std::conj(z[1] - center)).real()); }, 2));
  }
  const Histogram h = intensity_histogram(chain, c.grid);
  const AngularProfile profile = angular_profile(chain, c.angular_bins, center);
  json body{{"params", params_to_json(c.params)},
            {"acceptance_rate", chain.acceptance_rate},
            {"states", chain.states.size()},
            {"statistics", stats},
            {"histogram_inside_fraction", h.inside_fraction},
            {"angular_profile", {{"mass", profile.mass}, {"stderr", profile.standard_error}}}};
  write_json(fs::path(c.output) / "linstat.json", body, prov);
  write_histogram_csv(fs::path(c.output) / "histogram.csv", h, prov);
  std::cout << stats.dump(2) << "\n";
  return chain.stuck ? kNonConvergence : kOk;
}

int cmd_discretize(const Overrides& o) {
  const ExperimentConfig c = load_config(o);
  const Provenance prov = provenance(c);
  std::vector<cplx> pts(c.discretize_atoms);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i] = c.set.boundary_point(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(pts.size()));
  }
  const SmoothedMeasure nu = smooth(AtomicMeasure::uniform(pts), c.discretize_epsilon);
  const double energy = continuous_energy(nu).value;
  const AtomicMeasure reference = nu.quantize(c.discretize_epsilon / 5.0);
  std::string csv = header(prov) + "N,separation_constant,bl_distance,discrete_energy,continuous_energy\n";
  json rows = json::array();
  for (std::size_t n : c.discretize_n) {
    const Discretization d = discretize(nu, n);
    const double bl = bl_distance(reference, d.configuration.empirical_measure()).value;
    const double e = discrete_energy(d.configuration);
    json row = to_json(d);
    row["bl_distance"] = bl;
    row["discrete_energy"] = e;
    rows.push_back(row);
    csv += std::to_string(n) + "," + csv_real(d.separation_constant) + "," + csv_real(bl) + "," + csv_real(e) + "," +
           csv_real(energy) + "\n";
    write_configuration_csv(fs::path(c.output) / ("discretize_" + std::to_string(n) + ".csv"), d.configuration, prov);
  }
  write_json(fs::path(c.output) / "discretize.json",
             json{{"epsilon", c.discretize_epsilon}, {"continuous_energy", energy}, {"rows", rows}}, prov);
  write_text(fs::path(c.output) / "discretize_table.csv", csv);
  std::cout << csv;
  return kOk;
}

int cmd_verify(const Overrides& o) {
  const ExperimentConfig c = load_config(o);
  const Provenance prov = provenance(c);
  AcceptanceOptions opts;
  opts.seed = c.seed;
  opts.only = o.criteria;
  if (!o.quiet) opts.log = &std::cerr;
  json results = json::array();
  bool all = true;
  for (const CriterionResult& r : run_acceptance(opts)) {
    std::cout << summary_line(r) << "\n" << std::flush;
    results.push_back(to_json(r));
    all = all && r.passed();
  }
  write_json(fs::path(c.output) / "verify.json", json{{"passed", all}, {"criteria", results}}, prov);
  return all ? kOk : kChecksFailed;
}

void common_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Experiment configuration (JSON)");
  sub->add_option("--seed", o.seed, "64-bit seed");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--N", o.n, "Number of points");
  sub->add_option("--s", o.s, "Field strength s (number or inf)");
  sub->add_option("--beta", o.beta, "Inverse temperature");
  sub->add_option("--c0", o.c0, "Slack constant c0");
}

void sampler_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--steps", o.steps, "Post-burn-in proposals");
  sub->add_option("--burn-in", o.burn_in, "Burn-in proposals");
  sub->add_option("--thin", o.thin, "Thinning interval");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"potlab: potential-theoretic ensembles at desk scale"};
  app.require_subcommand(1);
  Overrides o;
  auto* sample = app.add_subcommand("sample", "Run a Metropolis chain and persist it");
  common_flags(sample, o);
  sampler_flags(sample, o);
  sample->add_flag("--resume", o.resume, "Extend the chain stored in the output directory by --steps");
  auto* fekete = app.add_subcommand("fekete", "Weighted Fekete points and capacity estimate");
  common_flags(fekete, o);
  fekete->add_option("--starts", o.starts, "Number of starts (0: max(8, ceil(N/8)))");
  auto* partition = app.add_subcommand("partition", "Partition function report");
  common_flags(partition, o);
  auto* rate = app.add_subcommand("rate", "Rate function table over dilations of omega_K");
  common_flags(rate, o);
  rate->add_option("--ell", o.ells, "Values of ell");
  auto* linstat = app.add_subcommand("linstat", "Linear statistics and intensity histogram");
  common_flags(linstat, o);
  sampler_flags(linstat, o);
  auto* disc = app.add_subcommand("discretize", "Strip discretization of a smoothed equilibrium measure");
  common_flags(disc, o);
  disc->add_option("--epsilon", o.epsilon, "Smoothing radius");
  disc->add_option("--sizes", o.sizes, "Values of N");
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  common_flags(verify, o);
  verify->add_option("--criteria", o.criteria, "Subset of criteria (1-11)");
  verify->add_flag("--quiet", o.quiet, "Only print one line per criterion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSchema;
  }

  try {
    if (*sample) return cmd_sample(o);
    if (*fekete) return cmd_fekete(o);
    if (*partition) return cmd_partition(o);
    if (*rate) return cmd_rate(o);
    if (*linstat) return cmd_linstat(o);
    if (*disc) return cmd_discretize(o);
    if (*verify) return cmd_verify(o);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const ConstraintError& e) {
    std::cerr << "constraint violation: " << e.what() << "\n";
    return kConstraint;
  } catch (const ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
