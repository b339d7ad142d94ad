#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "potlab/fekete.hpp"
#include "potlab/partition.hpp"
#include "potlab/potential.hpp"
#include "potlab/sampler.hpp"
#include "potlab/stats.hpp"

namespace potlab {

using json = nlohmann::json;

/// Missing, unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json compact_set_to_json(const CompactSet& k);
/// Strict: unknown keys and malformed fields raise SchemaError.
CompactSet compact_set_from_json(const json& j);

/// s = +inf is written as the string "inf".
json params_to_json(const EnsembleParams& p);
EnsembleParams params_from_json(const json& j);

/// Stable 64-bit FNV-1a hash of the compact JSON dump, as 16 hex digits.
std::string config_hash(const json& j);

/// Provenance header shared by every output: {"config_hash", "seed"}.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

json to_json(const FeketeResult& r);
json to_json(const PartitionReport& r);
json to_json(const LinearStatReport& r);
json to_json(const RateReport& r);
json to_json(const Discretization& d);
json to_json(const ChainConfig& c);

/// Extended reals as JSON: finite numbers, or the strings "inf" / "-inf" / "nan".
json real_to_json(double x);

void write_json(const std::filesystem::path& path, json body, const Provenance& prov);
json read_json(const std::filesystem::path& path);

/// CSV with a leading "# config_hash=... seed=..." line and header re,im.
void write_configuration_csv(const std::filesystem::path& path, const Configuration& c, const Provenance& prov);
Configuration read_configuration_csv(const std::filesystem::path& path);

/// Histogram as CSV rows bin_center_re,bin_center_im,density.
void write_histogram_csv(const std::filesystem::path& path, const Histogram& h, const Provenance& prov);

/// Batch-experiment configuration. Every block except "version" is optional;
/// unknown keys anywhere raise SchemaError.
struct ExperimentConfig {
  int version = 1;
  CompactSet set = CompactSet::unit_disk();
  EnsembleParams params{16, 32.0, 2.0, 0.5};
  std::uint64_t seed = 20240611;
  std::string output = "out";
  ChainConfig sampler;
  FeketeOptions fekete;
  LowerBoundConfig partition;
  std::vector<double> radii{0.25, 0.5, 2.0, 4.0};
  std::vector<double> ells{0.0, 0.25, 0.5, 1.0};
  Grid grid;
  std::size_t angular_bins = 16;
  double discretize_epsilon = 0.1;
  std::size_t discretize_atoms = 256;
  std::vector<std::size_t> discretize_n{64, 256, 1024};
};

inline constexpr int kConfigVersion = 1;

ExperimentConfig experiment_from_json(const json& j);
json experiment_to_json(const ExperimentConfig& c);

/// Chain persistence: <stem>.csv holds one row per stored state
/// (log_density, re_0, im_0, ...); <stem>.json holds params, set, config,
/// seed, acceptance and the resume data (current state and rng state).
void save_chain(const std::filesystem::path& dir, const std::string& stem, const Chain& chain,
                const Provenance& prov);
Chain load_chain(const std::filesystem::path& dir, const std::string& stem);

}  // namespace potlab
