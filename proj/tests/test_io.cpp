#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "potlab/errors.hpp"
#include "potlab/io.hpp"

using namespace potlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("potlab_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("ensemble parameters round trip") {
    for (const EnsembleParams& p : {EnsembleParams{8, 16.0, 2.0, 0.5}, EnsembleParams{3, kInf, 1.0, 0.25}}) {
      const EnsembleParams q = params_from_json(params_to_json(p));
      CHECK(q.N == p.N);
      CHECK(q.s == p.s);
      CHECK(q.beta == p.beta);
      CHECK(q.c0 == p.c0);
    }
    CHECK(params_to_json({3, kInf, 1.0, 0.25})["s"] == "inf");
    CHECK_THROWS_AS(params_from_json(json::parse(R"({"N":2,"s":8,"beta":2,"c0":0.5,"gamma":1})")), SchemaError);
    CHECK_THROWS_AS(params_from_json(json::parse(R"({"N":2,"s":"big","beta":2,"c0":0.5})")), SchemaError);
  }

  TEST_CASE("config hash is stable and content sensitive") {
    const json a = json::parse(R"({"x":1,"y":[1,2]})");
    CHECK(config_hash(a) == config_hash(json::parse(R"({"y":[1,2],"x":1})")));
    CHECK(config_hash(a) != config_hash(json::parse(R"({"x":2,"y":[1,2]})")));
    CHECK(config_hash(a).size() == 16);
    // FNV-1a 64 of the empty object dump "{}".
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : std::string("{}")) h = (h ^ ch) * 0x100000001b3ULL;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    CHECK(config_hash(json::object()) == std::string(buf));
  }

  TEST_CASE("configuration csv is bit exact") {
    const fs::path dir = scratch("csv");
    const Configuration c({cplx{0.1, 1.0 / 3.0}, cplx{-2.0e-300, 1e300}, cplx{std::nextafter(1.0, 2.0), -0.0}});
    write_configuration_csv(dir / "c.csv", c, {"abc", 7});
    const Configuration back = read_configuration_csv(dir / "c.csv");
    REQUIRE(back.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(same_bits(back[i].real(), c[i].real()));
      CHECK(same_bits(back[i].imag(), c[i].imag()));
    }
    std::ifstream in(dir / "c.csv");
    std::string first;
    std::getline(in, first);
    CHECK(first == "# config_hash=abc seed=7");
    CHECK_THROWS_AS(read_configuration_csv(dir / "missing.csv"), IoError);
  }

  TEST_CASE("json output carries provenance") {
    const fs::path dir = scratch("json");
    write_json(dir / "a.json", json{{"value", 1.5}}, {"0123456789abcdef", 99});
    const json j = read_json(dir / "a.json");
    CHECK(j["value"] == 1.5);
    CHECK(j["config_hash"] == "0123456789abcdef");
    CHECK(j["seed"] == 99);
    CHECK(real_to_json(kInf) == "inf");
    CHECK(real_to_json(-kInf) == "-inf");
    CHECK(real_to_json(std::nan("")) == "nan");
    CHECK(real_to_json(2.0) == 2.0);
    CHECK_THROWS_AS(read_json(dir / "missing.json"), IoError);
  }

  TEST_CASE("chain save, load and extend") {
    const fs::path dir = scratch("chain");
    ChainConfig cfg;
    cfg.steps = 3000;
    cfg.burn_in = 2000;
    cfg.thin = 10;
    const CompactSet k = CompactSet::ellipse({0.1, 0.0}, 2.0, 1.0);
    const EnsembleParams p{3, 9.0, 2.0, 0.5};
    Chain original = run_chain(p, k, cfg, 0xfedcba9876543210ULL);
    save_chain(dir, "chain", original, {"h", original.seed});
    Chain loaded = load_chain(dir, "chain");
    CHECK(loaded.seed == original.seed);
    CHECK(loaded.step_scale == original.step_scale);
    CHECK(loaded.rng_state == original.rng_state);
    CHECK(loaded.current_log_density == original.current_log_density);
    REQUIRE(loaded.states.size() == original.states.size());
    for (std::size_t i = 0; i < loaded.states.size(); ++i) {
      CHECK(loaded.log_densities[i] == original.log_densities[i]);
      for (std::size_t j = 0; j < 3; ++j) CHECK(loaded.states[i][j] == original.states[i][j]);
    }
    extend_chain(original, 2000);
    extend_chain(loaded, 2000);
    CHECK(loaded.states.back()[2] == original.states.back()[2]);
    CHECK(loaded.rng_state == original.rng_state);
    CHECK_THROWS_AS(load_chain(dir, "nothing"), IoError);
  }

  TEST_CASE("experiment configuration") {
    const json full = read_json(POTLAB_DEFAULT_CONFIG);
    const ExperimentConfig c = experiment_from_json(full);
    CHECK(c.version == kConfigVersion);
    CHECK(c.params.N == 16);
    CHECK(c.params.s == 32.0);
    CHECK(c.seed == 20240611);
    CHECK(c.discretize_n == std::vector<std::size_t>{64, 256, 1024});
    CHECK(experiment_from_json(experiment_to_json(c)).sampler.steps == c.sampler.steps);
    CHECK(experiment_to_json(experiment_from_json(experiment_to_json(c))) == experiment_to_json(c));

    CHECK(experiment_from_json(json{{"version", 1}}).params.N == 16);
    CHECK_THROWS_AS(experiment_from_json(json::object()), SchemaError);
    CHECK_THROWS_AS(experiment_from_json(json{{"version", 2}}), SchemaError);
    CHECK_THROWS_AS(experiment_from_json(json{{"version", 1}, {"colour", "red"}}), SchemaError);
    json nested = full;
    nested["sampler"]["speed"] = 3;
    CHECK_THROWS_AS(experiment_from_json(nested), SchemaError);
    json bad_set = full;
    bad_set["set"] = json{{"type", "disk"}, {"radius", -1.0}};
    CHECK_THROWS_AS(experiment_from_json(bad_set), SchemaError);
  }
}
