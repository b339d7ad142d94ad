#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace potlab {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  nlohmann::json metrics = nlohmann::json::object();
  double seconds = 0.0;
  double budget_seconds = 0.0;

  bool passed() const;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  std::vector<int> only;            // empty: all criteria 1..11
  std::ostream* log = nullptr;      // per-check progress lines
};

constexpr int kCriteria = 11;

CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// "PASS  3  <title>  (12.3 s / 300 s)" or FAIL with the failing checks.
std::string summary_line(const CriterionResult& r);
nlohmann::json to_json(const CriterionResult& r);

}  // namespace potlab
