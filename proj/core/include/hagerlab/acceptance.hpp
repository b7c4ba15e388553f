#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hagerlab/report.hpp"

namespace hagerlab {

struct AcceptanceOptions {
  std::filesystem::path out_dir = "hagerlab-verify";
  uint64_t seed = 20;
  int workers = 0;     // 0: default_workers()
  bool verbose = true; // stream one line per criterion
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs the twelve verification criteria at desk scale (g = e^{-ix},
/// h = 0.05, N = 800, delta = exp(-1/h), 100 trials) and writes the run's
/// CSV tables plus a manifest into out_dir.  Returns one result per
/// criterion; the run passes iff all do.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace hagerlab
