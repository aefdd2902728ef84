#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace qcr::cli {

struct RunConfig {
  std::string command;
  std::filesystem::path input;
  std::filesystem::path out_dir = ".";
  std::filesystem::path report;
  int grid = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 1;
  int count = 1000;

  // Overrides; negative means library default.
  double res_tol = -1;
  double inv_tol = -1;
  double audit_tol = -1;
  double quad_budget_rel = -1;
  int max_iter = -1;
  int audit_samples = -1;
  int directions = -1;

  // fixture
  std::string fixture;
  double k = 0.2;
  double radius = 0.8;
};

/// Runs one command; returns the exit status. Library errors propagate.
int run(const RunConfig& cfg);

}  // namespace qcr::cli
