#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccembed/datagen.hpp"
#include "ccembed/kernelmath.hpp"
#include "ccembed/scenario.hpp"
#include "ccembed/sysmodels.hpp"

namespace ccembed::cli {

// Everything one experiment run needs, parsed from a single JSON file.
struct RunConfig {
  std::uint64_t seed = 0;

  QuadrotorParams nominal{1.0, 0.005};
  ParamPrior prior;
  DisturbanceSpec disturbance;
  DatasetGenConfig dataset;
  LibraryGenConfig library;
  KernelSpec state_kernel;
  KernelSpec control_kernel;
  double lambda = 1e-7;
  Scenario scenario;
  std::vector<double> deltas;
  Vector x0;
  std::size_t trials = 1000;
  std::uint64_t montecarlo_seed = 0;
  std::size_t keep_trajectories = 2000;
  std::filesystem::path out_dir;

  // Digest of the canonical JSON after command-line overrides.
  std::string digest;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;
  std::optional<std::vector<double>> x0;
  std::optional<std::filesystem::path> out_dir;
};

// Throws ConfigError; JSON syntax errors carry the line number.
RunConfig parse_run_config(const std::string& text, const Overrides& overrides = {},
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace ccembed::cli
