#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include "run_config.hpp"

namespace ccembed::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kIoError = 4,
  kDataError = 5,
};

struct OutputPaths {
  std::filesystem::path dir;

  std::filesystem::path dataset() const { return dir / "dataset.jsonl"; }
  std::filesystem::path library() const { return dir / "library.jsonl"; }
  std::filesystem::path policy(double delta) const;
  std::filesystem::path report(double delta) const;
  std::filesystem::path trajectories(double delta) const;
  std::filesystem::path summary_csv() const { return dir / "summary.csv"; }
  std::filesystem::path summary_json() const { return dir / "summary.json"; }
};

// "0.05" for 0.05; used in per-delta file names.
std::string delta_label(double delta);

int cmd_generate(const RunConfig& cfg, std::ostream& log);
int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_validate(const RunConfig& cfg, const std::filesystem::path& policy_path,
                 std::ostream& log);
// generate -> solve -> validate for every delta, reusing outputs whose
// embedded config digest matches.
int cmd_experiment(const RunConfig& cfg, std::ostream& log);

// Runs fn, mapping library exceptions to exit codes and messages on err.
int guarded(const std::function<int()>& fn, std::ostream& err);

}  // namespace ccembed::cli
