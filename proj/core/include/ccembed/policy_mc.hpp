#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ccembed/ccsolver.hpp"
#include "ccembed/datagen.hpp"
#include "ccembed/scenario.hpp"
#include "ccembed/sysmodels.hpp"

namespace ccembed {

struct PolicyProvenance {
  Vector x0;
  double delta = 0.0;
  std::string model_digest;
};

// Mixture of open-loop sequences from a control library.
class MixedPolicy {
 public:
  MixedPolicy(Vector weights, std::shared_ptr<const ControlLibrary> library,
              PolicyProvenance provenance = {});

  static MixedPolicy from_solution(const SolveResult& result,
                                   std::shared_ptr<const ControlLibrary> library,
                                   PolicyProvenance provenance = {});

  const Vector& weights() const noexcept { return weights_; }
  const ControlLibrary& library() const noexcept { return *library_; }
  const PolicyProvenance& provenance() const noexcept { return provenance_; }

 private:
  Vector weights_;
  Vector cumulative_;
  std::shared_ptr<const ControlLibrary> library_;
  PolicyProvenance provenance_;

  friend std::pair<std::size_t, const ControlSequence*> sample_control(const MixedPolicy&,
                                                                       Stream&);
};

// Inverse-CDF categorical draw over the weights in index order; one uniform.
std::pair<std::size_t, const ControlSequence*> sample_control(const MixedPolicy& policy,
                                                              Stream& rng);

struct TrialRecord {
  std::size_t trial = 0;
  std::size_t library_index = 0;
  bool feasible = false;
  bool diverged = false;
};

struct MonteCarloReport {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double standard_error = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> records;
  // Present for the first `keep_trajectories` trials; row 0 is x0.
  std::vector<StepMatrix> trajectories;
};

// 95% Wilson score interval for successes / trials.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials);

// Trial t uses its own stream seeded with derive_seed(seed, t). Divergent
// rollouts are recorded as failures.
MonteCarloReport run_monte_carlo(const MixedPolicy& policy, const SystemModel& model,
                                 const Scenario& sc, const Vector& x0, std::size_t trials,
                                 std::uint64_t seed, std::size_t keep_trajectories = 2000);

// Report without trajectories: {trials, successes, success_rate, standard_error,
// wilson_95, seed, records}.
std::string to_json(const MonteCarloReport& report);

// trial,step,<state coords>,feasible
std::string trajectories_csv(const MonteCarloReport& report, std::size_t state_dim);

}  // namespace ccembed
