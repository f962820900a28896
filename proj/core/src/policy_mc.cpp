#include "ccembed/policy_mc.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "ccembed/digest.hpp"
#include "ccembed/errors.hpp"

namespace ccembed {

MixedPolicy::MixedPolicy(Vector weights, std::shared_ptr<const ControlLibrary> library,
                         PolicyProvenance provenance)
    : weights_(std::move(weights)),
      library_(std::move(library)),
      provenance_(std::move(provenance)) {
  if (!library_) throw InputError("policy library is null");
  if (static_cast<std::size_t>(weights_.size()) != library_->size()) {
    throw InputError("policy has " + std::to_string(weights_.size()) + " weights for a library of " +
                     std::to_string(library_->size()));
  }
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw InputError("policy weights must be finite and >= 0");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-9) {
    throw InputError("policy weights must sum to 1 (got " + format_double(weights_.sum()) + ")");
  }
  cumulative_.resize(weights_.size());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < weights_.size(); ++j) {
    acc += weights_(j);
    cumulative_(j) = acc;
  }
}

MixedPolicy MixedPolicy::from_solution(const SolveResult& result,
                                       std::shared_ptr<const ControlLibrary> library,
                                       PolicyProvenance provenance) {
  if (result.status != SolveStatus::optimal) {
    throw InputError("cannot build a policy from an infeasible solve");
  }
  return MixedPolicy(result.weights, std::move(library), std::move(provenance));
}

std::pair<std::size_t, const ControlSequence*> sample_control(const MixedPolicy& policy,
                                                              Stream& rng) {
  const double u = rng.uniform() * policy.cumulative_(policy.cumulative_.size() - 1);
  Eigen::Index chosen = -1;
  for (Eigen::Index j = 0; j < policy.weights_.size(); ++j) {
    if (policy.weights_(j) <= 0.0) continue;
    chosen = j;
    if (u < policy.cumulative_(j)) break;
  }
  const auto idx = static_cast<std::size_t>(chosen);
  return {idx, &policy.library_->sequences[idx]};
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  // The bounds at 0 and n successes are exactly 0 and 1 analytically.
  const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double high = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

MonteCarloReport run_monte_carlo(const MixedPolicy& policy, const SystemModel& model,
                                 const Scenario& sc, const Vector& x0, std::size_t trials,
                                 std::uint64_t seed, std::size_t keep_trajectories) {
  if (trials < 1) throw InputError("Monte-Carlo needs at least one trial");
  sc.validate();
  if (policy.library().horizon != sc.horizon) {
    throw InputError("policy library horizon does not match the scenario");
  }
  MonteCarloReport report;
  report.trials = trials;
  report.seed = seed;
  report.records.resize(trials);
  const std::size_t kept = std::min(trials, keep_trajectories);
  report.trajectories.resize(kept);

  for (std::size_t t = 0; t < trials; ++t) {
    Stream rng(derive_seed(seed, t));
    const auto [index, u] = sample_control(policy, rng);
    TrialRecord& rec = report.records[t];
    rec.trial = t;
    rec.library_index = index;
    StateTrajectory traj;
    try {
      traj = rollout(model, x0, *u, rng);
      rec.feasible = indicator_T(sc, traj) == 1;
    } catch (const SimulationDivergence&) {
      rec.diverged = true;
      rec.feasible = false;
    }
    if (rec.feasible) ++report.successes;
    if (t < kept) {
      StepMatrix rows(static_cast<Eigen::Index>(sc.horizon + 1), x0.size());
      rows.row(0) = x0.transpose();
      if (rec.diverged) {
        rows.bottomRows(static_cast<Eigen::Index>(sc.horizon)).setConstant(std::nan(""));
      } else {
        rows.bottomRows(static_cast<Eigen::Index>(sc.horizon)) = traj.states;
      }
      report.trajectories[t] = std::move(rows);
    }
  }
  const double n = static_cast<double>(trials);
  report.success_rate = static_cast<double>(report.successes) / n;
  report.standard_error = std::sqrt(report.success_rate * (1.0 - report.success_rate) / n);
  std::tie(report.wilson_low, report.wilson_high) = wilson_interval(report.successes, trials);
  return report;
}

std::string to_json(const MonteCarloReport& report) {
  nlohmann::ordered_json j;
  j["trials"] = report.trials;
  j["successes"] = report.successes;
  j["success_rate"] = report.success_rate;
  j["standard_error"] = report.standard_error;
  j["wilson_95"] = {report.wilson_low, report.wilson_high};
  j["seed"] = report.seed;
  auto records = nlohmann::ordered_json::array();
  for (const TrialRecord& r : report.records) {
    records.push_back({{"trial", r.trial},
                       {"index", r.library_index},
                       {"feasible", r.feasible},
                       {"diverged", r.diverged}});
  }
  j["records"] = records;
  return j.dump(2);
}

std::string trajectories_csv(const MonteCarloReport& report, std::size_t state_dim) {
  std::string out = "trial,step";
  for (std::size_t k = 0; k < state_dim; ++k) out += ",x" + std::to_string(k);
  out += ",feasible\n";
  for (std::size_t t = 0; t < report.trajectories.size(); ++t) {
    const StepMatrix& rows = report.trajectories[t];
    const char* flag = report.records[t].feasible ? "1" : "0";
    for (Eigen::Index s = 0; s < rows.rows(); ++s) {
      out += std::to_string(t) + ',' + std::to_string(s);
      for (Eigen::Index k = 0; k < rows.cols(); ++k) out += ',' + format_double(rows(s, k));
      out += ',';
      out += flag;
      out += '\n';
    }
  }
  return out;
}

}  // namespace ccembed
