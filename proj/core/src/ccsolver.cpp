#include "ccembed/ccsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "ccembed/errors.hpp"

namespace ccembed {
namespace {

struct Candidate {
  double objective;
  // Ascending; size 1 (pure) or 2 (mixed).
  std::vector<std::size_t> support;
  std::vector<double> weights;
};

bool near_tie(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Total order: objective, then lexicographic support.
bool better(const Candidate& a, const std::optional<Candidate>& best) {
  if (!best) return true;
  if (!near_tie(a.objective, best->objective)) return a.objective < best->objective;
  return a.support < best->support;
}

Candidate pure(const LPInstance& inst, std::size_t j) {
  return {inst.cost_row(static_cast<Eigen::Index>(j)), {j}, {1.0}};
}

// Mix j (below threshold) with k (above) so the constraint is tight.
Candidate boundary_mix(const LPInstance& inst, std::size_t low, std::size_t high) {
  const double a_low = inst.safety_row(static_cast<Eigen::Index>(low));
  const double a_high = inst.safety_row(static_cast<Eigen::Index>(high));
  const double c_low = inst.cost_row(static_cast<Eigen::Index>(low));
  const double c_high = inst.cost_row(static_cast<Eigen::Index>(high));
  const double t = (inst.threshold - a_low) / (a_high - a_low);
  const double objective = (1.0 - t) * c_low + t * c_high;
  if (low < high) return {objective, {low, high}, {1.0 - t, t}};
  return {objective, {high, low}, {t, 1.0 - t}};
}

SolveResult finish(const LPInstance& inst, const std::optional<Candidate>& best) {
  SolveResult out;
  out.weights = Vector::Zero(static_cast<Eigen::Index>(inst.size()));
  if (!best) {
    out.status = SolveStatus::infeasible;
    out.objective = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.status = SolveStatus::optimal;
  out.objective = best->objective;
  double clipped_safety = 0.0;
  for (std::size_t s = 0; s < best->support.size(); ++s) {
    const auto idx = static_cast<Eigen::Index>(best->support[s]);
    out.weights(idx) = best->weights[s];
    clipped_safety += best->weights[s] * std::min(1.0, inst.safety_row(idx));
  }
  out.support = best->support;
  out.relies_on_superunit_safety = clipped_safety < inst.threshold - 1e-9;
  return out;
}

}  // namespace

void LPInstance::validate() const {
  if (cost_row.size() == 0 || cost_row.size() != safety_row.size()) {
    throw InputError("LP rows must be non-empty and of equal length");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InputError("LP threshold must lie in (0, 1)");
  }
  if (!cost_row.allFinite() || !safety_row.allFinite()) {
    throw InputError("LP rows contain non-finite entries");
  }
}

SafetyDiagnostics safety_diagnostics(const Vector& safety_row) {
  SafetyDiagnostics d;
  if (safety_row.size() == 0) return d;
  d.min_value = safety_row.minCoeff();
  d.max_value = safety_row.maxCoeff();
  d.below_zero = static_cast<std::size_t>((safety_row.array() < 0.0).count());
  d.above_one = static_cast<std::size_t>((safety_row.array() > 1.0).count());
  return d;
}

LPInstance assemble(const EmbeddingModel& model, const Scenario& sc, const ControlLibrary& lib,
                    const Vector& x0) {
  sc.validate();
  const Dataset& ds = model.dataset();
  if (ds.horizon != sc.horizon) {
    throw InputError("dataset horizon " + std::to_string(ds.horizon) +
                     " does not match scenario horizon " + std::to_string(sc.horizon));
  }
  const Matrix coeffs = coefficient_matrix(model, x0, lib);

  Vector state_costs(static_cast<Eigen::Index>(ds.size()));
  Vector feasible(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    state_costs(static_cast<Eigen::Index>(i)) = state_cost(sc, ds.samples[i].x);
    feasible(static_cast<Eigen::Index>(i)) = indicator_T(sc, ds.samples[i].x);
  }
  Vector control_costs(static_cast<Eigen::Index>(lib.size()));
  for (std::size_t j = 0; j < lib.size(); ++j) {
    control_costs(static_cast<Eigen::Index>(j)) = control_cost(sc, lib.sequences[j]);
  }

  LPInstance inst;
  inst.cost_row = coeffs.transpose() * state_costs + control_costs;
  inst.safety_row = coeffs.transpose() * feasible;
  inst.threshold = 1.0 - sc.delta;
  inst.diagnostics = safety_diagnostics(inst.safety_row);
  return inst;
}

LPInstance with_delta(LPInstance inst, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InputError("risk budget delta must lie in (0, 1), got " + std::to_string(delta));
  }
  inst.threshold = 1.0 - delta;
  return inst;
}

SolveResult solve_lp(const LPInstance& inst) {
  inst.validate();
  const std::size_t count = inst.size();
  std::vector<std::size_t> above;
  std::vector<std::size_t> below;
  for (std::size_t j = 0; j < count; ++j) {
    (inst.safety_row(static_cast<Eigen::Index>(j)) >= inst.threshold ? above : below).push_back(j);
  }
  std::optional<Candidate> best;
  if (above.empty()) return finish(inst, best);

  for (std::size_t k : above) {
    Candidate c = pure(inst, k);
    if (better(c, best)) best = std::move(c);
  }
  for (std::size_t j : below) {
    for (std::size_t k : above) {
      if (inst.safety_row(static_cast<Eigen::Index>(k)) == inst.threshold) continue;
      Candidate c = boundary_mix(inst, j, k);
      if (better(c, best)) best = std::move(c);
    }
  }
  return finish(inst, best);
}

SolveResult brute_oracle(const LPInstance& inst) {
  inst.validate();
  if (inst.size() > 200) throw InputError("brute_oracle is limited to P <= 200");
  const std::size_t count = inst.size();
  std::optional<Candidate> best;
  for (std::size_t j = 0; j < count; ++j) {
    if (inst.safety_row(static_cast<Eigen::Index>(j)) >= inst.threshold) {
      Candidate c = pure(inst, j);
      if (better(c, best)) best = std::move(c);
    }
  }
  // Two-variable LP on the segment w = (1 - t) e_j + t e_k, t in [0, 1]:
  // feasible t form an interval, and the optimum is at one of its ends.
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t k = j + 1; k < count; ++k) {
      const double aj = inst.safety_row(static_cast<Eigen::Index>(j));
      const double ak = inst.safety_row(static_cast<Eigen::Index>(k));
      const double cj = inst.cost_row(static_cast<Eigen::Index>(j));
      const double ck = inst.cost_row(static_cast<Eigen::Index>(k));
      double t_lo = 0.0;
      double t_hi = 1.0;
      const double slope = ak - aj;
      const double need = inst.threshold - aj;  // slope * t >= need
      if (slope > 0.0) {
        t_lo = std::max(t_lo, need / slope);
      } else if (slope < 0.0) {
        t_hi = std::min(t_hi, need / slope);
      } else if (need > 0.0) {
        continue;
      }
      if (t_lo > t_hi) continue;
      for (double t : {t_lo, t_hi}) {
        if (t <= 0.0 || t >= 1.0) continue;  // pure endpoints handled above
        Candidate c{(1.0 - t) * cj + t * ck, {j, k}, {1.0 - t, t}};
        if (better(c, best)) best = std::move(c);
      }
    }
  }
  return finish(inst, best);
}

const char* to_string(SolveStatus status) noexcept {
  return status == SolveStatus::optimal ? "optimal" : "infeasible";
}

std::string to_json(const SolveResult& result, const LPInstance& inst) {
  nlohmann::ordered_json j;
  j["status"] = to_string(result.status);
  if (result.status == SolveStatus::optimal) {
    j["objective"] = result.objective;
  } else {
    j["objective"] = nullptr;
  }
  auto weights = nlohmann::ordered_json::array();
  for (std::size_t idx : result.support) {
    weights.push_back({idx, result.weights(static_cast<Eigen::Index>(idx))});
  }
  j["weights"] = weights;
  j["diagnostics"] = {
      {"P", inst.size()},
      {"threshold", inst.threshold},
      {"safety_below_zero", inst.diagnostics.below_zero},
      {"safety_above_one", inst.diagnostics.above_one},
      {"safety_min", inst.diagnostics.min_value},
      {"safety_max", inst.diagnostics.max_value},
      {"relies_on_superunit_safety", result.relies_on_superunit_safety},
  };
  return j.dump(2);
}

}  // namespace ccembed
