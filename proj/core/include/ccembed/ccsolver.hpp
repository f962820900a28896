#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ccembed/datagen.hpp"
#include "ccembed/embedding.hpp"
#include "ccembed/scenario.hpp"

namespace ccembed {

struct SafetyDiagnostics {
  std::size_t below_zero = 0;
  std::size_t above_one = 0;
  double min_value = 0.0;
  double max_value = 0.0;
};

// min cost_row . w  s.t.  safety_row . w >= threshold,  w in the simplex.
struct LPInstance {
  Vector cost_row;
  Vector safety_row;
  double threshold = 0.95;
  SafetyDiagnostics diagnostics;

  std::size_t size() const noexcept { return static_cast<std::size_t>(cost_row.size()); }
  void validate() const;
};

enum class SolveStatus { optimal, infeasible };

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  Vector weights;
  double objective = 0.0;
  // Indices with weight > 0, ascending.
  std::vector<std::size_t> support;
  // Constraint holds only because some safety entries exceed 1; with those
  // entries clipped to 1 the mixture would fall below the threshold.
  bool relies_on_superunit_safety = false;
};

SafetyDiagnostics safety_diagnostics(const Vector& safety_row);

// Builds the LP for sc.delta. The coefficient matrix is computed once; use
// with_delta to re-threshold the same instance.
LPInstance assemble(const EmbeddingModel& model, const Scenario& sc, const ControlLibrary& lib,
                    const Vector& x0);
LPInstance with_delta(LPInstance inst, double delta);

// Exact solver exploiting that some optimal vertex has support size <= 2.
SolveResult solve_lp(const LPInstance& inst);

// Enumerates every pure strategy and every pair (j, k) as a two-variable LP.
// Test oracle; P <= 200.
SolveResult brute_oracle(const LPInstance& inst);

// {status, objective, weights: [[index, weight], ...], diagnostics}
std::string to_json(const SolveResult& result, const LPInstance& inst);

const char* to_string(SolveStatus status) noexcept;

}  // namespace ccembed
