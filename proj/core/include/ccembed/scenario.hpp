#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ccembed/kernelmath.hpp"
#include "ccembed/sysmodels.hpp"

namespace ccembed {

// Closed ball on the position coordinates.
struct GoalSet {
  std::array<double, 2> center{10.0, 10.0};
  double radius = 2.5;
  std::array<std::size_t, 2> position_indices{0, 2};

  bool contains(double px, double py) const noexcept;
};

struct Halfspace {
  std::array<double, 2> normal;
  double offset;  // normal . p <= offset
};

// Closed convex polytope on positions, active at steps first..last (inclusive,
// within 1..N-1).
struct Obstacle {
  std::vector<Halfspace> halfspaces;
  std::size_t first_step = 1;
  std::size_t last_step = 1;

  static Obstacle box(double x_min, double x_max, double y_min, double y_max,
                      std::size_t first_step, std::size_t last_step);
  // Boundary points count as inside.
  bool contains(double px, double py) const noexcept;
};

enum class StateCostKind { quadratic_to_goal };
enum class ControlCostKind { quadratic_effort };

struct CostSpec {
  StateCostKind state_kind = StateCostKind::quadratic_to_goal;
  // Weight on ||p_t - center||^2 for t < N, and for t = N.
  double stage_weight = 0.0;
  double terminal_weight = 1.0;
  ControlCostKind control_kind = ControlCostKind::quadratic_effort;
  double control_weight = 0.1;
};

struct Scenario {
  std::size_t horizon = 15;
  double delta = 0.05;
  double dt = 0.1;
  GoalSet goal;
  std::vector<Obstacle> obstacles;
  CostSpec costs;

  void validate() const;
};

// 1 iff x_N reaches the goal and no active obstacle contains x_t.
int indicator_T(const Scenario& sc, const StateTrajectory& traj);

double state_cost(const Scenario& sc, const StateTrajectory& traj);
double control_cost(const Scenario& sc, const ControlSequence& u);

}  // namespace ccembed
