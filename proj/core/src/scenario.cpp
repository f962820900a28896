#include "ccembed/scenario.hpp"

#include <cmath>
#include <string>

#include "ccembed/errors.hpp"

namespace ccembed {
namespace {

void check_length(const Scenario& sc, std::size_t length, const char* what) {
  if (length != sc.horizon) {
    throw InputError(std::string(what) + " has " + std::to_string(length) +
                     " steps, scenario horizon is " + std::to_string(sc.horizon));
  }
}

void check_positions(const Scenario& sc, std::size_t state_dim) {
  for (std::size_t idx : sc.goal.position_indices) {
    if (idx >= state_dim) {
      throw InputError("position index " + std::to_string(idx) + " out of range for state dim " +
                       std::to_string(state_dim));
    }
  }
}

}  // namespace

bool GoalSet::contains(double px, double py) const noexcept {
  const double dx = px - center[0];
  const double dy = py - center[1];
  return dx * dx + dy * dy <= radius * radius;
}

Obstacle Obstacle::box(double x_min, double x_max, double y_min, double y_max,
                       std::size_t first_step, std::size_t last_step) {
  Obstacle o;
  o.halfspaces = {{{1.0, 0.0}, x_max}, {{-1.0, 0.0}, -x_min},
                  {{0.0, 1.0}, y_max}, {{0.0, -1.0}, -y_min}};
  o.first_step = first_step;
  o.last_step = last_step;
  return o;
}

bool Obstacle::contains(double px, double py) const noexcept {
  for (const Halfspace& h : halfspaces) {
    if (h.normal[0] * px + h.normal[1] * py > h.offset) return false;
  }
  return true;
}

void Scenario::validate() const {
  if (horizon < 1) throw InputError("scenario horizon N must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InputError("risk budget delta must lie in (0, 1), got " + std::to_string(delta));
  }
  if (!(dt > 0.0)) throw InputError("dt must be > 0");
  if (!(goal.radius > 0.0)) throw InputError("goal radius must be > 0");
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    const Obstacle& o = obstacles[k];
    if (o.halfspaces.size() < 3) {
      throw InputError("obstacle " + std::to_string(k) + " needs at least 3 halfspaces");
    }
    if (o.first_step < 1 || o.last_step < o.first_step || o.last_step > horizon - 1) {
      throw InputError("obstacle " + std::to_string(k) + " active range must lie within 1.." +
                       std::to_string(horizon - 1));
    }
  }
  if (costs.stage_weight < 0.0 || costs.terminal_weight < 0.0 || costs.control_weight < 0.0) {
    throw InputError("cost weights must be >= 0");
  }
}

int indicator_T(const Scenario& sc, const StateTrajectory& traj) {
  check_length(sc, traj.horizon(), "trajectory");
  check_positions(sc, traj.state_dim());
  const auto ix = static_cast<Eigen::Index>(sc.goal.position_indices[0]);
  const auto iy = static_cast<Eigen::Index>(sc.goal.position_indices[1]);
  const auto last = static_cast<Eigen::Index>(sc.horizon - 1);
  if (!sc.goal.contains(traj.states(last, ix), traj.states(last, iy))) return 0;
  for (const Obstacle& o : sc.obstacles) {
    for (std::size_t t = o.first_step; t <= o.last_step; ++t) {
      const auto row = static_cast<Eigen::Index>(t - 1);
      if (o.contains(traj.states(row, ix), traj.states(row, iy))) return 0;
    }
  }
  return 1;
}

double state_cost(const Scenario& sc, const StateTrajectory& traj) {
  check_length(sc, traj.horizon(), "trajectory");
  check_positions(sc, traj.state_dim());
  const auto ix = static_cast<Eigen::Index>(sc.goal.position_indices[0]);
  const auto iy = static_cast<Eigen::Index>(sc.goal.position_indices[1]);
  double total = 0.0;
  for (Eigen::Index t = 0; t < traj.states.rows(); ++t) {
    const double w = t + 1 == traj.states.rows() ? sc.costs.terminal_weight
                                                 : sc.costs.stage_weight;
    if (w == 0.0) continue;
    const double dx = traj.states(t, ix) - sc.goal.center[0];
    const double dy = traj.states(t, iy) - sc.goal.center[1];
    total += w * (dx * dx + dy * dy);
  }
  return total;
}

double control_cost(const Scenario& sc, const ControlSequence& u) {
  check_length(sc, u.horizon(), "control sequence");
  return sc.costs.control_weight * u.inputs.squaredNorm();
}

}  // namespace ccembed
