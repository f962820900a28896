#include <gtest/gtest.h>

#include "ccembed/errors.hpp"
#include "ccembed/random.hpp"
#include "ccembed/scenario.hpp"
#include "support.hpp"

namespace ccembed {
namespace {

// Straight line in position from (0, 0) to `end` over N steps; velocities set to v.
StateTrajectory line_to(double ex, double ey, std::size_t n = 15, double v = 0.0) {
  StateTrajectory t;
  t.states.resize(static_cast<Eigen::Index>(n), 4);
  for (std::size_t k = 1; k <= n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n);
    t.states.row(static_cast<Eigen::Index>(k - 1)) << s * ex, v, s * ey, -v;
  }
  return t;
}

Scenario with_box(double xmin, double xmax, double ymin, double ymax) {
  Scenario sc;
  sc.obstacles.push_back(Obstacle::box(xmin, xmax, ymin, ymax, 1, 14));
  return sc;
}

TEST(Indicator, EndsAtGoal) { EXPECT_EQ(indicator_T(Scenario{}, line_to(10, 10)), 1); }

TEST(Indicator, EndsOutsideGoal) { EXPECT_EQ(indicator_T(Scenario{}, line_to(5, 5)), 0); }

TEST(Indicator, ObstacleContactFails) {
  EXPECT_EQ(indicator_T(with_box(4, 6, 4, 6), line_to(10, 10)), 0);
  EXPECT_EQ(indicator_T(with_box(7, 9, 1, 3), line_to(10, 10)), 1);
}

TEST(Indicator, ClosedBoundaries) {
  Scenario sc;
  sc.goal.radius = 2.5;
  EXPECT_EQ(indicator_T(sc, line_to(10, 12.5)), 1);
  EXPECT_EQ(indicator_T(sc, line_to(10, 12.5000001)), 0);
  // Step 3 of the 15-step line sits at (2, 2): touching the box corner counts as a hit.
  EXPECT_EQ(indicator_T(with_box(2, 3, 2, 3), line_to(10, 10)), 0);
}

TEST(Indicator, InactiveStepsIgnored) {
  Scenario sc;
  // Only step 15 passes through here and obstacles are active 1..14.
  sc.obstacles.push_back(Obstacle::box(9.9, 10.1, 9.9, 10.1, 1, 14));
  EXPECT_EQ(indicator_T(sc, line_to(10, 10)), 1);
  // Step 14 sits at (28/3, 28/3).
  sc.obstacles[0] = Obstacle::box(9.3, 9.4, 9.3, 9.4, 14, 14);
  EXPECT_EQ(indicator_T(sc, line_to(10, 10)), 0);
  sc.obstacles[0].last_step = 13;
  sc.obstacles[0].first_step = 1;
  EXPECT_EQ(indicator_T(sc, line_to(10, 10)), 1);
}

TEST(Indicator, VelocityInvariant) {
  const Scenario sc = with_box(4, 6, 0, 2);
  for (double v : {-3.0, 0.0, 7.5}) {
    EXPECT_EQ(indicator_T(sc, line_to(10, 10, 15, v)), 1);
    EXPECT_EQ(indicator_T(sc, line_to(10, 4, 15, v)), 0);
  }
}

TEST(Indicator, RemovingObstacleNeverHurts) {
  Stream rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    Scenario sc;
    for (int k = 0; k < 3; ++k) {
      const double x = rng.uniform(0, 10), y = rng.uniform(0, 10);
      sc.obstacles.push_back(Obstacle::box(x, x + rng.uniform(0.1, 3), y, y + rng.uniform(0.1, 3),
                                           1, 14));
    }
    const StateTrajectory t = line_to(rng.uniform(6, 12), rng.uniform(6, 12));
    const int full = indicator_T(sc, t);
    sc.obstacles.erase(sc.obstacles.begin() + (trial % 3));
    EXPECT_GE(indicator_T(sc, t), full);
  }
}

TEST(Obstacle, HalfspaceForm) {
  Obstacle tri;
  tri.halfspaces = {{{-1, 0}, 0}, {{0, -1}, 0}, {{1, 1}, 1}};
  EXPECT_TRUE(tri.contains(0.2, 0.2));
  EXPECT_TRUE(tri.contains(0.5, 0.5));
  EXPECT_FALSE(tri.contains(0.6, 0.6));
}

TEST(Costs, AtGoalIsZero) {
  StateTrajectory t;
  t.states = StepMatrix::Zero(15, 4);
  t.states.col(0).setConstant(10);
  t.states.col(2).setConstant(10);
  Scenario sc;
  sc.costs.stage_weight = 1.0;
  EXPECT_EQ(state_cost(sc, t), 0.0);
}

TEST(Costs, TerminalOnlyByDefault) {
  EXPECT_DOUBLE_EQ(state_cost(Scenario{}, line_to(7, 6)), 9.0 + 16.0);
}

TEST(Costs, ControlEffort) {
  Scenario sc;
  ControlSequence u;
  u.inputs = StepMatrix::Zero(15, 2);
  EXPECT_EQ(control_cost(sc, u), 0.0);
  sc.costs.control_weight = 1.0;
  u.inputs.row(4) << 0.0, 2.0;
  EXPECT_DOUBLE_EQ(control_cost(sc, u), 4.0);
}

TEST(Scenario, Validation) {
  Scenario sc;
  sc.delta = 1.5;
  EXPECT_THROW(sc.validate(), InputError);
  sc = Scenario{};
  sc.goal.radius = -1;
  EXPECT_THROW(sc.validate(), InputError);
  sc = Scenario{};
  sc.obstacles.push_back(Obstacle::box(0, 1, 0, 1, 3, 2));
  EXPECT_THROW(sc.validate(), InputError);
}

}  // namespace
}  // namespace ccembed
