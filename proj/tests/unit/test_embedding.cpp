#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccembed/embedding.hpp"
#include "ccembed/errors.hpp"
#include "ccembed/scenario.hpp"
#include "support.hpp"

namespace ccembed {
namespace {

using testing::manual_dataset;
using testing::row1;
using testing::vec;

// Terminal p_x of each sample: a smooth function of the trajectory.
Vector terminal_px(const Dataset& ds) {
  Vector g(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    g(static_cast<Eigen::Index>(i)) = ds.samples[i].x.at(ds.horizon)(0);
  }
  return g;
}

Dataset one_sample() {
  return manual_dataset({vec({0.0, 0.0})}, {row1({0.5})}, {row1({1.0, 2.0})});
}

// Three samples far apart relative to a large bandwidth: G is the identity.
Dataset separated_three() {
  return manual_dataset({vec({0, 0}), vec({10, 0}), vec({0, 10})},
                        {row1({0}), row1({5}), row1({10})},
                        {row1({1, 0}), row1({2, 0}), row1({3, 0})});
}

TEST(Fit, SingleSampleFactor) {
  const EmbeddingModel m = fit(one_sample(), KernelSpec::fixed(1), KernelSpec::fixed(1), 0.25);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m.factor().lower()(0, 0), std::sqrt(1.25));
}

TEST(Fit, DuplicatesNeedRidge) {
  const Dataset dup = manual_dataset({vec({1, 1}), vec({1, 1})}, {row1({0.3}), row1({0.3})},
                                     {row1({0, 0}), row1({0, 0})});
  EXPECT_THROW(fit(dup, KernelSpec::fixed(1), KernelSpec::fixed(1), 0.0), FactorizationError);
  EXPECT_NO_THROW(fit(dup, KernelSpec::fixed(1), KernelSpec::fixed(1), 1e-6));
}

TEST(Fit, RejectsBadLambda) {
  EXPECT_THROW(fit(one_sample(), KernelSpec::fixed(1), KernelSpec::fixed(1), -1.0), InputError);
  EXPECT_THROW(fit(one_sample(), KernelSpec::fixed(1), KernelSpec::fixed(1), NAN), InputError);
}

TEST(Fit, ResolvesMedianBandwidthsSeparately) {
  const Dataset ds = separated_three();
  const EmbeddingModel m = fit(ds, KernelSpec::median_heuristic(), KernelSpec::median_heuristic(), 1e-3);
  EXPECT_DOUBLE_EQ(m.state_kernel().bandwidth, 10.0);
  EXPECT_DOUBLE_EQ(m.control_kernel().bandwidth, 5.0);
}

TEST(Fit, DigestTracksInputs) {
  const Dataset ds = separated_three();
  const auto a = fit(ds, KernelSpec::fixed(1), KernelSpec::fixed(1), 1e-3).digest();
  EXPECT_EQ(a, fit(ds, KernelSpec::fixed(1), KernelSpec::fixed(1), 1e-3).digest());
  EXPECT_NE(a, fit(ds, KernelSpec::fixed(1), KernelSpec::fixed(1), 2e-3).digest());
  EXPECT_NE(a, fit(ds, KernelSpec::fixed(2), KernelSpec::fixed(1), 1e-3).digest());
}

TEST(Coefficients, SingleSampleAtTrainingPoint) {
  const double lambda = 0.1;
  const Dataset ds = one_sample();
  const EmbeddingModel m = fit(ds, KernelSpec::fixed(1), KernelSpec::fixed(1), lambda);
  const Vector beta = coefficient_vector(m, ds.samples[0].x0, ds.samples[0].u);
  EXPECT_NEAR(beta(0), 1.0 / (1.0 + lambda), 1e-15);
  EXPECT_NEAR(estimate_expectation(m, vec({2.0}), ds.samples[0].x0, ds.samples[0].u),
              2.0 / (1.0 + lambda), 1e-15);
}

TEST(Coefficients, FarQueryIsZero) {
  const EmbeddingModel m = fit(separated_three(), KernelSpec::fixed(5), KernelSpec::fixed(5), 1e-3);
  ControlSequence u;
  u.inputs = row1({1000});
  const Vector beta = coefficient_vector(m, vec({500, 500}), u);
  EXPECT_EQ(beta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Coefficients, OrthonormalLimit) {
  const double lambda = 1e-3;
  const Dataset ds = separated_three();
  const EmbeddingModel m = fit(ds, KernelSpec::fixed(5), KernelSpec::fixed(5), lambda);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vector beta = coefficient_vector(m, ds.samples[i].x0, ds.samples[i].u);
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double expected = j == static_cast<Eigen::Index>(i) ? 1.0 / (1.0 + 3 * lambda) : 0.0;
      EXPECT_NEAR(beta(j), expected, 1e-14);
    }
  }
}

TEST(Estimate, ZeroFunction) {
  const Dataset ds = testing::spread_dataset(15, 2);
  const EmbeddingModel m = fit(ds, KernelSpec::median_heuristic(), KernelSpec::fixed(1e-3), 1e-7);
  EXPECT_EQ(estimate_expectation(m, Vector::Zero(15), ds.samples[3].x0, ds.samples[7].u), 0.0);
}

TEST(Estimate, InterpolatesDeterministicSystem) {
  const Dataset ds = testing::spread_dataset(20, 5);
  const EmbeddingModel m =
      fit(ds, KernelSpec::median_heuristic(), KernelSpec::median_heuristic(), 1e-10);
  const Vector g = terminal_px(ds);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double est = estimate_expectation(m, g, ds.samples[i].x0, ds.samples[i].u);
    EXPECT_NEAR(est, g(static_cast<Eigen::Index>(i)), 1e-3) << "sample " << i;
  }
}

TEST(Estimate, Linearity) {
  const Dataset ds = testing::spread_dataset(30, 8);
  const EmbeddingModel m = fit(ds, KernelSpec::fixed(0.05), KernelSpec::fixed(1e-3), 1e-4);
  Stream rng(4);
  Vector g1(30), g2(30);
  for (Eigen::Index i = 0; i < 30; ++i) g1(i) = rng.normal(), g2(i) = rng.normal();
  const double a = 2.5, b = -0.75;
  const Vector q = vec({0.3, 0.1, -0.2, 0.0});
  const ControlSequence& u = ds.samples[4].u;
  const double lhs = estimate_expectation(m, a * g1 + b * g2, q, u);
  const double rhs = a * estimate_expectation(m, g1, q, u) + b * estimate_expectation(m, g2, q, u);
  EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(rhs)));
}

TEST(Estimate, PermutationInvariance) {
  const Dataset ds = testing::spread_dataset(30, 9);
  std::vector<std::size_t> order(30);
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::swap(order[0], order[11]);
  Dataset perm = ds;
  for (std::size_t i = 0; i < 30; ++i) perm.samples[i] = ds.samples[order[i]];
  const Vector g = terminal_px(ds);
  Vector gp(30);
  for (std::size_t i = 0; i < 30; ++i) gp(static_cast<Eigen::Index>(i)) = g(static_cast<Eigen::Index>(order[i]));

  const KernelSpec kx = KernelSpec::fixed(0.05), ku = KernelSpec::fixed(1e-3);
  const EmbeddingModel m = fit(ds, kx, ku, 1e-4);
  const EmbeddingModel mp = fit(perm, kx, ku, 1e-4);
  for (std::size_t q = 0; q < 5; ++q) {
    const double a = estimate_expectation(m, g, ds.samples[q].x0, ds.samples[q + 5].u);
    const double b = estimate_expectation(mp, gp, ds.samples[q].x0, ds.samples[q + 5].u);
    EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(Estimate, ShrinksWithLambda) {
  const Dataset ds = testing::spread_dataset(20, 3);
  const Vector g = terminal_px(ds);
  double previous = INFINITY;
  for (double lambda : {1e-2, 1.0, 1e2}) {
    const EmbeddingModel m =
        fit(ds, KernelSpec::median_heuristic(), KernelSpec::median_heuristic(), lambda);
    const double est = std::abs(estimate_expectation(m, g, ds.samples[2].x0, ds.samples[2].u));
    EXPECT_LT(est, previous) << "lambda=" << lambda;
    previous = est;
  }
}

TEST(CrossMatrix, SingleColumnMatchesCrossVector) {
  const Dataset ds = testing::spread_dataset(10, 1);
  const EmbeddingModel m = fit(ds, KernelSpec::fixed(0.05), KernelSpec::fixed(1e-3), 1e-6);
  ControlLibrary lib{2, 15, {ds.samples[6].u}, 0, ""};
  const Vector q = vec({0, 0, 0, 0});
  const Matrix r = cross_matrix(m, q, lib);
  const Vector flat = lib.sequences[0].flattened();
  const Vector c = cross_vector(m.initial_states(), m.controls(), m.state_kernel(),
                                m.control_kernel(), as_span(q), as_span(flat));
  ASSERT_EQ(r.cols(), 1);
  EXPECT_EQ((r.col(0) - c).cwiseAbs().maxCoeff(), 0.0);
}

TEST(CrossMatrix, TrainingPairGivesUnitEntryAndRange) {
  const Dataset ds = testing::spread_dataset(10, 1);
  const EmbeddingModel m = fit(ds, KernelSpec::fixed(0.05), KernelSpec::fixed(1e-3), 1e-6);
  ControlLibrary lib{2, 15, {ds.samples[0].u, ds.samples[4].u, ds.samples[9].u}, 0, ""};
  const Matrix r = cross_matrix(m, ds.samples[4].x0, lib);
  EXPECT_EQ(r(4, 1), 1.0);
  EXPECT_GT(r.minCoeff(), 0.0);
  EXPECT_LE(r.maxCoeff(), 1.0);
  const Matrix w = coefficient_matrix(m, ds.samples[4].x0, lib);
  Matrix g = gram_product(m.initial_states(), m.controls(), m.state_kernel(), m.control_kernel());
  g.diagonal().array() += 1e-6 * 10;
  EXPECT_LE((g * w - r).norm() / r.norm(), 1e-10);
}

TEST(Query, RejectsWrongShapes) {
  const Dataset ds = testing::spread_dataset(5, 1);
  const EmbeddingModel m = fit(ds, KernelSpec::fixed(0.05), KernelSpec::fixed(1e-3), 1e-6);
  EXPECT_THROW(coefficient_vector(m, vec({0, 0}), ds.samples[0].u), InputError);
  ControlSequence shortu;
  shortu.inputs = StepMatrix::Zero(3, 2);
  EXPECT_THROW(coefficient_vector(m, ds.samples[0].x0, shortu), InputError);
  EXPECT_THROW(estimate_expectation(m, Vector::Zero(4), ds.samples[0].x0, ds.samples[0].u),
               InputError);
}

}  // namespace
}  // namespace ccembed
