#pragma once

#include <cstddef>
#include <memory>

#include "ccembed/datagen.hpp"
#include "ccembed/random.hpp"
#include "ccembed/sysmodels.hpp"

namespace ccembed::testing {

inline PointSet points(std::initializer_list<std::initializer_list<double>> rows) {
  const auto cols = static_cast<Eigen::Index>(rows.begin()->size());
  PointSet p(static_cast<Eigen::Index>(rows.size()), cols);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) p(i, j++) = v;
    ++i;
  }
  return p;
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline Matrix random_spd(std::size_t n, Stream& rng) {
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  Matrix s = a * a.transpose();
  s.diagonal().array() += static_cast<double>(n) * 0.01;
  return s;
}

// Deterministic point-mass quadrotor with zero disturbance.
inline QuadrotorModel deterministic_quad(double mass = 1.0, double drag = 0.45) {
  return QuadrotorModel(0.1, QuadrotorParams{mass, drag}, DisturbanceSpec::zero(4));
}

// Small quadrotor dataset; noisy unless a deterministic model is passed.
inline Dataset small_dataset(std::size_t m, std::uint64_t seed, const SystemModel& model,
                             std::size_t horizon = 15) {
  DatasetGenConfig cfg = DatasetGenConfig::quadrotor_default();
  cfg.sample_count = m;
  cfg.horizon = horizon;
  cfg.gain = DatasetGenConfig::pd_gain(15.0, 4.0);
  return generate_dataset(cfg, model, seed);
}

}  // namespace ccembed::testing

namespace ccembed::testing {

// Dataset built directly from (x0, u, x) rows; horizon 1 unless shapes say otherwise.
inline Dataset manual_dataset(const std::vector<Vector>& x0s, const std::vector<StepMatrix>& us,
                              const std::vector<StepMatrix>& xs) {
  Dataset ds;
  ds.state_dim = static_cast<std::size_t>(x0s.front().size());
  ds.control_dim = static_cast<std::size_t>(us.front().cols());
  ds.horizon = static_cast<std::size_t>(us.front().rows());
  for (std::size_t i = 0; i < x0s.size(); ++i) {
    Sample s;
    s.x0 = x0s[i];
    s.u.inputs = us[i];
    s.x.states = xs[i];
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

inline StepMatrix row1(std::initializer_list<double> values) {
  StepMatrix m(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index j = 0;
  for (double v : values) m(0, j++) = v;
  return m;
}

// Deterministic quadrotor dataset whose initial states are spread over a wide box.
inline Dataset spread_dataset(std::size_t m, std::uint64_t seed) {
  DatasetGenConfig cfg = DatasetGenConfig::quadrotor_default();
  cfg.sample_count = m;
  cfg.x0_low = vec({-5, -1, -5, -1});
  cfg.x0_high = vec({5, 1, 5, 1});
  cfg.gain = DatasetGenConfig::pd_gain(15.0, 4.0);
  return generate_dataset(cfg, deterministic_quad(), seed);
}

}  // namespace ccembed::testing
