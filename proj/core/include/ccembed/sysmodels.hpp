#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <variant>

#include "ccembed/kernelmath.hpp"
#include "ccembed/random.hpp"

namespace ccembed {

// Rows are time steps.
using StepMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Exact equality that is false (rather than an Eigen assertion) on shape mismatch.
template <typename A, typename B>
bool same_values(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

// States x_1..x_N (x_0 is kept separately).
struct StateTrajectory {
  StepMatrix states;

  std::size_t horizon() const noexcept { return static_cast<std::size_t>(states.rows()); }
  std::size_t state_dim() const noexcept { return static_cast<std::size_t>(states.cols()); }
  // t in 1..N
  Vector at(std::size_t t) const { return states.row(static_cast<Eigen::Index>(t - 1)).transpose(); }
  bool operator==(const StateTrajectory& other) const { return same_values(states, other.states); }
};

// Inputs u_0..u_{N-1}.
struct ControlSequence {
  StepMatrix inputs;

  std::size_t horizon() const noexcept { return static_cast<std::size_t>(inputs.rows()); }
  std::size_t control_dim() const noexcept { return static_cast<std::size_t>(inputs.cols()); }
  // Time-major flattening: u_0 then u_1 ...
  Vector flattened() const {
    return Eigen::Map<const Vector>(inputs.data(), inputs.size());
  }
  bool operator==(const ControlSequence& other) const { return same_values(inputs, other.inputs); }
};

struct QuadrotorParams {
  double mass = 1.0;
  double drag = 0.0;

  void validate() const;
};

// value = offset + scale * Beta(shape_a, shape_b)
struct ScaledBeta {
  double shape_a;
  double shape_b;
  double offset;
  double scale;

  void validate() const;
  double mean() const noexcept { return offset + scale * shape_a / (shape_a + shape_b); }
  // One uniform draw, inverse transform.
  double sample(Stream& rng) const;
};

struct ParamPrior {
  ScaledBeta mass{2.0, 2.0, 0.75, 0.5};
  ScaledBeta drag{2.0, 5.0, 0.4, 0.2};

  void validate() const;
};

QuadrotorParams sample_params(const ParamPrior& prior, Stream& rng);

// Zero-mean Gaussian w_t, independent per coordinate and step.
struct DisturbanceSpec {
  Vector per_step_std;

  static DisturbanceSpec quadrotor_default();
  static DisturbanceSpec zero(std::size_t state_dim);
  void validate(std::size_t state_dim) const;
};

// Discrete-time uncertain system x' = f(x, u, w, theta).
class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual std::size_t state_dim() const noexcept = 0;
  virtual std::size_t control_dim() const noexcept = 0;
  // Deterministic given all arguments.
  virtual Vector step(const Vector& x, const Vector& u, const Vector& w,
                      std::span<const double> theta) const = 0;
  virtual Vector sample_params(Stream& rng) const = 0;
  virtual Vector sample_disturbance(Stream& rng) const = 0;
};

// Planar quadrotor with quadratic drag. State [p_x, v_x, p_y, v_y], input
// [u_x, u_y], theta = [mass, drag].
Vector quad_step(const Vector& x, const Vector& u, const Vector& w,
                 const QuadrotorParams& params, double dt = 0.1);

class QuadrotorModel final : public SystemModel {
 public:
  using ParamSource = std::variant<ParamPrior, QuadrotorParams>;

  QuadrotorModel(double dt, ParamSource params, DisturbanceSpec disturbance);

  std::size_t state_dim() const noexcept override { return 4; }
  std::size_t control_dim() const noexcept override { return 2; }
  Vector step(const Vector& x, const Vector& u, const Vector& w,
              std::span<const double> theta) const override;
  Vector sample_params(Stream& rng) const override;
  Vector sample_disturbance(Stream& rng) const override;

  double dt() const noexcept { return dt_; }

 private:
  double dt_;
  ParamSource params_;
  DisturbanceSpec disturbance_;
};

// Samples theta once, w_t i.i.d. per step, and applies the step rule N times.
// Throws SimulationDivergence on a non-finite state.
StateTrajectory rollout(const SystemModel& model, const Vector& x0, const ControlSequence& u,
                        Stream& rng);

// As rollout, with theta supplied by the caller.
StateTrajectory rollout_with_params(const SystemModel& model, const Vector& x0,
                                    const ControlSequence& u, std::span<const double> theta,
                                    Stream& rng);

}  // namespace ccembed
