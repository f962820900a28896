#include "ccembed/sysmodels.hpp"

#include <boost/math/distributions/beta.hpp>
#include <cmath>
#include <string>

#include "ccembed/errors.hpp"

namespace ccembed {

void QuadrotorParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw InputError("quadrotor mass must be finite and > 0, got " + std::to_string(mass));
  }
  if (!(drag >= 0.0) || !std::isfinite(drag)) {
    throw InputError("quadrotor drag must be finite and >= 0, got " + std::to_string(drag));
  }
}

void ScaledBeta::validate() const {
  if (!(shape_a > 0.0) || !(shape_b > 0.0)) {
    throw InputError("beta shapes must be > 0");
  }
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(offset)) {
    throw InputError("beta scale must be finite and > 0, offset finite");
  }
}

double ScaledBeta::sample(Stream& rng) const {
  const boost::math::beta_distribution<double> dist(shape_a, shape_b);
  const double draw = boost::math::quantile(dist, rng.open_uniform());
  return offset + scale * draw;
}

void ParamPrior::validate() const {
  mass.validate();
  drag.validate();
}

QuadrotorParams sample_params(const ParamPrior& prior, Stream& rng) {
  QuadrotorParams out;
  out.mass = prior.mass.sample(rng);
  out.drag = prior.drag.sample(rng);
  return out;
}

DisturbanceSpec DisturbanceSpec::quadrotor_default() {
  DisturbanceSpec spec;
  spec.per_step_std = Vector(4);
  spec.per_step_std << 0.001, 0.01, 0.001, 0.01;
  return spec;
}

DisturbanceSpec DisturbanceSpec::zero(std::size_t state_dim) {
  return {Vector::Zero(static_cast<Eigen::Index>(state_dim))};
}

void DisturbanceSpec::validate(std::size_t state_dim) const {
  if (static_cast<std::size_t>(per_step_std.size()) != state_dim) {
    throw InputError("disturbance std has " + std::to_string(per_step_std.size()) +
                     " entries, state dimension is " + std::to_string(state_dim));
  }
  for (Eigen::Index i = 0; i < per_step_std.size(); ++i) {
    if (!(per_step_std(i) >= 0.0) || !std::isfinite(per_step_std(i))) {
      throw InputError("disturbance std entries must be finite and >= 0");
    }
  }
}

Vector quad_step(const Vector& x, const Vector& u, const Vector& w,
                 const QuadrotorParams& params, double dt) {
  if (x.size() != 4 || u.size() != 2 || w.size() != 4) {
    throw InputError("quad_step expects x, u, w of sizes 4, 2, 4");
  }
  if (!x.allFinite() || !u.allFinite() || !w.allFinite()) {
    throw InputError("quad_step: non-finite input");
  }
  params.validate();
  const double vx = x(1);
  const double vy = x(3);
  const double inv_m = 1.0 / params.mass;
  const double drag_x = params.drag * std::abs(vx) * vx;
  const double drag_y = params.drag * std::abs(vy) * vy;
  const double half_dt2 = 0.5 * dt * dt;

  Vector next(4);
  next(0) = x(0) + dt * vx + half_dt2 * inv_m * u(0) - half_dt2 * drag_x + w(0);
  next(1) = vx + dt * inv_m * u(0) - dt * drag_x + w(1);
  next(2) = x(2) + dt * vy + half_dt2 * inv_m * u(1) - half_dt2 * drag_y + w(2);
  next(3) = vy + dt * inv_m * u(1) - dt * drag_y + w(3);
  return next;
}

QuadrotorModel::QuadrotorModel(double dt, ParamSource params, DisturbanceSpec disturbance)
    : dt_(dt), params_(std::move(params)), disturbance_(std::move(disturbance)) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be finite and > 0");
  std::visit([](const auto& p) { p.validate(); }, params_);
  disturbance_.validate(4);
}

Vector QuadrotorModel::step(const Vector& x, const Vector& u, const Vector& w,
                            std::span<const double> theta) const {
  if (theta.size() != 2) throw InputError("quadrotor theta must be [mass, drag]");
  return quad_step(x, u, w, QuadrotorParams{theta[0], theta[1]}, dt_);
}

Vector QuadrotorModel::sample_params(Stream& rng) const {
  const QuadrotorParams p = std::visit(
      [&rng](const auto& source) -> QuadrotorParams {
        if constexpr (std::is_same_v<std::decay_t<decltype(source)>, ParamPrior>) {
          return ccembed::sample_params(source, rng);
        } else {
          return source;
        }
      },
      params_);
  Vector theta(2);
  theta << p.mass, p.drag;
  return theta;
}

Vector QuadrotorModel::sample_disturbance(Stream& rng) const {
  Vector w(4);
  for (Eigen::Index i = 0; i < 4; ++i) w(i) = disturbance_.per_step_std(i) * rng.normal();
  return w;
}

StateTrajectory rollout_with_params(const SystemModel& model, const Vector& x0,
                                    const ControlSequence& u, std::span<const double> theta,
                                    Stream& rng) {
  const std::size_t n = model.state_dim();
  if (static_cast<std::size_t>(x0.size()) != n || u.control_dim() != model.control_dim()) {
    throw InputError("rollout: x0 or control dimension does not match the model");
  }
  StateTrajectory traj;
  traj.states.resize(u.inputs.rows(), static_cast<Eigen::Index>(n));
  Vector x = x0;
  for (Eigen::Index t = 0; t < u.inputs.rows(); ++t) {
    const Vector w = model.sample_disturbance(rng);
    const Vector ut = u.inputs.row(t).transpose();
    if (!x.allFinite() || !ut.allFinite()) {
      throw SimulationDivergence(static_cast<std::size_t>(t),
                                 "non-finite state or input at step " + std::to_string(t));
    }
    x = model.step(x, ut, w, theta);
    if (!x.allFinite()) {
      throw SimulationDivergence(static_cast<std::size_t>(t),
                                 "state diverged at step " + std::to_string(t));
    }
    traj.states.row(t) = x.transpose();
  }
  return traj;
}

StateTrajectory rollout(const SystemModel& model, const Vector& x0, const ControlSequence& u,
                        Stream& rng) {
  const Vector theta = model.sample_params(rng);
  return rollout_with_params(model, x0, u, as_span(theta), rng);
}

}  // namespace ccembed
