#include "ccembed/embedding.hpp"

#include <cmath>
#include <string>

#include "ccembed/digest.hpp"
#include "ccembed/errors.hpp"

namespace ccembed {
namespace {

void check_query(const EmbeddingModel& model, const Vector& x0, std::size_t horizon,
                 std::size_t control_dim) {
  const Dataset& ds = model.dataset();
  if (static_cast<std::size_t>(x0.size()) != ds.state_dim) {
    throw InputError("query x0 has dimension " + std::to_string(x0.size()) +
                     ", dataset state dimension is " + std::to_string(ds.state_dim));
  }
  if (horizon != ds.horizon || control_dim != ds.control_dim) {
    throw InputError("query control sequence is " + std::to_string(horizon) + "x" +
                     std::to_string(control_dim) + ", dataset uses " +
                     std::to_string(ds.horizon) + "x" + std::to_string(ds.control_dim));
  }
}

}  // namespace

EmbeddingModel fit(std::shared_ptr<const Dataset> ds, const KernelSpec& kx,
                   const KernelSpec& ku, double lambda) {
  if (!ds) throw InputError("fit: dataset is null");
  ds->validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError("regularization lambda must be finite and >= 0, got " +
                     std::to_string(lambda));
  }
  EmbeddingModel model;
  model.initial_states_ = ds->initial_states();
  model.controls_ = ds->flattened_controls();
  model.kx_ = resolve(kx, model.initial_states_);
  model.ku_ = resolve(ku, model.controls_);
  model.lambda_ = lambda;

  const auto m = static_cast<Eigen::Index>(ds->size());
  Matrix regularized = gram_product(model.initial_states_, model.controls_, model.kx_, model.ku_);
  regularized.diagonal().array() += lambda * static_cast<double>(m);
  try {
    model.factor_ = spd_factor(regularized);
  } catch (const FactorizationError& e) {
    throw FactorizationError(e.pivot(), std::string("embedding fit failed (") + e.what() +
                                            "); increase lambda");
  }

  std::string identity = serialize_dataset(*ds);
  identity += format_double(model.kx_.bandwidth) + ' ' + format_double(model.ku_.bandwidth) +
              ' ' + format_double(lambda);
  model.digest_ = digest_hex(identity);
  model.dataset_ = std::move(ds);
  return model;
}

EmbeddingModel fit(const Dataset& ds, const KernelSpec& kx, const KernelSpec& ku,
                   double lambda) {
  return fit(std::make_shared<const Dataset>(ds), kx, ku, lambda);
}

Vector coefficient_vector(const EmbeddingModel& model, const Vector& x0,
                          const ControlSequence& u) {
  check_query(model, x0, u.horizon(), u.control_dim());
  const Vector flat = u.flattened();
  const Vector k = cross_vector(model.initial_states(), model.controls(), model.state_kernel(),
                                model.control_kernel(), as_span(x0), as_span(flat));
  return spd_solve(model.factor(), k);
}

double estimate_expectation(const EmbeddingModel& model, const Vector& gvals, const Vector& x0,
                            const ControlSequence& u) {
  if (static_cast<std::size_t>(gvals.size()) != model.size()) {
    throw InputError("gvals has " + std::to_string(gvals.size()) + " entries, model has " +
                     std::to_string(model.size()) + " samples");
  }
  return gvals.dot(coefficient_vector(model, x0, u));
}

Matrix cross_matrix(const EmbeddingModel& model, const Vector& x0, const ControlLibrary& lib) {
  lib.validate();
  check_query(model, x0, lib.horizon, lib.control_dim);
  return cross_block(model.initial_states(), model.controls(), model.state_kernel(),
                     model.control_kernel(), as_span(x0), lib.flattened());
}

Matrix coefficient_matrix(const EmbeddingModel& model, const Vector& x0,
                          const ControlLibrary& lib) {
  return spd_solve(model.factor(), cross_matrix(model, x0, lib));
}

}  // namespace ccembed
