#pragma once

#include <memory>
#include <string>

#include "ccembed/datagen.hpp"
#include "ccembed/kernelmath.hpp"

namespace ccembed {

// Empirical conditional distribution embedding fitted on a dataset. Only the
// regularized Gram factor is stored; expectations of any g are taken as
// g^T (G + lambda M I)^{-1} K(x0, u) using g evaluated at the sample
// trajectories.
class EmbeddingModel {
 public:
  const Dataset& dataset() const noexcept { return *dataset_; }
  std::shared_ptr<const Dataset> dataset_ptr() const noexcept { return dataset_; }
  const PointSet& initial_states() const noexcept { return initial_states_; }
  const PointSet& controls() const noexcept { return controls_; }
  const KernelSpec& state_kernel() const noexcept { return kx_; }
  const KernelSpec& control_kernel() const noexcept { return ku_; }
  double lambda() const noexcept { return lambda_; }
  const SpdFactor& factor() const noexcept { return factor_; }
  std::size_t size() const noexcept { return factor_.dimension(); }
  // Identifies dataset contents, resolved bandwidths, and lambda.
  const std::string& digest() const noexcept { return digest_; }

 private:
  friend EmbeddingModel fit(std::shared_ptr<const Dataset>, const KernelSpec&,
                            const KernelSpec&, double);

  std::shared_ptr<const Dataset> dataset_;
  PointSet initial_states_;
  PointSet controls_;
  KernelSpec kx_;
  KernelSpec ku_;
  double lambda_ = 0.0;
  SpdFactor factor_;
  std::string digest_;
};

// Median-heuristic kernels are resolved over the dataset's x0 and flattened
// u collections separately. Throws FactorizationError if G + lambda M I is
// not numerically positive definite.
EmbeddingModel fit(std::shared_ptr<const Dataset> ds, const KernelSpec& kx,
                   const KernelSpec& ku, double lambda);
EmbeddingModel fit(const Dataset& ds, const KernelSpec& kx, const KernelSpec& ku,
                   double lambda);

Vector coefficient_vector(const EmbeddingModel& model, const Vector& x0,
                          const ControlSequence& u);

double estimate_expectation(const EmbeddingModel& model, const Vector& gvals, const Vector& x0,
                            const ControlSequence& u);

// R(x0): column j is the cross vector for library sequence j.
Matrix cross_matrix(const EmbeddingModel& model, const Vector& x0, const ControlLibrary& lib);

// (G + lambda M I)^{-1} R(x0).
Matrix coefficient_matrix(const EmbeddingModel& model, const Vector& x0,
                          const ControlLibrary& lib);

}  // namespace ccembed
