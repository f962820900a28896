#include "ccembed/kernelmath.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ccembed/errors.hpp"

namespace ccembed {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

void require_resolved(const KernelSpec& spec, const char* which) {
  if (!spec.resolved()) {
    throw InputError(std::string(which) + " kernel bandwidth is not resolved");
  }
}

void check_pairing(const PointSet& initial_states, const PointSet& controls) {
  if (initial_states.rows() != controls.rows()) {
    throw InputError("initial_states has " + std::to_string(initial_states.rows()) +
                     " rows but controls has " + std::to_string(controls.rows()));
  }
}

// Unblocked scan used only to report where LLT broke down.
std::size_t failing_pivot(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return static_cast<std::size_t>(j);
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return static_cast<std::size_t>(n > 0 ? n - 1 : 0);
}

}  // namespace

KernelSpec KernelSpec::fixed(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InputError("fixed kernel bandwidth must be finite and > 0, got " +
                     std::to_string(bandwidth));
  }
  return {KernelFamily::gaussian, BandwidthMode::fixed, bandwidth};
}

KernelSpec KernelSpec::median_heuristic() {
  return {KernelFamily::gaussian, BandwidthMode::median_heuristic, 0.0};
}

bool KernelSpec::resolved() const noexcept {
  return mode == BandwidthMode::fixed && bandwidth > 0.0 && std::isfinite(bandwidth);
}

KernelSpec resolve(const KernelSpec& spec, const PointSet& points) {
  if (spec.mode == BandwidthMode::fixed) return KernelSpec::fixed(spec.bandwidth);
  return KernelSpec::fixed(median_bandwidth(points));
}

double eval_kernel(const KernelSpec& spec, std::span<const double> a,
                   std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("kernel arguments have dimensions " + std::to_string(a.size()) +
                     " and " + std::to_string(b.size()));
  }
  require_resolved(spec, "evaluated");
  return std::exp(-spec.bandwidth * squared_distance(a, b));
}

double median_bandwidth(const PointSet& points) {
  const Eigen::Index count = points.rows();
  if (count < 2) {
    throw DegenerateDataError("median heuristic needs at least 2 points, got " +
                              std::to_string(count));
  }
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(count * (count - 1) / 2));
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = i + 1; j < count; ++j) {
      distances.push_back(std::sqrt(squared_distance(row_span(points, i), row_span(points, j))));
    }
  }
  const std::size_t half = distances.size() / 2;
  std::nth_element(distances.begin(), distances.begin() + half, distances.end());
  double median = distances[half];
  if (distances.size() % 2 == 0) {
    const double lower = *std::max_element(distances.begin(), distances.begin() + half);
    median = 0.5 * (lower + median);
  }
  if (!(median > 0.0)) {
    throw DegenerateDataError("median pairwise distance is zero");
  }
  return median;
}

Matrix gram_product(const PointSet& initial_states, const PointSet& controls,
                    const KernelSpec& kx, const KernelSpec& ku) {
  check_pairing(initial_states, controls);
  require_resolved(kx, "state");
  require_resolved(ku, "control");
  const Eigen::Index m = initial_states.rows();
  Matrix gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    gram(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double value =
          eval_kernel(kx, row_span(initial_states, i), row_span(initial_states, j)) *
          eval_kernel(ku, row_span(controls, i), row_span(controls, j));
      gram(i, j) = value;
      gram(j, i) = value;
    }
  }
  return gram;
}

Vector cross_vector(const PointSet& initial_states, const PointSet& controls,
                    const KernelSpec& kx, const KernelSpec& ku,
                    std::span<const double> query_x0, std::span<const double> query_u) {
  check_pairing(initial_states, controls);
  if (query_x0.size() != static_cast<std::size_t>(initial_states.cols()) ||
      query_u.size() != static_cast<std::size_t>(controls.cols())) {
    throw InputError("query dimensions (" + std::to_string(query_x0.size()) + ", " +
                     std::to_string(query_u.size()) + ") do not match samples (" +
                     std::to_string(initial_states.cols()) + ", " +
                     std::to_string(controls.cols()) + ")");
  }
  const Eigen::Index m = initial_states.rows();
  Vector out(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out(i) = eval_kernel(kx, row_span(initial_states, i), query_x0) *
             eval_kernel(ku, row_span(controls, i), query_u);
  }
  return out;
}

Matrix cross_block(const PointSet& initial_states, const PointSet& controls,
                   const KernelSpec& kx, const KernelSpec& ku,
                   std::span<const double> query_x0, const PointSet& query_controls) {
  Matrix out(initial_states.rows(), query_controls.rows());
  for (Eigen::Index j = 0; j < query_controls.rows(); ++j) {
    out.col(j) = cross_vector(initial_states, controls, kx, ku, query_x0,
                              row_span(query_controls, j));
  }
  return out;
}

SpdFactor spd_factor(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InputError("spd_factor needs a non-empty square matrix, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!a.allFinite()) throw InputError("spd_factor: matrix has non-finite entries");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw InputError("spd_factor: matrix is not symmetric (max asymmetry " +
                     std::to_string(asym) + ")");
  }
  Eigen::LLT<Matrix> llt(a);
  bool ok = llt.info() == Eigen::Success;
  Matrix lower;
  if (ok) {
    lower = llt.matrixL();
    ok = (lower.diagonal().array() > 0.0).all() && lower.allFinite();
  }
  if (!ok) {
    const std::size_t pivot = failing_pivot(a);
    throw FactorizationError(pivot, "matrix is not positive definite: pivot " +
                                        std::to_string(pivot) + " is not positive");
  }
  return SpdFactor(std::move(lower));
}

Matrix spd_solve(const SpdFactor& factor, const Matrix& rhs) {
  if (static_cast<std::size_t>(rhs.rows()) != factor.dimension()) {
    throw InputError("spd_solve: rhs has " + std::to_string(rhs.rows()) +
                     " rows, factor dimension is " + std::to_string(factor.dimension()));
  }
  const auto lower = factor.lower().triangularView<Eigen::Lower>();
  Matrix y = lower.solve(rhs);
  return factor.lower().transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector spd_solve(const SpdFactor& factor, const Vector& rhs) {
  Matrix as_matrix = rhs;
  return spd_solve(factor, as_matrix).col(0);
}

}  // namespace ccembed
