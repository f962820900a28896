#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>

namespace ccembed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// One point per row.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class KernelFamily { gaussian };
enum class BandwidthMode { fixed, median_heuristic };

// Gaussian kernel k(a, b) = exp(-bandwidth * ||a - b||^2). Note the bandwidth
// multiplies the squared distance; it is not a length scale.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  BandwidthMode mode = BandwidthMode::median_heuristic;
  double bandwidth = 0.0;

  static KernelSpec fixed(double bandwidth);
  static KernelSpec median_heuristic();

  bool resolved() const noexcept;
};

// Returns a fixed-mode spec. Median-heuristic specs take the median pairwise
// distance of points as their bandwidth.
KernelSpec resolve(const KernelSpec& spec, const PointSet& points);

double eval_kernel(const KernelSpec& spec, std::span<const double> a,
                   std::span<const double> b);

// Median of the Euclidean distances over all index pairs i < j.
double median_bandwidth(const PointSet& points);

// G_ij = kx(x0_i, x0_j) * ku(u_i, u_j). Controls are already flattened.
Matrix gram_product(const PointSet& initial_states, const PointSet& controls,
                    const KernelSpec& kx, const KernelSpec& ku);

Vector cross_vector(const PointSet& initial_states, const PointSet& controls,
                    const KernelSpec& kx, const KernelSpec& ku,
                    std::span<const double> query_x0,
                    std::span<const double> query_u);

// Column j is cross_vector(..., query_x0, query_controls.row(j)).
Matrix cross_block(const PointSet& initial_states, const PointSet& controls,
                   const KernelSpec& kx, const KernelSpec& ku,
                   std::span<const double> query_x0,
                   const PointSet& query_controls);

// Lower Cholesky factor of a symmetric positive-definite matrix.
class SpdFactor {
 public:
  SpdFactor() = default;
  explicit SpdFactor(Matrix lower) : lower_(std::move(lower)) {}

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(lower_.rows()); }
  const Matrix& lower() const noexcept { return lower_; }

 private:
  Matrix lower_;
};

// Throws FactorizationError naming the first non-positive pivot (0-based).
SpdFactor spd_factor(const Matrix& a);

Matrix spd_solve(const SpdFactor& factor, const Matrix& rhs);
Vector spd_solve(const SpdFactor& factor, const Vector& rhs);

inline std::span<const double> row_span(const PointSet& points, Eigen::Index i) {
  return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
}

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace ccembed
