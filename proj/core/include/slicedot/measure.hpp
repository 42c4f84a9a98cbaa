#pragma once

#include "slicedot/tensor.hpp"

namespace slicedot {

/// Weighted point cloud in R^d: points (k, d) and probability weights (k,).
class EmpiricalMeasure {
 public:
  /// Uniform weights 1/k.
  explicit EmpiricalMeasure(Tensor points);
  /// Weights must be nonnegative and sum to 1 within 1e-12.
  EmpiricalMeasure(Tensor points, Tensor weights);

  /// Rescales arbitrary nonnegative weights to unit mass.
  static EmpiricalMeasure normalized(Tensor points, Tensor raw_weights);

  const Tensor& points() const noexcept { return points_; }
  const Tensor& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.rows(); }
  std::size_t dim() const noexcept { return points_.cols(); }
  bool is_uniform() const noexcept;

  friend bool operator==(const EmpiricalMeasure&, const EmpiricalMeasure&) = default;

 private:
  Tensor points_;
  Tensor weights_;
};

/// Shifts every point by `offset` (d,).
EmpiricalMeasure translated(const EmpiricalMeasure& m, std::span<const double> offset);

}  // namespace slicedot
