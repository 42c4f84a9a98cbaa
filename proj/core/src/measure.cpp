#include "slicedot/measure.hpp"

#include <cmath>
#include <numeric>

#include "slicedot/errors.hpp"

namespace slicedot {
namespace {

void check_points(const Tensor& points) {
  if (points.rank() != 2) throw ShapeError("measure points must be (k, d), got " + shape_string(points.shape()));
  if (points.rows() == 0) throw DomainError("measure has zero points");
  if (points.cols() == 0) throw DomainError("measure has zero dimensions");
  if (!points.all_finite()) throw DomainError("measure points contain NaN or Inf");
}

Tensor uniform_weights(std::size_t k) { return Tensor::filled({k}, 1.0 / static_cast<double>(k)); }

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(Tensor points) : points_(std::move(points)) {
  check_points(points_);
  weights_ = uniform_weights(points_.rows());
}

EmpiricalMeasure::EmpiricalMeasure(Tensor points, Tensor weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  check_points(points_);
  if (weights_.rank() != 1 || weights_.size() != points_.rows()) {
    throw ShapeError("weights " + shape_string(weights_.shape()) + " do not match " +
                     std::to_string(points_.rows()) + " points");
  }
  double total = 0.0;
  for (double w : weights_.data()) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("measure weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("measure weights sum to " + std::to_string(total));
}

EmpiricalMeasure EmpiricalMeasure::normalized(Tensor points, Tensor raw_weights) {
  double total = 0.0;
  for (double w : raw_weights.data()) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("measure weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("measure weights sum to zero");
  // Already a probability vector: keep the exact values (round trips stay bit-exact).
  if (std::abs(total - 1.0) <= 1e-12) return EmpiricalMeasure(std::move(points), std::move(raw_weights));
  for (double& w : raw_weights.data()) w /= total;
  // Push the rounding residual onto the heaviest atom so the sum check holds.
  const double sum = std::accumulate(raw_weights.data().begin(), raw_weights.data().end(), 0.0);
  auto data = raw_weights.data();
  std::size_t heaviest = 0;
  for (std::size_t i = 1; i < data.size(); ++i)
    if (data[i] > data[heaviest]) heaviest = i;
  if (!data.empty()) data[heaviest] += 1.0 - sum;
  return EmpiricalMeasure(std::move(points), std::move(raw_weights));
}

bool EmpiricalMeasure::is_uniform() const noexcept {
  const double w0 = 1.0 / static_cast<double>(size());
  for (double w : weights_.data())
    if (w != w0) return false;
  return true;
}

EmpiricalMeasure translated(const EmpiricalMeasure& m, std::span<const double> offset) {
  if (offset.size() != m.dim()) throw ShapeError("translation offset dimension mismatch");
  Tensor pts = m.points();
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    auto r = pts.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += offset[j];
  }
  return EmpiricalMeasure(std::move(pts), m.weights());
}

}  // namespace slicedot
