#include "slicedot/datasets.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "slicedot/errors.hpp"

namespace slicedot::datasets {

Tensor ring8(RngStream& rng, std::size_t n, double radius, double component_std) {
  Tensor out({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(rng.below(8)) / 8.0;
    out.at(i, 0) = radius * std::cos(angle) + component_std * rng.normal();
    out.at(i, 1) = radius * std::sin(angle) + component_std * rng.normal();
  }
  return out;
}

Tensor diagonal_gaussian(RngStream& rng, std::size_t n, std::span<const double> stddevs) {
  if (stddevs.empty()) throw ShapeError("diagonal_gaussian needs at least one coordinate");
  const std::size_t d = stddevs.size();
  Tensor out({n, d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out.at(i, j) = stddevs[j] * rng.normal();
  return out;
}

std::pair<Tensor, Tensor> gauss2d(RngStream& rng, std::size_t n) {
  const std::vector<double> a{std::sqrt(2.0), std::sqrt(2.0)};
  const std::vector<double> b{std::sqrt(5.0), 1.0};
  RngStream ra = rng.child(0), rb = rng.child(1);
  return {diagonal_gaussian(ra, n, a), diagonal_gaussian(rb, n, b)};
}

std::pair<Tensor, Tensor> gauss_hd(RngStream& rng, std::size_t n, std::size_t d) {
  if (d == 0) throw ShapeError("gauss_hd needs d >= 1");
  const std::vector<double> a(d, 1.0);
  std::vector<double> b(d);
  for (std::size_t j = 0; j < d; ++j) b[j] = d == 1 ? 2.0 : 1.0 + static_cast<double>(j) / static_cast<double>(d - 1);
  RngStream ra = rng.child(0), rb = rng.child(1);
  return {diagonal_gaussian(ra, n, a), diagonal_gaussian(rb, n, b)};
}

}  // namespace slicedot::datasets
