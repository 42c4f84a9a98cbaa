#pragma once

#include <span>
#include <vector>

#include "slicedot/grad.hpp"
#include "slicedot/mlp.hpp"
#include "slicedot/rng.hpp"
#include "slicedot/tensor.hpp"

namespace slicedot {

/// Maps a point and a direction to a scalar slice coordinate.
/// linear: <x, theta>; circular: ||x - r theta||.
struct DefiningFunction {
  enum class Kind { linear, circular };

  Kind kind = Kind::linear;
  double radius = 1000.0;

  static DefiningFunction linear() { return {Kind::linear, 1000.0}; }
  static DefiningFunction circular(double radius = 1000.0);
};

/// n i.i.d. uniform directions on S^{d-1}, as rows of an (n, d) tensor.
Tensor sample_uniform_sphere(RngStream& rng, std::size_t n, std::size_t d);

/// points (k, d), dirs (n, d) -> (n, k) slice coordinates.
Tensor project(const Tensor& points, const Tensor& dirs, const DefiningFunction& g);

/// Differentiable counterpart of project().
grad::Var project(const grad::Var& points, const grad::Var& dirs, const DefiningFunction& g);

/// (1/n^2) sum_{i,j} |theta_i . theta_j|, diagonal included.
double concentration_statistic(const Tensor& dirs);

/// (1/(n(n-1))) sum_{i != j} |theta_i . theta_j|; the unbiased estimate of
/// E|theta^T theta'| for independent draws. 0 when n == 1.
double offdiag_abs_cosine(const Tensor& dirs);

/// E|theta^T theta'| for theta, theta' independent uniform on S^{d-1}:
/// Gamma(d/2) / (sqrt(pi) Gamma((d+1)/2)).
double uniform_sphere_abs_cosine(std::size_t d);

/// Parametrized map f: S^{d-1} -> S^{d-1}, f(theta) = normalize(h(theta)),
/// with h a dense network ending in a linear d-wide layer. With no hidden
/// layers h(theta) = W theta + b.
class SphereMap {
 public:
  SphereMap() = default;
  explicit SphereMap(Mlp net);

  /// W = I + 0.01 N(0,1), b = 0 when hidden is empty; otherwise tanh hidden
  /// layers of the given widths with N(0, 1/fan_in) weights.
  static SphereMap near_identity(std::size_t d, RngStream& rng, std::span<const std::size_t> hidden = {});
  static SphereMap identity(std::size_t d);

  std::size_t dim() const { return net_.in_dim(); }
  const Mlp& net() const noexcept { return net_; }
  Mlp& net() noexcept { return net_; }

  /// Rows f(theta_i); throws DegenerateMapError when some ||h(theta_i)|| < 1e-12.
  grad::Var forward(std::span<const grad::Var> bound, const grad::Var& thetas) const;
  Tensor apply(const Tensor& thetas) const;

  friend bool operator==(const SphereMap&, const SphereMap&) = default;

 private:
  Mlp net_;
};

}  // namespace slicedot
