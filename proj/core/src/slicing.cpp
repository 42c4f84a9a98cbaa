#include "slicedot/slicing.hpp"

#include <cmath>
#include <numbers>

#include "slicedot/errors.hpp"
#include "slicedot/parallel.hpp"

namespace slicedot {
namespace {

constexpr double kDegenerateNorm = 1e-12;

double abs_dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return std::abs(s);
}

}  // namespace

DefiningFunction DefiningFunction::circular(double radius) {
  if (!(radius > 0.0)) throw ConfigError("circular defining function needs radius > 0");
  return {Kind::circular, radius};
}

Tensor sample_uniform_sphere(RngStream& rng, std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw ShapeError("sample_uniform_sphere needs n >= 1 and d >= 1");
  Tensor out({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    auto r = out.row(i);
    double norm = 0.0;
    do {
      double s = 0.0;
      for (double& v : r) {
        v = rng.normal();
        s += v * v;
      }
      norm = std::sqrt(s);
    } while (norm < kDegenerateNorm);
    for (double& v : r) v /= norm;
  }
  return out;
}

Tensor project(const Tensor& points, const Tensor& dirs, const DefiningFunction& g) {
  if (points.rank() != 2 || dirs.rank() != 2 || points.cols() != dirs.cols()) {
    throw ShapeError("project: points " + shape_string(points.shape()) + " vs directions " + shape_string(dirs.shape()));
  }
  const std::size_t k = points.rows(), d = points.cols(), n = dirs.rows();
  Tensor out({n, k});
  parallel_for(n, [&](std::size_t i) {
    const auto th = dirs.row(i);
    auto o = out.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      const auto x = points.row(j);
      double acc = 0.0;
      if (g.kind == DefiningFunction::Kind::linear) {
        for (std::size_t c = 0; c < d; ++c) acc += x[c] * th[c];
        o[j] = acc;
      } else {
        for (std::size_t c = 0; c < d; ++c) {
          const double diff = x[c] - g.radius * th[c];
          acc += diff * diff;
        }
        o[j] = std::sqrt(acc);
      }
    }
  });
  return out;
}

grad::Var project(const grad::Var& points, const grad::Var& dirs, const DefiningFunction& g) {
  if (g.kind == DefiningFunction::Kind::linear) return grad::project_linear(points, dirs);
  return grad::project_circular(points, dirs, g.radius);
}

double concentration_statistic(const Tensor& dirs) {
  if (dirs.rank() != 2 || dirs.rows() == 0) throw ShapeError("concentration_statistic needs (n, d) directions");
  const std::size_t n = dirs.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += abs_dot(dirs.row(i), dirs.row(j));
  return s / (static_cast<double>(n) * static_cast<double>(n));
}

double offdiag_abs_cosine(const Tensor& dirs) {
  if (dirs.rank() != 2 || dirs.rows() == 0) throw ShapeError("offdiag_abs_cosine needs (n, d) directions");
  const std::size_t n = dirs.rows();
  if (n == 1) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += abs_dot(dirs.row(i), dirs.row(j));
  return 2.0 * s / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double uniform_sphere_abs_cosine(std::size_t d) {
  if (d == 0) throw DomainError("dimension must be >= 1");
  const double half = static_cast<double>(d) / 2.0;
  return std::exp(std::lgamma(half) - std::lgamma(half + 0.5)) / std::sqrt(std::numbers::pi);
}

SphereMap::SphereMap(Mlp net) : net_(std::move(net)) {
  if (net_.in_dim() != net_.out_dim()) throw ShapeError("SphereMap must map R^d to R^d");
  if (net_.layers().back().activation != Activation::identity) {
    throw ShapeError("SphereMap output layer must be linear");
  }
}

SphereMap SphereMap::near_identity(std::size_t d, RngStream& rng, std::span<const std::size_t> hidden) {
  if (d == 0) throw ShapeError("SphereMap dimension must be >= 1");
  if (hidden.empty()) {
    Tensor w = sample_standard_normal(rng, {d, d});
    for (double& v : w.data()) v *= 0.01;
    for (std::size_t i = 0; i < d; ++i) w.at(i, i) += 1.0;
    return SphereMap(Mlp({DenseLayer{std::move(w), Tensor({d}), Activation::identity}}));
  }
  std::vector<std::size_t> sizes{d};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(d);
  return SphereMap(Mlp::random(sizes, Activation::tanh, Activation::identity, rng));
}

SphereMap SphereMap::identity(std::size_t d) {
  return SphereMap(Mlp({DenseLayer{Tensor::identity(d), Tensor({d}), Activation::identity}}));
}

grad::Var SphereMap::forward(std::span<const grad::Var> bound, const grad::Var& thetas) const {
  const grad::Var h = net_.forward(bound, thetas);
  const Tensor& hv = h.value();
  for (std::size_t i = 0; i < hv.rows(); ++i) {
    double s = 0.0;
    for (double v : hv.row(i)) s += v * v;
    if (std::sqrt(s) < kDegenerateNorm) {
      throw DegenerateMapError("sphere map sends direction " + std::to_string(i) + " to (near) zero before normalization");
    }
  }
  return grad::l2_normalize_rows(h);
}

Tensor SphereMap::apply(const Tensor& thetas) const {
  grad::Tape tape;
  std::vector<grad::Var> bound;
  for (const Tensor& p : net_.parameter_values()) bound.push_back(tape.constant(p));
  return forward(bound, tape.constant(thetas)).value();
}

}  // namespace slicedot
