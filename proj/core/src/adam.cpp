#include "slicedot/adam.hpp"

#include <cmath>

#include "slicedot/errors.hpp"

namespace slicedot {

void Adam::step(std::span<Tensor* const> params, std::span<const Tensor> grads) {
  if (params.size() != grads.size()) throw ShapeError("Adam: parameter and gradient counts differ");
  if (first_.empty()) {
    for (const Tensor* p : params) {
      first_.emplace_back(p->shape());
      second_.emplace_back(p->shape());
    }
  }
  if (first_.size() != params.size()) throw ShapeError("Adam: parameter list changed between steps");

  ++t_;
  const double sign = options_.goal == Goal::minimize ? -1.0 : 1.0;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t s = 0; s < params.size(); ++s) {
    auto p = params[s]->data();
    const auto g = grads[s].data();
    auto m = first_[s].data();
    auto v = second_[s].data();
    if (p.size() != g.size() || p.size() != m.size()) throw ShapeError("Adam: shape mismatch in slot " + std::to_string(s));
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * g[i];
      v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] += sign * options_.lr * mhat / (std::sqrt(vhat) + options_.eps);
    }
  }
}

}  // namespace slicedot
