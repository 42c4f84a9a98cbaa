#include "slicedot/mlp.hpp"

#include <cmath>

#include "slicedot/errors.hpp"

namespace slicedot {

grad::Var activate(const grad::Var& x, Activation a, double leaky_slope) {
  switch (a) {
    case Activation::identity:
      return x;
    case Activation::relu:
      return grad::relu(x);
    case Activation::leaky_relu:
      return grad::leaky_relu(x, leaky_slope);
    case Activation::tanh:
      return grad::tanh(x);
  }
  return x;
}

Mlp::Mlp(std::vector<DenseLayer> layers, double leaky_slope) : layers_(std::move(layers)), leaky_slope_(leaky_slope) {
  if (layers_.empty()) throw ShapeError("Mlp needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.weight.rank() != 2 || l.bias.rank() != 1 || l.bias.size() != l.weight.rows()) {
      throw ShapeError("Mlp layer " + std::to_string(i) + ": inconsistent weight/bias shapes");
    }
    if (i > 0 && l.weight.cols() != layers_[i - 1].weight.rows()) {
      throw ShapeError("Mlp layer " + std::to_string(i) + ": input width does not match previous layer");
    }
  }
}

Mlp Mlp::random(std::span<const std::size_t> sizes, Activation hidden, Activation output, RngStream& rng,
                double leaky_slope) {
  if (sizes.size() < 2) throw ShapeError("Mlp::random needs at least input and output sizes");
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const std::size_t in = sizes[i], out = sizes[i + 1];
    Tensor w = sample_standard_normal(rng, {out, in});
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& v : w.data()) v *= scale;
    layers.push_back({std::move(w), Tensor({out}), i + 2 == sizes.size() ? output : hidden});
  }
  return Mlp(std::move(layers), leaky_slope);
}

std::size_t Mlp::in_dim() const { return layers_.empty() ? 0 : layers_.front().weight.cols(); }
std::size_t Mlp::out_dim() const { return layers_.empty() ? 0 : layers_.back().weight.rows(); }

std::vector<Tensor*> Mlp::parameters() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<Tensor> Mlp::parameter_values() const {
  std::vector<Tensor> out;
  for (const auto& l : layers_) {
    out.push_back(l.weight);
    out.push_back(l.bias);
  }
  return out;
}

void Mlp::set_parameters(std::span<const Tensor> values) {
  if (values.size() != 2 * layers_.size()) throw ShapeError("Mlp::set_parameters: wrong tensor count");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!values[2 * i].same_shape(layers_[i].weight) || !values[2 * i + 1].same_shape(layers_[i].bias)) {
      throw ShapeError("Mlp::set_parameters: shape mismatch in layer " + std::to_string(i));
    }
    layers_[i].weight = values[2 * i];
    layers_[i].bias = values[2 * i + 1];
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_)
    if (!l.weight.all_finite() || !l.bias.all_finite()) return false;
  return true;
}

std::vector<grad::Var> Mlp::bind(grad::Tape& tape) const {
  std::vector<grad::Var> out;
  for (const auto& l : layers_) {
    out.push_back(tape.parameter(l.weight));
    out.push_back(tape.parameter(l.bias));
  }
  return out;
}

grad::Var Mlp::forward(std::span<const grad::Var> bound, const grad::Var& x) const {
  if (bound.size() != 2 * layers_.size()) throw ShapeError("Mlp::forward: wrong number of bound parameters");
  grad::Var h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = grad::affine(bound[2 * i], bound[2 * i + 1], h);
    h = activate(h, layers_[i].activation, leaky_slope_);
  }
  return h;
}

Tensor Mlp::apply(const Tensor& x) const {
  grad::Tape tape;
  std::vector<grad::Var> bound;
  for (const auto& l : layers_) {
    bound.push_back(tape.constant(l.weight));
    bound.push_back(tape.constant(l.bias));
  }
  return forward(bound, tape.constant(x)).value();
}

}  // namespace slicedot
