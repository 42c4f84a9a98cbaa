#pragma once

#include <span>
#include <vector>

#include "slicedot/grad.hpp"
#include "slicedot/rng.hpp"
#include "slicedot/tensor.hpp"

namespace slicedot {

enum class Activation { identity, relu, leaky_relu, tanh };

struct DenseLayer {
  Tensor weight;  // (out, in)
  Tensor bias;    // (out,)
  Activation activation = Activation::identity;
};

/// Feed-forward stack of dense layers. Shared by generators, encoders, the
/// sphere map and the Max-GSW-NN defining network.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers, double leaky_slope = 0.2);

  /// sizes = {in, hidden..., out}; weights ~ N(0, 1/fan_in), zero biases.
  static Mlp random(std::span<const std::size_t> sizes, Activation hidden, Activation output, RngStream& rng,
                    double leaky_slope = 0.2);

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::size_t depth() const noexcept { return layers_.size(); }
  double leaky_slope() const noexcept { return leaky_slope_; }

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }

  /// Pointers to W0, b0, W1, b1, ... in that order.
  std::vector<Tensor*> parameters();
  std::vector<Tensor> parameter_values() const;
  void set_parameters(std::span<const Tensor> values);
  std::size_t parameter_count() const;
  bool all_finite() const;

  /// Registers the parameters on the tape, in parameters() order.
  std::vector<grad::Var> bind(grad::Tape& tape) const;
  /// Forward pass with previously bound parameters.
  grad::Var forward(std::span<const grad::Var> bound, const grad::Var& x) const;
  /// Plain evaluation, x (n, in) -> (n, out).
  Tensor apply(const Tensor& x) const;

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.parameter_values() == b.parameter_values();
  }

 private:
  std::vector<DenseLayer> layers_;
  double leaky_slope_ = 0.2;
};

grad::Var activate(const grad::Var& x, Activation a, double leaky_slope);

}  // namespace slicedot
