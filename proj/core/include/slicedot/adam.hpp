#pragma once

#include <span>
#include <vector>

#include "slicedot/tensor.hpp"

namespace slicedot {

/// Adaptive-moment optimizer with bias correction.
class Adam {
 public:
  enum class Goal { minimize, maximize };

  struct Options {
    double lr = 5e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
    Goal goal = Goal::minimize;
  };

  Adam() : Adam(Options{}) {}
  explicit Adam(Options options) : options_(options) {}

  /// params[i] is moved along grads[i]. Moment buffers are bound to slot i on
  /// the first call; later calls must pass the same shapes in the same order.
  void step(std::span<Tensor* const> params, std::span<const Tensor> grads);

  const Options& options() const noexcept { return options_; }
  long steps_taken() const noexcept { return t_; }

 private:
  Options options_;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
  long t_ = 0;
};

}  // namespace slicedot
