#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "slicedot/grad.hpp"
#include "slicedot/measure.hpp"
#include "slicedot/rng.hpp"
#include "slicedot/tensor.hpp"

namespace slicedot::check {

using Builder = std::function<grad::Var(grad::Tape&, std::span<const grad::Var>)>;

struct FdReport {
  bool ok = true;
  double worst_rel = 0.0;
  std::string detail;
};

/// Central differences of the scalar built by `build` against tape gradients,
/// elementwise over every entry of every input. An entry passes when
/// |g - fd| <= rel * max(|g|, |fd|), or when both magnitudes are below 1e-8
/// and |g - fd| <= abs_tol.
FdReport fd_check(const std::vector<Tensor>& inputs, const Builder& build, double h = 1e-5, double rel = 1e-4,
                  double abs_tol = 1e-7);

Tensor random_normal(RngStream& rng, Shape shape, double scale = 1.0);
Tensor random_uniform(RngStream& rng, Shape shape, double lo, double hi);
/// Random weights bounded away from zero, normalized to sum to one.
Tensor random_weights(RngStream& rng, std::size_t k);
EmpiricalMeasure random_measure(RngStream& rng, std::size_t k, std::size_t d, bool weighted);

}  // namespace slicedot::check
