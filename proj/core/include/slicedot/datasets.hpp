#pragma once

#include <span>
#include <string_view>
#include <utility>

#include "slicedot/rng.hpp"
#include "slicedot/tensor.hpp"

namespace slicedot::datasets {

/// Mixture of 8 isotropic Gaussians with centers evenly spaced on a circle.
Tensor ring8(RngStream& rng, std::size_t n, double radius = 4.0, double component_std = 0.2);

/// Zero-mean Gaussian with independent coordinates of the given standard deviations.
Tensor diagonal_gaussian(RngStream& rng, std::size_t n, std::span<const double> stddevs);

/// The 2D pair N(0, diag(2, 2)) and N(0, diag(5, 1)).
std::pair<Tensor, Tensor> gauss2d(RngStream& rng, std::size_t n);

/// High-dimensional pair: N(0, I_d) and N(0, diag(s_j^2)) with s_j spaced
/// linearly from 1 to 2.
std::pair<Tensor, Tensor> gauss_hd(RngStream& rng, std::size_t n, std::size_t d);

}  // namespace slicedot::datasets
