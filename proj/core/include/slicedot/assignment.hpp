#pragma once

#include <cstddef>
#include <vector>

#include "slicedot/tensor.hpp"

namespace slicedot {

struct Assignment {
  /// column[i] is the column matched to row i.
  std::vector<std::size_t> column;
  double total_cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with row/column potentials, O(n^3)).
Assignment solve_assignment(const Tensor& cost);

struct Flow {
  std::size_t source;
  std::size_t target;
  double mass;
};

struct TransportPlan {
  std::vector<Flow> flows;
  double total_cost = 0.0;
};

/// Exact minimum-cost transport between supplies (m,) and demands (n,) with
/// equal totals and a nonnegative cost matrix (m, n). Successive shortest
/// augmenting paths with Dijkstra on reduced costs.
TransportPlan solve_transport(const Tensor& supply, const Tensor& demand, const Tensor& cost);

}  // namespace slicedot
