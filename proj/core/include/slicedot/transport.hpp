#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slicedot/measure.hpp"
#include "slicedot/tensor.hpp"

namespace slicedot {

/// Discrete probability measure on the real line.
struct Measure1D {
  Tensor locations;  // (k,)
  Tensor weights;    // (k,), sums to 1

  Measure1D(Tensor locations, Tensor weights);
  static Measure1D uniform(Tensor locations);
  std::size_t size() const noexcept { return locations.size(); }
};

/// Indices that sort `values` ascending; ties keep their original order.
std::vector<std::size_t> stable_argsort(std::span<const double> values);

/// Exact W_p between two 1D measures by integrating |F^-1 - G^-1|^p over the
/// merged cumulative-weight ladder.
double wasserstein_1d(const Measure1D& a, const Measure1D& b, double p);

struct MatchedCost {
  /// W_p^p = (1/k) sum_i |x[x_order[i]] - y[y_order[i]]|^p.
  double cost_pow = 0.0;
  std::vector<std::size_t> x_order;
  std::vector<std::size_t> y_order;
};

/// Equal-size, uniform-weight W_p^p together with the sorting permutations,
/// so the cost can be rebuilt on a gradient tape with gather_rows.
MatchedCost wasserstein_1d_pow_matched(std::span<const double> x, std::span<const double> y, double p);

struct Transfer {
  std::size_t source;
  std::size_t target;
  double mass;
};

struct Coupling {
  std::vector<Transfer> transfers;

  std::vector<double> source_marginal(std::size_t k) const;
  std::vector<double> target_marginal(std::size_t k) const;
};

struct OracleResult {
  double value = 0.0;
  Coupling coupling;
};

/// Largest k for the assignment path of the exact oracle.
inline constexpr std::size_t kAssignmentBudget = 2048;
/// Largest k_a * k_b for the general weighted path.
inline constexpr std::size_t kTransportBudget = 10000;

/// Exact W_p between empirical measures under the Euclidean ground metric.
/// Evaluation tool, not an estimator: throws SizeError above the budgets.
OracleResult exact_wp_oracle(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

}  // namespace slicedot
