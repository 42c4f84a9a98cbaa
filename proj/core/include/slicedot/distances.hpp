#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicedot/adam.hpp"
#include "slicedot/grad.hpp"
#include "slicedot/measure.hpp"
#include "slicedot/rng.hpp"
#include "slicedot/slicing.hpp"
#include "slicedot/tensor.hpp"

namespace slicedot {

enum class DistanceKind { sw, gsw, maxsw, maxgswnn, dsw, dgsw, exact };

DistanceKind parse_distance(std::string_view name);
std::string_view distance_name(DistanceKind kind);

struct SlicedConfig {
  double p = 2.0;
  std::size_t n_projections = 10;
  DefiningFunction defining{};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Monte Carlo sliced estimate over a fixed direction set.
struct SliceEstimate {
  /// ((1/n) sum_i W_p^p(slice i))^{1/p}
  double value = 0.0;
  /// (1/n) sum_i W_p^p(slice i)
  double mean_cost_pow = 0.0;
  /// Standard error of `value` (delta method over the per-slice costs).
  double std_error = 0.0;
  std::vector<double> per_slice_cost_pow;
};

/// Sliced estimate with the given directions (rows of `dirs`). With the
/// directions held fixed this is a mixture of 1D metrics, hence itself a metric
/// on equal-size uniform measures.
SliceEstimate sliced_with_directions(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const Tensor& dirs,
                                     const DefiningFunction& g, double p);

/// SW_p with n_projections fresh uniform directions drawn from cfg.seed.
double sw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const SlicedConfig& cfg);
SliceEstimate sw_estimate(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const SlicedConfig& cfg);

/// GSW_p with the circular defining function (cfg.defining must be circular).
double gsw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const SlicedConfig& cfg);

/// Differentiable ((1/n) sum_i W_p^p)^{1/p} between equal-size point sets
/// x (k, d) and y (k, d) along directions (n, d). Sorting permutations are
/// frozen at forward time and replayed through gather_rows.
grad::Var sliced_loss(const grad::Var& x, const grad::Var& y, const grad::Var& dirs, const DefiningFunction& g,
                      double p);
/// Same without the outer 1/p root: (1/n) sum_i W_p^p.
grad::Var sliced_cost_pow(const grad::Var& x, const grad::Var& y, const grad::Var& dirs, const DefiningFunction& g,
                          double p);

/// DS objective along pushed directions f (n, d):
///   ((1/n) sum_i W_p^p(f_i))^{1/p} - lambda_c * offdiag mean |f_i^T f_j|.
grad::Var dsw_objective(const grad::Var& x, const grad::Var& y, const grad::Var& f, const DefiningFunction& g,
                        double p, double lambda_c);

struct MaxSwConfig {
  double p = 2.0;
  std::size_t iterations = 50;
  double lr = 1e-2;
  std::uint64_t seed = 0;
  /// Independent uniform starting directions; the best run wins.
  std::size_t restarts = 1;
};

struct MaxSwResult {
  double value = 0.0;
  Tensor direction;  // (d,)
};

/// Projected gradient ascent on the sphere:
/// theta <- normalize(theta + lr * grad W_p^p(theta)); best value seen wins.
MaxSwResult max_sw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const MaxSwConfig& cfg);
MaxSwResult max_sw(const Tensor& x, const Tensor& y, const MaxSwConfig& cfg);

struct MaxGswNnConfig {
  double p = 2.0;
  std::size_t iterations = 50;
  double lr = 1e-2;
  std::vector<std::size_t> hidden{32, 32};
  double leaky_slope = 0.2;
  std::uint64_t seed = 0;
};

struct MaxGswNnResult {
  double value = 0.0;
  Mlp network;  // R^d -> R at the best iterate
};

/// Max-GSW with a leaky-ReLU network h: R^d -> R as defining function.
/// Adam ascent on W_p^p(h#mu, h#nu); after every step each weight matrix is
/// rescaled into the unit Frobenius ball, which keeps h 1-Lipschitz.
MaxGswNnResult max_gsw_nn(const Tensor& x, const Tensor& y, const MaxGswNnConfig& cfg);
double max_gsw_nn(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const MaxGswNnConfig& cfg);

struct DswConfig {
  SlicedConfig base{};
  double lambda_c = 1.0;
  std::size_t ascent_steps = 1;
  double ascent_lr = 5e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  /// Directions for the reported value; 0 means base.n_projections.
  std::size_t eval_projections = 0;

  void validate() const;
  std::size_t eval_count() const { return eval_projections ? eval_projections : base.n_projections; }
};

struct DswResult {
  /// ((1/n) sum W_p^p)^{1/p} along fresh directions pushed through the fitted map.
  double sliced_value = 0.0;
  /// sliced_value - lambda_c * reg_estimate. The additive lambda_c * C term is
  /// not included.
  double dual_value_without_constant = 0.0;
  /// Off-diagonal mean of |f(theta_i)^T f(theta_j)|.
  double reg_estimate = 0.0;
  double mc_stderr = 0.0;
  Tensor directions_used;
  /// Objective estimate seen at each ascent step.
  std::vector<double> objective_trace;
};

/// Stateful ascent on the sphere map: holds the map and its Adam moments so
/// that repeated calls warm-start (the generative-training pattern).
class SphereMapAscent {
 public:
  SphereMapAscent(SphereMap map, DswConfig cfg);

  /// One stochastic ascent step of
  ///   DS(f) = {(1/N) sum W_p^p(f(theta_i))}^{1/p} - lambda_c * offdiag mean |f(theta_i)^T f(theta_j)|
  /// with N fresh uniform directions drawn from `rng`. Returns the estimate
  /// of DS at the pre-update parameters.
  double step(const Tensor& x, const Tensor& y, RngStream& rng);

  /// DS estimate at fixed parameters along the given uniform directions.
  double objective(const Tensor& x, const Tensor& y, const Tensor& thetas) const;

  /// Final value along eval_count() fresh directions at fixed parameters.
  DswResult evaluate(const Tensor& x, const Tensor& y, RngStream& rng) const;

  const SphereMap& map() const noexcept { return map_; }
  SphereMap& map() noexcept { return map_; }
  const DswConfig& config() const noexcept { return cfg_; }

 private:
  SphereMap map_;
  DswConfig cfg_;
  Adam adam_;
};

/// Fits the sphere map for cfg.ascent_steps steps and evaluates. `map` is
/// updated in place for warm starts. Uses cfg.base.defining as given.
DswResult dsw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const DswConfig& cfg, SphereMap& map);
/// DSW with the circular defining function (cfg.base.defining must be circular).
DswResult dgsw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const DswConfig& cfg, SphereMap& map);

}  // namespace slicedot
