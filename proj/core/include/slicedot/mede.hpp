#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slicedot/distances.hpp"
#include "slicedot/measure.hpp"
#include "slicedot/mlp.hpp"
#include "slicedot/rng.hpp"

namespace slicedot {

/// Pushforward T_theta of a standard normal in R^{noise_dim}.
struct Generator {
  Mlp net;

  std::size_t noise_dim() const { return net.in_dim(); }
  std::size_t data_dim() const { return net.out_dim(); }

  /// Leaky-ReLU(0.2) hidden layers of the given widths, linear output.
  static Generator make(std::size_t noise_dim, std::size_t data_dim, RngStream& rng,
                        std::span<const std::size_t> hidden);
  static Generator make_default(std::size_t noise_dim, std::size_t data_dim, RngStream& rng);

  Tensor sample(RngStream& rng, std::size_t m) const;
};

/// Deterministic inference map R^{d_x} -> R^{d_z}.
struct Encoder {
  Mlp net;

  static Encoder make(std::size_t data_dim, std::size_t latent_dim, RngStream& rng,
                      std::span<const std::size_t> hidden);
  static Encoder make_default(std::size_t data_dim, std::size_t latent_dim, RngStream& rng);
};

/// Which sliced distance drives training, and its knobs.
struct LossConfig {
  DistanceKind kind = DistanceKind::dsw;
  SlicedConfig sliced{};
  double lambda_c = 10.0;
  std::size_t ascent_steps = 1;
  double ascent_lr = 5e-4;
  /// Hidden widths of the sphere map; empty is the single affine layer.
  std::vector<std::size_t> map_hidden{};
  MaxSwConfig maxsw{};
  MaxGswNnConfig maxgswnn{};
};

struct TrainConfig {
  LossConfig distance{};
  std::size_t batch_size = 512;
  std::size_t iterations = 1000;
  double lr = 5e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::uint64_t seed = 0;
  /// Evaluate every this many iterations (0: only at start and end).
  std::size_t eval_every = 0;
  std::size_t eval_samples = 512;
  /// JCI only: multiplier on latent coordinates in the joint space.
  double latent_scale = 1.0;

  void validate() const;
};

struct TrainLogEntry {
  std::size_t iteration = 0;
  double wall_ms = 0.0;
  std::optional<double> loss;
  std::optional<double> eval_metric;
  /// JCI only: mean ||T(enc(x)) - x|| on the evaluation batch.
  std::optional<double> reconstruction;
};

struct TrainLog {
  std::vector<TrainLogEntry> entries;
  double initial_eval = 0.0;
  double final_eval = 0.0;

  /// Header `iteration,wall_ms,loss,eval_metric[,reconstruction]`; missing
  /// values are empty fields.
  std::string to_csv() const;
};

/// Differentiable training loss for one of the sliced distances. Holds the
/// warm-started sphere-map state for dsw/dgsw across calls.
class DistanceLoss {
 public:
  DistanceLoss(LossConfig cfg, std::size_t dim, RngStream& init_rng);

  /// Runs any inner maximization on the current values of x and y, then
  /// returns the distance as a node on x's tape.
  grad::Var operator()(const grad::Var& x, const grad::Var& y, RngStream& rng);

  const LossConfig& config() const noexcept { return cfg_; }
  const std::optional<SphereMapAscent>& ascent() const noexcept { return ascent_; }

 private:
  LossConfig cfg_;
  std::optional<SphereMapAscent> ascent_;
};

/// Exact W_p between n_eval rows of `generated` and n_eval rows of `holdout`
/// (a seeded subset when there are more).
double evaluate_samples(const Tensor& generated, const Tensor& holdout, std::size_t n_eval, double p,
                        std::uint64_t seed);
/// Draws n_eval samples from gen and compares them with the holdout.
double evaluate_model(const Generator& gen, const Tensor& holdout, std::size_t n_eval, double p, std::uint64_t seed);

/// Minimum expected distance estimation: minibatch descent on
/// E[D(mu_hat_m, T_theta # eps_hat_m)].
TrainLog train_mede(const EmpiricalMeasure& data, const Tensor& holdout, Generator& gen, const TrainConfig& cfg);

/// Joint contrastive inference: matches (z, T(z)) against (enc(x), x).
TrainLog train_jci(const EmpiricalMeasure& data, const Tensor& holdout, Generator& gen, Encoder& enc,
                   const TrainConfig& cfg);

/// Mean ||T(enc(x)) - x|| over the rows of x.
double reconstruction_error(const Generator& gen, const Encoder& enc, const Tensor& x);

}  // namespace slicedot
