#include "slicedot/mede.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "slicedot/errors.hpp"
#include "slicedot/io.hpp"
#include "slicedot/transport.hpp"

namespace slicedot {
namespace {

constexpr std::size_t kMaxEvalSamples = 2000;
constexpr std::uint64_t kEvalStream = 0x5EEDE7A1ULL;

const std::vector<std::size_t> kDefaultHidden{64, 64};

Tensor take_rows(const Tensor& src, std::span<const std::size_t> rows) {
  const std::size_t d = src.cols();
  Tensor out({rows.size(), d});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto s = src.row(rows[r]);
    std::copy(s.begin(), s.end(), out.row(r).begin());
  }
  return out;
}

void shuffle(std::vector<std::size_t>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

/// Minibatches without replacement; reshuffles when an epoch runs out.
class Batcher {
 public:
  Batcher(std::size_t n, std::size_t m, RngStream rng) : order_(n), m_(m), rng_(rng) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    shuffle(order_, rng_);
  }

  std::span<const std::size_t> next() {
    if (pos_ + m_ > order_.size()) {
      shuffle(order_, rng_);
      pos_ = 0;
    }
    const auto out = std::span<const std::size_t>(order_).subspan(pos_, m_);
    pos_ += m_;
    return out;
  }

 private:
  std::vector<std::size_t> order_;
  std::size_t m_;
  std::size_t pos_ = 0;
  RngStream rng_;
};

DefiningFunction defining_for(const LossConfig& cfg) {
  DefiningFunction g = cfg.sliced.defining;
  if (cfg.kind == DistanceKind::gsw || cfg.kind == DistanceKind::dgsw) g.kind = DefiningFunction::Kind::circular;
  if (cfg.kind == DistanceKind::sw || cfg.kind == DistanceKind::dsw) g.kind = DefiningFunction::Kind::linear;
  return g;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

void check_finite_loss(double loss, std::size_t iteration) {
  if (!std::isfinite(loss)) throw DomainError("non-finite training loss at iteration " + std::to_string(iteration));
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

Generator Generator::make(std::size_t noise_dim, std::size_t data_dim, RngStream& rng,
                          std::span<const std::size_t> hidden) {
  std::vector<std::size_t> sizes{noise_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(data_dim);
  return Generator{Mlp::random(sizes, Activation::leaky_relu, Activation::identity, rng, 0.2)};
}

Generator Generator::make_default(std::size_t noise_dim, std::size_t data_dim, RngStream& rng) {
  return make(noise_dim, data_dim, rng, kDefaultHidden);
}

Tensor Generator::sample(RngStream& rng, std::size_t m) const {
  return net.apply(sample_standard_normal(rng, {m, noise_dim()}));
}

Encoder Encoder::make(std::size_t data_dim, std::size_t latent_dim, RngStream& rng,
                      std::span<const std::size_t> hidden) {
  std::vector<std::size_t> sizes{data_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(latent_dim);
  return Encoder{Mlp::random(sizes, Activation::leaky_relu, Activation::identity, rng, 0.2)};
}

Encoder Encoder::make_default(std::size_t data_dim, std::size_t latent_dim, RngStream& rng) {
  return make(data_dim, latent_dim, rng, kDefaultHidden);
}

void TrainConfig::validate() const {
  if (batch_size < 2) throw ConfigError("batch size must be >= 2");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be > 0");
  if (eval_samples == 0 || eval_samples > kMaxEvalSamples) {
    throw ConfigError("eval_samples must lie in [1, " + std::to_string(kMaxEvalSamples) + "]");
  }
  if (!(latent_scale > 0.0)) throw ConfigError("latent scale must be > 0");
  if (distance.kind == DistanceKind::exact) throw ConfigError("the exact oracle is not a training loss");
  distance.sliced.validate();
}

std::string TrainLog::to_csv() const {
  bool with_reconstruction = false;
  for (const auto& e : entries) with_reconstruction = with_reconstruction || e.reconstruction.has_value();
  std::string out = with_reconstruction ? "iteration,wall_ms,loss,eval_metric,reconstruction\n"
                                        : "iteration,wall_ms,loss,eval_metric\n";
  for (const auto& e : entries) {
    out += std::to_string(e.iteration) + ',' + format_double(e.wall_ms) + ',' + optional_field(e.loss) + ',' +
           optional_field(e.eval_metric);
    if (with_reconstruction) out += ',' + optional_field(e.reconstruction);
    out += '\n';
  }
  return out;
}

DistanceLoss::DistanceLoss(LossConfig cfg, std::size_t dim, RngStream& init_rng) : cfg_(std::move(cfg)) {
  cfg_.sliced.defining = defining_for(cfg_);
  cfg_.sliced.validate();
  if (cfg_.kind == DistanceKind::exact) throw ConfigError("the exact oracle is not a training loss");
  if (cfg_.kind == DistanceKind::dsw || cfg_.kind == DistanceKind::dgsw) {
    DswConfig dc;
    dc.base = cfg_.sliced;
    dc.lambda_c = cfg_.lambda_c;
    dc.ascent_steps = cfg_.ascent_steps;
    dc.ascent_lr = cfg_.ascent_lr;
    ascent_.emplace(SphereMap::near_identity(dim, init_rng, cfg_.map_hidden), dc);
  }
}

grad::Var DistanceLoss::operator()(const grad::Var& x, const grad::Var& y, RngStream& rng) {
  grad::Tape& tape = x.tape();
  const std::size_t d = x.value().cols();
  const double p = cfg_.sliced.p;
  switch (cfg_.kind) {
    case DistanceKind::sw:
    case DistanceKind::gsw: {
      const Tensor dirs = sample_uniform_sphere(rng, cfg_.sliced.n_projections, d);
      return sliced_loss(x, y, tape.constant(dirs), cfg_.sliced.defining, p);
    }
    case DistanceKind::dsw:
    case DistanceKind::dgsw: {
      for (std::size_t s = 0; s < cfg_.ascent_steps; ++s) ascent_->step(x.value(), y.value(), rng);
      const Tensor thetas = sample_uniform_sphere(rng, cfg_.sliced.n_projections, d);
      return sliced_loss(x, y, tape.constant(ascent_->map().apply(thetas)), cfg_.sliced.defining, p);
    }
    case DistanceKind::maxsw: {
      MaxSwConfig mc = cfg_.maxsw;
      mc.p = p;
      mc.seed = rng.next_u64();
      const auto best = max_sw(x.value(), y.value(), mc);
      return sliced_loss(x, y, tape.constant(best.direction.reshaped({1, d})), DefiningFunction::linear(), p);
    }
    case DistanceKind::maxgswnn: {
      MaxGswNnConfig mc = cfg_.maxgswnn;
      mc.p = p;
      mc.seed = rng.next_u64();
      const auto best = max_gsw_nn(x.value(), y.value(), mc);
      std::vector<grad::Var> frozen;
      for (const Tensor& t : best.network.parameter_values()) frozen.push_back(tape.constant(t));
      const grad::Var hx = best.network.forward(frozen, x);
      const grad::Var hy = best.network.forward(frozen, y);
      return sliced_loss(hx, hy, tape.constant(Tensor::matrix(1, 1, {1.0})), DefiningFunction::linear(), p);
    }
    case DistanceKind::exact:
      break;
  }
  throw ConfigError("the exact oracle is not a training loss");
}

double evaluate_samples(const Tensor& generated, const Tensor& holdout, std::size_t n_eval, double p,
                        std::uint64_t seed) {
  if (n_eval == 0) throw ConfigError("n_eval must be >= 1");
  if (n_eval > kMaxEvalSamples) throw SizeError("n_eval above the exact-evaluation budget");
  if (generated.rows() < n_eval || holdout.rows() < n_eval) throw ConfigError("not enough samples for evaluation");
  if (generated.cols() != holdout.cols()) throw ShapeError("generated and holdout dimensions differ");

  std::vector<std::size_t> rows(holdout.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (holdout.rows() > n_eval) {
    RngStream rng(seed, kEvalStream);
    shuffle(rows, rng);
  }
  rows.resize(n_eval);
  std::vector<std::size_t> first(n_eval);
  std::iota(first.begin(), first.end(), std::size_t{0});
  const EmpiricalMeasure model(take_rows(generated, first));
  const EmpiricalMeasure target(take_rows(holdout, rows));
  return exact_wp_oracle(model, target, p).value;
}

double evaluate_model(const Generator& gen, const Tensor& holdout, std::size_t n_eval, double p, std::uint64_t seed) {
  if (n_eval > kMaxEvalSamples) throw SizeError("n_eval above the exact-evaluation budget");
  RngStream rng(seed, kEvalStream + 1);
  return evaluate_samples(gen.sample(rng, n_eval), holdout, n_eval, p, seed);
}

double reconstruction_error(const Generator& gen, const Encoder& enc, const Tensor& x) {
  const Tensor back = gen.net.apply(enc.net.apply(x));
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    const auto a = back.row(i);
    const auto b = x.row(i);
    for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    total += std::sqrt(s);
  }
  return total / static_cast<double>(x.rows());
}

TrainLog train_mede(const EmpiricalMeasure& data, const Tensor& holdout, Generator& gen, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.batch_size > data.size()) {
    throw ConfigError("batch size " + std::to_string(cfg.batch_size) + " exceeds the " + std::to_string(data.size()) +
                      " data points");
  }
  if (gen.data_dim() != data.dim()) throw ShapeError("generator output dimension does not match the data");

  const auto start = std::chrono::steady_clock::now();
  const RngStream root(cfg.seed);
  RngStream noise_rng = root.child(2), loss_rng = root.child(3), init_rng = root.child(4);
  Batcher batches(data.size(), cfg.batch_size, root.child(1));
  DistanceLoss loss(cfg.distance, data.dim(), init_rng);
  Adam adam({.lr = cfg.lr, .beta1 = cfg.beta1, .beta2 = cfg.beta2, .eps = 1e-8, .goal = Adam::Goal::minimize});
  const double p = cfg.distance.sliced.p;
  const auto evaluate = [&] { return evaluate_model(gen, holdout, cfg.eval_samples, p, cfg.seed); };

  TrainLog log;
  log.initial_eval = evaluate();
  log.entries.push_back({0, elapsed_ms(start), std::nullopt, log.initial_eval, std::nullopt});
  log.final_eval = log.initial_eval;

  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    grad::Tape tape;
    const auto bound = gen.net.bind(tape);
    const grad::Var z = tape.constant(sample_standard_normal(noise_rng, {cfg.batch_size, gen.noise_dim()}));
    const grad::Var model = gen.net.forward(bound, z);
    const grad::Var target = tape.constant(take_rows(data.points(), batches.next()));
    const grad::Var value = loss(target, model, loss_rng);
    check_finite_loss(value.value().item(), it);

    const auto grads = tape.backward(value);
    std::vector<Tensor> g;
    for (const auto& b : bound) g.push_back(grads[b]);
    const auto params = gen.net.parameters();
    adam.step(params, g);

    TrainLogEntry entry{it, 0.0, value.value().item(), std::nullopt, std::nullopt};
    if (it == cfg.iterations || (cfg.eval_every && it % cfg.eval_every == 0)) {
      entry.eval_metric = evaluate();
      log.final_eval = *entry.eval_metric;
    }
    entry.wall_ms = elapsed_ms(start);
    log.entries.push_back(entry);
  }
  return log;
}

TrainLog train_jci(const EmpiricalMeasure& data, const Tensor& holdout, Generator& gen, Encoder& enc,
                   const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.batch_size > data.size()) {
    throw ConfigError("batch size " + std::to_string(cfg.batch_size) + " exceeds the " + std::to_string(data.size()) +
                      " data points");
  }
  if (gen.data_dim() != data.dim() || enc.net.in_dim() != data.dim() || enc.net.out_dim() != gen.noise_dim()) {
    throw ShapeError("generator/encoder dimensions do not match the data and latent space");
  }

  const auto start = std::chrono::steady_clock::now();
  const RngStream root(cfg.seed);
  RngStream noise_rng = root.child(2), loss_rng = root.child(3), init_rng = root.child(4);
  Batcher batches(data.size(), cfg.batch_size, root.child(1));
  DistanceLoss loss(cfg.distance, gen.noise_dim() + data.dim(), init_rng);
  Adam adam({.lr = cfg.lr, .beta1 = cfg.beta1, .beta2 = cfg.beta2, .eps = 1e-8, .goal = Adam::Goal::minimize});
  const double p = cfg.distance.sliced.p;

  const std::size_t n_rec = std::min(cfg.eval_samples, holdout.rows());
  std::vector<std::size_t> rec_rows(n_rec);
  std::iota(rec_rows.begin(), rec_rows.end(), std::size_t{0});
  const Tensor rec_batch = take_rows(holdout, rec_rows);

  TrainLog log;
  const auto record_eval = [&](TrainLogEntry& e) {
    e.eval_metric = evaluate_model(gen, holdout, cfg.eval_samples, p, cfg.seed);
    e.reconstruction = reconstruction_error(gen, enc, rec_batch);
  };
  TrainLogEntry first{0, 0.0, std::nullopt, std::nullopt, std::nullopt};
  record_eval(first);
  first.wall_ms = elapsed_ms(start);
  log.entries.push_back(first);
  log.initial_eval = log.final_eval = *first.eval_metric;

  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    grad::Tape tape;
    const auto gbound = gen.net.bind(tape);
    const auto ebound = enc.net.bind(tape);

    const grad::Var z = tape.constant(sample_standard_normal(noise_rng, {cfg.batch_size, gen.noise_dim()}));
    const grad::Var x_gen = gen.net.forward(gbound, z);
    const grad::Var joint_gen = grad::concat_cols(grad::scalar_mul(z, cfg.latent_scale), x_gen);

    const grad::Var x = tape.constant(take_rows(data.points(), batches.next()));
    const grad::Var z_inf = enc.net.forward(ebound, x);
    const grad::Var joint_inf = grad::concat_cols(grad::scalar_mul(z_inf, cfg.latent_scale), x);

    const grad::Var value = loss(joint_inf, joint_gen, loss_rng);
    check_finite_loss(value.value().item(), it);

    const auto grads = tape.backward(value);
    std::vector<Tensor> g;
    for (const auto& b : gbound) g.push_back(grads[b]);
    for (const auto& b : ebound) g.push_back(grads[b]);
    auto params = gen.net.parameters();
    const auto eparams = enc.net.parameters();
    params.insert(params.end(), eparams.begin(), eparams.end());
    adam.step(params, g);

    TrainLogEntry entry{it, 0.0, value.value().item(), std::nullopt, std::nullopt};
    if (it == cfg.iterations || (cfg.eval_every && it % cfg.eval_every == 0)) {
      record_eval(entry);
      log.final_eval = *entry.eval_metric;
    }
    entry.wall_ms = elapsed_ms(start);
    log.entries.push_back(entry);
  }
  return log;
}

}  // namespace slicedot
