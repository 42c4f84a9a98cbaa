#include "slicedot/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slicedot/errors.hpp"
#include "slicedot/parallel.hpp"
#include "slicedot/transport.hpp"

namespace slicedot {
namespace {

void require_estimator_inputs(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) {
    throw ShapeError("dimension mismatch: " + std::to_string(mu.dim()) + " vs " + std::to_string(nu.dim()));
  }
  if (mu.size() != nu.size()) {
    throw ShapeError("sliced estimators need equal sample sizes, got " + std::to_string(mu.size()) + " and " +
                     std::to_string(nu.size()));
  }
  if (!mu.is_uniform() || !nu.is_uniform()) throw ShapeError("sliced estimators need uniform weights");
}

void require_point_sets(const Tensor& x, const Tensor& y) {
  if (x.rank() != 2 || y.rank() != 2 || x.cols() != y.cols() || x.rows() != y.rows() || x.rows() == 0) {
    throw ShapeError("expected two equal-size point sets, got " + shape_string(x.shape()) + " and " +
                     shape_string(y.shape()));
  }
}

double root(double v, double p) {
  v = std::max(v, 0.0);
  if (p == 1.0) return v;
  if (p == 2.0) return std::sqrt(v);
  return std::pow(v, 1.0 / p);
}

SliceEstimate summarize(std::vector<double> costs, double p) {
  SliceEstimate est;
  const double n = static_cast<double>(costs.size());
  est.mean_cost_pow = std::accumulate(costs.begin(), costs.end(), 0.0) / n;
  est.value = root(est.mean_cost_pow, p);
  if (costs.size() > 1 && est.mean_cost_pow > 0.0) {
    double ss = 0.0;
    for (double c : costs) ss += (c - est.mean_cost_pow) * (c - est.mean_cost_pow);
    const double se_mean = std::sqrt(ss / (n - 1.0) / n);
    est.std_error = est.value / (p * est.mean_cost_pow) * se_mean;
  }
  est.per_slice_cost_pow = std::move(costs);
  return est;
}

std::vector<double> slice_costs(const Tensor& px, const Tensor& py, double p) {
  std::vector<double> costs(px.rows());
  parallel_for(px.rows(), [&](std::size_t i) { costs[i] = wasserstein_1d_pow_matched(px.row(i), py.row(i), p).cost_pow; });
  return costs;
}

// Frobenius-ball projection; ||W||_2 <= ||W||_F <= 1 keeps each layer 1-Lipschitz.
void project_into_unit_ball(Tensor& w) {
  double s = 0.0;
  for (double v : w.data()) s += v * v;
  const double norm = std::sqrt(s);
  if (norm > 1.0)
    for (double& v : w.data()) v /= norm;
}

}  // namespace

DistanceKind parse_distance(std::string_view name) {
  if (name == "sw") return DistanceKind::sw;
  if (name == "gsw") return DistanceKind::gsw;
  if (name == "maxsw") return DistanceKind::maxsw;
  if (name == "maxgswnn") return DistanceKind::maxgswnn;
  if (name == "dsw") return DistanceKind::dsw;
  if (name == "dgsw") return DistanceKind::dgsw;
  if (name == "exact") return DistanceKind::exact;
  throw ConfigError("unknown distance '" + std::string(name) + "'");
}

std::string_view distance_name(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::sw:
      return "sw";
    case DistanceKind::gsw:
      return "gsw";
    case DistanceKind::maxsw:
      return "maxsw";
    case DistanceKind::maxgswnn:
      return "maxgswnn";
    case DistanceKind::dsw:
      return "dsw";
    case DistanceKind::dgsw:
      return "dgsw";
    case DistanceKind::exact:
      return "exact";
  }
  return "?";
}

void SlicedConfig::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("p must be >= 1");
  if (n_projections == 0) throw ConfigError("number of projections must be >= 1");
  if (defining.kind == DefiningFunction::Kind::circular && !(defining.radius > 0.0)) {
    throw ConfigError("circular radius must be > 0");
  }
}

void DswConfig::validate() const {
  base.validate();
  if (!(lambda_c >= 0.0) || !std::isfinite(lambda_c)) throw ConfigError("lambda_c must be >= 0");
  if (!(ascent_lr > 0.0)) throw ConfigError("ascent learning rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must lie in [0, 1)");
}

SliceEstimate sliced_with_directions(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const Tensor& dirs,
                                     const DefiningFunction& g, double p) {
  require_estimator_inputs(mu, nu);
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  if (dirs.rank() != 2 || dirs.cols() != mu.dim() || dirs.rows() == 0) {
    throw ShapeError("directions " + shape_string(dirs.shape()) + " do not match dimension " + std::to_string(mu.dim()));
  }
  const Tensor px = project(mu.points(), dirs, g);
  const Tensor py = project(nu.points(), dirs, g);
  return summarize(slice_costs(px, py, p), p);
}

SliceEstimate sw_estimate(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const SlicedConfig& cfg) {
  cfg.validate();
  require_estimator_inputs(mu, nu);
  RngStream rng(cfg.seed);
  const Tensor dirs = sample_uniform_sphere(rng, cfg.n_projections, mu.dim());
  return sliced_with_directions(mu, nu, dirs, cfg.defining, cfg.p);
}

double sw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const SlicedConfig& cfg) {
  return sw_estimate(mu, nu, cfg).value;
}

double gsw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const SlicedConfig& cfg) {
  if (cfg.defining.kind != DefiningFunction::Kind::circular) throw ConfigError("gsw needs the circular defining function");
  return sw_estimate(mu, nu, cfg).value;
}

grad::Var sliced_cost_pow(const grad::Var& x, const grad::Var& y, const grad::Var& dirs, const DefiningFunction& g,
                          double p) {
  require_point_sets(x.value(), y.value());
  const grad::Var px = project(x, dirs, g);
  const grad::Var py = project(y, dirs, g);
  const std::size_t n = px.value().rows(), k = px.value().cols();

  std::vector<std::size_t> ix(n * k), iy(n * k);
  parallel_for(n, [&](std::size_t i) {
    const auto m = wasserstein_1d_pow_matched(px.value().row(i), py.value().row(i), p);
    for (std::size_t r = 0; r < k; ++r) {
      ix[i * k + r] = i * k + m.x_order[r];
      iy[i * k + r] = i * k + m.y_order[r];
    }
  });
  const grad::Var gx = grad::gather_rows(grad::reshape(px, {n * k, 1}), std::move(ix));
  const grad::Var gy = grad::gather_rows(grad::reshape(py, {n * k, 1}), std::move(iy));
  return grad::mean(grad::pow_p(grad::sub(gx, gy), p));
}

grad::Var sliced_loss(const grad::Var& x, const grad::Var& y, const grad::Var& dirs, const DefiningFunction& g,
                      double p) {
  return grad::root_p(sliced_cost_pow(x, y, dirs, g, p), p);
}

grad::Var dsw_objective(const grad::Var& x, const grad::Var& y, const grad::Var& f, const DefiningFunction& g,
                        double p, double lambda_c) {
  const grad::Var slice = sliced_loss(x, y, f, g, p);
  const grad::Var reg = grad::offdiag_mean(grad::abs(grad::matmul(f, grad::transpose(f))));
  return grad::sub(slice, grad::scalar_mul(reg, lambda_c));
}

MaxSwResult max_sw(const Tensor& x, const Tensor& y, const MaxSwConfig& cfg) {
  require_point_sets(x, y);
  if (!(cfg.p >= 1.0)) throw ConfigError("p must be >= 1");
  if (!(cfg.lr > 0.0)) throw ConfigError("max-SW learning rate must be > 0");
  const std::size_t d = x.cols();
  RngStream rng(cfg.seed);

  MaxSwResult best;
  double best_pow = -1.0;
  for (std::size_t restart = 0; restart < std::max<std::size_t>(cfg.restarts, 1); ++restart) {
    RngStream start_rng = rng.child(restart);
    Tensor theta = sample_uniform_sphere(start_rng, 1, d);
    for (std::size_t it = 0; it <= cfg.iterations; ++it) {
      grad::Tape tape;
      const grad::Var th = tape.parameter(theta);
      const grad::Var cost = sliced_cost_pow(tape.constant(x), tape.constant(y), th, DefiningFunction::linear(), cfg.p);
      const double value = cost.value().item();
      if (value > best_pow) {
        best_pow = value;
        best.direction = theta.reshaped({d});
      }
      if (it == cfg.iterations) break;
      const auto grads = tape.backward(cost);
      const Tensor& g = grads[th];
      double norm = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        theta[c] += cfg.lr * g[c];
        norm += theta[c] * theta[c];
      }
      norm = std::sqrt(norm);
      if (norm < 1e-12) break;
      for (double& v : theta.data()) v /= norm;
    }
  }
  best.value = root(best_pow, cfg.p);
  return best;
}

MaxSwResult max_sw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const MaxSwConfig& cfg) {
  require_estimator_inputs(mu, nu);
  return max_sw(mu.points(), nu.points(), cfg);
}

MaxGswNnResult max_gsw_nn(const Tensor& x, const Tensor& y, const MaxGswNnConfig& cfg) {
  require_point_sets(x, y);
  if (!(cfg.p >= 1.0)) throw ConfigError("p must be >= 1");
  RngStream rng(cfg.seed);
  std::vector<std::size_t> sizes{x.cols()};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(1);
  Mlp net = Mlp::random(sizes, Activation::leaky_relu, Activation::identity, rng, cfg.leaky_slope);
  for (auto& layer : net.layers()) project_into_unit_ball(layer.weight);

  Adam adam({.lr = cfg.lr, .beta1 = 0.5, .beta2 = 0.999, .eps = 1e-8, .goal = Adam::Goal::maximize});
  MaxGswNnResult best;
  double best_pow = -1.0;
  for (std::size_t it = 0; it <= cfg.iterations; ++it) {
    grad::Tape tape;
    const auto bound = net.bind(tape);
    const grad::Var hx = net.forward(bound, tape.constant(x));
    const grad::Var hy = net.forward(bound, tape.constant(y));
    // h already produces scalars; the unit direction (1) turns them into a single slice.
    const grad::Var e = tape.constant(Tensor::matrix(1, 1, {1.0}));
    const grad::Var cost = sliced_cost_pow(hx, hy, e, DefiningFunction::linear(), cfg.p);
    const double value = cost.value().item();
    if (value > best_pow) {
      best_pow = value;
      best.network = net;
    }
    if (it == cfg.iterations) break;
    const auto grads = tape.backward(cost);
    std::vector<Tensor> g;
    for (const auto& b : bound) g.push_back(grads[b]);
    const auto params = net.parameters();
    adam.step(params, g);
    for (auto& layer : net.layers()) project_into_unit_ball(layer.weight);
  }
  best.value = root(best_pow, cfg.p);
  return best;
}

double max_gsw_nn(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const MaxGswNnConfig& cfg) {
  require_estimator_inputs(mu, nu);
  return max_gsw_nn(mu.points(), nu.points(), cfg).value;
}

SphereMapAscent::SphereMapAscent(SphereMap map, DswConfig cfg)
    : map_(std::move(map)),
      cfg_(cfg),
      adam_({.lr = cfg.ascent_lr, .beta1 = cfg.beta1, .beta2 = cfg.beta2, .eps = 1e-8, .goal = Adam::Goal::maximize}) {
  cfg_.validate();
}

double SphereMapAscent::step(const Tensor& x, const Tensor& y, RngStream& rng) {
  require_point_sets(x, y);
  if (x.cols() != map_.dim()) throw ShapeError("sphere map dimension does not match the data");
  const Tensor thetas = sample_uniform_sphere(rng, cfg_.base.n_projections, x.cols());

  grad::Tape tape;
  const auto bound = map_.net().bind(tape);
  const grad::Var f = map_.forward(bound, tape.constant(thetas));
  const grad::Var objective =
      dsw_objective(tape.constant(x), tape.constant(y), f, cfg_.base.defining, cfg_.base.p, cfg_.lambda_c);

  const auto grads = tape.backward(objective);
  std::vector<Tensor> g;
  for (const auto& b : bound) g.push_back(grads[b]);
  const auto params = map_.net().parameters();
  adam_.step(params, g);
  return objective.value().item();
}

double SphereMapAscent::objective(const Tensor& x, const Tensor& y, const Tensor& thetas) const {
  const Tensor f = map_.apply(thetas);
  const EmpiricalMeasure mu(x), nu(y);
  const auto est = sliced_with_directions(mu, nu, f, cfg_.base.defining, cfg_.base.p);
  return est.value - cfg_.lambda_c * offdiag_abs_cosine(f);
}

DswResult SphereMapAscent::evaluate(const Tensor& x, const Tensor& y, RngStream& rng) const {
  const Tensor thetas = sample_uniform_sphere(rng, cfg_.eval_count(), x.cols());
  Tensor f = map_.apply(thetas);
  const EmpiricalMeasure mu(x), nu(y);
  const auto est = sliced_with_directions(mu, nu, f, cfg_.base.defining, cfg_.base.p);
  DswResult out;
  out.sliced_value = est.value;
  out.mc_stderr = est.std_error;
  out.reg_estimate = offdiag_abs_cosine(f);
  out.dual_value_without_constant = out.sliced_value - cfg_.lambda_c * out.reg_estimate;
  out.directions_used = std::move(f);
  return out;
}

DswResult dsw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const DswConfig& cfg, SphereMap& map) {
  cfg.validate();
  require_estimator_inputs(mu, nu);
  if (map.dim() != mu.dim()) throw ShapeError("sphere map dimension does not match the data");

  // Stream layout: child(0) feeds the final evaluation, child(s + 1) ascent step s.
  const RngStream root_rng(cfg.base.seed);
  SphereMapAscent ascent(map, cfg);
  std::vector<double> trace;
  trace.reserve(cfg.ascent_steps);
  for (std::size_t s = 0; s < cfg.ascent_steps; ++s) {
    RngStream step_rng = root_rng.child(s + 1);
    trace.push_back(ascent.step(mu.points(), nu.points(), step_rng));
  }
  RngStream eval_rng = root_rng.child(0);
  DswResult out = ascent.evaluate(mu.points(), nu.points(), eval_rng);
  out.objective_trace = std::move(trace);
  map = ascent.map();
  return out;
}

DswResult dgsw(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const DswConfig& cfg, SphereMap& map) {
  if (cfg.base.defining.kind != DefiningFunction::Kind::circular) {
    throw ConfigError("dgsw needs the circular defining function");
  }
  return dsw(mu, nu, cfg, map);
}

}  // namespace slicedot
