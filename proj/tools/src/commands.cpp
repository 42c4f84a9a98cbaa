#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>

#include "slicedot/datasets.hpp"
#include "slicedot/distances.hpp"
#include "slicedot/errors.hpp"
#include "slicedot/io.hpp"
#include "slicedot/mede.hpp"
#include "slicedot/transport.hpp"
#include "svg.hpp"

namespace slicedot::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// m rows drawn without replacement (partial Fisher-Yates).
Tensor minibatch(const Tensor& points, std::size_t m, RngStream& rng) {
  const std::size_t n = points.rows(), d = points.cols();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Tensor out({m, d});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
    const auto row = points.row(idx[i]);
    std::copy(row.begin(), row.end(), out.data().begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  return out;
}

double axis_fraction(const Tensor& dirs) {
  std::size_t near = 0;
  for (std::size_t i = 0; i < dirs.rows(); ++i) {
    const auto r = dirs.row(i);
    if (std::max(std::abs(r[0]), std::abs(r[1])) > 0.95) ++near;
  }
  return static_cast<double>(near) / static_cast<double>(dirs.rows());
}

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("--r must be a positive finite radius");
}

std::string fmt(double v) { return format_double(v); }

// Invalid input content is a usage problem, whatever stage detected it.
EmpiricalMeasure load_input(const fs::path& path) {
  try {
    return load_measure(path);
  } catch (const DomainError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_gauss_svg(const fs::path& path, const std::vector<GaussDemoRow>& rows) {
  const double panel = 260.0, radius = 100.0;
  Svg svg(panel * static_cast<double>(rows.size()), panel + 20.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double cx = panel * (static_cast<double>(i) + 0.5), cy = panel / 2.0 + 20.0;
    svg.text(cx - 90.0, 24.0, "lambda_C = " + fmt(rows[i].lambda) + ", reg = " + svg_number(rows[i].reg_estimate));
    svg.ring(cx, cy, radius, "#999999");
    svg.line(cx - radius - 10, cy, cx + radius + 10, cy, "#cccccc");
    svg.line(cx, cy - radius - 10, cx, cy + radius + 10, "#cccccc");
    const Tensor& f = rows[i].directions;
    for (std::size_t j = 0; j < f.rows(); ++j) svg.circle(cx + radius * f.at(j, 0), cy - radius * f.at(j, 1), 2.0, "#1f77b4", 0.4);
  }
  write_file(path, svg.str());
}

void write_sweep_svg(const fs::path& path, const std::vector<LambdaSweepRow>& rows) {
  const double w = 420.0, h = 300.0, left = 50.0, top = 20.0, pw = 340.0, ph = 230.0;
  Svg svg(w, h);
  svg.line(left, top + ph, left + pw, top + ph, "black");
  svg.line(left, top, left, top + ph, "black");
  svg.text(left + pw / 2 - 40, h - 8, "log10(1 + lambda_C)");
  svg.text(4, top + 10, "A_N");
  double xmax = 0.0;
  for (const auto& r : rows) xmax = std::max(xmax, std::log10(1.0 + r.lambda));
  if (xmax == 0.0) xmax = 1.0;
  std::string pts;
  for (const auto& r : rows) {
    const double x = left + pw * std::log10(1.0 + r.lambda) / xmax;
    const double y = top + ph * (1.0 - std::clamp(r.statistic, 0.0, 1.0));
    pts += svg_number(x) + ',' + svg_number(y) + ' ';
    svg.circle(x, y, 3.0, "#d62728");
  }
  svg.polyline(pts, "#d62728");
  write_file(path, svg.str());
}

struct TrainData {
  Tensor train;
  Tensor holdout;
};

TrainData make_dataset(const TrainOptions& opt, const RngStream& root) {
  RngStream a = root.child(0), b = root.child(1);
  if (opt.dataset == "ring8") return {datasets::ring8(a, opt.train_size), datasets::ring8(b, opt.holdout_size)};
  if (opt.dataset == "gauss2d")
    return {datasets::gauss2d(a, opt.train_size).second, datasets::gauss2d(b, opt.holdout_size).second};
  if (opt.dataset == "gaussHD") {
    if (opt.d == 0) throw ConfigError("--d must be >= 1");
    return {datasets::gauss_hd(a, opt.train_size, opt.d).second, datasets::gauss_hd(b, opt.holdout_size, opt.d).second};
  }
  throw ConfigError("unknown dataset '" + opt.dataset + "' (expected ring8, gauss2d or gaussHD)");
}

TrainConfig train_config(const TrainOptions& opt) {
  check_radius(opt.r);
  TrainConfig cfg;
  cfg.distance.kind = parse_distance(opt.distance);
  cfg.distance.sliced.p = opt.p;
  cfg.distance.sliced.n_projections = opt.n;
  cfg.distance.sliced.defining.radius = opt.r;
  cfg.distance.sliced.seed = opt.seed;
  cfg.distance.lambda_c = opt.lambda;
  cfg.distance.ascent_steps = opt.steps;
  cfg.distance.ascent_lr = opt.map_lr;
  cfg.distance.maxsw.p = opt.p;
  cfg.distance.maxgswnn.p = opt.p;
  cfg.batch_size = opt.batch;
  cfg.iterations = opt.iters;
  cfg.lr = opt.lr;
  cfg.seed = opt.seed;
  cfg.eval_every = opt.eval_every;
  cfg.eval_samples = opt.eval_samples;
  cfg.validate();
  return cfg;
}

void write_samples(const fs::path& path, const Tensor& samples) {
  save_measure(path, EmpiricalMeasure(samples), MeasureFormat::csv);
}

TrainSummary summarize(const TrainLog& log, Clock::time_point t0) {
  TrainSummary s;
  s.initial_eval = log.initial_eval;
  s.final_eval = log.final_eval;
  for (const auto& e : log.entries) {
    if (!e.reconstruction) continue;
    if (!s.initial_reconstruction) s.initial_reconstruction = e.reconstruction;
    s.final_reconstruction = e.reconstruction;
  }
  s.wall_ms = ms_since(t0);
  return s;
}

}  // namespace

nlohmann::json run_dist(const DistOptions& opt) {
  const DistanceKind kind = parse_distance(opt.distance);
  check_radius(opt.r);
  const EmpiricalMeasure mu = load_input(opt.file_a);
  const EmpiricalMeasure nu = load_input(opt.file_b);
  if (mu.dim() != nu.dim()) throw ShapeError("the two measures have different dimensions");

  SlicedConfig base;
  base.p = opt.p;
  base.n_projections = opt.n;
  base.seed = opt.seed;
  if (kind == DistanceKind::gsw || kind == DistanceKind::dgsw) base.defining = DefiningFunction::circular(opt.r);
  base.validate();

  nlohmann::json extras = nlohmann::json::object();
  double value = 0.0;
  const auto t0 = Clock::now();
  switch (kind) {
    case DistanceKind::sw:
    case DistanceKind::gsw: {
      const auto est = sw_estimate(mu, nu, base);
      value = est.value;
      extras["mc_stderr"] = est.std_error;
      break;
    }
    case DistanceKind::maxsw: {
      MaxSwConfig c;
      c.p = opt.p;
      c.seed = opt.seed;
      if (opt.steps) c.iterations = *opt.steps;
      if (opt.lr) c.lr = *opt.lr;
      c.restarts = opt.restarts;
      const auto r = max_sw(mu, nu, c);
      value = r.value;
      extras["direction"] = std::vector<double>(r.direction.values().begin(), r.direction.values().end());
      break;
    }
    case DistanceKind::maxgswnn: {
      MaxGswNnConfig c;
      c.p = opt.p;
      c.seed = opt.seed;
      if (opt.steps) c.iterations = *opt.steps;
      if (opt.lr) c.lr = *opt.lr;
      value = max_gsw_nn(mu, nu, c);
      break;
    }
    case DistanceKind::dsw:
    case DistanceKind::dgsw: {
      DswConfig c;
      c.base = base;
      c.lambda_c = opt.lambda;
      if (opt.steps) c.ascent_steps = *opt.steps;
      if (opt.lr) c.ascent_lr = *opt.lr;
      c.validate();
      RngStream map_rng = RngStream(opt.seed).child(100);
      SphereMap map = SphereMap::near_identity(mu.dim(), map_rng);
      const auto r = kind == DistanceKind::dsw ? dsw(mu, nu, c, map) : dgsw(mu, nu, c, map);
      value = r.sliced_value;
      extras["reg_estimate"] = r.reg_estimate;
      extras["dual_value_without_constant"] = r.dual_value_without_constant;
      extras["mc_stderr"] = r.mc_stderr;
      extras["lambda_c"] = opt.lambda;
      extras["ascent_steps"] = c.ascent_steps;
      break;
    }
    case DistanceKind::exact: {
      const auto r = exact_wp_oracle(mu, nu, opt.p);
      value = r.value;
      extras["transfers"] = r.coupling.transfers.size();
      break;
    }
  }
  const double wall = ms_since(t0);

  nlohmann::json out;
  out["distance"] = std::string(distance_name(kind));
  out["value"] = value;
  out["n_projections"] = opt.n;
  out["seed"] = opt.seed;
  out["wall_ms"] = wall;
  out["extras"] = std::move(extras);
  return out;
}

std::vector<GaussDemoRow> run_gauss_demo(const GaussDemoOptions& opt) {
  if (opt.samples < opt.batch || opt.batch < 2) throw ConfigError("gauss-demo needs 2 <= batch <= samples");
  if (opt.shown < 2) throw ConfigError("gauss-demo needs at least two emitted directions");
  fs::create_directories(opt.out);
  const RngStream root(opt.seed);
  RngStream data_rng = root.child(0);
  const auto [a, b] = datasets::gauss2d(data_rng, opt.samples);
  const EmpiricalMeasure mu(a), nu(b);

  RngStream map_rng = root.child(1);
  std::vector<std::size_t> hidden;
  if (opt.hidden) hidden.push_back(opt.hidden);
  SphereMap map = SphereMap::near_identity(2, map_rng, hidden);

  // One shared set of evaluation directions so the panels differ only through the fitted maps.
  RngStream eval_rng = root.child(2);
  const Tensor eval_thetas = sample_uniform_sphere(eval_rng, opt.shown, 2);

  std::vector<GaussDemoRow> rows;
  for (std::size_t i = 0; i < opt.lambdas.size(); ++i) {
    const auto t0 = Clock::now();
    DswConfig cfg;
    cfg.base.n_projections = opt.n;
    cfg.base.seed = opt.seed;
    cfg.lambda_c = opt.lambdas[i];
    cfg.ascent_steps = opt.steps;
    cfg.ascent_lr = opt.lr;
    cfg.validate();
    // Each lambda continues from the previous fitted map with a fresh optimizer.
    SphereMapAscent ascent(map, cfg);
    RngStream dir_rng = root.child(10 + i), batch_rng = root.child(1000 + i);
    for (std::size_t s = 0; s < opt.steps; ++s) {
      const Tensor x = minibatch(a, opt.batch, batch_rng);
      const Tensor y = minibatch(b, opt.batch, batch_rng);
      ascent.step(x, y, dir_rng);
    }
    map = ascent.map();

    GaussDemoRow row;
    row.lambda = opt.lambdas[i];
    row.directions = map.apply(eval_thetas);
    row.reg_estimate = offdiag_abs_cosine(row.directions);
    row.axis_fraction = axis_fraction(row.directions);
    row.sliced_value = sliced_with_directions(mu, nu, row.directions, DefiningFunction::linear(), cfg.base.p).value;
    row.wall_ms = ms_since(t0);
    rows.push_back(std::move(row));
  }

  std::string points = "lambda,x,y\n";
  std::string summary = "lambda,reg_estimate,axis_fraction,sliced_value,wall_ms\n";
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.directions.rows(); ++j)
      points += fmt(r.lambda) + ',' + fmt(r.directions.at(j, 0)) + ',' + fmt(r.directions.at(j, 1)) + '\n';
    summary += fmt(r.lambda) + ',' + fmt(r.reg_estimate) + ',' + fmt(r.axis_fraction) + ',' + fmt(r.sliced_value) +
               ',' + fmt(r.wall_ms) + '\n';
  }
  write_file(opt.out / "gauss_demo.csv", points);
  write_file(opt.out / "gauss_demo_summary.csv", summary);
  write_gauss_svg(opt.out / "gauss_demo.svg", rows);
  return rows;
}

std::vector<LambdaSweepRow> run_lambda_sweep(const LambdaSweepOptions& opt) {
  if (opt.n < 2) throw ConfigError("lambda-sweep needs --n >= 2");
  if (opt.d == 0 || opt.samples == 0) throw ConfigError("lambda-sweep needs --d >= 1 and samples >= 1");
  fs::create_directories(opt.out);
  const RngStream root(opt.seed);
  RngStream data_rng = root.child(0);
  const auto [a, b] = datasets::gauss_hd(data_rng, opt.samples, opt.d);
  const EmpiricalMeasure mu(a), nu(b);

  std::vector<LambdaSweepRow> rows;
  for (double lambda : opt.lambdas) {
    const auto t0 = Clock::now();
    // Same initial map and seed for every lambda: the runs differ only in lambda_C.
    RngStream map_rng = root.child(1);
    SphereMap map = SphereMap::near_identity(opt.d, map_rng);
    DswConfig cfg;
    cfg.base.n_projections = opt.n;
    cfg.base.seed = opt.seed;
    cfg.lambda_c = lambda;
    cfg.ascent_steps = opt.steps;
    cfg.ascent_lr = opt.lr;
    cfg.eval_projections = opt.n;
    const DswResult r = dsw(mu, nu, cfg, map);
    rows.push_back({lambda, r.reg_estimate, r.sliced_value, ms_since(t0)});
  }

  std::string csv = "lambda,a_n,sliced_value,wall_ms\n";
  for (const auto& r : rows)
    csv += fmt(r.lambda) + ',' + fmt(r.statistic) + ',' + fmt(r.sliced_value) + ',' + fmt(r.wall_ms) + '\n';
  write_file(opt.out / "lambda_sweep.csv", csv);
  write_sweep_svg(opt.out / "lambda_sweep.svg", rows);
  return rows;
}

TrainSummary run_mede(const TrainOptions& opt) {
  const TrainConfig cfg = train_config(opt);
  const auto t0 = Clock::now();
  const RngStream root(opt.seed);
  const TrainData data = make_dataset(opt, root);
  const std::size_t dim = data.train.cols();
  RngStream init_rng = root.child(2);
  Generator gen = Generator::make_default(dim, dim, init_rng);

  fs::create_directories(opt.out);
  write_swt(opt.out / "model_init.swt", gen.net.parameter_values());
  const TrainLog log = train_mede(EmpiricalMeasure(data.train), data.holdout, gen, cfg);
  write_file(opt.out / "log.csv", log.to_csv());
  write_swt(opt.out / "model.swt", gen.net.parameter_values());
  RngStream sample_rng = root.child(3);
  write_samples(opt.out / "samples.csv", gen.sample(sample_rng, opt.emitted));
  return summarize(log, t0);
}

TrainSummary run_jci(const TrainOptions& opt) {
  const TrainConfig cfg = train_config(opt);
  const auto t0 = Clock::now();
  const RngStream root(opt.seed);
  const TrainData data = make_dataset(opt, root);
  const std::size_t dim = data.train.cols();
  RngStream init_rng = root.child(2);
  Generator gen = Generator::make_default(dim, dim, init_rng);
  Encoder enc = Encoder::make_default(dim, dim, init_rng);

  fs::create_directories(opt.out);
  write_swt(opt.out / "model_init.swt", gen.net.parameter_values());
  write_swt(opt.out / "encoder_init.swt", enc.net.parameter_values());
  const TrainLog log = train_jci(EmpiricalMeasure(data.train), data.holdout, gen, enc, cfg);
  write_file(opt.out / "log.csv", log.to_csv());
  write_swt(opt.out / "model.swt", gen.net.parameter_values());
  write_swt(opt.out / "encoder.swt", enc.net.parameter_values());
  RngStream sample_rng = root.child(3);
  write_samples(opt.out / "samples.csv", gen.sample(sample_rng, opt.emitted));
  return summarize(log, t0);
}

std::vector<BenchRow> run_bench(const BenchOptions& opt) {
  if (opt.repeats == 0) throw ConfigError("bench needs --repeats >= 1");
  std::vector<DistanceKind> kinds;
  for (const auto& name : opt.distances) {
    const DistanceKind k = parse_distance(name);
    if (k == DistanceKind::exact) throw ConfigError("the exact oracle is not benchmarked");
    kinds.push_back(k);
  }
  fs::create_directories(opt.out);
  const RngStream root(opt.seed);
  std::vector<BenchRow> rows;
  for (const DistanceKind kind : kinds) {
    for (const std::size_t k : opt.sizes) {
      RngStream data_rng = root.child(k);
      const auto [a, b] = datasets::gauss_hd(data_rng, k, opt.d);
      const EmpiricalMeasure mu(a), nu(b);
      double best = 0.0;
      for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
        const auto t0 = Clock::now();
        SlicedConfig base;
        base.n_projections = opt.n;
        base.seed = opt.seed + rep;
        if (kind == DistanceKind::gsw || kind == DistanceKind::dgsw) base.defining = DefiningFunction::circular();
        switch (kind) {
          case DistanceKind::sw:
          case DistanceKind::gsw:
            (void)sw(mu, nu, base);
            break;
          case DistanceKind::maxsw: {
            MaxSwConfig c;
            c.seed = base.seed;
            (void)max_sw(mu, nu, c);
            break;
          }
          case DistanceKind::maxgswnn: {
            MaxGswNnConfig c;
            c.seed = base.seed;
            (void)max_gsw_nn(mu, nu, c);
            break;
          }
          case DistanceKind::dsw:
          case DistanceKind::dgsw: {
            DswConfig c;
            c.base = base;
            RngStream map_rng = root.child(7);
            SphereMap map = SphereMap::near_identity(opt.d, map_rng);
            (void)dsw(mu, nu, c, map);
            break;
          }
          case DistanceKind::exact:
            break;
        }
        const double ms = ms_since(t0);
        best = rep == 0 ? ms : std::min(best, ms);
      }
      rows.push_back({std::string(distance_name(kind)), k, opt.n, best});
    }
  }
  std::string csv = "distance,k,N,wall_ms\n";
  for (const auto& r : rows) csv += r.distance + ',' + std::to_string(r.k) + ',' + std::to_string(r.n) + ',' + fmt(r.wall_ms) + '\n';
  write_file(opt.out / "bench.csv", csv);
  return rows;
}

double loglog_slope(const std::vector<BenchRow>& rows, const std::string& distance, std::size_t k_min,
                    std::size_t k_max) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.distance == distance && r.k >= k_min && r.k <= k_max)
      pts.emplace_back(std::log(static_cast<double>(r.k)), std::log(std::max(r.wall_ms, 1e-9)));
  if (pts.size() < 2) throw ConfigError("slope needs at least two sizes");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

}  // namespace slicedot::cli
