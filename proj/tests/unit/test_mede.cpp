#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fd.hpp"
#include "slicedot/datasets.hpp"
#include "slicedot/errors.hpp"
#include "slicedot/mede.hpp"

using namespace slicedot;
using check::random_normal;
namespace g = slicedot::grad;

namespace {

Mlp linear_map(const Tensor& w) {
  return Mlp({DenseLayer{w, Tensor({w.rows()}), Activation::identity}});
}

Tensor scaled_identity(std::size_t d, double s) {
  Tensor t({d, d});
  for (std::size_t i = 0; i < d; ++i) t.at(i, i) = s;
  return t;
}

TrainConfig small_config(DistanceKind kind, std::size_t iters, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.distance.kind = kind;
  cfg.distance.sliced.n_projections = 50;
  cfg.distance.lambda_c = 10.0;
  cfg.distance.ascent_lr = 2e-3;
  cfg.batch_size = 128;
  cfg.iterations = iters;
  cfg.lr = 2e-3;
  cfg.seed = seed;
  cfg.eval_samples = 300;
  return cfg;
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[1];
}

double variance(const std::vector<double>& v) {
  double m = 0.0, s = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST(Mede, ZeroIterationsLeaveGeneratorUnchanged) {
  RngStream rng(1);
  const Tensor data = datasets::ring8(rng, 600);
  const Tensor holdout = datasets::ring8(rng, 400);
  Generator gen = Generator::make_default(2, 2, rng);
  const Generator before = gen;
  const auto log = train_mede(EmpiricalMeasure(data), holdout, gen, small_config(DistanceKind::dsw, 0, 3));
  EXPECT_EQ(gen.net, before.net);
  EXPECT_EQ(log.initial_eval, log.final_eval);
  ASSERT_EQ(log.entries.size(), 1u);
}

TEST(Mede, LossIsFiniteAtEveryStep) {
  for (DistanceKind kind : {DistanceKind::sw, DistanceKind::gsw, DistanceKind::maxsw, DistanceKind::dsw,
                            DistanceKind::dgsw, DistanceKind::maxgswnn}) {
    RngStream rng(2);
    const Tensor data = datasets::ring8(rng, 600);
    const Tensor holdout = datasets::ring8(rng, 400);
    Generator gen = Generator::make_default(2, 2, rng);
    TrainConfig cfg = small_config(kind, 5, 4);
    cfg.distance.maxsw.iterations = 5;
    cfg.distance.maxgswnn.iterations = 5;
    const auto log = train_mede(EmpiricalMeasure(data), holdout, gen, cfg);
    ASSERT_EQ(log.entries.size(), 6u);
    for (std::size_t i = 1; i < log.entries.size(); ++i) {
      ASSERT_TRUE(log.entries[i].loss.has_value());
      ASSERT_TRUE(std::isfinite(*log.entries[i].loss)) << distance_name(kind);
    }
    EXPECT_TRUE(gen.net.all_finite());
  }
}

TEST(Mede, BatchLargerThanDataIsConfigError) {
  RngStream rng(3);
  const Tensor data = datasets::ring8(rng, 100);
  Generator gen = Generator::make_default(2, 2, rng);
  EXPECT_THROW(train_mede(EmpiricalMeasure(data), data, gen, small_config(DistanceKind::sw, 1, 0)), ConfigError);
  Encoder enc = Encoder::make_default(2, 2, rng);
  EXPECT_THROW(train_jci(EmpiricalMeasure(data), data, gen, enc, small_config(DistanceKind::sw, 1, 0)), ConfigError);
  TrainConfig exact = small_config(DistanceKind::exact, 1, 0);
  exact.batch_size = 50;
  EXPECT_THROW(train_mede(EmpiricalMeasure(data), data, gen, exact), ConfigError);
}

TEST(Mede, GeneratorGradientMatchesFiniteDifferences) {
  // k = m = 8 points in 2D, three fixed directions.
  RngStream rng(4);
  for (int inst = 0; inst < 10; ++inst) {
    const Tensor noise = random_normal(rng, {8, 2});
    const Tensor data = random_normal(rng, {8, 2}, 2.0);
    const Tensor dirs = sample_uniform_sphere(rng, 3, 2);
    const std::vector<std::size_t> hidden{4};
    const Generator gen = Generator::make(2, 2, rng, hidden);
    const check::Builder build = [&](g::Tape& tape, std::span<const g::Var> v) {
      const g::Var model = gen.net.forward(v, tape.constant(noise));
      return sliced_loss(tape.constant(data), model, tape.constant(dirs), DefiningFunction::linear(), 2.0);
    };
    const auto rep = check::fd_check(gen.net.parameter_values(), build, 1e-6, 1e-3, 1e-7);
    ASSERT_TRUE(rep.ok) << "instance " << inst << ": " << rep.detail;
  }
}

TEST(Mede, LossIsSymmetricUnderSharedDirections) {
  RngStream rng(5);
  const Tensor x = random_normal(rng, {50, 3}), y = random_normal(rng, {50, 3}, 2.0);
  const Tensor dirs = sample_uniform_sphere(rng, 20, 3);
  g::Tape tape;
  const double a =
      sliced_loss(tape.constant(x), tape.constant(y), tape.constant(dirs), DefiningFunction::linear(), 2.0).value().item();
  const double b =
      sliced_loss(tape.constant(y), tape.constant(x), tape.constant(dirs), DefiningFunction::linear(), 2.0).value().item();
  EXPECT_EQ(a, b);
}

TEST(Mede, MoreProjectionsReduceLossVariance) {
  RngStream rng(6);
  const Tensor x = random_normal(rng, {200, 2}), y = random_normal(rng, {200, 2}, 1.5);
  const auto spread = [&](std::size_t n) {
    LossConfig cfg;
    cfg.kind = DistanceKind::sw;
    cfg.sliced.n_projections = n;
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RngStream init(seed), dir_rng(seed, 1);
      DistanceLoss loss(cfg, 2, init);
      g::Tape tape;
      values.push_back(loss(tape.constant(x), tape.constant(y), dir_rng).value().item());
    }
    return variance(values);
  };
  EXPECT_LT(spread(10000), spread(10));
}

TEST(Evaluate, MemorizedHoldoutGivesZero) {
  RngStream rng(7);
  const Tensor holdout = random_normal(rng, {100, 2});
  EXPECT_NEAR(evaluate_samples(holdout, holdout, 100, 2.0, 1), 0.0, 1e-12);
}

TEST(Evaluate, PointCloudsFiveApart) {
  Tensor a({50, 2}), b({50, 2});
  for (std::size_t i = 0; i < 50; ++i) b.at(i, 0) = 5.0;
  EXPECT_NEAR(evaluate_samples(a, b, 50, 2.0, 0), 5.0, 1e-12);
  EXPECT_NEAR(evaluate_samples(a, b, 50, 1.0, 0), 5.0, 1e-12);
}

TEST(Evaluate, BudgetAndDeterminism) {
  RngStream rng(8);
  const Generator gen = Generator::make_default(2, 2, rng);
  const Tensor holdout = random_normal(rng, {3000, 2});
  EXPECT_THROW(evaluate_model(gen, holdout, 2001, 2.0, 0), SizeError);
  EXPECT_EQ(evaluate_model(gen, holdout, 200, 2.0, 5), evaluate_model(gen, holdout, 200, 2.0, 5));
}

TEST(TrainLog, CsvLayout) {
  TrainLog log;
  log.entries.push_back({0, 1.5, std::nullopt, 2.0, std::nullopt});
  log.entries.push_back({1, 2.5, 0.75, std::nullopt, std::nullopt});
  EXPECT_EQ(log.to_csv(), "iteration,wall_ms,loss,eval_metric\n0,1.5,,2\n1,2.5,0.75,\n");
  log.entries.push_back({2, 3.0, 0.5, 1.0, 0.25});
  EXPECT_EQ(log.to_csv().substr(0, log.to_csv().find('\n')), "iteration,wall_ms,loss,eval_metric,reconstruction");
}

TEST(Jci, SelfConsistentPairSitsAtTheSameDistributionFloor) {
  // gen = identity and enc = identity on standard normal data: both joints are
  // the law of (z, z), so the loss matches that of two independent batches.
  RngStream rng(9);
  const Tensor data = random_normal(rng, {4000, 2});
  const auto run = [&](double enc_scale) {
    Generator gen{linear_map(scaled_identity(2, 1.0))};
    Encoder enc{linear_map(scaled_identity(2, enc_scale))};
    TrainConfig cfg = small_config(DistanceKind::sw, 30, 10);
    cfg.lr = 1e-12;
    const auto log = train_jci(EmpiricalMeasure(data), data, gen, enc, cfg);
    std::vector<double> losses;
    for (const auto& e : log.entries)
      if (e.loss) losses.push_back(*e.loss);
    return losses;
  };
  const auto matched = run(1.0), mismatched = run(3.0);

  std::vector<double> floor;
  RngStream f_rng(11);
  for (int i = 0; i < 30; ++i) {
    Tensor a = random_normal(f_rng, {128, 2}), b = random_normal(f_rng, {128, 2});
    const Tensor dirs = sample_uniform_sphere(f_rng, 50, 4);
    Tensor ja({128, 4}), jb({128, 4});
    for (std::size_t r = 0; r < 128; ++r)
      for (std::size_t c = 0; c < 2; ++c) {
        ja.at(r, c) = ja.at(r, c + 2) = a.at(r, c);
        jb.at(r, c) = jb.at(r, c + 2) = b.at(r, c);
      }
    g::Tape tape;
    floor.push_back(sliced_loss(tape.constant(ja), tape.constant(jb), tape.constant(dirs), DefiningFunction::linear(), 2.0)
                        .value()
                        .item());
  }
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double se = std::sqrt(variance(matched) / matched.size() + variance(floor) / floor.size());
  EXPECT_NEAR(mean(matched), mean(floor), 4.0 * se);
  EXPECT_GT(mean(mismatched), 2.0 * mean(matched));
}

TEST(Jci, ReconstructionAndMarginalImproveOnRing) {
  std::vector<double> rec_ratio, eval_ratio;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    RngStream rng(seed);
    const Tensor data = datasets::ring8(rng, 4000);
    const Tensor holdout = datasets::ring8(rng, 1000);
    Generator gen = Generator::make_default(2, 2, rng);
    Encoder enc = Encoder::make_default(2, 2, rng);
    const auto log = train_jci(EmpiricalMeasure(data), holdout, gen, enc, small_config(DistanceKind::sw, 400, seed));
    rec_ratio.push_back(*log.entries.back().reconstruction / *log.entries.front().reconstruction);
    eval_ratio.push_back(log.final_eval / log.initial_eval);
  }
  EXPECT_LT(median3(rec_ratio), 1.0);
  EXPECT_LT(median3(eval_ratio), 1.0);
}

TEST(Mede, ShortRunImprovesRingFit) {
  std::vector<double> ratio;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    RngStream rng(seed);
    const Tensor data = datasets::ring8(rng, 4000);
    const Tensor holdout = datasets::ring8(rng, 1000);
    Generator gen = Generator::make_default(2, 2, rng);
    const auto log = train_mede(EmpiricalMeasure(data), holdout, gen, small_config(DistanceKind::dsw, 300, seed));
    ratio.push_back(log.final_eval / log.initial_eval);
  }
  EXPECT_LT(median3(ratio), 0.6);
}
