#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slicedot/tensor.hpp"

namespace slicedot::cli {

namespace fs = std::filesystem;

// Exit codes shared by the executable and the tests.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

struct DistOptions {
  fs::path file_a;
  fs::path file_b;
  std::string distance = "sw";
  std::size_t n = 10;
  double p = 2.0;
  double lambda = 1.0;
  std::optional<std::size_t> steps;  // ascent steps / iterations; library default when unset
  std::optional<double> lr;
  std::uint64_t seed = 0;
  double r = 1000.0;
  std::size_t restarts = 1;  // Max-SW only
};

/// Single-line JSON object: distance, value, n_projections, seed, wall_ms, extras.
nlohmann::json run_dist(const DistOptions& opt);

struct GaussDemoOptions {
  fs::path out = "out";
  std::vector<double> lambdas{0.0, 50.0, 1000.0};
  std::size_t n = 100;          // directions per ascent step
  std::size_t steps = 2000;
  double lr = 1e-2;
  std::size_t samples = 10000;  // points per Gaussian
  std::size_t batch = 256;      // minibatch per ascent step
  std::size_t shown = 1000;     // fitted directions emitted per lambda
  std::size_t hidden = 32;
  std::uint64_t seed = 0;
};

struct GaussDemoRow {
  double lambda = 0.0;
  double reg_estimate = 0.0;
  double axis_fraction = 0.0;  // share of f(theta) with max |cos| to e1/e2 above 0.95
  double sliced_value = 0.0;
  double wall_ms = 0.0;
  Tensor directions;
};

/// Writes gauss_demo.csv, gauss_demo_summary.csv and gauss_demo.svg under opt.out.
std::vector<GaussDemoRow> run_gauss_demo(const GaussDemoOptions& opt);

struct LambdaSweepOptions {
  fs::path out = "out";
  std::vector<double> lambdas{0.0, 1.0, 10.0, 100.0, 1000.0};
  std::size_t d = 784;
  std::size_t samples = 500;
  std::size_t n = 10;
  std::size_t steps = 100;
  double lr = 1e-2;
  std::uint64_t seed = 0;
};

struct LambdaSweepRow {
  double lambda = 0.0;
  double statistic = 0.0;  // off-diagonal mean |f(theta_i)^T f(theta_j)| over n fresh directions
  double sliced_value = 0.0;
  double wall_ms = 0.0;
};

/// Writes lambda_sweep.csv and lambda_sweep.svg under opt.out.
std::vector<LambdaSweepRow> run_lambda_sweep(const LambdaSweepOptions& opt);

struct TrainOptions {
  fs::path out = "out";
  std::string dataset = "ring8";  // ring8 | gauss2d | gaussHD
  std::size_t d = 10;             // gaussHD dimension
  std::string distance = "dsw";
  std::size_t n = 10;
  double p = 2.0;
  double lambda = 10.0;
  std::size_t steps = 1;          // sphere-map ascent steps per generator step
  double lr = 5e-4;
  double map_lr = 5e-4;
  double r = 1000.0;
  std::size_t iters = 1000;
  std::size_t batch = 512;
  std::size_t eval_every = 100;
  std::size_t eval_samples = 2000;
  std::size_t train_size = 20000;
  std::size_t holdout_size = 4000;
  std::size_t emitted = 1000;     // generated samples written to samples.csv
  std::uint64_t seed = 0;
};

struct TrainSummary {
  double initial_eval = 0.0;
  double final_eval = 0.0;
  std::optional<double> initial_reconstruction;
  std::optional<double> final_reconstruction;
  double wall_ms = 0.0;
};

/// Writes log.csv, model_init.swt, model.swt and samples.csv under opt.out.
TrainSummary run_mede(const TrainOptions& opt);
/// As run_mede, plus encoder_init.swt and encoder.swt.
TrainSummary run_jci(const TrainOptions& opt);

struct BenchOptions {
  fs::path out = "out";
  std::vector<std::string> distances{"sw", "gsw", "maxsw", "dsw", "dgsw"};
  std::vector<std::size_t> sizes{64, 128, 256, 512, 1024, 2048, 4096, 8192};
  std::size_t n = 50;
  std::size_t d = 10;
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string distance;
  std::size_t k = 0;
  std::size_t n = 0;
  double wall_ms = 0.0;  // minimum over repeats
};

/// Writes bench.csv under opt.out.
std::vector<BenchRow> run_bench(const BenchOptions& opt);

/// Least-squares slope of log(wall_ms) against log(k) over rows with k in [k_min, k_max].
double loglog_slope(const std::vector<BenchRow>& rows, const std::string& distance, std::size_t k_min,
                    std::size_t k_max);

}  // namespace slicedot::cli
