#include "cli.hpp"

#include <algorithm>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "slicedot/errors.hpp"
#include "slicedot/io.hpp"

namespace slicedot::cli {

namespace {

void add_out(CLI::App* cmd, fs::path& out) { cmd->add_option("--out", out, "Output directory")->capture_default_str(); }

void add_train_flags(CLI::App* cmd, TrainOptions& o) {
  add_out(cmd, o.out);
  cmd->add_option("--dataset", o.dataset, "ring8 | gauss2d | gaussHD")->capture_default_str();
  cmd->add_option("--d", o.d, "Dimension for gaussHD")->capture_default_str();
  cmd->add_option("--distance", o.distance, "sw, gsw, maxsw, maxgswnn, dsw, dgsw")->capture_default_str();
  cmd->add_option("--n", o.n, "Projections per step")->capture_default_str();
  cmd->add_option("--p", o.p, "Order p")->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "lambda_C for dsw/dgsw")->capture_default_str();
  cmd->add_option("--steps", o.steps, "Sphere-map ascent steps per generator step")->capture_default_str();
  cmd->add_option("--lr", o.lr, "Generator (and encoder) learning rate")->capture_default_str();
  cmd->add_option("--map-lr", o.map_lr, "Sphere-map learning rate")->capture_default_str();
  cmd->add_option("--r", o.r, "Circular defining function radius")->capture_default_str();
  cmd->add_option("--iters", o.iters, "Training iterations")->capture_default_str();
  cmd->add_option("--batch", o.batch, "Minibatch size")->capture_default_str();
  cmd->add_option("--eval-every", o.eval_every, "Evaluation period (0 = start and end only)")->capture_default_str();
  cmd->add_option("--eval-samples", o.eval_samples, "Samples per exact evaluation (<= 2000)")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Seed")->capture_default_str();
}

std::string summary_json(const TrainSummary& s) {
  nlohmann::json j;
  j["initial_eval"] = s.initial_eval;
  j["final_eval"] = s.final_eval;
  if (s.initial_reconstruction) j["initial_reconstruction"] = *s.initial_reconstruction;
  if (s.final_reconstruction) j["final_reconstruction"] = *s.final_reconstruction;
  j["wall_ms"] = s.wall_ms;
  return j.dump();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sliced Wasserstein distances, DSW and desk-scale experiments", "slicedot"};
  app.require_subcommand(1);

  std::function<void()> action;

  DistOptions dist;
  auto* c_dist = app.add_subcommand("dist", "Distance between two point clouds (.csv or .swt)");
  c_dist->add_option("file_a", dist.file_a, "First measure")->required();
  c_dist->add_option("file_b", dist.file_b, "Second measure")->required();
  c_dist->add_option("--distance", dist.distance, "sw, gsw, maxsw, maxgswnn, dsw, dgsw, exact")->capture_default_str();
  c_dist->add_option("--n", dist.n, "Number of projections")->capture_default_str();
  c_dist->add_option("--p", dist.p, "Order p")->capture_default_str();
  c_dist->add_option("--lambda", dist.lambda, "lambda_C for dsw/dgsw")->capture_default_str();
  c_dist->add_option("--steps", dist.steps, "Ascent steps (dsw/dgsw) or iterations (maxsw/maxgswnn)");
  c_dist->add_option("--lr", dist.lr, "Ascent learning rate");
  c_dist->add_option("--restarts", dist.restarts, "Max-SW random restarts")->capture_default_str();
  c_dist->add_option("--seed", dist.seed, "Seed")->capture_default_str();
  c_dist->add_option("--r", dist.r, "Circular defining function radius")->capture_default_str();
  c_dist->callback([&] { action = [&] { out << run_dist(dist).dump() << '\n'; }; });

  GaussDemoOptions demo;
  auto* c_demo = app.add_subcommand("gauss-demo", "Fitted slice distributions on the 2D Gaussian pair");
  add_out(c_demo, demo.out);
  c_demo->add_option("--lambda", demo.lambdas, "lambda_C values, fitted in order")->capture_default_str();
  c_demo->add_option("--n", demo.n, "Directions per ascent step")->capture_default_str();
  c_demo->add_option("--steps", demo.steps, "Ascent steps per lambda")->capture_default_str();
  c_demo->add_option("--lr", demo.lr, "Ascent learning rate")->capture_default_str();
  c_demo->add_option("--batch", demo.batch, "Minibatch per ascent step")->capture_default_str();
  c_demo->add_option("--hidden", demo.hidden, "Hidden width of the sphere map (0 = single layer)")->capture_default_str();
  c_demo->add_option("--seed", demo.seed, "Seed")->capture_default_str();
  c_demo->callback([&] {
    action = [&] {
      for (const auto& r : run_gauss_demo(demo))
        out << nlohmann::json{{"lambda", r.lambda}, {"reg_estimate", r.reg_estimate}, {"axis_fraction", r.axis_fraction},
                              {"sliced_value", r.sliced_value}}
                   .dump()
            << '\n';
    };
  });

  LambdaSweepOptions sweep;
  auto* c_sweep = app.add_subcommand("lambda-sweep", "Concentration of fitted directions against lambda_C");
  add_out(c_sweep, sweep.out);
  c_sweep->add_option("--lambda", sweep.lambdas, "lambda_C values")->capture_default_str();
  c_sweep->add_option("--d", sweep.d, "Dimension")->capture_default_str();
  c_sweep->add_option("--k", sweep.samples, "Samples per measure")->capture_default_str();
  c_sweep->add_option("--n", sweep.n, "Directions")->capture_default_str();
  c_sweep->add_option("--steps", sweep.steps, "Ascent steps")->capture_default_str();
  c_sweep->add_option("--lr", sweep.lr, "Ascent learning rate")->capture_default_str();
  c_sweep->add_option("--seed", sweep.seed, "Seed")->capture_default_str();
  c_sweep->callback([&] {
    action = [&] {
      for (const auto& r : run_lambda_sweep(sweep))
        out << nlohmann::json{{"lambda", r.lambda}, {"a_n", r.statistic}, {"sliced_value", r.sliced_value}}.dump()
            << '\n';
    };
  });

  TrainOptions mede;
  auto* c_mede = app.add_subcommand("mede", "Train a generator by minimum expected distance estimation");
  add_train_flags(c_mede, mede);
  c_mede->callback([&] { action = [&] { out << summary_json(run_mede(mede)) << '\n'; }; });

  TrainOptions jci;
  auto* c_jci = app.add_subcommand("jci", "Joint contrastive inference with a generator and an encoder");
  add_train_flags(c_jci, jci);
  c_jci->callback([&] { action = [&] { out << summary_json(run_jci(jci)) << '\n'; }; });

  BenchOptions bench;
  auto* c_bench = app.add_subcommand("bench", "Wall time against minibatch size");
  add_out(c_bench, bench.out);
  c_bench->add_option("--distance", bench.distances, "Distances to time")->capture_default_str();
  c_bench->add_option("--k", bench.sizes, "Minibatch sizes")->capture_default_str();
  c_bench->add_option("--n", bench.n, "Projections")->capture_default_str();
  c_bench->add_option("--d", bench.d, "Dimension")->capture_default_str();
  c_bench->add_option("--repeats", bench.repeats, "Repeats per cell (minimum is kept)")->capture_default_str();
  c_bench->add_option("--seed", bench.seed, "Seed")->capture_default_str();
  c_bench->callback([&] {
    action = [&] {
      const auto rows = run_bench(bench);
      for (const auto& name : bench.distances) {
        const auto n = std::count_if(rows.begin(), rows.end(), [&](const BenchRow& r) {
          return r.distance == name && r.k >= 512 && r.k <= 8192;
        });
        if (n >= 2) out << nlohmann::json{{"distance", name}, {"slope", loglog_slope(rows, name, 512, 8192)}}.dump() << '\n';
      }
    };
  });

  try {
    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DegenerateMapError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace slicedot::cli
