// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "commands.hpp"
#include "fd.hpp"
#include "files.hpp"
#include "primitives.hpp"
#include "rate.hpp"
#include "slicedot/datasets.hpp"
#include "slicedot/distances.hpp"
#include "slicedot/io.hpp"
#include "slicedot/transport.hpp"

using namespace slicedot;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Measure1D as_1d(const EmpiricalMeasure& m) {
  return Measure1D(Tensor::vector({m.points().data().begin(), m.points().data().end()}), m.weights());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  RngStream rng(1);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto mu = check::random_measure(rng, 1 + rng.below(8), 1, true);
    const auto nu = check::random_measure(rng, 1 + rng.below(8), 1, true);
    const double p = i % 2 ? 1.0 : 2.0;
    worst = std::max(worst, std::abs(wasserstein_1d(as_1d(mu), as_1d(nu), p) - exact_wp_oracle(mu, nu, p).value));
  }
  const double s = seconds_since(t0);
  return {worst <= 1e-9 && s < 5.0, fmt("max |diff| = %.2e over 200 instances, %.2f s", worst, s)};
}

Outcome metric_axioms() {
  RngStream rng(2);
  bool symmetric = true;
  double worst_violation = -INFINITY;
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 1 + rng.below(5), k = 1 + rng.below(20);
    const Tensor dirs = sample_uniform_sphere(rng, 64, d);
    const auto a = check::random_measure(rng, k, d, false);
    const auto b = check::random_measure(rng, k, d, false);
    const auto c = check::random_measure(rng, k, d, false);
    const auto g = DefiningFunction::linear();
    const auto v = [&](const EmpiricalMeasure& x, const EmpiricalMeasure& y) {
      return sliced_with_directions(x, y, dirs, g, 2.0).value;
    };
    const double ab = v(a, b);
    symmetric = symmetric && ab == v(b, a);
    worst_violation = std::max(worst_violation, ab - v(a, c) - v(c, b));
  }
  return {symmetric && worst_violation <= 1e-9,
          fmt("symmetry exact: %s, worst d(a,b) - d(a,c) - d(c,b) = %.3e", symmetric ? "yes" : "no", worst_violation)};
}

Outcome sandwich() {
  RngStream rng(3);
  int lower_fail = 0, upper_fail = 0;
  double worst_gap = -INFINITY;
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = 2 + rng.below(29), d = 1 + rng.below(10);
    const auto mu = check::random_measure(rng, k, d, false);
    Tensor shifted = check::random_normal(rng, {k, d}, 1.0 + rng.uniform());
    for (std::size_t r = 0; r < k; ++r) shifted.at(r, 0) += rng.normal();
    const EmpiricalMeasure nu(shifted);
    RngStream map_rng = rng.child(static_cast<std::uint64_t>(i));
    SphereMap map = SphereMap::near_identity(d, map_rng);
    DswConfig dc;
    dc.base.n_projections = 20;
    dc.base.seed = static_cast<std::uint64_t>(i);
    dc.lambda_c = 1.0;
    dc.ascent_steps = 20;
    dc.ascent_lr = 1e-2;
    dc.eval_projections = 1000;
    const auto r = dsw(mu, nu, dc, map);
    MaxSwConfig mc;
    mc.iterations = 100;
    mc.lr = 0.5;
    mc.restarts = 8;
    mc.seed = static_cast<std::uint64_t>(i);
    const double msw = max_sw(mu, nu, mc).value;
    const double w = exact_wp_oracle(mu, nu, 2.0).value;
    // 1e-12 absorbs rounding when both sides are the same number (d = 1 gives zero stderr).
    lower_fail += r.sliced_value > msw + 3.0 * r.mc_stderr + 1e-12;
    upper_fail += msw > w + 1e-9;
    worst_gap = std::max(worst_gap, msw - w);
  }
  return {lower_fail == 0 && upper_fail == 0,
          fmt("dsw > max_sw + 3se in %d/50, max_sw > W + 1e-9 in %d/50 (max max_sw - W = %.2e)", lower_fail, upper_fail,
              worst_gap)};
}

Outcome sphere_constant() {
  RngStream rng(4);
  bool ok = true;
  std::string detail;
  for (std::size_t d : {2u, 3u, 10u, 100u}) {
    const std::size_t pairs = 100000;
    const Tensor t = sample_uniform_sphere(rng, 2 * pairs, d);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
      double c = 0.0;
      for (std::size_t j = 0; j < d; ++j) c += t.at(2 * i, j) * t.at(2 * i + 1, j);
      s += std::abs(c);
      s2 += c * c;
    }
    const double m = s / pairs, se = std::sqrt((s2 / pairs - m * m) / pairs);
    const double expected = uniform_sphere_abs_cosine(d);
    const double z = (m - expected) / se;
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt("d=%zu: %.5f vs %.5f (z=%.2f); ", d, m, expected, z);
  }
  const bool two_over_pi = std::abs(uniform_sphere_abs_cosine(2) - 2.0 / std::numbers::pi) < 1e-12;
  return {ok && two_over_pi, detail + (two_over_pi ? "d=2 constant is 2/pi" : "d=2 constant differs from 2/pi")};
}

Outcome gradient_integrity() {
  namespace g = slicedot::grad;
  int failures = 0, checks = 0;
  double worst = 0.0;
  for (const auto& pc : check::primitive_cases()) {
    for (int inst = 0; inst < 20; ++inst) {
      const auto rep = check::check_primitive(pc, inst);
      failures += !rep.ok;
      worst = std::max(worst, rep.worst_rel);
      ++checks;
    }
  }
  RngStream rng(5);
  const std::size_t d = 3, k = 6;
  for (int inst = 0; inst < 20; ++inst) {
    for (const auto& gdef : {DefiningFunction::linear(), DefiningFunction::circular(4.0)}) {
      const Tensor thetas = sample_uniform_sphere(rng, 5, d);
      const Tensor x = check::random_normal(rng, {k, d}), y = check::random_normal(rng, {k, d}, 2.0);
      const double lambda = 0.5 + 5.0 * rng.uniform();
      const SphereMap shape = SphereMap::identity(d);
      const check::Builder build = [&](g::Tape& tape, std::span<const g::Var> v) {
        const g::Var f = shape.forward(v, tape.constant(thetas));
        return dsw_objective(tape.constant(x), tape.constant(y), f, gdef, 2.0, lambda);
      };
      Tensor w = check::random_normal(rng, {d, d}, 0.3);
      for (std::size_t i = 0; i < d; ++i) w.at(i, i) += 1.0;
      const auto rep = check::fd_check({w, check::random_normal(rng, {d}, 0.1)}, build, 1e-5, 1e-4);
      failures += !rep.ok;
      worst = std::max(worst, rep.worst_rel);
      ++checks;
    }
  }
  return {failures == 0, fmt("%d/%d instance checks failed (primitives x20, DSW objective linear+circular x20), "
                             "worst rel err %.2e",
                             failures, checks, worst)};
}

Outcome gauss_demo() {
  cli::GaussDemoOptions opt;
  opt.out = check::scratch_dir("acceptance_gauss_demo");
  const auto t0 = Clock::now();
  const auto rows = cli::run_gauss_demo(opt);
  const double s = seconds_since(t0);
  const auto& r0 = rows[0];
  const auto& r50 = rows[1];
  const auto& r1000 = rows[2];
  const bool between = r50.reg_estimate < std::max(r0.reg_estimate, r1000.reg_estimate) &&
                       r50.reg_estimate > std::min(r0.reg_estimate, r1000.reg_estimate);
  const bool ok = r0.reg_estimate > 0.9 && r1000.axis_fraction >= 0.9 && between && s < 120.0;
  return {ok, fmt("reg(0)=%.4f, reg(50)=%.4f, reg(1000)=%.4f, axis share at 1000=%.3f, %.1f s", r0.reg_estimate,
                  r50.reg_estimate, r1000.reg_estimate, r1000.axis_fraction, s)};
}

Outcome lambda_sweep() {
  cli::LambdaSweepOptions opt;
  opt.out = check::scratch_dir("acceptance_lambda_sweep");
  const auto rows = cli::run_lambda_sweep(opt);
  bool monotone = true;
  std::string values;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].statistic > rows[i - 1].statistic + 0.05) monotone = false;
    values += fmt("%g:%.3f ", rows[i].lambda, rows[i].statistic);
  }
  const bool ok = monotone && rows.front().statistic > 0.9 && rows.back().statistic < 0.2;
  return {ok, "statistic by lambda " + values + (monotone ? "(non-increasing within 0.05)" : "(not monotone)")};
}

Outcome max_sw_analytic() {
  RngStream rng(8);
  const auto [x, y] = datasets::gauss2d(rng, 10000);
  MaxSwConfig cfg;
  cfg.iterations = 100;
  cfg.lr = 0.5;
  cfg.restarts = 4;
  const auto r = max_sw(x, y, cfg);
  const double target = std::sqrt(5.0) - std::sqrt(2.0);
  const double cos_e1 = std::abs(r.direction[0]);
  return {cos_e1 > 0.99 && std::abs(r.value - target) <= 0.05,
          fmt("|cos(theta, e1)| = %.5f, value = %.4f vs %.4f", cos_e1, r.value, target)};
}

Outcome mede_ring() {
  std::vector<double> ratio;
  int dsw_not_worse = 0;
  double slowest = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    double dsw_final = 0.0;
    for (const char* distance : {"dsw", "sw"}) {
      cli::TrainOptions opt;
      opt.out = check::scratch_dir(fmt("acceptance_mede_%s_%llu", distance, static_cast<unsigned long long>(seed)));
      opt.dataset = "ring8";
      opt.distance = distance;
      opt.n = 10;
      opt.lambda = 10.0;
      opt.iters = 3000;
      opt.eval_every = 0;
      opt.eval_samples = 2000;
      opt.seed = seed;
      const auto t0 = Clock::now();
      const auto s = cli::run_mede(opt);
      slowest = std::max(slowest, seconds_since(t0));
      if (std::string(distance) == "dsw") {
        ratio.push_back(s.final_eval / s.initial_eval);
        dsw_final = s.final_eval;
        per_seed += fmt("seed %llu: dsw %.4f -> %.4f", static_cast<unsigned long long>(seed), s.initial_eval,
                        s.final_eval);
      } else {
        dsw_not_worse += dsw_final <= s.final_eval;
        per_seed += fmt(", sw final %.4f; ", s.final_eval);
      }
    }
  }
  const double med = median(ratio);
  const bool hard = med <= 0.2 && slowest < 600.0;
  const bool soft = dsw_not_worse >= 2;
  return {hard && soft, fmt("median final/initial = %.3f (<= 0.2: %s); DSW <= SW in %d/3 seeds (need 2); slowest run "
                            "%.0f s; ",
                            med, med <= 0.2 ? "yes" : "no", dsw_not_worse, slowest) +
                            per_seed};
}

Outcome complexity() {
  cli::BenchOptions opt;
  opt.out = check::scratch_dir("acceptance_bench");
  opt.distances = {"sw", "dsw"};
  opt.sizes = {512, 1024, 2048, 4096, 8192};
  const auto rows = cli::run_bench(opt);
  const double sw_slope = cli::loglog_slope(rows, "sw", 512, 8192);
  const double dsw_slope = cli::loglog_slope(rows, "dsw", 512, 8192);
  return {sw_slope <= 1.25 && dsw_slope <= 1.25, fmt("log-log slope sw %.3f, dsw %.3f", sw_slope, dsw_slope)};
}

Outcome statistical_rate() {
  const std::vector<std::size_t> sizes{50, 200, 800, 3200};
  const auto r = check::two_sample_dsw_rate(sizes, 20, 5);
  std::string meds;
  for (std::size_t i = 0; i < sizes.size(); ++i) meds += fmt("n=%zu:%.4f ", sizes[i], r.medians[i]);
  return {r.slope >= -0.75 && r.slope <= -0.25, fmt("slope %.3f; medians ", r.slope) + meds};
}

// Runs the command twice into separate directories and compares stdout and
// every output file with timing columns removed.
bool rerun_identical(const std::string& name, std::vector<std::string> args, bool has_out) {
  std::string outputs[2];
  std::map<std::string, std::string> files[2];
  for (int i = 0; i < 2; ++i) {
    auto a = args;
    a.insert(a.begin(), "slicedot");
    fs::path dir;
    if (has_out) {
      dir = check::scratch_dir(fmt("acceptance_rerun_%s_%d", name.c_str(), i));
      a.insert(a.end(), {"--out", dir.string()});
    }
    std::ostringstream out, err;
    if (cli::run_cli(a, out, err) != cli::kExitOk) return false;
    outputs[i] = check::strip_timing_json(out.str());
    if (has_out) files[i] = check::snapshot(dir);
  }
  return outputs[0] == outputs[1] && files[0] == files[1] && (!has_out || !files[0].empty());
}

Outcome determinism() {
  const fs::path dir = check::scratch_dir("acceptance_inputs");
  write_file(dir / "a.csv", "x,y\n0,0\n1,2\n3,1\n-1,0\n2,2\n0.5,0.25\n");
  write_file(dir / "b.csv", "x,y\n1,0\n0,2\n4,4\n-2,1\n0,0\n1,1\n");
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  std::vector<std::string> failed;
  int total = 0;
  const auto check_cmd = [&](const std::string& name, std::vector<std::string> args, bool has_out) {
    ++total;
    if (!rerun_identical(name, std::move(args), has_out)) failed.push_back(name);
  };
  for (const char* d : {"sw", "gsw", "maxsw", "maxgswnn", "dsw", "dgsw", "exact"})
    check_cmd(std::string("dist-") + d, {"dist", a, b, "--distance", d, "--n", "10", "--lambda", "1000", "--seed", "7"},
              false);
  check_cmd("gauss-demo", {"gauss-demo", "--steps", "50", "--seed", "3"}, true);
  check_cmd("lambda-sweep", {"lambda-sweep", "--d", "50", "--k", "100", "--steps", "20", "--seed", "3"}, true);
  check_cmd("mede", {"mede", "--iters", "100", "--batch", "128", "--eval-every", "50", "--eval-samples", "300",
                     "--seed", "3"},
            true);
  check_cmd("jci", {"jci", "--iters", "100", "--batch", "128", "--eval-every", "50", "--eval-samples", "300",
                    "--seed", "3"},
            true);
  check_cmd("bench", {"bench", "--k", "64", "256", "--repeats", "1", "--seed", "3"}, true);
  std::string detail = fmt("%d/%d commands bit-identical on rerun", total - static_cast<int>(failed.size()), total);
  for (const auto& f : failed) detail += " [differs: " + f + "]";
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1D OT oracle equivalence", oracle_equivalence},
      {"metric axioms under frozen directions", metric_axioms},
      {"sandwich dsw <= max_sw <= W", sandwich},
      {"sphere constant E|theta^T theta'|", sphere_constant},
      {"gradient integrity", gradient_integrity},
      {"gauss-demo slice distributions", gauss_demo},
      {"lambda sweep concentration", lambda_sweep},
      {"max-SW analytic Gaussian pair", max_sw_analytic},
      {"MEDE on ring8", mede_ring},
      {"complexity slope", complexity},
      {"two-sample statistical rate", statistical_rate},
      {"CLI determinism", determinism},
  };
  std::ofstream report("acceptance_report.txt");
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    char line[1024];
    std::snprintf(line, sizeof line, "%s %zu: %s -- %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                  criteria[i].first, o.detail.c_str(), seconds_since(t0));
    std::fputs(line, stdout);
    std::fflush(stdout);
    report << line << std::flush;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  report << criteria.size() - static_cast<std::size_t>(failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
