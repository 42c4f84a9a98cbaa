#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "commands.hpp"
#include "files.hpp"
#include "slicedot/io.hpp"

using namespace slicedot;
using namespace slicedot::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "slicedot");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

void write_points(const fs::path& p, const std::string& body) { write_file(p, body); }

const std::string kTriangle = "x,y\n0,0\n1,0\n0,1\n";
const std::string kShifted = "x,y\n1,0\n2,0\n1,1\n";

}  // namespace

TEST(Cli, DistSameFileIsZero) {
  const fs::path dir = check::scratch_dir("cli_same");
  write_points(dir / "a.csv", kTriangle);
  const auto r = run({"dist", (dir / "a.csv").string(), (dir / "a.csv").string(), "--distance", "sw"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["value"].get<double>(), 0.0);
  EXPECT_EQ(j["distance"], "sw");
  EXPECT_TRUE(j.contains("wall_ms"));
  EXPECT_EQ(r.out.find('\n'), r.out.size() - 1);
}

TEST(Cli, DistExactOnTranslatedTriangles) {
  const fs::path dir = check::scratch_dir("cli_exact");
  write_points(dir / "a.csv", kTriangle);
  write_points(dir / "b.csv", kShifted);
  const auto r = run({"dist", (dir / "a.csv").string(), (dir / "b.csv").string(), "--distance", "exact"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["value"].get<double>(), 1.0, 1e-12);
}

TEST(Cli, DistAcceptsSwtInput) {
  const fs::path dir = check::scratch_dir("cli_swt");
  save_measure(dir / "a.swt", parse_measure_csv(kTriangle), MeasureFormat::swt);
  write_points(dir / "b.csv", kShifted);
  const auto r = run({"dist", (dir / "a.swt").string(), (dir / "b.csv").string(), "--distance", "exact"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["value"].get<double>(), 1.0, 1e-12);
}

TEST(Cli, DistIsDeterministicForEveryDistance) {
  const fs::path dir = check::scratch_dir("cli_det");
  write_points(dir / "a.csv", "0,0\n1,2\n3,1\n-1,0\n2,2\n");
  write_points(dir / "b.csv", "1,0\n0,2\n4,4\n-2,1\n0,0\n");
  for (const char* d : {"sw", "gsw", "maxsw", "maxgswnn", "dsw", "dgsw", "exact"}) {
    const std::vector<std::string> args{"dist", (dir / "a.csv").string(), (dir / "b.csv").string(), "--distance", d,
                                        "--lambda", "1000", "--n", "10", "--seed", "7"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, kExitOk) << d << ": " << a.err;
    EXPECT_EQ(check::strip_timing_json(a.out), check::strip_timing_json(b.out)) << d;
  }
}

TEST(Cli, DswReportsExtras) {
  const fs::path dir = check::scratch_dir("cli_extras");
  write_points(dir / "a.csv", "0,0\n1,2\n3,1\n");
  write_points(dir / "b.csv", "1,0\n0,2\n4,4\n");
  const auto r = run({"dist", (dir / "a.csv").string(), (dir / "b.csv").string(), "--distance", "dsw"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto extras = nlohmann::json::parse(r.out)["extras"];
  for (const char* key : {"reg_estimate", "dual_value_without_constant", "mc_stderr", "lambda_c", "ascent_steps"})
    EXPECT_TRUE(extras.contains(key)) << key;
}

TEST(Cli, UsageErrorsExitTwo) {
  const fs::path dir = check::scratch_dir("cli_usage");
  write_points(dir / "a.csv", kTriangle);
  write_points(dir / "bad.csv", "0,0\n1\n");
  write_points(dir / "three.csv", "0,0,0\n");
  const std::string a = (dir / "a.csv").string();
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"nope"}).code, kExitUsage);
  EXPECT_EQ(run({"dist", a}).code, kExitUsage);
  EXPECT_EQ(run({"dist", a, a, "--distance", "bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"dist", a, (dir / "missing.csv").string()}).code, kExitUsage);
  EXPECT_EQ(run({"dist", a, (dir / "bad.csv").string()}).code, kExitUsage);
  EXPECT_EQ(run({"dist", a, (dir / "three.csv").string()}).code, kExitUsage);
  EXPECT_EQ(run({"dist", a, a, "--n", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"dist", a, a, "--distance", "gsw", "--r", "-1"}).code, kExitUsage);
  EXPECT_EQ(run({"dist", a, a, "--lambda", "-3", "--distance", "dsw"}).code, kExitUsage);
  EXPECT_EQ(run({"mede", "--dataset", "mnist", "--out", (dir / "o").string()}).code, kExitUsage);
  EXPECT_EQ(run({"mede", "--batch", "1", "--iters", "0", "--out", (dir / "o").string()}).code, kExitUsage);
  EXPECT_EQ(run({"dist", "--help"}).code, kExitOk);
}

TEST(Cli, NonFiniteInputIsRejected) {
  const fs::path dir = check::scratch_dir("cli_nan");
  write_points(dir / "a.csv", kTriangle);
  write_points(dir / "nan.csv", "0,0\nnan,1\n2,2\n");
  const auto r = run({"dist", (dir / "a.csv").string(), (dir / "nan.csv").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, ExecutableExitCodes) {
  const fs::path dir = check::scratch_dir("cli_exe");
  write_points(dir / "a.csv", kTriangle);
  const std::string tool = SLICEDOT_TOOL_PATH;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((tool + " " + args + " > " + (dir / "out.txt").string() + " 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  const std::string a = (dir / "a.csv").string();
  EXPECT_EQ(status("dist " + a + " " + a), kExitOk);
  EXPECT_EQ(nlohmann::json::parse(read_file(dir / "out.txt"))["value"].get<double>(), 0.0);
  EXPECT_EQ(status("dist " + a + " " + (dir / "nothing.csv").string()), kExitUsage);
  EXPECT_EQ(status("dist " + a + " " + a + " --distance nope"), kExitUsage);
  EXPECT_EQ(status(""), kExitUsage);
}

TEST(Cli, MedeWithZeroIterationsKeepsInitialModel) {
  const fs::path dir = check::scratch_dir("cli_mede0");
  const auto r = run({"mede", "--iters", "0", "--eval-samples", "200", "--out", dir.string(), "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(read_file(dir / "model.swt"), read_file(dir / "model_init.swt"));
  const std::string log = read_file(dir / "log.csv");
  EXPECT_EQ(log.substr(0, log.find('\n')), "iteration,wall_ms,loss,eval_metric");
  const std::string samples = read_file(dir / "samples.csv");
  EXPECT_EQ(samples.substr(0, samples.find('\n')), "x0,x1");
}

TEST(Cli, MedeAndJciRerunsAreIdentical) {
  for (const char* cmd : {"mede", "jci"}) {
    const fs::path a = check::scratch_dir(std::string("cli_rerun_a_") + cmd);
    const fs::path b = check::scratch_dir(std::string("cli_rerun_b_") + cmd);
    const std::vector<std::string> common{cmd, "--iters", "20", "--batch", "64", "--eval-every", "10",
                                          "--eval-samples", "100", "--seed", "5"};
    auto args_a = common, args_b = common;
    args_a.insert(args_a.end(), {"--out", a.string()});
    args_b.insert(args_b.end(), {"--out", b.string()});
    const auto ra = run(args_a), rb = run(args_b);
    ASSERT_EQ(ra.code, kExitOk) << ra.err;
    ASSERT_EQ(rb.code, kExitOk) << rb.err;
    EXPECT_EQ(check::snapshot(a), check::snapshot(b)) << cmd;
    EXPECT_EQ(check::strip_timing_json(ra.out), check::strip_timing_json(rb.out)) << cmd;
    if (std::string(cmd) == "jci") {
      EXPECT_TRUE(fs::exists(a / "encoder.swt"));
      const std::string log = read_file(a / "log.csv");
      EXPECT_EQ(log.substr(0, log.find('\n')), "iteration,wall_ms,loss,eval_metric,reconstruction");
    }
  }
}

TEST(Cli, GaussDemoAndSweepWriteHeadedOutputs) {
  const fs::path dir = check::scratch_dir("cli_figs");
  auto r = run({"gauss-demo", "--steps", "5", "--n", "10", "--out", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string points = read_file(dir / "gauss_demo.csv");
  EXPECT_EQ(points.substr(0, points.find('\n')), "lambda,x,y");
  EXPECT_EQ(std::count(points.begin(), points.end(), '\n'), 3001);
  const std::string summary = read_file(dir / "gauss_demo_summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "lambda,reg_estimate,axis_fraction,sliced_value,wall_ms");
  EXPECT_EQ(read_file(dir / "gauss_demo.svg").substr(0, 4), "<svg");
  r = run({"lambda-sweep", "--d", "20", "--k", "50", "--steps", "3", "--out", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string sweep = read_file(dir / "lambda_sweep.csv");
  EXPECT_EQ(sweep.substr(0, sweep.find('\n')), "lambda,a_n,sliced_value,wall_ms");
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 6);
}

TEST(Cli, BenchHasOneRowPerCell) {
  const fs::path dir = check::scratch_dir("cli_bench");
  const auto r = run({"bench", "--distance", "sw", "dsw", "--k", "64", "128", "256", "--repeats", "1", "--out",
                      dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = read_file(dir / "bench.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "distance,k,N,wall_ms");
  std::set<std::pair<std::string, std::string>> cells;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    cells.insert({line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1)});
    ++rows;
  }
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(cells.size(), 6u);
}

TEST(Cli, DoublingProjectionsRoughlyDoublesSwTime) {
  BenchOptions opt;
  opt.out = check::scratch_dir("cli_bench_n");
  opt.distances = {"sw"};
  opt.sizes = {2048};
  opt.repeats = 7;
  opt.n = 200;
  const double t1 = run_bench(opt).front().wall_ms;
  opt.n = 400;
  const double t2 = run_bench(opt).front().wall_ms;
  EXPECT_GE(t2 / t1, 1.6);
  EXPECT_LE(t2 / t1, 2.6);
}

TEST(Cli, LogLogSlopeOfSyntheticRows) {
  std::vector<BenchRow> rows;
  for (std::size_t k : {512u, 1024u, 2048u, 4096u}) rows.push_back({"sw", k, 10, 0.003 * static_cast<double>(k)});
  rows.push_back({"sw", 64, 10, 99.0});
  EXPECT_NEAR(loglog_slope(rows, "sw", 512, 8192), 1.0, 1e-12);
}
