#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "scgd/bench.hpp"
#include "scgd/errors.hpp"

using namespace scgd;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.objective.kind = ObjectiveKind::Ridge;
  cfg.objective.data = {200, 10, 2.0, 5, LabelModel::LinearGaussian, 3};
  cfg.estimator = {EstimatorKind::FiniteDifference, 1};
  cfg.methods = {"full", "uniform", "musketeer-abs"};
  cfg.musketeer.exploration_length = 3;
  cfg.musketeer.lambda = {LambdaSchedule::Kind::Constant, 0.5};
  cfg.schedule.gamma = 1.0;
  cfg.schedule.k0 = 10.0;
  cfg.seeds = {1, 2, 3};
  cfg.budget_passes = 20;
  return cfg;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scgd_test_bench_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("method tokens") {
  CHECK(parse_method("full").policy == PolicyKind::Full);
  CHECK(parse_method("nesterov").smoothing);
  CHECK(parse_method("uniform-is").policy == PolicyKind::UniformIS);
  const auto m = parse_method("musketeer-sqr-is");
  CHECK(m.policy == PolicyKind::MusketeerIS);
  CHECK(m.variant == GainVariant::Sqr);
  CHECK(parse_method("musketeer-abs").variant == GainVariant::Abs);
  CHECK_THROWS_AS(parse_method("musketeer"), InvalidArgument);
  CHECK_THROWS_AS(parse_method("adam"), InvalidArgument);

  CHECK(steps_per_pass(parse_method("full"), 50) == 1);
  CHECK(steps_per_pass(parse_method("uniform"), 50) == 50);
  CHECK(steps_per_pass(parse_method("nesterov"), 50) == 50);

  const auto cfg = small_config();
  const auto nes = resolve_method(parse_method("nesterov"), cfg, 10);
  CHECK(nes.policy == PolicyKind::Full);
  CHECK(nes.estimator.kind == EstimatorKind::GaussianSmoothing);
  CHECK(nes.step_scale == doctest::Approx(0.1));
  CHECK(resolve_method(parse_method("musketeer-abs"), cfg, 10).musketeer.variant == GainVariant::Abs);
}

TEST_CASE("checkpoint grid") {
  CHECK(checkpoint_passes(5, 1.05) == std::vector<Index>{0, 1, 2, 3, 4, 5});
  const auto g = checkpoint_passes(200, 1.05);
  CHECK(g.front() == 0);
  CHECK(g.back() == 200);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] > g[i - 1]);
    CHECK(g[i] <= std::max<Index>(g[i - 1] + 1, static_cast<Index>(std::ceil(g[i - 1] * 1.05))));
  }
  CHECK(checkpoint_passes(100, 2.0) == std::vector<Index>{0, 1, 2, 4, 8, 16, 32, 64, 100});
  CHECK_THROWS_AS(checkpoint_passes(0, 1.05), InvalidArgument);
}

TEST_CASE("aggregation statistics") {
  std::vector<RunRecord> records;
  const double gaps[] = {1.0, 4.0, 2.0, 10.0};
  for (int s = 0; s < 4; ++s) {
    RunRecord r;
    r.method = "m";
    r.seed = static_cast<std::uint64_t>(s + 1);
    r.checkpoints = {{0, 0, 0.0, 5.0, 0.0}, {10, 20, 1.0, gaps[s], 0.0}};
    records.push_back(r);
  }
  RunRecord other;
  other.method = "z";
  other.checkpoints = {{0, 0, 0.0, 7.0, 0.0}};
  records.push_back(other);

  const auto curves = aggregate(records);
  REQUIRE(curves.size() == 2);
  CHECK(curves[0].method == "m");
  CHECK(curves[0].points[0].std == 0.0);
  const auto& p = curves[0].points[1];
  CHECK(p.mean == doctest::Approx(4.25));
  CHECK(p.median == doctest::Approx(3.0));
  // sample variance: (3.25^2 + 0.25^2 + 2.25^2 + 5.75^2) / 3
  CHECK(p.std == doctest::Approx(std::sqrt((10.5625 + 0.0625 + 5.0625 + 33.0625) / 3)));
  CHECK(curves[1].points[0].std == 0.0);

  records[1].checkpoints[1].passes = 2.0;
  CHECK_THROWS_AS(aggregate(records), InvalidArgument);
}

TEST_CASE("CSV round trips") {
  RunRecord r;
  r.method = "uniform";
  r.seed = 7;
  r.checkpoints = {{0, 0, 0.0, 0.1, 0.0}, {50, 100, 1.0, 1.0 / 3.0, 0.0}};
  const std::string text = runs_csv({r});
  CHECK(text.rfind(std::string(kRunsHeader) + "\n", 0) == 0);
  const auto back = parse_runs_csv(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].method == "uniform");
  CHECK(back[0].seed == 7);
  CHECK(back[0].checkpoints[1].gap == 1.0 / 3.0);
  CHECK(back[0].checkpoints[1].queries == 100);
  CHECK(runs_csv(back) == text);

  const auto curves = aggregate({r});
  const std::string agg = aggregate_csv(curves);
  CHECK(aggregate_csv(parse_aggregate_csv(agg)) == agg);

  CHECK_THROWS_AS(parse_runs_csv("a,b\n1,2\n"), ConfigError);
  CHECK_THROWS_AS(parse_runs_csv(std::string(kRunsHeader) + "\nx,1,2\n"), ConfigError);
}

TEST_CASE("svg and hashing") {
  AggregateCurve c{"uniform", {{0, 1.0, 1.0, 0}, {1, 0.1, 0.1, 0}, {2, 0.0, 0.0, 0}}};
  const std::string svg = render_svg({c}, "demo <1>");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("demo &lt;1&gt;") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(render_svg({}, "empty").find("<svg") != std::string::npos);

  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("experiment runs") {
  const auto cfg = small_config();
  const auto a = run_experiment(cfg, 1);
  CHECK_FALSE(a.any_failed());
  REQUIRE(a.records.size() == 9);
  CHECK(a.records[0].method == "full");
  CHECK(a.records[3].method == "uniform");
  CHECK(a.records[4].seed == 2);
  CHECK(a.n == 200);
  CHECK(a.p == 10);
  CHECK(a.mu == doctest::Approx(1.0 / 200));
  CHECK(a.methods.size() == 3);
  CHECK(a.methods[2].final_policy.contains("weights"));

  const auto& u = a.records[3].checkpoints;
  CHECK(u.front().gap > u.back().gap);
  CHECK(u.back().passes == 20.0);
  CHECK(u.back().step == 200);
  CHECK(u.back().queries == 400);
  CHECK(a.records[0].checkpoints.back().step == 20);
  CHECK(a.records[0].checkpoints.back().queries == 400);

  const auto b = run_experiment(cfg, 3);
  CHECK(runs_csv(a.records) == runs_csv(b.records));

  auto bad = cfg;
  bad.schedule.form = ScheduleForm::Poly;
  bad.schedule.alpha = 0.0;
  CHECK_THROWS_AS(run_experiment(bad), InvalidArgument);
  bad.override_conditions = true;
  CHECK_NOTHROW(run_experiment(bad, 1));

  auto wrong = cfg;
  wrong.theta0 = Vector::Zero(3);
  CHECK_THROWS_AS(run_experiment(wrong), DimensionMismatch);

  auto blowup = cfg;
  blowup.methods = {"full"};
  blowup.schedule.gamma = 1e3;
  blowup.override_conditions = true;
  const auto d = run_experiment(blowup, 1);
  CHECK(d.any_failed());
  CHECK(d.records[0].failure.find("diverged") != std::string::npos);
}

TEST_CASE("presets") {
  CHECK(preset_names().size() == 6);
  for (const auto& name : preset_names()) {
    for (const auto& s : preset(name, 0.1)) CHECK_NOTHROW(s.config.validate());
  }
  const auto sweep = preset("sweep-np");
  CHECK(sweep.size() == 12);
  CHECK(sweep[1].name == "sweep-n1000-p50");
  CHECK(sweep[1].config.musketeer.exploration_length == 7);
  CHECK(preset("ridge-zo", 0.01)[0].config.objective.data.n == 100);
  CHECK(preset("ridge-zo", 1e-9)[0].config.objective.data.n == 10);
  CHECK_THROWS_AS(preset("mnist"), InvalidArgument);
  CHECK_THROWS_AS(preset("ridge-zo", 0.0), InvalidArgument);
}

TEST_CASE("reproduce writes one csv and svg per setting") {
  const auto dir = scratch("reproduce");
  ReproduceOptions opt;
  opt.seeds = 3;
  opt.parallel = 1;
  const auto out = reproduce_figure("toy-2d", dir, opt);
  CHECK(out.failures.empty());
  REQUIRE(out.files.size() == 4);
  for (const auto& f : out.files) CHECK(std::filesystem::exists(f));
  const auto runs = parse_runs_csv(read_text(dir / "toy-axis-quadratic.csv"));
  CHECK(runs.size() == 9);

  opt.settings = {"toy-quadratic"};
  opt.methods = {"uniform"};
  const auto one = reproduce_figure("toy-2d", dir / "one", opt);
  CHECK(one.files.size() == 2);
  CHECK(parse_runs_csv(read_text(dir / "one" / "toy-quadratic.csv")).size() == 3);

  opt.methods = {"nothing"};
  CHECK_THROWS_AS(reproduce_figure("toy-2d", dir / "none", opt), InvalidArgument);
  std::filesystem::remove_all(dir);
}
