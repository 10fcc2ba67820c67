#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scgd/cli.hpp"
#include "scgd/errors.hpp"

using namespace scgd;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "scgd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scgd_test_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

const char* kSmall =
    "# small ridge\n"
    "objective = ridge\n"
    "n = 200\n"
    "p = 10\n"
    "block_size = 5\n"
    "alpha_block = 2\n"
    "methods = full, uniform, musketeer-avg\n"
    "gamma = 1\n"
    "seeds = 2\n"
    "budget_passes = 10\n";

}  // namespace

TEST_CASE("config text parsing") {
  const auto map = parse_config_text("eta = 1\n\n  # comment\nn = 5  # trailing\n");
  CHECK(map.size() == 2);
  CHECK(map.at("n") == "5");
  CHECK_THROWS_AS(parse_config_text("n = 1\nn = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("a_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
  try {
    config_from_map(parse_config_text("n = 10\nbogus = 3\n"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("defaults and round trip") {
  const auto cfg = config_from_map({});
  CHECK(cfg.objective.kind == ObjectiveKind::Ridge);
  CHECK(cfg.objective.data.n == 10000);
  CHECK(cfg.objective.data.p == 250);
  CHECK(cfg.objective.data.seed == 7);
  CHECK(cfg.musketeer.exploration_length == 15);
  CHECK(cfg.methods.size() == 6);
  CHECK(cfg.seeds.size() == 20);
  CHECK(cfg.seeds.front() == 1);
  CHECK(cfg.schedule.gamma == 3.0);

  const auto map = config_to_map(cfg);
  CHECK(map.at("exploration_length") == "15");
  CHECK(config_to_map(config_from_map(map)) == map);

  auto custom = parse_config_text(kSmall);
  custom["lambda"] = "inverse-log";
  custom["theta0"] = "1,2,3,4,5,6,7,8,9,10";
  custom["lr_form"] = "explicit";
  custom["lr_table"] = "0.5,0.25";
  const auto c = config_from_map(custom);
  CHECK(c.musketeer.lambda.kind == LambdaSchedule::Kind::InverseLog);
  CHECK((*c.theta0)[9] == 10.0);
  CHECK(c.schedule.table.size() == 2);
  CHECK(config_to_map(config_from_map(config_to_map(c))) == config_to_map(c));
}

TEST_CASE("config validation names the key") {
  auto expect_key = [](ConfigMap map, const std::string& key) {
    try {
      config_from_map(map);
      FAIL("expected ConfigError for " << key);
    } catch (const ConfigError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(key) != std::string::npos, e.what());
    }
  };
  expect_key({{"n", "-5"}}, "n");
  expect_key({{"block_size", "7"}}, "block_size");
  expect_key({{"eta", "abc"}}, "eta");
  expect_key({{"lambda", "1.5"}}, "lambda");
  expect_key({{"methods", "uniform,sgd"}}, "methods");
  expect_key({{"estimator", "adam"}}, "estimator");
  expect_key({{"theta0", "1,2"}}, "theta0");
  expect_key({{"seeds", "0"}}, "seeds");
  CHECK_NOTHROW(config_from_map({{"objective", "quadratic"}, {"p", "3"}, {"methods", "uniform"}}));
}

TEST_CASE("reference lists every key") {
  const auto ref = config_reference();
  for (const auto& [key, value] : config_to_map(config_from_map({}))) {
    CHECK_MESSAGE(ref.find(key) != std::string::npos, key);
  }
}

TEST_CASE("subcommands") {
  const auto dir = scratch("cmds");
  const auto config = dir / "small.cfg";
  write_text(config, kSmall);

  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"--version"}).out.find(kVersion) != std::string::npos);
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);

  const auto v = cli({"validate", config.string()});
  CHECK(v.code == 0);
  CHECK(v.out.find("all conditions PASS") != std::string::npos);
  const auto flat = dir / "flat.cfg";
  write_text(flat, std::string(kSmall) + "lr_form = poly\nlr_alpha = 0\n");
  const auto vf = cli({"validate", flat.string()});
  CHECK(vf.code == 2);
  CHECK(vf.out.find("FAIL") != std::string::npos);

  const auto o = cli({"oracle", config.string()});
  CHECK(o.code == 0);
  CHECK(o.out.find("f* = ") != std::string::npos);

  const auto missing = cli({"run", (dir / "absent.cfg").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("absent.cfg") != std::string::npos);

  const auto out1 = dir / "out1";
  const auto r = cli({"run", config.string(), "-o", out1.string(), "--parallel", "1"});
  CHECK(r.code == 0);
  for (const char* f : {"runs.csv", "aggregate.csv", "gap.svg", "manifest.json"}) {
    CHECK(std::filesystem::exists(out1 / f));
  }
  const auto manifest = nlohmann::json::parse(read_text(out1 / "manifest.json"));
  CHECK(manifest["derived"]["p"] == 10);
  CHECK(manifest["artifacts"]["runs.csv"] == sha256_hex(read_text(out1 / "runs.csv")));
  CHECK(manifest["methods"].size() == 3);
  CHECK(manifest["methods"][1]["steps_per_pass"] == 10);

  // replaying the manifest reproduces the runs byte for byte
  const auto out2 = dir / "out2";
  CHECK(cli({"run", (out1 / "manifest.json").string(), "-o", out2.string()}).code == 0);
  CHECK(read_text(out1 / "runs.csv") == read_text(out2 / "runs.csv"));

  const auto out3 = dir / "out3";
  CHECK(cli({"run", config.string(), "-o", out3.string(), "--seeds", "1", "--methods", "uniform"}).code == 0);
  const auto runs = parse_runs_csv(read_text(out3 / "runs.csv"));
  REQUIRE(runs.size() == 1);
  CHECK(runs[0].method == "uniform");
  CHECK(cli({"run", config.string(), "-o", out3.string(), "--methods", "nesterov"}).code == 2);

  const auto svg = dir / "plots" / "g.svg";
  CHECK(cli({"plot", (out1 / "runs.csv").string(), svg.string()}).code == 0);
  CHECK(std::filesystem::exists(svg));
  CHECK(cli({"plot", (out1 / "aggregate.csv").string(), svg.string()}).code == 0);
  write_text(dir / "junk.csv", "x,y\n1,2\n");
  CHECK(cli({"plot", (dir / "junk.csv").string(), svg.string()}).code == 2);

  const auto blow = dir / "blow.cfg";
  write_text(blow, std::string(kSmall) + "lr_form = explicit\nlr_table = 1000\noverride_conditions = true\n");
  CHECK(cli({"run", blow.string(), "-o", (dir / "blow").string(), "--methods", "full"}).code == 3);

  const auto rep = cli({"reproduce", "toy-2d", "-o", (dir / "rep").string(), "--seeds", "2",
                        "--settings", "toy-quadratic"});
  CHECK(rep.code == 0);
  CHECK(std::filesystem::exists(dir / "rep" / "toy-quadratic.csv"));
  CHECK(cli({"reproduce", "nope", "-o", (dir / "rep").string()}).code == 2);
  std::filesystem::remove_all(dir);
}
