#include "scgd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "scgd/errors.hpp"
#include "scgd/format.hpp"
#include "scgd/rng.hpp"

namespace scgd {

namespace {

struct KeyInfo {
  const char* key;
  const char* fallback;
  const char* note;
};

// clang-format off
constexpr KeyInfo kKeys[] = {
  {"objective",           "ridge",              "ridge | logistic | quadratic | axis-quadratic"},
  {"n",                   "10000",              "samples of the synthetic data"},
  {"p",                   "250",                "dimension (also the toy dimension)"},
  {"alpha_block",         "5",                  "group variance (k+1)^-alpha"},
  {"block_size",          "10",                 "columns per variance group, must divide p"},
  {"data_seed",           "7",                  "seed of the synthetic data"},
  {"data_file",           "",                   "CSV x1..xp,y replacing the generator"},
  {"mu",                  "1/n",                "regularization, 1/n or a number"},
  {"estimator",           "finite-difference",  "finite-difference | first-order"},
  {"batch_size",          "1",                  "samples per gradient estimate"},
  {"methods",             "full,uniform,nesterov,musketeer-avg,musketeer-abs,musketeer-sqr",
                                                "comma list: full nesterov uniform uniform-is musketeer-{avg,abs,sqr}[-is]"},
  {"exploration_length",  "auto",               "T, auto = floor(sqrt(p))"},
  {"normalization",       "softmax",            "softmax | l1"},
  {"eta",                 "1",                  "softmax temperature"},
  {"lambda",              "0.5",                "mixture weight in [0,1] or inverse-log = min(1, 1/log(n+e))"},
  {"lr_form",             "poly-offset",        "poly-offset gamma/(t+k0) | poly gamma*t^-lr_alpha | explicit"},
  {"gamma",               "3",                  "learning-rate scale"},
  {"k0",                  "10",                 "learning-rate offset"},
  {"lr_alpha",            "1",                  "exponent of the poly form, in [0,1]"},
  {"lr_table",            "",                   "comma list of rates for the explicit form"},
  {"smoothing",           "sqrt-gamma",         "h_t: sqrt-gamma or a constant"},
  {"is_scaling",          "normalized",         "normalized g/(p d_k) | raw g/d_k"},
  {"seeds",               "20",                 "number of runs per method"},
  {"base_seed",           "1",                  "seeds are base_seed .. base_seed+seeds-1"},
  {"budget_passes",       "100",                "normalized passes per run"},
  {"checkpoint_growth",   "1.05",               "pass grid growth factor"},
  {"theta0",              "zeros",              "zeros or a comma list of p numbers"},
  {"override_conditions", "false",              "run even when the step-size conditions fail"},
  {"timing",              "false",              "record wall-clock ms (breaks byte-identical CSVs)"},
};
// clang-format on

const KeyInfo* find_key(const std::string& key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

std::string get(const ConfigMap& map, const char* key) {
  const auto it = map.find(key);
  return it != map.end() ? it->second : find_key(key)->fallback;
}

bool parse_bool(const std::string& v, const char* key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& v, const char* key) {
  std::vector<double> out;
  for (auto token : split(v, ',')) out.push_back(parse_double(trim(token), key));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

template <class T>
T enum_value(const std::string& v, const char* key,
             std::initializer_list<std::pair<const char*, T>> options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(std::string(key) + ": unknown value '" + v + "' (expected " + names + ")");
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!find_key(key)) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!map.emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return map;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    ConfigMap map;
    try {
      const auto j = nlohmann::json::parse(text);
      for (const auto& [key, value] : j.at("config").items()) {
        if (!find_key(key)) throw ConfigError("manifest " + path.string() + ": unknown key '" + key + "'");
        map[key] = value.get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("manifest " + path.string() + ": " + e.what());
    }
    return map;
  }
  try {
    return parse_config_text(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentConfig config_from_map(const ConfigMap& map) {
  for (const auto& [key, value] : map) {
    if (!find_key(key)) throw ConfigError("unknown key '" + key + "'");
  }
  auto integer = [&](const char* key) { return parse_integer(get(map, key), key); };
  auto real = [&](const char* key) { return parse_double(get(map, key), key); };

  ExperimentConfig cfg;
  auto& obj = cfg.objective;
  obj.kind = enum_value<ObjectiveKind>(get(map, "objective"), "objective",
                                       {{"ridge", ObjectiveKind::Ridge},
                                        {"logistic", ObjectiveKind::Logistic},
                                        {"quadratic", ObjectiveKind::Quadratic},
                                        {"axis-quadratic", ObjectiveKind::AxisQuadratic}});
  obj.data.n = integer("n");
  obj.data.p = integer("p");
  obj.data.alpha = real("alpha_block");
  obj.data.block_size = integer("block_size");
  obj.data.seed = static_cast<std::uint64_t>(integer("data_seed"));
  obj.dim = obj.data.p;
  obj.data_file = get(map, "data_file");
  if (obj.data.p < 1) throw ConfigError("p: must be >= 1");
  if ((obj.kind == ObjectiveKind::Ridge || obj.kind == ObjectiveKind::Logistic) && obj.data_file.empty()) {
    if (obj.data.n < 1) throw ConfigError("n: must be >= 1");
    if (obj.data.block_size < 1 || obj.data.p % obj.data.block_size != 0) {
      throw ConfigError("block_size: must be positive and divide p");
    }
    if (obj.data.alpha < 0) throw ConfigError("alpha_block: must be >= 0");
  }
  if (const auto mu = get(map, "mu"); mu == "1/n") {
    obj.mu_rule = MuRule::OneOverN;
  } else {
    obj.mu_rule = MuRule::Fixed;
    obj.mu = parse_double(mu, "mu");
    if (obj.mu < 0) throw ConfigError("mu: must be >= 0");
  }

  cfg.estimator.kind = enum_value<EstimatorKind>(get(map, "estimator"), "estimator",
                                                 {{"finite-difference", EstimatorKind::FiniteDifference},
                                                  {"first-order", EstimatorKind::FirstOrder}});
  cfg.estimator.batch_size = integer("batch_size");
  if (cfg.estimator.batch_size < 1) throw ConfigError("batch_size: must be >= 1");

  const std::string method_list = get(map, "methods");
  for (auto token : split(method_list, ',')) {
    const std::string name(trim(token));
    try {
      parse_method(name);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("methods: ") + e.what());
    }
    cfg.methods.push_back(name);
  }

  auto& mk = cfg.musketeer;
  if (const auto t = get(map, "exploration_length"); t == "auto") {
    mk.exploration_length = static_cast<Index>(std::floor(std::sqrt(static_cast<double>(obj.data.p))));
  } else {
    mk.exploration_length = parse_integer(t, "exploration_length");
  }
  mk.normalization = enum_value<Normalization>(get(map, "normalization"), "normalization",
                                               {{"softmax", Normalization::Softmax}, {"l1", Normalization::L1}});
  mk.eta = real("eta");
  if (const auto lam = get(map, "lambda"); lam == "inverse-log") {
    mk.lambda = {LambdaSchedule::Kind::InverseLog, 0.0};
  } else {
    mk.lambda = {LambdaSchedule::Kind::Constant, parse_double(lam, "lambda")};
  }
  if (mk.exploration_length < 1) throw ConfigError("exploration_length: must be >= 1");
  if (!(mk.eta > 0)) throw ConfigError("eta: must be > 0");
  if (!(mk.lambda.value >= 0 && mk.lambda.value <= 1)) throw ConfigError("lambda: must lie in [0, 1]");

  auto& sc = cfg.schedule;
  sc.form = enum_value<ScheduleForm>(get(map, "lr_form"), "lr_form",
                                     {{"poly-offset", ScheduleForm::PolyOffset},
                                      {"poly", ScheduleForm::Poly},
                                      {"explicit", ScheduleForm::Explicit}});
  sc.gamma = real("gamma");
  sc.k0 = real("k0");
  sc.alpha = real("lr_alpha");
  if (const auto table = get(map, "lr_table"); !table.empty()) sc.table = parse_list(table, "lr_table");
  if (const auto h = get(map, "smoothing"); h == "sqrt-gamma") {
    sc.smoothing = {SmoothingRule::Kind::SqrtGamma, 0.0};
  } else {
    sc.smoothing = {SmoothingRule::Kind::Constant, parse_double(h, "smoothing")};
  }
  if (sc.form == ScheduleForm::Explicit && sc.table.empty()) throw ConfigError("lr_table: required by lr_form = explicit");
  if (sc.form != ScheduleForm::Explicit && !(sc.gamma > 0)) throw ConfigError("gamma: must be > 0");
  if (!(sc.k0 >= 0)) throw ConfigError("k0: must be >= 0");
  if (!(sc.alpha >= 0 && sc.alpha <= 1)) throw ConfigError("lr_alpha: must lie in [0, 1]");
  for (double g : sc.table) {
    if (!(g > 0)) throw ConfigError("lr_table: rates must be > 0");
  }
  if (sc.smoothing.kind == SmoothingRule::Kind::Constant && !(sc.smoothing.value > 0)) {
    throw ConfigError("smoothing: constant h must be > 0");
  }

  cfg.is_scaling = enum_value<IsScaling>(get(map, "is_scaling"), "is_scaling",
                                         {{"normalized", IsScaling::Normalized}, {"raw", IsScaling::Raw}});
  const auto seeds = integer("seeds");
  const auto base = integer("base_seed");
  if (seeds < 1) throw ConfigError("seeds: must be >= 1");
  if (base < 0) throw ConfigError("base_seed: must be >= 0");
  for (long long i = 0; i < seeds; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(base + i));
  cfg.budget_passes = integer("budget_passes");
  if (cfg.budget_passes < 1) throw ConfigError("budget_passes: must be >= 1");
  cfg.checkpoint_growth = real("checkpoint_growth");
  if (!(cfg.checkpoint_growth > 1)) throw ConfigError("checkpoint_growth: must be > 1");
  if (const auto t0 = get(map, "theta0"); t0 != "zeros") {
    const auto values = parse_list(t0, "theta0");
    if (static_cast<Index>(values.size()) != obj.data.p) {
      throw ConfigError("theta0: expected " + std::to_string(obj.data.p) + " values, got " +
                        std::to_string(values.size()));
    }
    cfg.theta0 = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  }
  cfg.override_conditions = parse_bool(get(map, "override_conditions"), "override_conditions");
  cfg.timing = parse_bool(get(map, "timing"), "timing");
  return cfg;
}

ConfigMap config_to_map(const ExperimentConfig& cfg) {
  ConfigMap m;
  const auto& obj = cfg.objective;
  static const char* objective_names[] = {"ridge", "logistic", "quadratic", "axis-quadratic"};
  m["objective"] = objective_names[static_cast<int>(obj.kind)];
  m["n"] = std::to_string(obj.data.n);
  m["p"] = std::to_string(obj.kind == ObjectiveKind::Ridge || obj.kind == ObjectiveKind::Logistic
                              ? obj.data.p
                              : obj.dim);
  m["alpha_block"] = format_double(obj.data.alpha);
  m["block_size"] = std::to_string(obj.data.block_size);
  m["data_seed"] = std::to_string(obj.data.seed);
  m["data_file"] = obj.data_file.string();
  m["mu"] = obj.mu_rule == MuRule::OneOverN ? "1/n" : format_double(obj.mu);
  m["estimator"] = cfg.estimator.kind == EstimatorKind::FirstOrder ? "first-order" : "finite-difference";
  m["batch_size"] = std::to_string(cfg.estimator.batch_size);
  m["methods"] = join(cfg.methods);
  const auto& mk = cfg.musketeer;
  m["exploration_length"] = std::to_string(mk.exploration_length);
  m["normalization"] = std::string(to_string(mk.normalization));
  m["eta"] = format_double(mk.eta);
  m["lambda"] = mk.lambda.kind == LambdaSchedule::Kind::InverseLog ? "inverse-log" : format_double(mk.lambda.value);
  const auto& sc = cfg.schedule;
  m["lr_form"] = sc.form == ScheduleForm::PolyOffset ? "poly-offset" : sc.form == ScheduleForm::Poly ? "poly" : "explicit";
  m["gamma"] = format_double(sc.gamma);
  m["k0"] = format_double(sc.k0);
  m["lr_alpha"] = format_double(sc.alpha);
  std::vector<std::string> table;
  for (double g : sc.table) table.push_back(format_double(g));
  m["lr_table"] = join(table);
  m["smoothing"] = sc.smoothing.kind == SmoothingRule::Kind::SqrtGamma ? "sqrt-gamma" : format_double(sc.smoothing.value);
  m["is_scaling"] = cfg.is_scaling == IsScaling::Raw ? "raw" : "normalized";
  m["seeds"] = std::to_string(cfg.seeds.size());
  m["base_seed"] = cfg.seeds.empty() ? "1" : std::to_string(cfg.seeds.front());
  m["budget_passes"] = std::to_string(cfg.budget_passes);
  m["checkpoint_growth"] = format_double(cfg.checkpoint_growth);
  if (cfg.theta0) {
    std::vector<std::string> values;
    for (Index k = 0; k < cfg.theta0->size(); ++k) values.push_back(format_double((*cfg.theta0)[k]));
    m["theta0"] = join(values);
  } else {
    m["theta0"] = "zeros";
  }
  m["override_conditions"] = cfg.override_conditions ? "true" : "false";
  m["timing"] = cfg.timing ? "true" : "false";
  return m;
}

std::string config_reference() {
  std::ostringstream out;
  out << "Config file: one `key = value` per line, '#' starts a comment, unknown keys are errors.\n"
         "A run manifest.json is accepted wherever a config file is.\n\nKeys (default, meaning):\n";
  for (const auto& k : kKeys) {
    std::string key = k.key;
    key.resize(std::max<std::size_t>(key.size() + 1, 21), ' ');
    out << "  " << key << (*k.fallback ? k.fallback : "(empty)") << "\n"
        << std::string(23, ' ') << k.note << "\n";
  }
  out << "\nThe defaults are the zeroth-order ridge benchmark: n = 10000, p = 250, groups of 10\n"
         "columns with variance (k+1)^-5, mu = 1/n, gamma_t = 3/(t+10), T = floor(sqrt(p)) = 15,\n"
         "softmax weights with lambda = 0.5. The first-order benchmarks use gamma_t = 1/t with\n"
         "mini-batches and lambda = inverse-log.\n"
         "\nExit codes: 0 success, 2 configuration or input error, 3 run failure.\n";
  return out.str();
}

namespace {

struct CommonOptions {
  std::string out_dir = "out";
  int seeds = 0;
  double scale = 1.0;
  unsigned parallel = 0;
  std::string methods;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-o,--out", o.out_dir, "output directory (created if absent)");
  cmd->add_option("--seeds", o.seeds, "number of seeds per method")->check(CLI::PositiveNumber);
  cmd->add_option("--scale", o.scale, "multiply the sample count n")->check(CLI::PositiveNumber);
  cmd->add_option("--parallel", o.parallel, "worker threads (default: hardware concurrency)");
  cmd->add_option("--methods", o.methods, "comma list keeping only these methods");
}

std::vector<std::string> tokens(const std::string& list) {
  std::vector<std::string> out;
  if (list.empty()) return out;
  for (auto t : split(list, ',')) out.emplace_back(trim(t));
  return out;
}

ExperimentConfig load_experiment(const std::string& path) {
  return config_from_map(load_config_file(path));
}

void apply_overrides(ExperimentConfig& cfg, const CommonOptions& o) {
  if (o.seeds > 0) {
    const auto base = cfg.seeds.front();
    cfg.seeds.clear();
    for (int i = 0; i < o.seeds; ++i) cfg.seeds.push_back(base + static_cast<std::uint64_t>(i));
  }
  if (o.scale != 1.0) {
    cfg.objective.data.n = std::max<Index>(10, std::llround(static_cast<double>(cfg.objective.data.n) * o.scale));
  }
  if (const auto keep = tokens(o.methods); !keep.empty()) {
    for (const auto& m : keep) {
      if (std::find(cfg.methods.begin(), cfg.methods.end(), m) == cfg.methods.end()) {
        throw ConfigError("--methods: '" + m + "' is not in the config's method list");
      }
    }
    std::erase_if(cfg.methods, [&](const std::string& m) {
      return std::find(keep.begin(), keep.end(), m) == keep.end();
    });
  }
}

nlohmann::json report_json(const ValidationReport& report) {
  auto out = nlohmann::json::array();
  for (const auto& c : report.conditions) {
    out.push_back({{"condition", c.name}, {"verdict", std::string(to_string(c.verdict))}, {"detail", c.detail}});
  }
  return out;
}

int cmd_run(const std::string& config, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_experiment(config);
  apply_overrides(cfg, o);
  const std::filesystem::path dir = o.out_dir;
  std::filesystem::create_directories(dir);

  const ExperimentResult result = run_experiment(cfg, o.parallel);
  std::vector<RunRecord> ok;
  std::copy_if(result.records.begin(), result.records.end(), std::back_inserter(ok),
               [](const RunRecord& r) { return !r.failed; });
  const auto curves = aggregate(ok);
  const std::string runs = runs_csv(result.records);
  const std::string agg = aggregate_csv(curves);
  const std::string svg = render_svg(curves, std::filesystem::path(config).stem().string());
  write_text(dir / "runs.csv", runs);
  write_text(dir / "aggregate.csv", agg);
  write_text(dir / "gap.svg", svg);

  nlohmann::json manifest;
  manifest["tool"] = "scgd";
  manifest["version"] = kVersion;
  manifest["rng"] = "scgd-rng v" + std::to_string(Rng::kVersion);
  manifest["config"] = config_to_map(cfg);
  manifest["derived"] = {{"n", result.n},
                         {"p", result.p},
                         {"mu", result.mu},
                         {"exploration_length", cfg.musketeer.exploration_length},
                         {"f_star", result.optimum.value},
                         {"oracle_gradient_inf_norm", result.optimum.gradient_inf_norm}};
  auto methods = nlohmann::json::array();
  for (const auto& m : result.methods) {
    const auto choice = parse_method(m.method);
    methods.push_back({{"name", m.method},
                       {"steps_per_pass", steps_per_pass(choice, result.p)},
                       {"conditions", report_json(m.conditions)},
                       {"final_policy_first_seed", m.final_policy}});
  }
  manifest["methods"] = methods;
  auto failures = nlohmann::json::array();
  for (const auto& r : result.records) {
    if (r.failed) failures.push_back({{"method", r.method}, {"seed", r.seed}, {"error", r.failure}});
  }
  manifest["failures"] = failures;
  manifest["artifacts"] = {{"runs.csv", sha256_hex(runs)},
                           {"aggregate.csv", sha256_hex(agg)},
                           {"gap.svg", sha256_hex(svg)}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& c : curves) {
    if (c.points.empty()) continue;
    out << c.method << ": final median gap " << format_double(c.points.back().median) << "\n";
  }
  out << "wrote " << (dir / "runs.csv").string() << ", aggregate.csv, gap.svg, manifest.json\n";
  if (result.any_failed()) {
    for (const auto& r : result.records) {
      if (r.failed) err << "run failed: " << r.method << " seed " << r.seed << ": " << r.failure << "\n";
    }
    return 3;
  }
  return 0;
}

int cmd_reproduce(const std::string& profile, const std::string& settings, const CommonOptions& o,
                  std::ostream& out, std::ostream& err) {
  ReproduceOptions options;
  options.scale = o.scale;
  if (o.seeds > 0) options.seeds = o.seeds;
  options.methods = tokens(o.methods);
  options.settings = tokens(settings);
  options.parallel = o.parallel;
  const auto result = reproduce_figure(profile, o.out_dir, options);
  for (const auto& f : result.files) out << "wrote " << f.string() << "\n";
  for (const auto& f : result.failures) err << "run failed: " << f << "\n";
  return result.failures.empty() ? 0 : 3;
}

int cmd_validate(const std::string& config, std::ostream& out) {
  const ExperimentConfig cfg = load_experiment(config);
  const Index p = cfg.objective.data_file.empty() ? cfg.objective.data.p
                                                  : build_objective(cfg.objective).dim();
  bool all = true;
  for (const auto& token : cfg.methods) {
    const MethodSpec spec = resolve_method(parse_method(token), cfg, p);
    const auto report = validate_conditions(cfg.schedule, floor_for(spec.policy, spec.musketeer, p),
                                            spec.estimator.zeroth_order());
    for (const auto& c : report.conditions) {
      out << token << ": " << c.name << ": " << to_string(c.verdict) << " (" << c.detail << ")\n";
    }
    all = all && report.passed();
  }
  out << (all ? "all conditions PASS\n" : "some conditions did not pass\n");
  return all ? 0 : 2;
}

int cmd_oracle(const std::string& config, std::ostream& out) {
  const ExperimentConfig cfg = load_experiment(config);
  const Objective objective = build_objective(cfg.objective);
  const Optimum opt = solve_oracle(objective);
  out << "objective: " << to_string(objective.kind()) << " (n = " << objective.sample_count()
      << ", p = " << objective.dim() << ", mu = " << format_double(objective.mu()) << ")\n"
      << "f* = " << format_double(opt.value) << "\n"
      << "|grad f(theta*)|_inf = " << format_double(opt.gradient_inf_norm) << "\n"
      << "iterations = " << opt.iterations << "\n"
      << "theta* =";
  for (Index k = 0; k < opt.theta.size(); ++k) out << (k ? "," : " ") << format_double(opt.theta[k]);
  out << "\n";
  return 0;
}

int cmd_plot(const std::string& input, const std::string& output, std::ostream& out) {
  std::string text;
  try {
    text = read_text(input);
  } catch (const std::exception&) {
    throw ConfigError("cannot read " + input);
  }
  const std::string header(trim(split(text, '\n').front()));
  std::vector<AggregateCurve> curves;
  if (header == kRunsHeader) {
    curves = aggregate(parse_runs_csv(text));
  } else if (header == kAggregateHeader) {
    curves = parse_aggregate_csv(text);
  } else {
    throw ConfigError(input + ": not a runs or aggregate CSV");
  }
  const std::filesystem::path path = output;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_text(path, render_svg(curves, std::filesystem::path(input).stem().string()));
  out << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic coordinate gradient descent with adaptive sampling: experiments and checks", "scgd"};
  app.footer(config_reference());
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions run_opts, rep_opts;
  std::string run_config, validate_config, oracle_config, profile, settings, plot_in, plot_out;

  auto* run = app.add_subcommand("run", "run every (method, seed) pair of a config file");
  run->add_option("config", run_config, "config file or manifest.json")->required();
  add_common(run, run_opts);

  std::string profiles;
  for (const auto& n : preset_names()) profiles += (profiles.empty() ? "" : ", ") + n;
  auto* rep = app.add_subcommand("reproduce", "run a built-in benchmark profile");
  rep->add_option("profile", profile, profiles)->required();
  rep->add_option("--settings,--cells", settings, "comma list of setting names to keep");
  add_common(rep, rep_opts);

  auto* val = app.add_subcommand("validate", "check the step-size conditions of a config");
  val->add_option("config", validate_config)->required();

  auto* orc = app.add_subcommand("oracle", "solve the configured objective and print the optimum");
  orc->add_option("config", oracle_config)->required();

  auto* plot = app.add_subcommand("plot", "render a runs or aggregate CSV as SVG");
  plot->add_option("csv", plot_in)->required();
  plot->add_option("svg", plot_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_config, run_opts, out, err);
    if (*rep) return cmd_reproduce(profile, settings, rep_opts, out, err);
    if (*val) return cmd_validate(validate_config, out);
    if (*orc) return cmd_oracle(oracle_config, out);
    if (*plot) return cmd_plot(plot_in, plot_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "run failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace scgd
