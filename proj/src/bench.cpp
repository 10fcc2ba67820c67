#include "scgd/bench.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "scgd/errors.hpp"
#include "scgd/format.hpp"

namespace scgd {

double resolve_mu(const ObjectiveConfig& cfg, Index n) {
  if (cfg.mu_rule == MuRule::Fixed) {
    if (!(cfg.mu >= 0.0)) throw InvalidArgument("mu must be >= 0");
    return cfg.mu;
  }
  if (n <= 0) throw InvalidArgument("mu = 1/n needs n > 0");
  return 1.0 / static_cast<double>(n);
}

Objective build_objective(const ObjectiveConfig& cfg) {
  switch (cfg.kind) {
    case ObjectiveKind::Quadratic: return Objective::quadratic(cfg.dim);
    case ObjectiveKind::AxisQuadratic: return Objective::axis_quadratic(cfg.dim);
    case ObjectiveKind::Ridge:
    case ObjectiveKind::Logistic: break;
  }
  const bool classification = cfg.kind == ObjectiveKind::Logistic;
  std::shared_ptr<const Dataset> data;
  if (!cfg.data_file.empty()) {
    data = std::make_shared<const Dataset>(read_dataset_csv(cfg.data_file, classification));
  } else {
    BlockStructureConfig block = cfg.data;
    block.label_model = classification ? LabelModel::LogisticBernoulli : LabelModel::LinearGaussian;
    data = std::make_shared<const Dataset>(generate_block_dataset(block));
  }
  const double mu = resolve_mu(cfg, data->n());
  return classification ? Objective::logistic(data, mu) : Objective::ridge(data, mu);
}

MethodChoice parse_method(const std::string& token) {
  MethodChoice m;
  m.name = token;
  if (token == "full") {
    m.policy = PolicyKind::Full;
  } else if (token == "nesterov") {
    m.policy = PolicyKind::Full;
    m.smoothing = true;
  } else if (token == "uniform") {
    m.policy = PolicyKind::Uniform;
  } else if (token == "uniform-is") {
    m.policy = PolicyKind::UniformIS;
  } else if (token.rfind("musketeer-", 0) == 0) {
    std::string rest = token.substr(10);
    m.policy = PolicyKind::Musketeer;
    if (rest.size() > 3 && rest.substr(rest.size() - 3) == "-is") {
      m.policy = PolicyKind::MusketeerIS;
      rest.resize(rest.size() - 3);
    }
    if (rest == "avg") {
      m.variant = GainVariant::Avg;
    } else if (rest == "abs") {
      m.variant = GainVariant::Abs;
    } else if (rest == "sqr") {
      m.variant = GainVariant::Sqr;
    } else {
      throw InvalidArgument("unknown method '" + token + "'");
    }
  } else {
    throw InvalidArgument("unknown method '" + token + "'");
  }
  return m;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw InvalidArgument("experiment: no methods");
  if (seeds.empty()) throw InvalidArgument("experiment: no seeds");
  if (budget_passes < 1) throw InvalidArgument("experiment: budget must be >= 1 pass");
  if (!(checkpoint_growth > 1.0)) throw InvalidArgument("experiment: checkpoint growth must be > 1");
  if (estimator.kind != EstimatorKind::FiniteDifference && estimator.kind != EstimatorKind::FirstOrder) {
    throw InvalidArgument("experiment: base estimator must be finite-difference or first-order");
  }
  bool adaptive = false;
  for (const auto& token : methods) adaptive = adaptive || is_adaptive(parse_method(token).policy);
  if (adaptive) musketeer.validate();
  schedule.validate();
}

Index steps_per_pass(const MethodChoice& method, Index p) {
  return method.policy == PolicyKind::Full && !method.smoothing ? 1 : p;
}

MethodSpec resolve_method(const MethodChoice& method, const ExperimentConfig& cfg, Index p) {
  MethodSpec spec;
  spec.policy = method.policy;
  spec.estimator = cfg.estimator;
  spec.musketeer = cfg.musketeer;
  spec.musketeer.variant = method.variant;
  spec.is_scaling = cfg.is_scaling;
  spec.schedule_stride = steps_per_pass(method, p);
  if (method.smoothing) {
    spec.estimator.kind = EstimatorKind::GaussianSmoothing;
    spec.step_scale = 1.0 / static_cast<double>(p);
  }
  return spec;
}

std::vector<Index> checkpoint_passes(Index budget, double growth) {
  if (budget < 1) throw InvalidArgument("checkpoints: budget must be >= 1");
  std::vector<Index> out{0};
  while (out.back() < budget) {
    const Index prev = out.back();
    const auto grown = static_cast<Index>(std::ceil(static_cast<double>(prev) * growth));
    out.push_back(std::min(budget, std::max(prev + 1, grown)));
  }
  return out;
}

bool ExperimentResult::any_failed() const {
  return std::any_of(records.begin(), records.end(), [](const RunRecord& r) { return r.failed; });
}

namespace {

struct Job {
  std::size_t method = 0;
  std::size_t seed = 0;
};

struct JobOutput {
  RunRecord record;
  nlohmann::json policy;
};

JobOutput run_job(const Objective& objective, const Optimum& optimum, const MethodChoice& choice,
                  const MethodSpec& spec, const ExperimentConfig& cfg, const Vector& theta0,
                  std::uint64_t seed) {
  JobOutput out;
  out.record.method = choice.name;
  out.record.seed = seed;
  const Index spp = steps_per_pass(choice, objective.dim());
  const auto grid = checkpoint_passes(cfg.budget_passes, cfg.checkpoint_growth);

  RunOptions options;
  options.max_steps = cfg.budget_passes * spp;
  options.timing = cfg.timing;
  for (Index pass : grid) options.checkpoint_steps.push_back(pass * spp);

  try {
    const RunResult result = run_scgd(objective, spec, cfg.schedule, theta0, seed, options);
    for (const auto& c : result.checkpoints) {
      const double gap = c.value - optimum.value;
      out.record.checkpoints.push_back({c.step, c.queries,
                                        static_cast<double>(c.step) / static_cast<double>(spp),
                                        gap, c.wall_ms});
      if (gap < -1e-9 && !out.record.failed) {
        out.record.failed = true;
        out.record.failure = "gap " + format_double(gap) + " below the oracle at step " +
                             std::to_string(c.step);
      }
    }
    if (result.diverged) {
      out.record.failed = true;
      out.record.failure = result.failure;
    }
    out.policy = result.state.policy.to_json();
  } catch (const std::exception& e) {
    out.record.failed = true;
    out.record.failure = e.what();
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned parallel) {
  cfg.validate();
  const Objective objective = build_objective(cfg.objective);
  ExperimentResult result;
  result.optimum = solve_oracle(objective);
  result.p = objective.dim();
  result.n = objective.sample_count();
  result.mu = objective.mu();

  const Vector theta0 = cfg.theta0 ? *cfg.theta0 : Vector::Zero(result.p);
  if (theta0.size() != result.p) {
    throw DimensionMismatch("theta0 has " + std::to_string(theta0.size()) + " entries, objective has " +
                            std::to_string(result.p));
  }

  std::vector<MethodChoice> choices;
  std::vector<MethodSpec> specs;
  for (const auto& token : cfg.methods) {
    choices.push_back(parse_method(token));
    specs.push_back(resolve_method(choices.back(), cfg, result.p));
    specs.back().validate(result.p);
    MethodReport report;
    report.method = token;
    report.conditions =
        validate_conditions(cfg.schedule, floor_for(specs.back().policy, specs.back().musketeer, result.p),
                            specs.back().estimator.zeroth_order());
    if (const auto* bad = report.conditions.first_failure(); bad && !cfg.override_conditions) {
      throw InvalidArgument("method " + token + ": condition '" + bad->name + "' is " +
                            std::string(to_string(bad->verdict)) + " (" + bad->detail + ")");
    }
    result.methods.push_back(std::move(report));
  }

  std::vector<Job> jobs;
  for (std::size_t m = 0; m < choices.size(); ++m) {
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) jobs.push_back({m, s});
  }
  std::vector<JobOutput> outputs(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      outputs[j] = run_job(objective, result.optimum, choices[job.method], specs[job.method], cfg,
                           theta0, cfg.seeds[job.seed]);
    }
  };
  unsigned workers = parallel == 0 ? std::max(1u, std::thread::hardware_concurrency()) : parallel;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (jobs[j].seed == 0) result.methods[jobs[j].method].final_policy = outputs[j].policy;
    result.records.push_back(std::move(outputs[j].record));
  }
  return result;
}

std::vector<AggregateCurve> aggregate(const std::vector<RunRecord>& records) {
  std::vector<AggregateCurve> curves;
  std::vector<std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    auto it = std::find_if(curves.begin(), curves.end(),
                           [&](const AggregateCurve& c) { return c.method == r.method; });
    if (it == curves.end()) {
      curves.push_back({r.method, {}});
      groups.emplace_back();
      it = curves.end() - 1;
    }
    groups[static_cast<std::size_t>(it - curves.begin())].push_back(&r);
  }
  for (std::size_t m = 0; m < curves.size(); ++m) {
    const auto& group = groups[m];
    const auto& first = group.front()->checkpoints;
    for (const auto* r : group) {
      bool same = r->checkpoints.size() == first.size();
      for (std::size_t i = 0; same && i < first.size(); ++i) {
        same = r->checkpoints[i].passes == first[i].passes;
      }
      if (!same) {
        throw InvalidArgument("aggregate: method " + curves[m].method +
                              " has runs on different checkpoint grids");
      }
    }
    std::vector<double> values(group.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      double sum = 0.0;
      for (std::size_t s = 0; s < group.size(); ++s) {
        values[s] = group[s]->checkpoints[i].gap;
        sum += values[s];
      }
      const auto count = static_cast<double>(group.size());
      const double mean = sum / count;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      std::sort(values.begin(), values.end());
      const std::size_t half = values.size() / 2;
      const double median = values.size() % 2 ? values[half] : 0.5 * (values[half - 1] + values[half]);
      const double sd = group.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
      curves[m].points.push_back({first[i].passes, mean, median, sd});
    }
  }
  return curves;
}

std::string runs_csv(const std::vector<RunRecord>& records) {
  std::string out = std::string(kRunsHeader) + "\n";
  for (const auto& r : records) {
    for (const auto& c : r.checkpoints) {
      out += r.method + "," + std::to_string(r.seed) + "," + std::to_string(c.step) + "," +
             std::to_string(c.queries) + "," + format_double(c.passes) + "," + format_double(c.gap) +
             "," + format_double(c.wall_ms) + "\n";
    }
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateCurve>& curves) {
  std::string out = std::string(kAggregateHeader) + "\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out += c.method + "," + format_double(p.passes) + "," + format_double(p.mean) + "," +
             format_double(p.median) + "," + format_double(p.std) + "\n";
    }
  }
  return out;
}

namespace {

std::vector<std::vector<std::string_view>> csv_rows(const std::string& text, std::string_view header,
                                                    std::size_t width) {
  std::vector<std::vector<std::string_view>> rows;
  const auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != header) {
    throw ConfigError("csv: expected header '" + std::string(header) + "'");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto fields = split(trim(lines[i]), ',');
    if (fields.size() != width) {
      throw ConfigError("csv: line " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                        " fields, expected " + std::to_string(width));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::vector<RunRecord> parse_runs_csv(const std::string& text) {
  std::vector<RunRecord> records;
  for (const auto& f : csv_rows(text, kRunsHeader, 7)) {
    const std::string method(f[0]);
    const auto seed = static_cast<std::uint64_t>(parse_integer(f[1], "seed"));
    if (records.empty() || records.back().method != method || records.back().seed != seed) {
      records.push_back({method, seed, {}, false, {}});
    }
    records.back().checkpoints.push_back({static_cast<Index>(parse_integer(f[2], "step")),
                                          parse_integer(f[3], "queries"), parse_double(f[4], "passes"),
                                          parse_double(f[5], "gap"), parse_double(f[6], "wall_ms")});
  }
  return records;
}

std::vector<AggregateCurve> parse_aggregate_csv(const std::string& text) {
  std::vector<AggregateCurve> curves;
  for (const auto& f : csv_rows(text, kAggregateHeader, 5)) {
    const std::string method(f[0]);
    if (curves.empty() || curves.back().method != method) curves.push_back({method, {}});
    curves.back().points.push_back({parse_double(f[1], "passes"), parse_double(f[2], "gap_mean"),
                                    parse_double(f[3], "gap_median"), parse_double(f[4], "gap_std")});
  }
  return curves;
}

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_svg(const std::vector<AggregateCurve>& curves, const std::string& title) {
  constexpr double width = 760, height = 480;
  constexpr double left = 80, right = 190, top = 40, bottom = 60;
  constexpr double floor = 1e-12;
  const double pw = width - left - right, ph = height - top - bottom;

  double xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool any = false;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      xmax = std::max(xmax, p.passes);
      const double y = std::log10(std::max(p.mean, floor));
      if (!std::isfinite(y)) continue;
      ymin = any ? std::min(ymin, y) : y;
      ymax = any ? std::max(ymax, y) : y;
      any = true;
    }
  }
  if (!any) {
    ymin = -12.0;
    ymax = 0.0;
  }
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax <= ymin) ymax = ymin + 1.0;
  if (!(xmax > 0.0)) xmax = 1.0;
  auto sx = [&](double x) { return left + pw * x / xmax; };
  auto sy = [&](double y) { return top + ph * (ymax - y) / (ymax - ymin); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << escape_xml(title) << "</text>\n";

  const int decades = static_cast<int>(ymax - ymin);
  const int step = std::max(1, (decades + 9) / 10);
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); e += step) {
    const double y = sy(e);
    out << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(left + pw)
        << "\" y2=\"" << fixed(y) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = xmax * i / 5.0;
    const double x = sx(v);
    out << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(top + ph) << "\" x2=\"" << fixed(x)
        << "\" y2=\"" << fixed(top + ph + 5) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(top + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << short_number(v)
        << "</text>\n";
  }
  out << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw)
      << "\" height=\"" << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(height - 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">passes</text>\n"
      << "<text x=\"18\" y=\"" << fixed(top + ph / 2) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 " << fixed(top + ph / 2)
      << ")\">mean gap</text>\n";

  for (std::size_t m = 0; m < curves.size(); ++m) {
    const char* color = kPalette[m % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& p : curves[m].points) {
      const double y = std::log10(std::max(p.mean, floor));
      if (!std::isfinite(y)) continue;
      out << (first ? "" : " ") << fixed(sx(p.passes)) << "," << fixed(sy(y));
      first = false;
    }
    out << "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(m);
    out << "<line x1=\"" << fixed(left + pw + 14) << "\" y1=\"" << fixed(ly) << "\" x2=\""
        << fixed(left + pw + 38) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed(left + pw + 44) << "\" y=\"" << fixed(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(curves[m].method)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

Index scaled(Index n, double scale) {
  return std::max<Index>(10, static_cast<Index>(std::llround(static_cast<double>(n) * scale)));
}

std::vector<std::uint64_t> seed_list(Index count) {
  std::vector<std::uint64_t> out;
  for (Index i = 0; i < count; ++i) out.push_back(static_cast<std::uint64_t>(i + 1));
  return out;
}

ExperimentConfig linear_base(ObjectiveKind kind, Index n, Index p, double alpha, Index block) {
  ExperimentConfig cfg;
  cfg.objective.kind = kind;
  cfg.objective.data = {n, p, alpha, block, LabelModel::LinearGaussian, 7};
  cfg.objective.mu_rule = MuRule::OneOverN;
  cfg.musketeer.exploration_length = static_cast<Index>(std::floor(std::sqrt(static_cast<double>(p))));
  cfg.seeds = seed_list(20);
  cfg.budget_passes = 100;
  return cfg;
}

ExperimentConfig zeroth_order(ExperimentConfig cfg, double gamma, double k0) {
  cfg.estimator = {EstimatorKind::FiniteDifference, 1};
  cfg.methods = {"full", "uniform", "nesterov", "musketeer-avg", "musketeer-abs", "musketeer-sqr"};
  cfg.musketeer.normalization = Normalization::Softmax;
  cfg.musketeer.eta = 1.0;
  cfg.musketeer.lambda = {LambdaSchedule::Kind::Constant, 0.5};
  cfg.schedule.gamma = gamma;
  cfg.schedule.k0 = k0;
  return cfg;
}

ExperimentConfig first_order_cfg(ExperimentConfig cfg, Index batch) {
  cfg.estimator = {EstimatorKind::FirstOrder, batch};
  cfg.methods = {"full", "uniform", "uniform-is", "musketeer-avg", "musketeer-abs", "musketeer-sqr"};
  cfg.musketeer.normalization = Normalization::Softmax;
  cfg.musketeer.eta = 1.0;
  cfg.musketeer.lambda = {LambdaSchedule::Kind::InverseLog, 0.0};
  cfg.schedule.gamma = 1.0;
  cfg.schedule.k0 = 0.0;
  return cfg;
}

ExperimentConfig toy(ObjectiveKind kind) {
  ExperimentConfig cfg;
  cfg.objective.kind = kind;
  cfg.objective.dim = 2;
  cfg.estimator = {EstimatorKind::FirstOrder, 1};
  cfg.methods = {"full", "uniform", "musketeer-avg"};
  cfg.musketeer = {1, Normalization::Softmax, 5.0, {LambdaSchedule::Kind::Constant, 0.2}, GainVariant::Avg};
  cfg.schedule.gamma = 1.0;
  cfg.schedule.k0 = 10.0;
  cfg.theta0 = Vector::Ones(2);
  cfg.seeds = seed_list(20);
  cfg.budget_passes = 50;
  return cfg;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"ridge-zo", "logistic-zo", "ridge-fo",
                                                 "logistic-fo", "toy-2d", "sweep-np"};
  return names;
}

std::vector<PresetSetting> preset(const std::string& profile, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("scale must be > 0");
  if (profile == "ridge-zo") {
    return {{"ridge-zo", zeroth_order(linear_base(ObjectiveKind::Ridge, scaled(10000, scale), 250, 5, 10), 3, 10)}};
  }
  if (profile == "logistic-zo") {
    return {{"logistic-zo",
             zeroth_order(linear_base(ObjectiveKind::Logistic, scaled(10000, scale), 250, 5, 5), 10, 5)}};
  }
  if (profile == "ridge-fo") {
    return {{"ridge-fo", first_order_cfg(linear_base(ObjectiveKind::Ridge, scaled(10000, scale), 250, 5, 10), 8)}};
  }
  if (profile == "logistic-fo") {
    return {{"logistic-fo",
             first_order_cfg(linear_base(ObjectiveKind::Logistic, scaled(10000, scale), 250, 5, 2), 32)}};
  }
  if (profile == "toy-2d") {
    return {{"toy-quadratic", toy(ObjectiveKind::Quadratic)},
            {"toy-axis-quadratic", toy(ObjectiveKind::AxisQuadratic)}};
  }
  if (profile == "sweep-np") {
    std::vector<PresetSetting> out;
    for (Index n : {1000, 2000, 5000}) {
      for (Index p : {20, 50, 100, 200}) {
        ExperimentConfig cfg = linear_base(ObjectiveKind::Ridge, scaled(n, scale), p, 5, 10);
        cfg.estimator = {EstimatorKind::FiniteDifference, 1};
        cfg.methods = {"full", "uniform", "musketeer-avg", "musketeer-abs", "musketeer-sqr"};
        cfg.musketeer.normalization = Normalization::L1;
        cfg.musketeer.lambda = {LambdaSchedule::Kind::InverseLog, 0.0};
        cfg.schedule.gamma = 1.0;
        cfg.schedule.k0 = 10.0;
        cfg.budget_passes = 200;
        out.push_back({"sweep-n" + std::to_string(n) + "-p" + std::to_string(p), cfg});
      }
    }
    return out;
  }
  throw InvalidArgument("unknown profile '" + profile + "'");
}

ReproduceOutput reproduce_figure(const std::string& profile, const std::filesystem::path& out_dir,
                                 const ReproduceOptions& options) {
  auto settings = preset(profile, options.scale);
  if (!options.settings.empty()) {
    std::erase_if(settings, [&](const PresetSetting& s) {
      return std::find(options.settings.begin(), options.settings.end(), s.name) == options.settings.end();
    });
    if (settings.empty()) throw InvalidArgument("no setting of " + profile + " matches the filter");
  }
  std::filesystem::create_directories(out_dir);
  ReproduceOutput out;
  for (auto& s : settings) {
    if (options.seeds) s.config.seeds = seed_list(*options.seeds);
    if (!options.methods.empty()) {
      std::erase_if(s.config.methods, [&](const std::string& m) {
        return std::find(options.methods.begin(), options.methods.end(), m) == options.methods.end();
      });
      if (s.config.methods.empty()) throw InvalidArgument("method filter removes every method");
    }
    const ExperimentResult result = run_experiment(s.config, options.parallel);
    std::vector<RunRecord> ok;
    for (const auto& r : result.records) {
      if (r.failed) {
        out.failures.push_back(s.name + " " + r.method + " seed " + std::to_string(r.seed) + ": " + r.failure);
      } else {
        ok.push_back(r);
      }
    }
    const auto csv = out_dir / (s.name + ".csv");
    const auto svg = out_dir / (s.name + ".svg");
    write_text(csv, runs_csv(result.records));
    write_text(svg, render_svg(aggregate(ok), s.name));
    out.files.push_back(csv);
    out.files.push_back(svg);
  }
  return out;
}

}  // namespace scgd
