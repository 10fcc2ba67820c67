// Acceptance checks: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "scgd/bench.hpp"
#include "scgd/format.hpp"

using namespace scgd;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;
std::map<int, std::string> lines;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, const char* name, bool ok, double secs, double limit, const std::string& detail) {
  const bool in_time = secs < limit;
  const bool pass = ok && in_time;
  if (!pass) ++failures;
  char head[160];
  std::snprintf(head, sizeof head, "criterion %d %s: %s (%.2f s, limit %.0f s) ", id, name, pass ? "PASS" : "FAIL",
                secs, limit);
  lines[id] = head + detail + (in_time ? "" : " [too slow]");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

ExperimentConfig criterion1_config() {
  for (auto& s : preset("sweep-np")) {
    if (s.name == "sweep-n1000-p50") return s.config;
  }
  throw std::runtime_error("sweep cell missing");
}

double final_median(const ExperimentResult& r, const std::string& method) {
  std::vector<double> gaps;
  for (const auto& rec : r.records) {
    if (rec.method == method) gaps.push_back(rec.checkpoints.back().gap);
  }
  return median(gaps);
}

// 1 and 9
void block_ordering() {
  const auto cfg = criterion1_config();
  auto start = Clock::now();
  const auto r = run_experiment(cfg);
  const double secs = seconds_since(start);
  bool ok = !r.any_failed() && r.n == 1000 && r.p == 50 && cfg.seeds.size() == 20 && cfg.budget_passes == 200;
  const double full = final_median(r, "full");
  const double uni = final_median(r, "uniform");
  const double avg = final_median(r, "musketeer-avg");
  const double abs = final_median(r, "musketeer-abs");
  ok = ok && abs < uni && avg < uni && uni <= 2.0 * full && full <= 2.0 * uni;
  report(1, "block-structure ordering", ok, secs, 60,
         "median final gap: full " + num(full) + ", uniform " + num(uni) + ", musketeer-avg " + num(avg) +
             ", musketeer-abs " + num(abs) + ", musketeer-sqr " + num(final_median(r, "musketeer-sqr")));

  start = Clock::now();
  const auto csv = [](const ExperimentResult& x) {
    std::vector<RunRecord> ok_runs;
    for (const auto& rec : x.records) {
      if (!rec.failed) ok_runs.push_back(rec);
    }
    return runs_csv(x.records) + aggregate_csv(aggregate(ok_runs));
  };
  const std::string h0 = sha256_hex(csv(r));
  const std::string h1 = sha256_hex(csv(run_experiment(cfg)));
  const std::string h2 = sha256_hex(csv(run_experiment(cfg, 1)));
  report(9, "determinism", h0 == h1 && h1 == h2, seconds_since(start), 120,
         "sha256 default " + h0.substr(0, 16) + ", repeat " + h1.substr(0, 16) + ", parallel=1 " +
             h2.substr(0, 16));
}

// 2
void toy_axis() {
  const auto start = Clock::now();
  MusketeerConfig cfg{1, Normalization::Softmax, 5.0, {LambdaSchedule::Kind::Constant, 0.2}, GainVariant::Avg};
  Schedule s;
  s.gamma = 1.0;
  s.k0 = 10.0;
  const EstimatorSpec fo{EstimatorKind::FirstOrder, 1};
  const Vector theta0 = Vector::Ones(2);

  const auto axis = Objective::axis_quadratic(2);
  std::vector<double> d1;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    d1.push_back(run_musketeer(axis, theta0, fo, cfg, s, 50, seed).weights[0]);
  }
  const auto a = mean_se(d1);

  const auto quad = Objective::quadratic(2);
  std::vector<double> diff;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Vector w = run_musketeer(quad, theta0, fo, cfg, s, 50, seed).weights;
    diff.push_back(w[0] - w[1]);
  }
  const auto q = mean_se(diff);
  const bool ok = a.mean > 0.6 && std::abs(q.mean) < 3.0 * q.se;
  report(2, "toy axis alignment", ok, seconds_since(start), 10,
         "axis mean d1 " + num(a.mean) + " (50 seeds); symmetric mean d1-d2 " + num(q.mean) + ", 3 SE " +
             num(3.0 * q.se) + " (200 seeds)");
}

// 3
void bias_bound_check() {
  const auto start = Clock::now();
  auto cfg = criterion1_config().objective;
  const Objective obj = build_objective(cfg);
  const double L = obj.smoothness();
  const double c = bias_bound(L, EstimatorKind::FiniteDifference, obj.dim());
  Vector theta(obj.dim());
  for (Index k = 0; k < theta.size(); ++k) theta[k] = 0.1 * static_cast<double>(k % 7) - 0.3;
  std::vector<Index> all(static_cast<std::size_t>(obj.sample_count()));
  std::iota(all.begin(), all.end(), Index{0});
  const Vector exact = obj.gradient(theta);

  bool bound_ok = true;
  bool inf_ok = true;
  std::vector<double> err2;
  std::string detail = "L " + num(L);
  for (double h : {1.0, 0.1, 0.01}) {
    const Vector bias = fd_full(obj, theta, h, all).values - exact;
    const double e2 = bias.norm();
    const double einf = bias.lpNorm<Eigen::Infinity>();
    err2.push_back(e2);
    bound_ok = bound_ok && e2 <= c * h;
    inf_ok = inf_ok && einf <= c * h;
    detail += "; h " + num(h) + ": |bias|_2 " + num(e2) + " vs (L/2)h " + num(c * h) + ", |bias|_inf " + num(einf);
  }
  const double r1 = err2[0] / err2[1];
  const double r2 = err2[1] / err2[2];
  const bool linear = r1 >= 8 && r1 <= 12 && r2 >= 8 && r2 <= 12;
  detail += "; ratios " + num(r1) + ", " + num(r2) + "; inf-norm bound " + (inf_ok ? "holds" : "fails");
  report(3, "finite-difference bias bound", bound_ok && linear, seconds_since(start), 5, detail);
}

// 4 and 8
void theorem4_and_convergence() {
  const auto start = Clock::now();
  const Index p = 4;
  const auto quad = Objective::quadratic(p);
  MethodSpec method;
  method.policy = PolicyKind::Uniform;
  method.estimator = {EstimatorKind::FirstOrder, 1};
  Schedule s;
  s.form = ScheduleForm::Poly;
  s.gamma = 16.0;
  s.alpha = 1.0;
  const Vector theta0 = Vector::Ones(p);

  std::vector<Index> checkpoints;
  for (Index decade = 10; decade <= 100000; decade *= 10) {
    for (Index m : {1, 2, 5}) {
      if (m * decade <= 100000) checkpoints.push_back(m * decade);
    }
  }
  RunOptions opt;
  opt.max_steps = 100000;
  opt.checkpoint_steps = checkpoints;
  opt.divergence_factor = std::numeric_limits<double>::infinity();

  const int seeds = 200;
  std::vector<std::vector<double>> values(checkpoints.size());
  int converged = 0;
  bool finite = true;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto r = run_scgd(quad, method, s, theta0, static_cast<std::uint64_t>(seed), opt);
    finite = finite && !r.diverged && r.checkpoints.size() == checkpoints.size();
    if (r.checkpoints.size() != checkpoints.size()) continue;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) values[i].push_back(r.checkpoints[i].value);
    converged += r.checkpoints.back().value <= 1e-4;
  }

  BoundConstants b;
  b.L = 1.0;
  b.growth = 1.0;
  b.sigma2 = 0.0;
  b.c = 0.0;
  b.mu = 1.0;
  b.beta = 1.0 / static_cast<double>(p);
  b.gamma = s.gamma;
  b.alpha = 1.0;
  b.delta0 = quad.value(theta0);

  bool dominated = finite;
  double worst = 0.0;  // largest (mean + 3 SE) / bound
  for (std::size_t i = 0; finite && i < checkpoints.size(); ++i) {
    const auto m = mean_se(values[i]);
    const double bound = theorem4_bound(b, static_cast<double>(checkpoints[i]));
    dominated = dominated && m.mean + 3.0 * m.se <= bound;
    worst = std::max(worst, (m.mean + 3.0 * m.se) / bound);
  }
  const auto at = [&](std::size_t i) { return mean_se(values[i]).mean; };
  report(4, "non-asymptotic bound dominance", dominated, seconds_since(start), 30,
         "mu*beta*gamma " + num(b.mu * b.beta * b.gamma) + ", delta(10) " + num(at(0)) + " vs bound " +
             num(theorem4_bound(b, 10.0)) + ", delta(1e5) " + num(at(checkpoints.size() - 1)) + " vs bound " +
             num(theorem4_bound(b, 1e5)) + ", max (mean+3SE)/bound " + num(worst));

  const auto start8 = Clock::now();
  Schedule harmonic;
  harmonic.form = ScheduleForm::Poly;
  harmonic.gamma = 1.0;
  harmonic.alpha = 1.0;
  Schedule constant = harmonic;
  constant.alpha = 0.0;
  const auto v1 = validate_conditions(harmonic, {FloorSchedule::Kind::Constant, 0.25}, false);
  const auto v2 = validate_conditions(constant, {FloorSchedule::Kind::Constant, 0.25}, false);
  const auto v3 = validate_conditions(harmonic, {FloorSchedule::Kind::InverseLog, 1.0}, false);
  const bool validator = v1.passed() && !v2.passed() && v2.first_failure()->name == "sum gamma_t^2 < +inf" &&
                         v2.first_failure()->verdict == Verdict::Fail && v3.passed();
  report(8, "convergence proxy and validator", converged == seeds && validator,
         seconds_since(start) + seconds_since(start8), 60,
         std::to_string(converged) + "/" + std::to_string(seeds) + " runs reach gap <= 1e-4 within 1e5 steps; validator " +
             (validator ? "matches" : "does not match") + " the three reference cases");
}

// 5
void is_equals_uniform() {
  const auto start = Clock::now();
  const auto cfg = preset("ridge-zo")[0].config;
  const Objective obj = build_objective(cfg.objective);
  const Index p = obj.dim();
  const auto uniform = resolve_method(parse_method("uniform"), cfg, p);
  const auto is = resolve_method(parse_method("uniform-is"), cfg, p);
  RunOptions opt;
  opt.max_steps = cfg.budget_passes * p;
  for (Index pass : checkpoint_passes(cfg.budget_passes, cfg.checkpoint_growth)) {
    opt.checkpoint_steps.push_back(pass * p);
  }
  const Vector theta0 = Vector::Zero(p);
  const auto a = run_scgd(obj, uniform, cfg.schedule, theta0, 1, opt);
  const auto b = run_scgd(obj, is, cfg.schedule, theta0, 1, opt);
  bool same = a.state.theta.size() == b.state.theta.size() &&
              std::memcmp(a.state.theta.data(), b.state.theta.data(),
                          sizeof(double) * static_cast<std::size_t>(p)) == 0 &&
              a.checkpoints.size() == b.checkpoints.size();
  for (std::size_t i = 0; same && i < a.checkpoints.size(); ++i) {
    same = std::memcmp(&a.checkpoints[i].value, &b.checkpoints[i].value, sizeof(double)) == 0;
  }
  report(5, "uniform-IS equals uniform", same && !a.diverged, seconds_since(start), 5,
         "ridge n " + std::to_string(obj.sample_count()) + ", p " + std::to_string(p) + ", " +
             std::to_string(opt.max_steps) + " steps, final f " + format_double(a.checkpoints.back().value));
}

// 6
void enumerations() {
  const auto start = Clock::now();
  Rng rng(2024);
  double worst_plain = 0.0, worst_is = 0.0, worst_uniform = 0.0, min_gap = 1e300;
  for (int trial = 0; trial < 50; ++trial) {
    for (Index p = 1; p <= 8; ++p) {
      Vector d(p), g(p);
      for (Index k = 0; k < p; ++k) {
        d[k] = 0.05 + rng.uniform();
        g[k] = rng.normal();
      }
      d /= d.sum();
      const Vector u = Vector::Constant(p, 1.0 / static_cast<double>(p));
      Vector plain = Vector::Zero(p), is = Vector::Zero(p), uni = Vector::Zero(p);
      for (Index k = 0; k < p; ++k) {
        plain += d[k] * descent_direction(PolicyKind::Musketeer, d, k, g);
        is += d[k] * descent_direction(PolicyKind::MusketeerIS, d, k, g);
        uni += u[k] * descent_direction(PolicyKind::Uniform, u, k, g);
      }
      const Vector target = g / static_cast<double>(p);
      worst_plain = std::max(worst_plain, (plain - d.cwiseProduct(g)).lpNorm<Eigen::Infinity>());
      worst_is = std::max(worst_is, (is - target).lpNorm<Eigen::Infinity>());
      worst_uniform = std::max(worst_uniform, (uni - target).lpNorm<Eigen::Infinity>());
      if (p > 1) min_gap = std::min(min_gap, (plain - target).lpNorm<Eigen::Infinity>());
    }
  }
  const bool ok = worst_plain <= 1e-12 && worst_is <= 1e-12 && worst_uniform <= 1e-12 && min_gap > 1e-6;
  report(6, "unbiasedness enumerations", ok, seconds_since(start), 1,
         "max |E plain - Dg| " + num(worst_plain) + ", max |E IS - g/p| " + num(worst_is) +
             ", max |E uniform - g/p| " + num(worst_uniform) + ", min |E plain - g/p| at non-uniform d " +
             num(min_gap));
}

// 7
void softmax_to_uniform() {
  const auto start = Clock::now();
  MusketeerConfig cfg{1, Normalization::Softmax, 5.0, {LambdaSchedule::Kind::Constant, 0.2}, GainVariant::Avg};
  Schedule s;
  s.gamma = 1.0;
  s.k0 = 10.0;
  const auto quad = Objective::quadratic(2);
  bool ok = true;
  double worst = 0.0, final_gap = 0.0, g_inf = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = run_musketeer(quad, Vector::Ones(2), {EstimatorKind::FirstOrder, 1}, cfg, s, 20000, seed);
    const double g = r.policy.gains().total.lpNorm<Eigen::Infinity>();
    const double dev = (r.weights.array() - 0.5).abs().maxCoeff();
    const double bound = (std::exp(2.0 * cfg.eta * g) - 1.0) / 2.0;
    ok = ok && dev <= bound;
    worst = std::max(worst, dev / bound);
    final_gap = std::max(final_gap, quad.value(r.theta));
    g_inf = std::max(g_inf, g);
  }
  ok = ok && final_gap < 1e-3;
  report(7, "softmax-to-uniform", ok, seconds_since(start), 10,
         "20 seeds x 20000 rounds, max terminal |G|_inf " + num(g_inf) + ", max deviation/bound " + num(worst) +
             ", max final f " + num(final_gap));
}

}  // namespace

int main() {
  try {
    block_ordering();
    toy_axis();
    bias_bound_check();
    theorem4_and_convergence();
    is_equals_uniform();
    enumerations();
    softmax_to_uniform();
  } catch (const std::exception& e) {
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
