#include "scgd/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "scgd/errors.hpp"
#include "scgd/format.hpp"

namespace scgd {

double Schedule::gamma_at(Index t) const {
  switch (form) {
    case ScheduleForm::PolyOffset: {
      const double denom = static_cast<double>(t) + k0;
      if (!(denom > 0.0)) throw InvalidArgument("schedule: t + k0 must be positive");
      return gamma / denom;
    }
    case ScheduleForm::Poly:
      if (t < 1) throw InvalidArgument("schedule: polynomial form needs t >= 1");
      return gamma * std::pow(static_cast<double>(t), -alpha);
    case ScheduleForm::Explicit: {
      if (t < 1) throw InvalidArgument("schedule: explicit table needs t >= 1");
      if (table.empty()) throw InvalidArgument("schedule: explicit table is empty");
      const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), table.size()) - 1;
      return table[i];
    }
  }
  return 0.0;
}

double Schedule::h_at(Index t) const {
  if (smoothing.kind == SmoothingRule::Kind::Constant) return smoothing.value;
  return std::sqrt(gamma_at(t));
}

void Schedule::validate() const {
  if (form == ScheduleForm::Explicit) {
    if (table.empty()) throw InvalidArgument("schedule: explicit table is empty");
    for (double g : table) {
      if (!(g > 0.0)) throw InvalidArgument("schedule: explicit learning rates must be > 0");
    }
  } else {
    if (!(gamma > 0.0)) throw InvalidArgument("schedule: gamma must be > 0");
    if (!(k0 >= 0.0)) throw InvalidArgument("schedule: k0 must be >= 0");
    if (form == ScheduleForm::Poly && !(alpha >= 0.0 && alpha <= 1.0)) {
      throw InvalidArgument("schedule: exponent must lie in [0, 1]");
    }
  }
  if (smoothing.kind == SmoothingRule::Kind::Constant && !(smoothing.value >= 0.0)) {
    throw InvalidArgument("schedule: constant smoothing must be >= 0");
  }
}

FloorSchedule floor_for(PolicyKind kind, const MusketeerConfig& cfg, Index p) {
  const auto dim = static_cast<double>(p);
  switch (kind) {
    case PolicyKind::Full: return {FloorSchedule::Kind::Constant, 1.0};
    case PolicyKind::Uniform:
    case PolicyKind::UniformIS: return {FloorSchedule::Kind::Constant, 1.0 / dim};
    case PolicyKind::Musketeer:
    case PolicyKind::MusketeerIS:
      if (cfg.lambda.kind == LambdaSchedule::Kind::InverseLog) {
        return {FloorSchedule::Kind::InverseLog, 1.0 / dim};
      }
      if (cfg.lambda.value > 0.0) return {FloorSchedule::Kind::Constant, cfg.lambda.value / dim};
      return {FloorSchedule::Kind::None, 0.0};
  }
  return {FloorSchedule::Kind::None, 0.0};
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::CannotVerify: return "CANNOT-VERIFY";
  }
  return "?";
}

bool ValidationReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionStatus& c) { return c.verdict == Verdict::Pass; });
}

const ConditionStatus* ValidationReport::first_failure() const {
  for (const auto& c : conditions) {
    if (c.verdict != Verdict::Pass) return &c;
  }
  return nullptr;
}

ValidationReport validate_conditions(const Schedule& schedule, const FloorSchedule& floor,
                                     bool uses_smoothing) {
  static const std::string kDivergent = "sum gamma_t*beta_t = +inf";
  static const std::string kSquares = "sum gamma_t^2 < +inf";
  static const std::string kSmoothing = "h_t^2 = O(gamma_t)";

  ValidationReport report;
  if (schedule.form == ScheduleForm::Explicit) {
    const std::string why = "explicit learning-rate table has no analytic tail";
    report.conditions = {{kDivergent, Verdict::CannotVerify, why},
                         {kSquares, Verdict::CannotVerify, why}};
    if (uses_smoothing) report.conditions.push_back({kSmoothing, Verdict::CannotVerify, why});
    return report;
  }

  // gamma_t ~ t^-a
  const double a = schedule.form == ScheduleForm::PolyOffset ? 1.0 : schedule.alpha;
  const std::string decay = "gamma_t ~ t^-" + format_double(a);

  if (floor.kind == FloorSchedule::Kind::None) {
    report.conditions.push_back({kDivergent, Verdict::CannotVerify,
                                 "policy has no positive lower bound on its weights"});
  } else {
    // sum t^-a (log t)^-b diverges iff a < 1, or a = 1 and b <= 1.
    const double b = floor.kind == FloorSchedule::Kind::InverseLog ? 1.0 : 0.0;
    const bool diverges = a < 1.0 || (a == 1.0 && b <= 1.0);
    std::string detail = decay + ", beta_t >= " + format_double(floor.scale) +
                         (b > 0 ? "/log t" : "");
    report.conditions.push_back({kDivergent, diverges ? Verdict::Pass : Verdict::Fail, detail});
  }

  const bool squares = 2.0 * a > 1.0;
  report.conditions.push_back({kSquares, squares ? Verdict::Pass : Verdict::Fail,
                               decay + (squares ? ", 2a > 1" : ", 2a <= 1")});

  if (uses_smoothing) {
    if (schedule.smoothing.kind == SmoothingRule::Kind::SqrtGamma) {
      report.conditions.push_back({kSmoothing, Verdict::Pass, "h_t = sqrt(gamma_t)"});
    } else {
      const double h = schedule.smoothing.value;
      const bool ok = h == 0.0 || a == 0.0;
      report.conditions.push_back(
          {kSmoothing, ok ? Verdict::Pass : Verdict::Fail,
           "constant h = " + format_double(h) + (ok ? "" : " while gamma_t -> 0")});
    }
  }
  return report;
}

double phi_alpha(double alpha, double t) {
  if (alpha == 0.0) return std::log(t);
  return (std::pow(t, alpha) - 1.0) / alpha;
}

double theorem4_bound(const BoundConstants& b, double t) {
  if (!(t >= 1.0)) throw InvalidArgument("theorem4_bound: t must be >= 1");
  if (!(b.alpha >= 0.0 && b.alpha <= 1.0)) throw InvalidArgument("theorem4_bound: alpha outside [0, 1]");
  if (!(b.beta > 0.0 && b.beta <= 1.0)) throw InvalidArgument("theorem4_bound: beta outside (0, 1]");
  if (!(b.L > 0.0 && b.mu > 0.0 && b.gamma > 0.0)) {
    throw InvalidArgument("theorem4_bound: L, mu and gamma must be positive");
  }
  if (b.growth < 0.0 || b.sigma2 < 0.0 || b.c < 0.0 || b.delta0 < 0.0) {
    throw InvalidArgument("theorem4_bound: negative constant");
  }
  const double noise = b.sigma2 + 2.0 * b.c * b.c;
  double offset = 0.0;
  if (noise > 0.0) {
    if (b.growth == 0.0) {
      throw InvalidArgument("theorem4_bound: (sigma^2 + 2c^2) / (2 growth) with growth = 0");
    }
    offset = noise / (2.0 * b.growth);
  }
  const double start = b.delta0 + offset;
  const double mbg = b.mu * b.beta * b.gamma;
  const double g2 = b.gamma * b.gamma;

  if (b.alpha < 1.0) {
    const double first = 2.0 * std::exp(2.0 * b.L * b.growth * g2 * phi_alpha(1.0 - 2.0 * b.alpha, t)) *
                         std::exp(-mbg / 4.0 * std::pow(t, 1.0 - b.alpha)) * start;
    const double second = b.gamma * (b.sigma2 * b.L + 2.0 * b.c * b.c) / (b.mu * b.beta) *
                          std::pow(t, -b.alpha);
    return first + second;
  }
  const double first = 2.0 * std::exp(b.L * b.growth * g2) * start * std::pow(t, -mbg);
  const double second = (b.sigma2 * b.L / 2.0 + b.c * b.c) * g2 * phi_alpha(mbg / 2.0 - 1.0, t) *
                        std::pow(t, -mbg / 2.0);
  return first + second;
}

void MethodSpec::validate(Index dim) const {
  if (estimator.batch_size < 1) throw InvalidArgument("method: batch size must be >= 1");
  if (schedule_stride < 1) throw InvalidArgument("method: schedule stride must be >= 1");
  if (!(step_scale > 0.0)) throw InvalidArgument("method: step scale must be > 0");
  if (policy != PolicyKind::Full && (estimator.kind == EstimatorKind::GaussianSmoothing ||
                                     estimator.kind == EstimatorKind::SphereSmoothing)) {
    throw InvalidArgument("method: coordinate policies need finite-difference or first-order estimates");
  }
  if (is_adaptive(policy)) musketeer.validate();
  if (dim <= 0) throw InvalidArgument("method: dimension must be positive");
}

RunState make_run_state(const Objective& objective, const MethodSpec& method,
                        const Vector& theta0, std::uint64_t seed) {
  method.validate(objective.dim());
  if (theta0.size() != objective.dim()) {
    throw DimensionMismatch("run: theta0 has dimension " + std::to_string(theta0.size()) +
                            ", objective has " + std::to_string(objective.dim()));
  }
  return RunState{theta0,
                  0,
                  0,
                  0,
                  CoordinatePolicy(method.policy, objective.dim(), method.musketeer, method.is_scaling),
                  make_stream(seed, Stream::Data),
                  make_stream(seed, Stream::Coordinate),
                  make_stream(seed, Stream::Direction),
                  {}};
}

void apply_coordinate_update(Vector& theta, Index k, double gamma, double direction) {
  theta[k] -= gamma * direction;
}

StepInfo scgd_step(RunState& state, const Objective& objective, const MethodSpec& method,
                   const Schedule& schedule) {
  const Index tick = state.step / method.schedule_stride + 1;
  StepInfo info;
  info.gamma = schedule.gamma_at(tick) * method.step_scale;
  const bool zeroth = method.estimator.zeroth_order();
  if (zeroth) info.h = schedule.h_at(tick);

  sample_batch(state.data_rng, objective.sample_count(), method.estimator.batch_size, state.batch);

  if (method.policy == PolicyKind::Full) {
    GradientSample g;
    switch (method.estimator.kind) {
      case EstimatorKind::FirstOrder: g = first_order(objective, state.theta, state.batch); break;
      case EstimatorKind::FiniteDifference: g = fd_full(objective, state.theta, info.h, state.batch); break;
      case EstimatorKind::GaussianSmoothing:
        g = gaussian_smoothing(objective, state.theta, info.h, state.batch, state.direction_rng);
        break;
      case EstimatorKind::SphereSmoothing:
        g = sphere_smoothing(objective, state.theta, info.h, state.batch, state.direction_rng);
        break;
    }
    state.theta -= info.gamma * g.values;
    state.queries += zeroth ? g.nominal_queries : objective.dim();
    state.evaluations += g.queries;
  } else {
    const Index k = state.policy.sample(state.coordinate_rng);
    const CoordinateSample s =
        zeroth ? fd_coordinate(objective, state.theta, k, info.h, state.batch)
               : first_order_coordinate(objective, state.theta, k, state.batch);
    apply_coordinate_update(state.theta, k, info.gamma, state.policy.direction(k, s.value));
    state.queries += zeroth ? 2 : 1;
    state.evaluations += s.queries;
    info.coordinate = k;
    info.estimate = s.value;
    info.exploited = state.policy.observe(k, s.value);
  }
  ++state.step;
  return info;
}

RunResult run_scgd(const Objective& objective, const MethodSpec& method,
                   const Schedule& schedule, const Vector& theta0, std::uint64_t seed,
                   const RunOptions& options) {
  schedule.validate();
  RunResult result{make_run_state(objective, method, theta0, seed), {}, false, {}};
  RunState& state = result.state;

  const double f0 = objective.value(theta0);
  const double limit = f0 > 0.0 ? options.divergence_factor * f0
                                 : std::numeric_limits<double>::infinity();
  const auto start = std::chrono::steady_clock::now();
  auto next = options.checkpoint_steps.begin();
  auto record = [&]() -> bool {
    const double f = objective.value(state.theta);
    double ms = 0.0;
    if (options.timing) {
      ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    result.checkpoints.push_back({state.step, state.queries, f, ms});
    if (!std::isfinite(f) || f > limit) {
      result.diverged = true;
      result.failure = "diverged at step " + std::to_string(state.step) + ": f = " +
                       format_double(f) + " (initial " + format_double(f0) + ")";
      return false;
    }
    return true;
  };

  while (next != options.checkpoint_steps.end() && *next == 0) {
    if (!record()) return result;
    ++next;
  }
  while (state.step < options.max_steps) {
    const StepInfo info = scgd_step(state, objective, method, schedule);
    const bool finite = info.coordinate >= 0 ? std::isfinite(state.theta[info.coordinate])
                                             : state.theta.allFinite();
    if (!finite) {
      result.diverged = true;
      result.failure = "non-finite iterate at step " + std::to_string(state.step);
      return result;
    }
    while (next != options.checkpoint_steps.end() && *next == state.step) {
      if (!record()) return result;
      ++next;
    }
  }
  return result;
}

MusketeerTrajectory run_musketeer(const Objective& objective, const Vector& theta0,
                                  const EstimatorSpec& estimator, const MusketeerConfig& cfg,
                                  const Schedule& schedule, Index rounds, std::uint64_t seed,
                                  PolicyKind kind, bool override_conditions) {
  if (!is_adaptive(kind)) throw InvalidArgument("run_musketeer: policy must be adaptive");
  if (rounds < 0) throw InvalidArgument("run_musketeer: negative round count");
  schedule.validate();
  if (!override_conditions) {
    const auto report = validate_conditions(schedule, floor_for(kind, cfg, objective.dim()),
                                            estimator.zeroth_order());
    if (const auto* bad = report.first_failure()) {
      throw InvalidArgument("run_musketeer: condition '" + bad->name + "' is " +
                            std::string(to_string(bad->verdict)) + " (" + bad->detail + ")");
    }
  }

  MethodSpec method;
  method.policy = kind;
  method.estimator = estimator;
  method.musketeer = cfg;
  RunState state = make_run_state(objective, method, theta0, seed);

  MusketeerTrajectory out{theta0, state.policy.weights(), {}, {}, state.policy};
  out.weight_history.push_back(state.policy.weights());
  out.theta_history.push_back(theta0);
  for (Index n = 0; n < rounds; ++n) {
    for (Index t = 0; t < cfg.exploration_length; ++t) scgd_step(state, objective, method, schedule);
    if (!state.theta.allFinite()) {
      throw std::runtime_error("run_musketeer: non-finite iterate after round " +
                               std::to_string(n) + " (step " + std::to_string(state.step) + ")");
    }
    out.weight_history.push_back(state.policy.weights());
    out.theta_history.push_back(state.theta);
  }
  out.theta = state.theta;
  out.weights = state.policy.weights();
  out.policy = state.policy;
  return out;
}

}  // namespace scgd
