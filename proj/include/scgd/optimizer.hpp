#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scgd/gradients.hpp"
#include "scgd/objectives.hpp"
#include "scgd/policies.hpp"
#include "scgd/rng.hpp"

namespace scgd {

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

enum class ScheduleForm {
  PolyOffset,  // gamma / (t + k0)
  Poly,        // gamma * t^-alpha, t >= 1
  Explicit,    // user table, last value held; cannot be verified analytically
};

struct SmoothingRule {
  enum class Kind { SqrtGamma, Constant };
  Kind kind = Kind::SqrtGamma;
  double value = 0.0;  // Constant only
};

struct Schedule {
  ScheduleForm form = ScheduleForm::PolyOffset;
  double gamma = 1.0;
  double k0 = 0.0;
  double alpha = 1.0;  // Poly exponent in [0, 1]
  std::vector<double> table;  // Explicit only, table[t - 1] = gamma_t
  SmoothingRule smoothing;

  /// Learning rate gamma_t. PolyOffset accepts t >= 0, Poly and Explicit
  /// need t >= 1.
  double gamma_at(Index t) const;
  /// sqrt(gamma_t) or the constant.
  double h_at(Index t) const;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Convergence-condition validation
// ---------------------------------------------------------------------------

/// Lower bound beta_t on the smallest sampling weight.
struct FloorSchedule {
  enum class Kind {
    Constant,    // beta_t >= scale
    InverseLog,  // beta_t >= scale / log t
    None,        // no known positive floor
  };
  Kind kind = Kind::Constant;
  double scale = 1.0;
};

/// Floor implied by a policy: 1 for Full, 1/p for uniform kinds, lambda/p
/// for MUSKETEER (mixture update), None when lambda can be zero.
FloorSchedule floor_for(PolicyKind kind, const MusketeerConfig& cfg, Index p);

enum class Verdict { Pass, Fail, CannotVerify };
std::string_view to_string(Verdict verdict);

struct ConditionStatus {
  std::string name;
  Verdict verdict = Verdict::CannotVerify;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConditionStatus> conditions;

  bool passed() const;
  /// First condition that did not pass, if any.
  const ConditionStatus* first_failure() const;
};

/// Classifies sum gamma_t beta_t = inf, sum gamma_t^2 < inf and, when the
/// estimator smooths, h_t^2 = O(gamma_t) analytically from the schedule forms.
ValidationReport validate_conditions(const Schedule& schedule, const FloorSchedule& floor,
                                     bool uses_smoothing = true);

// ---------------------------------------------------------------------------
// Non-asymptotic bound
// ---------------------------------------------------------------------------

/// alpha^-1 (t^alpha - 1), log t for alpha = 0.
double phi_alpha(double alpha, double t);

struct BoundConstants {
  double L = 1.0;           // smoothness
  double growth = 1.0;      // expected-smoothness constant (script L)
  double sigma2 = 0.0;      // noise floor sigma^2
  double c = 0.0;           // bias constant
  double mu = 1.0;          // PL constant
  double beta = 1.0;        // floor on the smallest sampling weight
  double gamma = 1.0;       // learning-rate scale
  double alpha = 1.0;       // learning-rate exponent in [0, 1]
  double delta0 = 0.0;      // initial gap
};

/// Upper bound on E[f(theta_t) - f*] for gamma_t = gamma t^-alpha and
/// h_t = sqrt(gamma_t) under a PL objective.
double theorem4_bound(const BoundConstants& b, double t);

// ---------------------------------------------------------------------------
// SCGD engine
// ---------------------------------------------------------------------------

/// One method: a policy, an estimator and its step bookkeeping.
struct MethodSpec {
  PolicyKind policy = PolicyKind::Uniform;
  EstimatorSpec estimator;
  MusketeerConfig musketeer;
  IsScaling is_scaling = IsScaling::Normalized;
  /// Steps sharing one schedule index: the schedule is evaluated at
  /// floor(t / stride) + 1 for the 0-based step t.
  Index schedule_stride = 1;
  /// Multiplies gamma_t for every step.
  double step_scale = 1.0;

  void validate(Index dim) const;
};

struct RunState {
  Vector theta;
  Index step = 0;
  std::int64_t queries = 0;      // budget convention: 2 per zeroth-order coordinate,
                                 // 1 per first-order gradient coordinate
  std::int64_t evaluations = 0;  // objective evaluations actually performed
  CoordinatePolicy policy;
  Rng data_rng;
  Rng coordinate_rng;
  Rng direction_rng;
  std::vector<Index> batch;  // scratch
};

/// Fresh run state; the three random streams are substreams of `seed`, so
/// the coordinate and data draws are independent.
RunState make_run_state(const Objective& objective, const MethodSpec& method,
                        const Vector& theta0, std::uint64_t seed);

struct StepInfo {
  Index coordinate = -1;  // -1 when every coordinate moved
  double gamma = 0.0;
  double h = 0.0;
  double estimate = 0.0;  // sampled coordinate estimate (single-coordinate kinds)
  bool exploited = false;
};

/// theta_{t+1} = theta_t - gamma_{t+1} D(zeta) g_t with the policy's
/// direction rule; advances the query counters and the policy gains.
StepInfo scgd_step(RunState& state, const Objective& objective, const MethodSpec& method,
                   const Schedule& schedule);

/// theta <- theta - gamma * direction on a sparse or dense direction.
void apply_coordinate_update(Vector& theta, Index k, double gamma, double direction);

struct Checkpoint {
  Index step = 0;
  std::int64_t queries = 0;
  double value = 0.0;
  double wall_ms = 0.0;  // 0 unless RunOptions::timing
};

/// Stops early (and reports) when f leaves the finite range or exceeds
/// `divergence_factor` times its initial value.
struct RunOptions {
  Index max_steps = 0;
  std::vector<Index> checkpoint_steps;  // sorted, evaluated after that many steps
  double divergence_factor = 1e6;
  bool timing = false;
};

struct RunResult {
  RunState state;
  std::vector<Checkpoint> checkpoints;
  bool diverged = false;
  std::string failure;
};

RunResult run_scgd(const Objective& objective, const MethodSpec& method,
                   const Schedule& schedule, const Vector& theta0, std::uint64_t seed,
                   const RunOptions& options);

struct MusketeerTrajectory {
  Vector theta;
  Vector weights;
  std::vector<Vector> weight_history;  // weights after each round, starting with d_0
  std::vector<Vector> theta_history;   // iterate after each round, starting with theta_0
  CoordinatePolicy policy;
};

/// N rounds of (T explore steps, merge, normalize, mixture). The schedule
/// index is global: it never resets between rounds. Throws InvalidArgument
/// when validate_conditions fails unless `override_conditions` is set, and
/// std::runtime_error when the iterate stops being finite.
MusketeerTrajectory run_musketeer(const Objective& objective, const Vector& theta0,
                                  const EstimatorSpec& estimator, const MusketeerConfig& cfg,
                                  const Schedule& schedule, Index rounds, std::uint64_t seed,
                                  PolicyKind kind = PolicyKind::Musketeer,
                                  bool override_conditions = false);

}  // namespace scgd
