#pragma once

#include <string_view>

#include <json.hpp>

#include "scgd/objectives.hpp"
#include "scgd/rng.hpp"

namespace scgd {

enum class PolicyKind { Full, Uniform, UniformIS, Musketeer, MusketeerIS };
enum class GainVariant { Avg, Abs, Sqr };
enum class Normalization { L1, Softmax };

/// How importance-sampling kinds rescale the sampled coordinate.
///   Normalized: g_k / (p d_k), so UniformIS with uniform d is plain Uniform.
///   Raw:        g_k / d_k, the unscaled D^-1 D(zeta) g form.
enum class IsScaling { Normalized, Raw };

std::string_view to_string(PolicyKind kind);
std::string_view to_string(GainVariant variant);
std::string_view to_string(Normalization normalization);

bool is_importance_sampled(PolicyKind kind);
bool is_adaptive(PolicyKind kind);

/// Mixture coefficient lambda_n of exploitation round n (0-based).
struct LambdaSchedule {
  enum class Kind { Constant, InverseLog };
  Kind kind = Kind::Constant;
  double value = 0.2;  // Constant only

  /// Constant: value. InverseLog: min(1, 1 / log(n + e)).
  double at(Index round) const;
};

struct MusketeerConfig {
  Index exploration_length = 1;  // T
  Normalization normalization = Normalization::Softmax;
  double eta = 1.0;
  LambdaSchedule lambda;
  GainVariant variant = GainVariant::Avg;

  void validate() const;
};

/// Tolerance used when checking caller-supplied weights.
inline constexpr double kSimplexInputTolerance = 1e-9;

/// Throws InvalidArgument unless d is nonnegative and sums to 1.
void check_simplex(const Vector& d);

/// Inverse-CDF draw: smallest k with d_0 + ... + d_k > u.
Index sample_coordinate(const Vector& d, double u);

struct GainState {
  Vector total;    // running mean over completed rounds
  Vector current;  // accumulator of the round in progress
  Index rounds = 0;
  GainVariant variant = GainVariant::Avg;

  static GainState zeros(Index p, GainVariant variant);
};

/// current[k] += r / T with r = g_k / d_k (Avg), |g_k| / d_k (Abs) or
/// g_k^2 / d_k (Sqr).
void accumulate_gain(GainState& state, const Vector& d, Index k, double g_k,
                     Index exploration_length);

/// total += (current - total) / (rounds + 1); rounds += 1; current = 0.
void merge_gains(GainState& state);

/// L1: |x_k| / sum |x_j| (uniform when x = 0). Softmax: exp(eta x_k) / sum,
/// computed after subtracting the max.
Vector normalize(const Vector& gains, Normalization normalization, double eta);

/// (1 - lambda) phi + lambda / p.
Vector mixture_update(const Vector& phi, double lambda);

/// Scalar multiplying e_k in the update of a single-coordinate policy.
double coordinate_direction(PolicyKind kind, const Vector& d, Index k, double g_k,
                            IsScaling scaling = IsScaling::Normalized);

/// Dense form of the update direction: g for Full, coordinate_direction(..)
/// e_k otherwise.
Vector descent_direction(PolicyKind kind, const Vector& d, Index k, const Vector& g,
                         IsScaling scaling = IsScaling::Normalized);

/// Sampling weights, gains and round bookkeeping of one run.
class CoordinatePolicy {
 public:
  CoordinatePolicy(PolicyKind kind, Index dim, MusketeerConfig cfg = {},
                   IsScaling scaling = IsScaling::Normalized);

  PolicyKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  const MusketeerConfig& config() const { return cfg_; }
  IsScaling scaling() const { return scaling_; }
  const Vector& weights() const { return weights_; }
  const GainState& gains() const { return gains_; }
  Index round_step() const { return round_step_; }

  /// Smallest sampling weight (1 for Full, which moves every coordinate).
  double min_weight() const;

  Index sample(Rng& rng) const { return sample_coordinate(weights_, rng.uniform()); }

  double direction(Index k, double g_k) const {
    return coordinate_direction(kind_, weights_, k, g_k, scaling_);
  }

  /// Record the estimate used for a move along k. For adaptive kinds this
  /// feeds the gains and, after T observations, runs the exploitation step.
  /// Returns true when the weights changed.
  bool observe(Index k, double g_k);

  nlohmann::json to_json() const;
  static CoordinatePolicy from_json(const nlohmann::json& j);

 private:
  void exploit();

  PolicyKind kind_;
  Index dim_;
  MusketeerConfig cfg_;
  IsScaling scaling_;
  Vector weights_;
  GainState gains_;
  Index round_step_ = 0;
};

}  // namespace scgd
