#include "scgd/policies.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "scgd/errors.hpp"
#include "scgd/format.hpp"

namespace scgd {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Full: return "full";
    case PolicyKind::Uniform: return "uniform";
    case PolicyKind::UniformIS: return "uniform-is";
    case PolicyKind::Musketeer: return "musketeer";
    case PolicyKind::MusketeerIS: return "musketeer-is";
  }
  return "?";
}

std::string_view to_string(GainVariant variant) {
  switch (variant) {
    case GainVariant::Avg: return "avg";
    case GainVariant::Abs: return "abs";
    case GainVariant::Sqr: return "sqr";
  }
  return "?";
}

std::string_view to_string(Normalization normalization) {
  return normalization == Normalization::L1 ? "l1" : "softmax";
}

bool is_importance_sampled(PolicyKind kind) {
  return kind == PolicyKind::UniformIS || kind == PolicyKind::MusketeerIS;
}

bool is_adaptive(PolicyKind kind) {
  return kind == PolicyKind::Musketeer || kind == PolicyKind::MusketeerIS;
}

double LambdaSchedule::at(Index round) const {
  if (kind == Kind::Constant) return value;
  return std::min(1.0, 1.0 / std::log(static_cast<double>(round) + std::numbers::e));
}

void MusketeerConfig::validate() const {
  if (exploration_length < 1) throw InvalidArgument("musketeer: exploration length T must be >= 1");
  if (!(eta > 0.0)) throw InvalidArgument("musketeer: eta must be > 0");
  if (lambda.kind == LambdaSchedule::Kind::Constant && !(lambda.value >= 0.0 && lambda.value <= 1.0)) {
    throw InvalidArgument("musketeer: lambda must lie in [0, 1]");
  }
}

void check_simplex(const Vector& d) {
  if (d.size() == 0) throw InvalidArgument("weights: empty vector");
  double sum = 0.0;
  for (Index k = 0; k < d.size(); ++k) {
    if (!(d[k] >= 0.0)) {
      throw InvalidArgument("weights: entry " + std::to_string(k) + " = " + format_double(d[k]) +
                            " is negative");
    }
    sum += d[k];
  }
  if (std::abs(sum - 1.0) > kSimplexInputTolerance) {
    throw InvalidArgument("weights: sum " + format_double(sum) + " is not 1");
  }
}

Index sample_coordinate(const Vector& d, double u) {
  check_simplex(d);
  double cumulative = 0.0;
  for (Index k = 0; k < d.size(); ++k) {
    cumulative += d[k];
    if (cumulative > u) return k;
  }
  // u beyond the rounded total: last coordinate with positive weight.
  for (Index k = d.size() - 1; k >= 0; --k) {
    if (d[k] > 0.0) return k;
  }
  return d.size() - 1;
}

GainState GainState::zeros(Index p, GainVariant variant) {
  return {Vector::Zero(p), Vector::Zero(p), 0, variant};
}

void accumulate_gain(GainState& state, const Vector& d, Index k, double g_k,
                     Index exploration_length) {
  if (k < 0 || k >= d.size()) throw InvalidArgument("gain: coordinate out of range");
  if (!(d[k] > 0.0)) {
    throw InvalidArgument("gain: sampled coordinate " + std::to_string(k) + " has zero weight");
  }
  double reward = 0.0;
  switch (state.variant) {
    case GainVariant::Avg: reward = g_k; break;
    case GainVariant::Abs: reward = std::abs(g_k); break;
    case GainVariant::Sqr: reward = g_k * g_k; break;
  }
  state.current[k] += reward / d[k] / static_cast<double>(exploration_length);
}

void merge_gains(GainState& state) {
  state.total += (state.current - state.total) / static_cast<double>(state.rounds + 1);
  state.rounds += 1;
  state.current.setZero();
}

Vector normalize(const Vector& gains, Normalization normalization, double eta) {
  const Index p = gains.size();
  if (p == 0) throw InvalidArgument("normalize: empty gain vector");
  if (normalization == Normalization::L1) {
    const Vector magnitude = gains.cwiseAbs();
    const double total = magnitude.sum();
    if (total == 0.0) return Vector::Constant(p, 1.0 / static_cast<double>(p));
    return magnitude / total;
  }
  if (!(eta > 0.0)) throw InvalidArgument("normalize: eta must be > 0");
  const Vector scaled = eta * gains;
  const Vector expd = (scaled.array() - scaled.maxCoeff()).exp();
  return expd / expd.sum();
}

Vector mixture_update(const Vector& phi, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("mixture: lambda " + format_double(lambda) + " outside [0, 1]");
  }
  check_simplex(phi);
  const auto p = static_cast<double>(phi.size());
  return ((1.0 - lambda) * phi.array() + lambda / p).matrix();
}

double coordinate_direction(PolicyKind kind, const Vector& d, Index k, double g_k,
                            IsScaling scaling) {
  if (!is_importance_sampled(kind)) return g_k;
  if (!(d[k] > 0.0)) {
    throw InvalidArgument("importance sampling: coordinate " + std::to_string(k) +
                          " has zero weight");
  }
  if (scaling == IsScaling::Raw) return g_k / d[k];
  // (1/p) / d_k is exactly 1 when d_k was stored as 1.0 / p.
  const double uniform = 1.0 / static_cast<double>(d.size());
  return g_k * (uniform / d[k]);
}

Vector descent_direction(PolicyKind kind, const Vector& d, Index k, const Vector& g,
                         IsScaling scaling) {
  if (kind == PolicyKind::Full) return g;
  if (k < 0 || k >= g.size()) throw InvalidArgument("direction: coordinate out of range");
  if (d.size() != g.size()) throw DimensionMismatch("direction: weights and gradient differ in size");
  Vector out = Vector::Zero(g.size());
  out[k] = coordinate_direction(kind, d, k, g[k], scaling);
  return out;
}

CoordinatePolicy::CoordinatePolicy(PolicyKind kind, Index dim, MusketeerConfig cfg,
                                   IsScaling scaling)
    : kind_(kind), dim_(dim), cfg_(cfg), scaling_(scaling) {
  if (dim <= 0) throw InvalidArgument("policy: dimension must be positive");
  if (is_adaptive(kind_)) cfg_.validate();
  if (kind_ != PolicyKind::Full) {
    weights_ = Vector::Constant(dim, 1.0 / static_cast<double>(dim));
  }
  gains_ = GainState::zeros(is_adaptive(kind_) ? dim : 0, cfg_.variant);
}

double CoordinatePolicy::min_weight() const {
  return kind_ == PolicyKind::Full ? 1.0 : weights_.minCoeff();
}

bool CoordinatePolicy::observe(Index k, double g_k) {
  if (!is_adaptive(kind_)) return false;
  accumulate_gain(gains_, weights_, k, g_k, cfg_.exploration_length);
  if (++round_step_ < cfg_.exploration_length) return false;
  exploit();
  return true;
}

void CoordinatePolicy::exploit() {
  const double lambda = cfg_.lambda.at(gains_.rounds);
  merge_gains(gains_);
  weights_ = mixture_update(normalize(gains_.total, cfg_.normalization, cfg_.eta), lambda);
  round_step_ = 0;
}

namespace {

nlohmann::json to_array(const Vector& v) {
  auto out = nlohmann::json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Vector from_array(const nlohmann::json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Index>(k)] = j[k].get<double>();
  return v;
}

template <class Enum, std::size_t N>
Enum parse_enum(const std::string& name, const Enum (&values)[N], std::string_view what) {
  for (Enum v : values) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("policy state: unknown " + std::string(what) + " '" + name + "'");
}

}  // namespace

nlohmann::json CoordinatePolicy::to_json() const {
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind_));
  j["dim"] = dim_;
  j["weights"] = to_array(weights_);
  j["gains"] = to_array(gains_.total);
  j["current_gains"] = to_array(gains_.current);
  j["rounds"] = gains_.rounds;
  j["round_step"] = round_step_;
  j["is_scaling"] = scaling_ == IsScaling::Raw ? "raw" : "normalized";
  if (is_adaptive(kind_)) {
    j["exploration_length"] = cfg_.exploration_length;
    j["normalization"] = std::string(to_string(cfg_.normalization));
    j["eta"] = cfg_.eta;
    j["lambda"] = cfg_.lambda.kind == LambdaSchedule::Kind::InverseLog
                      ? nlohmann::json("inverse-log")
                      : nlohmann::json(cfg_.lambda.value);
    j["gain_variant"] = std::string(to_string(cfg_.variant));
  }
  return j;
}

CoordinatePolicy CoordinatePolicy::from_json(const nlohmann::json& j) {
  try {
    static constexpr PolicyKind kinds[] = {PolicyKind::Full, PolicyKind::Uniform,
                                           PolicyKind::UniformIS, PolicyKind::Musketeer,
                                           PolicyKind::MusketeerIS};
    static constexpr GainVariant variants[] = {GainVariant::Avg, GainVariant::Abs,
                                               GainVariant::Sqr};
    static constexpr Normalization norms[] = {Normalization::L1, Normalization::Softmax};
    const auto kind = parse_enum(j.at("kind").get<std::string>(), kinds, "kind");
    MusketeerConfig cfg;
    if (is_adaptive(kind)) {
      cfg.exploration_length = j.at("exploration_length").get<Index>();
      cfg.normalization = parse_enum(j.at("normalization").get<std::string>(), norms, "normalization");
      cfg.eta = j.at("eta").get<double>();
      const auto& lam = j.at("lambda");
      if (lam.is_string()) {
        if (lam.get<std::string>() != "inverse-log") throw ConfigError("policy state: bad lambda");
        cfg.lambda = {LambdaSchedule::Kind::InverseLog, 0.0};
      } else {
        cfg.lambda = {LambdaSchedule::Kind::Constant, lam.get<double>()};
      }
      cfg.variant = parse_enum(j.at("gain_variant").get<std::string>(), variants, "gain variant");
    }
    const auto scaling = j.value("is_scaling", std::string("normalized")) == "raw"
                             ? IsScaling::Raw
                             : IsScaling::Normalized;
    CoordinatePolicy policy(kind, j.at("dim").get<Index>(), cfg, scaling);
    const Vector weights = from_array(j.at("weights"));
    if (kind != PolicyKind::Full) {
      if (weights.size() != policy.dim_) throw ConfigError("policy state: weights size mismatch");
      check_simplex(weights);
      policy.weights_ = weights;
    }
    if (is_adaptive(kind)) {
      policy.gains_.total = from_array(j.at("gains"));
      policy.gains_.current = from_array(j.at("current_gains"));
      if (policy.gains_.total.size() != policy.dim_ || policy.gains_.current.size() != policy.dim_) {
        throw ConfigError("policy state: gains size mismatch");
      }
      policy.gains_.rounds = j.at("rounds").get<Index>();
      policy.round_step_ = j.at("round_step").get<Index>();
    }
    return policy;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("policy state: ") + e.what());
  }
}

}  // namespace scgd
