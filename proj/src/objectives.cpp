#include "scgd/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scgd/errors.hpp"
#include "scgd/format.hpp"
#include "scgd/rng.hpp"

namespace scgd {

namespace {

// log(1 + exp(-z)) without overflow.
double log1p_exp_neg(double z) {
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// 1 / (1 + exp(-s))
double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

bool is_toy(ObjectiveKind kind) {
  return kind == ObjectiveKind::Quadratic || kind == ObjectiveKind::AxisQuadratic;
}

}  // namespace

void Dataset::validate() const {
  if (labels.size() != features.rows()) {
    throw InvalidArgument("dataset: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(features.rows()) + " rows");
  }
  if (features.rows() == 0 || features.cols() == 0) {
    throw InvalidArgument("dataset: empty feature matrix");
  }
  if (classification) {
    for (Index i = 0; i < labels.size(); ++i) {
      if (labels[i] != 1.0 && labels[i] != -1.0) {
        throw InvalidArgument("dataset: classification label " + format_double(labels[i]) +
                              " at row " + std::to_string(i) + " is not +-1");
      }
    }
  }
}

double group_variance(double alpha, Index group) {
  return std::pow(static_cast<double>(group + 1), -alpha);
}

Dataset generate_block_dataset(const BlockStructureConfig& cfg) {
  if (cfg.n <= 0 || cfg.p <= 0) throw InvalidArgument("block dataset: n and p must be positive");
  if (cfg.block_size <= 0 || cfg.p % cfg.block_size != 0) {
    throw InvalidArgument("block dataset: block size " + std::to_string(cfg.block_size) +
                          " does not divide p = " + std::to_string(cfg.p));
  }
  if (!(cfg.alpha >= 0.0)) throw InvalidArgument("block dataset: alpha must be >= 0");

  Rng rng(cfg.seed);
  Dataset data;
  data.classification = cfg.label_model == LabelModel::LogisticBernoulli;
  data.features.resize(cfg.n, cfg.p);
  for (Index j = 0; j < cfg.p; ++j) {
    const double sd = std::sqrt(group_variance(cfg.alpha, j / cfg.block_size));
    for (Index i = 0; i < cfg.n; ++i) data.features(i, j) = sd * rng.normal();
  }

  const Vector hidden = Vector::Constant(cfg.p, 1.0 / std::sqrt(static_cast<double>(cfg.p)));
  const Vector signal = data.features * hidden;
  data.labels.resize(cfg.n);
  for (Index i = 0; i < cfg.n; ++i) {
    if (data.classification) {
      data.labels[i] = rng.uniform() < sigmoid(signal[i]) ? 1.0 : -1.0;
    } else {
      data.labels[i] = signal[i] + rng.normal();
    }
  }
  return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  for (Index j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) out << format_double(data.features(i, j)) << ',';
    out << format_double(data.labels[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Dataset read_dataset_csv(const std::filesystem::path& path, bool classification) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset '" + path.string() + "' is empty");
  const auto header = split(trim(line), ',');
  if (header.size() < 2 || header.back() != "y") {
    throw ConfigError("dataset '" + path.string() + "': header must be x1,...,xp,y");
  }
  const auto p = static_cast<Index>(header.size() - 1);
  for (Index j = 0; j < p; ++j) {
    if (header[j] != "x" + std::to_string(j + 1)) {
      throw ConfigError("dataset '" + path.string() + "': unexpected column '" +
                        std::string(header[j]) + "'");
    }
  }
  std::vector<double> values;
  Index rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (static_cast<Index>(cells.size()) != p + 1) {
      throw ConfigError("dataset '" + path.string() + "': row " + std::to_string(rows + 1) +
                        " has " + std::to_string(cells.size()) + " cells");
    }
    for (auto cell : cells) values.push_back(parse_double(cell, path.string()));
    ++rows;
  }
  Dataset data;
  data.classification = classification;
  data.features.resize(rows, p);
  data.labels.resize(rows);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < p; ++j) data.features(i, j) = values[i * (p + 1) + j];
    data.labels[i] = values[i * (p + 1) + p];
  }
  data.validate();
  return data;
}

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Ridge: return "ridge";
    case ObjectiveKind::Logistic: return "logistic";
    case ObjectiveKind::Quadratic: return "quadratic";
    case ObjectiveKind::AxisQuadratic: return "axis-quadratic";
  }
  return "?";
}

Objective::Objective(ObjectiveSpec spec) : spec_(std::move(spec)) {
  if (!(spec_.mu >= 0.0)) throw InvalidArgument("objective: mu must be >= 0");
  if (is_toy(spec_.kind)) {
    if (spec_.dataset) throw InvalidArgument("objective: toy objectives take no dataset");
    if (spec_.dim <= 0) throw InvalidArgument("objective: dimension must be positive");
    dim_ = spec_.dim;
  } else {
    if (!spec_.dataset) throw InvalidArgument("objective: ridge/logistic require a dataset");
    spec_.dataset->validate();
    if (spec_.kind == ObjectiveKind::Logistic && !spec_.dataset->classification) {
      throw InvalidArgument("objective: logistic requires +-1 labels");
    }
    dim_ = spec_.dataset->p();
  }
}

Objective Objective::ridge(std::shared_ptr<const Dataset> data, double mu) {
  return Objective({ObjectiveKind::Ridge, mu, std::move(data), 0});
}

Objective Objective::logistic(std::shared_ptr<const Dataset> data, double mu) {
  return Objective({ObjectiveKind::Logistic, mu, std::move(data), 0});
}

Objective Objective::quadratic(Index dim) {
  return Objective({ObjectiveKind::Quadratic, 0.0, nullptr, dim});
}

Objective Objective::axis_quadratic(Index dim) {
  return Objective({ObjectiveKind::AxisQuadratic, 0.0, nullptr, dim});
}

Index Objective::sample_count() const {
  return is_toy(spec_.kind) ? 1 : spec_.dataset->n();
}

void Objective::check_dim(const Vector& theta) const {
  if (theta.size() != dim_) {
    throw DimensionMismatch("objective: parameter has dimension " + std::to_string(theta.size()) +
                            ", expected " + std::to_string(dim_));
  }
}

void Objective::check_batch(std::span<const Index> batch) const {
  if (batch.empty()) throw InvalidArgument("objective: empty sample batch");
  const Index n = sample_count();
  for (Index i : batch) {
    if (i < 0 || i >= n) {
      throw InvalidArgument("objective: sample index " + std::to_string(i) +
                            " out of range [0, " + std::to_string(n) + ")");
    }
  }
  if (batch.size() > 1) {
    std::vector<Index> sorted(batch.begin(), batch.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidArgument("objective: batch indices must be pairwise distinct");
    }
  }
}

double Objective::regularizer(const Vector& theta) const {
  switch (spec_.kind) {
    case ObjectiveKind::Ridge: return 0.5 * spec_.mu * theta.squaredNorm();
    case ObjectiveKind::Logistic: return spec_.mu * theta.squaredNorm();
    default: return 0.0;
  }
}

double Objective::sample_term(const Vector& theta, Index i) const {
  switch (spec_.kind) {
    case ObjectiveKind::Ridge: {
      const auto& d = *spec_.dataset;
      const double r = d.labels[i] - d.features.row(i).dot(theta);
      return 0.5 * r * r;
    }
    case ObjectiveKind::Logistic: {
      const auto& d = *spec_.dataset;
      return log1p_exp_neg(d.labels[i] * d.features.row(i).dot(theta));
    }
    case ObjectiveKind::Quadratic: return 0.5 * theta.squaredNorm();
    case ObjectiveKind::AxisQuadratic: return 0.5 * theta[0] * theta[0];
  }
  return 0.0;
}

double Objective::value(const Vector& theta) const {
  check_dim(theta);
  switch (spec_.kind) {
    case ObjectiveKind::Ridge: {
      const auto& d = *spec_.dataset;
      const Vector r = d.labels - d.features * theta;
      return r.squaredNorm() / (2.0 * static_cast<double>(d.n())) + regularizer(theta);
    }
    case ObjectiveKind::Logistic: {
      const auto& d = *spec_.dataset;
      const Vector z = (d.features * theta).cwiseProduct(d.labels);
      double sum = 0.0;
      for (Index i = 0; i < z.size(); ++i) sum += log1p_exp_neg(z[i]);
      return sum / static_cast<double>(d.n()) + regularizer(theta);
    }
    default: return sample_term(theta, 0);
  }
}

double Objective::sample_loss(const Vector& theta, std::span<const Index> batch) const {
  check_dim(theta);
  check_batch(batch);
  double sum = 0.0;
  for (Index i : batch) sum += sample_term(theta, i);
  return sum / static_cast<double>(batch.size()) + regularizer(theta);
}

Vector Objective::gradient(const Vector& theta) const {
  check_dim(theta);
  switch (spec_.kind) {
    case ObjectiveKind::Ridge: {
      const auto& d = *spec_.dataset;
      const Vector r = d.labels - d.features * theta;
      return -(d.features.transpose() * r) / static_cast<double>(d.n()) + spec_.mu * theta;
    }
    case ObjectiveKind::Logistic: {
      const auto& d = *spec_.dataset;
      const Vector z = (d.features * theta).cwiseProduct(d.labels);
      Vector w(z.size());
      for (Index i = 0; i < z.size(); ++i) w[i] = -d.labels[i] * sigmoid(-z[i]);
      return d.features.transpose() * w / static_cast<double>(d.n()) + 2.0 * spec_.mu * theta;
    }
    case ObjectiveKind::Quadratic: return theta;
    case ObjectiveKind::AxisQuadratic: {
      Vector g = Vector::Zero(dim_);
      g[0] = theta[0];
      return g;
    }
  }
  return {};
}

Vector Objective::gradient(const Vector& theta, std::span<const Index> batch) const {
  check_dim(theta);
  check_batch(batch);
  if (is_toy(spec_.kind)) return gradient(theta);
  const auto& d = *spec_.dataset;
  Vector g = Vector::Zero(dim_);
  for (Index i : batch) {
    const double dot = d.features.row(i).dot(theta);
    const double scale = spec_.kind == ObjectiveKind::Ridge
                             ? -(d.labels[i] - dot)
                             : -d.labels[i] * sigmoid(-d.labels[i] * dot);
    g += scale * d.features.row(i).transpose();
  }
  g /= static_cast<double>(batch.size());
  g += (spec_.kind == ObjectiveKind::Ridge ? 1.0 : 2.0) * spec_.mu * theta;
  return g;
}

double Objective::partial(const Vector& theta, Index k, std::span<const Index> batch) const {
  check_dim(theta);
  check_batch(batch);
  if (k < 0 || k >= dim_) {
    throw InvalidArgument("objective: coordinate " + std::to_string(k) + " out of range");
  }
  switch (spec_.kind) {
    case ObjectiveKind::Quadratic: return theta[k];
    case ObjectiveKind::AxisQuadratic: return k == 0 ? theta[0] : 0.0;
    default: break;
  }
  const auto& d = *spec_.dataset;
  double sum = 0.0;
  for (Index i : batch) {
    const double dot = d.features.row(i).dot(theta);
    const double scale = spec_.kind == ObjectiveKind::Ridge
                             ? -(d.labels[i] - dot)
                             : -d.labels[i] * sigmoid(-d.labels[i] * dot);
    sum += scale * d.features(i, k);
  }
  sum /= static_cast<double>(batch.size());
  return sum + (spec_.kind == ObjectiveKind::Ridge ? 1.0 : 2.0) * spec_.mu * theta[k];
}

double Objective::smoothness() const {
  if (is_toy(spec_.kind)) return 1.0;
  const auto& d = *spec_.dataset;
  const Matrix gram = d.features.transpose() * d.features / static_cast<double>(d.n());
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  return spec_.kind == ObjectiveKind::Ridge ? top + spec_.mu : top / 4.0 + 2.0 * spec_.mu;
}

namespace {

Optimum solve_ridge(const Objective& objective) {
  const auto& d = *objective.dataset();
  const double n = static_cast<double>(d.n());
  Matrix system = d.features.transpose() * d.features / n;
  system.diagonal().array() += objective.mu();
  const Vector rhs = d.features.transpose() * d.labels / n;
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("ridge oracle: normal equations are singular (mu = 0, rank deficient)");
  }
  Optimum opt;
  opt.theta = llt.solve(rhs);
  opt.value = objective.value(opt.theta);
  opt.gradient_inf_norm = objective.gradient(opt.theta).lpNorm<Eigen::Infinity>();
  return opt;
}

Optimum solve_logistic(const Objective& objective, const OracleOptions& opts) {
  constexpr double kArmijo = 1e-4;
  const double min_step = 1.0 / objective.smoothness();

  Vector theta = Vector::Zero(objective.dim());
  double f = objective.value(theta);
  Vector g = objective.gradient(theta);
  double step = min_step;
  for (Index it = 0; it < opts.max_iterations; ++it) {
    const double g_inf = g.lpNorm<Eigen::Infinity>();
    if (g_inf <= opts.tolerance) return {theta, f, g_inf, it};

    // Try a longer step first, halve until sufficient decrease; 1/L always
    // decreases f for an L-smooth objective so it is the floor.
    step *= 2.0;
    const double g_sq = g.squaredNorm();
    Vector candidate;
    double f_candidate = 0.0;
    while (true) {
      if (step <= min_step) step = min_step;
      candidate = theta - step * g;
      f_candidate = objective.value(candidate);
      if (step == min_step || f_candidate <= f - kArmijo * step * g_sq) break;
      step *= 0.5;
    }
    theta = std::move(candidate);
    f = f_candidate;
    g = objective.gradient(theta);
  }
  const double g_inf = g.lpNorm<Eigen::Infinity>();
  if (g_inf <= opts.tolerance) return {theta, f, g_inf, opts.max_iterations};
  throw NonConvergence("logistic oracle: |grad|_inf = " + format_double(g_inf) + " after " +
                       std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace

Optimum solve_oracle(const Objective& objective, const OracleOptions& opts) {
  switch (objective.kind()) {
    case ObjectiveKind::Ridge: return solve_ridge(objective);
    case ObjectiveKind::Logistic: return solve_logistic(objective, opts);
    default: {
      Optimum opt;
      opt.theta = Vector::Zero(objective.dim());
      opt.value = 0.0;
      return opt;
    }
  }
}

}  // namespace scgd
