#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace scgd {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Synthetic or loaded data: `features` is n x p, `labels` has length n.
struct Dataset {
  Matrix features;
  Vector labels;
  bool classification = false;

  Index n() const { return features.rows(); }
  Index p() const { return features.cols(); }

  /// Throws InvalidArgument when shapes disagree or, for classification,
  /// a label is not in {-1, +1}.
  void validate() const;
};

enum class LabelModel { LinearGaussian, LogisticBernoulli };

struct BlockStructureConfig {
  Index n = 1000;
  Index p = 50;
  double alpha = 5.0;  // decay exponent of the group variances
  Index block_size = 10;
  LabelModel label_model = LabelModel::LinearGaussian;
  std::uint64_t seed = 0;
};

/// Variance of column group k (0-based): (k + 1)^(-alpha).
double group_variance(double alpha, Index group);

/// Columns of group k (columns kB .. kB+B-1) are i.i.d. N(0, (k+1)^-alpha).
/// Labels come from the hidden vector w = (1, ..., 1) / sqrt(p):
/// y = Xw + N(0, 1) for regression, y = +1 with probability sigmoid(Xw)
/// otherwise -1 for classification. Features are drawn column by column,
/// then the label noise, all from one Rng seeded with cfg.seed.
Dataset generate_block_dataset(const BlockStructureConfig& cfg);

/// CSV with header x1,...,xp,y and shortest round-trip decimals.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path, bool classification);

enum class ObjectiveKind { Ridge, Logistic, Quadratic, AxisQuadratic };

std::string_view to_string(ObjectiveKind kind);

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::Quadratic;
  double mu = 0.0;
  std::shared_ptr<const Dataset> dataset;  // Ridge / Logistic only
  Index dim = 2;                           // toys only; ERM uses dataset->p()
};

/// Test objectives with exact values and gradients.
///
///   Ridge:         f_i = (y_i - <x_i, t>)^2 / 2 + mu/2 |t|^2
///   Logistic:      f_i = log(1 + exp(-y_i <x_i, t>)) + mu |t|^2
///   Quadratic:     f = |t|^2 / 2
///   AxisQuadratic: f = t_1^2 / 2
///
/// The full objective is the mean of f_i over all samples. Toys have a single
/// (deterministic) sample with index 0. Indices are 0-based.
class Objective {
 public:
  explicit Objective(ObjectiveSpec spec);

  static Objective ridge(std::shared_ptr<const Dataset> data, double mu);
  static Objective logistic(std::shared_ptr<const Dataset> data, double mu);
  static Objective quadratic(Index dim = 2);
  static Objective axis_quadratic(Index dim = 2);

  ObjectiveKind kind() const { return spec_.kind; }
  Index dim() const { return dim_; }
  Index sample_count() const;
  double mu() const { return spec_.mu; }
  const Dataset* dataset() const { return spec_.dataset.get(); }
  const ObjectiveSpec& spec() const { return spec_; }

  double value(const Vector& theta) const;

  /// Mean of f_i over `batch` plus the regularizer. `batch` must be
  /// non-empty, in range and pairwise distinct.
  double sample_loss(const Vector& theta, std::span<const Index> batch) const;

  Vector gradient(const Vector& theta) const;
  Vector gradient(const Vector& theta, std::span<const Index> batch) const;

  /// Partial derivative along coordinate k of the mini-batch loss.
  double partial(const Vector& theta, Index k,
                 std::span<const Index> batch) const;

  /// Largest Hessian eigenvalue (Ridge, toys) or the standard upper bound
  /// lambda_max(X^T X) / (4n) + 2 mu (Logistic).
  double smoothness() const;

 private:
  void check_dim(const Vector& theta) const;
  void check_batch(std::span<const Index> batch) const;
  double regularizer(const Vector& theta) const;
  double sample_term(const Vector& theta, Index i) const;

  ObjectiveSpec spec_;
  Index dim_ = 0;
};

struct Optimum {
  Vector theta;
  double value = 0.0;
  double gradient_inf_norm = 0.0;
  Index iterations = 0;
};

struct OracleOptions {
  double tolerance = 1e-10;       // on |grad f|_inf (Logistic)
  Index max_iterations = 1000000;
};

/// Ridge: regularized normal equations. Logistic: gradient descent with
/// Armijo backtracking until |grad f|_inf <= tolerance, throws
/// NonConvergence past the cap. Toys: the origin.
Optimum solve_oracle(const Objective& objective, const OracleOptions& opts = {});

}  // namespace scgd
