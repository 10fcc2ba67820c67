#include "scgd/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "scgd/errors.hpp"

namespace scgd {

namespace {

void check_h(double h) {
  if (!(h > 0.0)) throw InvalidArgument("gradient estimator: smoothing h must be > 0");
}

GradientSample directional(const Objective& objective, const Vector& theta, double h,
                           std::span<const Index> batch, const Vector& direction) {
  const double base = objective.sample_loss(theta, batch);
  const double moved = objective.sample_loss(theta + h * direction, batch);
  GradientSample out;
  out.values = ((moved - base) / h) * direction;
  out.queries = 2;
  out.nominal_queries = 2;
  out.h = h;
  return out;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::FirstOrder: return "first-order";
    case EstimatorKind::FiniteDifference: return "finite-difference";
    case EstimatorKind::GaussianSmoothing: return "gaussian-smoothing";
    case EstimatorKind::SphereSmoothing: return "sphere-smoothing";
  }
  return "?";
}

CoordinateSample fd_coordinate(const Objective& objective, const Vector& theta, Index k,
                               double h, std::span<const Index> batch) {
  check_h(h);
  if (k < 0 || k >= objective.dim()) {
    throw InvalidArgument("fd_coordinate: coordinate " + std::to_string(k) + " out of range");
  }
  const double base = objective.sample_loss(theta, batch);
  Vector probe = theta;
  probe[k] += h;
  const double moved = objective.sample_loss(probe, batch);
  return {k, (moved - base) / h, 2, h};
}

GradientSample fd_full(const Objective& objective, const Vector& theta, double h,
                       std::span<const Index> batch) {
  check_h(h);
  const Index p = objective.dim();
  const double base = objective.sample_loss(theta, batch);
  GradientSample out;
  out.values.resize(p);
  Vector probe = theta;
  for (Index k = 0; k < p; ++k) {
    probe[k] = theta[k] + h;
    out.values[k] = (objective.sample_loss(probe, batch) - base) / h;
    probe[k] = theta[k];
  }
  out.queries = p + 1;
  out.nominal_queries = 2 * p;
  out.h = h;
  return out;
}

GradientSample gaussian_smoothing(const Objective& objective, const Vector& theta, double h,
                                  std::span<const Index> batch, Rng& rng) {
  check_h(h);
  Vector u(objective.dim());
  for (Index k = 0; k < u.size(); ++k) u[k] = rng.normal();
  return directional(objective, theta, h, batch, u);
}

GradientSample sphere_smoothing(const Objective& objective, const Vector& theta, double h,
                                std::span<const Index> batch, Rng& rng) {
  check_h(h);
  Vector u(objective.dim());
  double norm = 0.0;
  do {
    for (Index k = 0; k < u.size(); ++k) u[k] = rng.normal();
    norm = u.norm();
  } while (norm == 0.0);
  u /= norm;
  return directional(objective, theta, h, batch, u);
}

GradientSample first_order(const Objective& objective, const Vector& theta,
                           std::span<const Index> batch) {
  GradientSample out;
  out.values = objective.gradient(theta, batch);
  return out;
}

CoordinateSample first_order_coordinate(const Objective& objective, const Vector& theta,
                                        Index k, std::span<const Index> batch) {
  return {k, objective.partial(theta, k, batch), 0, 0.0};
}

double gaussian_sixth_moment(Index p) {
  const auto d = static_cast<double>(p);
  return d * (d + 2.0) * (d + 4.0);
}

double bias_bound(double smoothness, EstimatorKind kind, Index p) {
  double moment = 1.0;
  switch (kind) {
    case EstimatorKind::FirstOrder: return 0.0;
    case EstimatorKind::FiniteDifference:
    case EstimatorKind::SphereSmoothing: moment = 1.0; break;
    case EstimatorKind::GaussianSmoothing: moment = gaussian_sixth_moment(p); break;
  }
  return std::sqrt(moment) * smoothness / 2.0;
}

void sample_batch(Rng& rng, Index n, Index m, std::vector<Index>& out) {
  if (m <= 0 || m > n) {
    throw InvalidArgument("batch size " + std::to_string(m) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  out.resize(static_cast<std::size_t>(m));
  if (m == 1) {
    out[0] = rng.below(n);
    return;
  }
  out.clear();
  for (Index j = n - m; j < n; ++j) {
    const Index t = rng.below(j + 1);
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(j);
    }
  }
}

}  // namespace scgd
