#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "scgd/objectives.hpp"
#include "scgd/rng.hpp"

namespace scgd {

enum class EstimatorKind { FirstOrder, FiniteDifference, GaussianSmoothing, SphereSmoothing };

std::string_view to_string(EstimatorKind kind);

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::FiniteDifference;
  Index batch_size = 1;

  bool zeroth_order() const { return kind != EstimatorKind::FirstOrder; }
};

/// Full-vector gradient estimate.
///
/// `queries` counts objective evaluations actually performed. `nominal_queries`
/// counts them under the two-queries-per-coordinate convention used for
/// budget normalization (2p for a full finite-difference vector).
struct GradientSample {
  Vector values;
  std::int64_t queries = 0;
  std::int64_t nominal_queries = 0;
  double h = 0.0;
};

/// One coordinate of a gradient estimate.
struct CoordinateSample {
  Index coordinate = 0;
  double value = 0.0;
  std::int64_t queries = 0;
  double h = 0.0;
};

/// Forward difference (f(t + h e_k, xi) - f(t, xi)) / h of the mini-batch loss.
CoordinateSample fd_coordinate(const Objective& objective, const Vector& theta, Index k,
                               double h, std::span<const Index> batch);

/// All p forward differences sharing the base evaluation f(t, xi).
GradientSample fd_full(const Objective& objective, const Vector& theta, double h,
                       std::span<const Index> batch);

/// (f(t + hU, xi) - f(t, xi)) / h * U with U ~ N(0, I).
GradientSample gaussian_smoothing(const Objective& objective, const Vector& theta, double h,
                                  std::span<const Index> batch, Rng& rng);

/// Same formula with U uniform on the unit sphere.
GradientSample sphere_smoothing(const Objective& objective, const Vector& theta, double h,
                                std::span<const Index> batch, Rng& rng);

/// Exact mini-batch gradient; no function queries.
GradientSample first_order(const Objective& objective, const Vector& theta,
                           std::span<const Index> batch);

CoordinateSample first_order_coordinate(const Objective& objective, const Vector& theta,
                                        Index k, std::span<const Index> batch);

/// E|U|^6 for U ~ N(0, I_p): p (p + 2) (p + 4).
double gaussian_sixth_moment(Index p);

/// Bias constant c = sqrt(C) L / 2 with C = E|U|^6 of the direction measure:
/// 1 for finite differences and the sphere, p(p+2)(p+4) for Gaussian
/// smoothing, 0 for first order.
double bias_bound(double smoothness, EstimatorKind kind, Index p);

/// Draw `m` pairwise distinct indices uniformly from [0, n) (Floyd's
/// algorithm for m > 1, a single draw for m = 1).
void sample_batch(Rng& rng, Index n, Index m, std::vector<Index>& out);

}  // namespace scgd
