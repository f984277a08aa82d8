#pragma once

#include "diffcol/jacobians.hpp"
#include "diffcol/narrowphase.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace diffcol {

/// Gaussian randomized smoothing of the witness points over the pose tangent.
struct SmoothingConfig {
  int samples = 50;
  double noise = 1e-2;
  std::uint64_t seed = 0;
  /// Subtract the unperturbed witness from every sample. Unbiased because
  /// E[z] = 0; set to false for the raw score-function estimator.
  bool control_variate = true;
};

/// (1/M) sum_j x_i(q * exp(eps z_j)) z_j^T / eps, z_j ~ N(0, I_6), for both
/// witness points. Perturbed solves are warm-started from the nominal one and
/// dropped when they fail; more than half failing sets kSampleFailure.
WitnessJacobians zeroth_order_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                        const Pose& pose, const SmoothingConfig& cfg,
                                        const GjkConfig& gjk_cfg = {});

/// Same, reusing an already computed solve at `pose`.
WitnessJacobians zeroth_order_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                        const Pose& pose, const ProximityResult& nominal,
                                        const SmoothingConfig& cfg, const GjkConfig& gjk_cfg = {});

/// Central differences along the six tangent basis directions (12 solves).
WitnessJacobians finite_difference_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                             const Pose& pose, double increment,
                                             const GjkConfig& gjk_cfg = {});

WitnessJacobians finite_difference_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                             const Pose& pose, const ProximityResult& nominal,
                                             double increment, const GjkConfig& gjk_cfg = {});

struct WitnessPair {
  Eigen::Vector3d witness1;
  Eigen::Vector3d witness2;
};

/// Witness points of the M perturbed poses the estimator would sample.
std::vector<WitnessPair> smoothed_witness_cloud(const ConvexShape& shape1,
                                                const ConvexShape& shape2, const Pose& pose,
                                                const SmoothingConfig& cfg,
                                                const GjkConfig& gjk_cfg = {});

/// `sample_index,w1x,w1y,w1z,w2x,w2y,w2z`.
void write_cloud_csv(const std::string& path, const std::vector<WitnessPair>& cloud);

/// The tangent samples z_1..z_M used for a given seed, in sample order.
std::vector<Tangent> tangent_samples(int count, std::uint64_t seed);

}  // namespace diffcol
