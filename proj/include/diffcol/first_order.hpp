#pragma once

#include "diffcol/jacobians.hpp"
#include "diffcol/narrowphase.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace diffcol {

struct AnalyticHessian {};

/// (1/M) sum_j (grad sigma(x + eps z_j) - grad sigma(x)) z_j^T / eps.
struct GaussianHessian {
  int samples = 20;
  double noise = 1e-3;
  std::uint64_t seed = 0;
};

/// V (diag(a) - a a^T) V^T / eps with a = softmax(V^T x / eps) over the
/// vertices within `depth` hops of the support vertex.
struct GumbelHessian {
  double temperature = 1e-4;
  int depth = 1;
};

using HessianBackend = std::variant<AnalyticHessian, GaussianHessian, GumbelHessian>;

EstimatorKind estimator_kind(const HessianBackend& backend);

/// Support Hessian of one shape at `dir`, symmetrized. Gumbel needs a mesh
/// (BackendMismatch otherwise); the analytic backend throws Unavailable for
/// shapes without a closed form.
Eigen::Matrix3d support_hessian(const ConvexShape& shape, const Eigen::Vector3d& dir,
                                const HessianBackend& backend);

/// Gumbel Hessian over an explicit vertex set.
Eigen::Matrix3d gumbel_hessian(const Eigen::Matrix3Xd& vertices, const Eigen::Vector3d& dir,
                               double temperature);

struct ImplicitSystem {
  Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
  Matrix36 B = Matrix36::Zero();
  Eigen::Matrix3d H1 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d H2 = Eigen::Matrix3d::Zero();
  double regularization = 0.0;
  Branch branch = Branch::Separated;
};

/// Linearization of the optimality condition at a converged solve. For a
/// pair mixing a mesh with a smooth shape under the Gumbel backend, the
/// smooth shape uses its analytic Hessian. Boxes use the Gumbel form over
/// their corners.
ImplicitSystem assemble_system(const ProximityResult& prox, const Pose& pose,
                               const ConvexShape& shape1, const ConvexShape& shape2,
                               const HessianBackend& backend);

/// Solves A dx = -B, regularizing A when it is ill-conditioned; sets
/// `sys.regularization` and reports kSingularSystem when that fails.
Flags solve_implicit(ImplicitSystem& sys, Matrix36& d_sep);

WitnessJacobians first_order_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                       const Pose& pose, const HessianBackend& backend,
                                       const GjkConfig& gjk_cfg = {});

WitnessJacobians first_order_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                       const Pose& pose, const ProximityResult& nominal,
                                       const HessianBackend& backend);

/// `name,row,c0..c5` rows for A, B, H1, H2 and the regularization.
void write_system_csv(const std::string& path, const ImplicitSystem& sys);

}  // namespace diffcol
