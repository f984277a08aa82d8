#pragma once

#include "diffcol/errors.hpp"
#include "diffcol/se3.hpp"
#include "diffcol/shapes.hpp"

#include <Eigen/Core>

#include <array>
#include <string>
#include <variant>
#include <vector>

namespace diffcol {

struct GjkConfig {
  /// Stop when the Frank-Wolfe duality gap drops below tolerance * |x|.
  double tolerance = 1e-8;
  int max_iterations = 128;
  int epa_max_faces = 1024;
  double epa_tolerance = 1e-8;
  /// Newton polish of the optimality condition when both shapes have
  /// analytic support Hessians (spheres, ellipsoids).
  bool refine_smooth = true;
};

/// A point of the Minkowski difference w = s1 - s2 obtained as the support
/// of D in direction `dir`. Everything is expressed in the frame of shape 1.
struct MinkowskiVertex {
  Eigen::Vector3d w;
  Eigen::Vector3d s1;
  Eigen::Vector3d s2;
  Eigen::Vector3d dir;
};

/// Which optimality condition the separation vector satisfies:
/// x* in dsigma_D(-x*) when separated, x* in dsigma_D(x*) when penetrating.
enum class Branch { Separated, Penetrating };

struct ProximityResult {
  Eigen::Vector3d witness1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d witness2 = Eigen::Vector3d::Zero();
  /// witness1 - witness2.
  Eigen::Vector3d separation = Eigen::Vector3d::Zero();
  double signed_distance = 0.0;
  bool colliding = false;
  /// witness2 in the frame of shape 2.
  Eigen::Vector3d witness2_local = Eigen::Vector3d::Zero();
  Branch branch = Branch::Separated;
  /// Unit vector along `separation`; stays defined when the separation vanishes.
  Eigen::Vector3d separation_direction = Eigen::Vector3d::UnitX();
  int iterations = 0;
  int epa_iterations = 0;
  Flags flags = kConverged;
  /// Terminal GJK simplex, or the closest EPA face.
  std::array<MinkowskiVertex, 4> simplex{};
  int simplex_size = 0;

  bool ok() const { return (flags & kFailureFlags) == 0; }
};

/// GJK stopped with the origin enclosed; the simplex seeds EPA.
struct PenetrationCase {
  std::array<MinkowskiVertex, 4> simplex{};
  int simplex_size = 0;
  int iterations = 0;
};

/// Support directions of a previous solve, used to rebuild its simplex.
struct GjkSeed {
  std::vector<Eigen::Vector3d> directions;
  bool empty() const { return directions.empty(); }
};

std::variant<ProximityResult, PenetrationCase> gjk(const ConvexShape& shape1,
                                                   const ConvexShape& shape2, const Pose& pose,
                                                   const GjkConfig& cfg = {},
                                                   const GjkSeed& seed = {});

ProximityResult epa(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                    const PenetrationCase& seed_simplex, const GjkConfig& cfg = {});

/// GJK, then EPA when the shapes overlap. Contacts with |d| < tolerance are
/// reported as non-colliding with distance 0 and the kTouching flag.
ProximityResult proximity(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                          const GjkConfig& cfg = {}, const GjkSeed& seed = {});

GjkSeed warm_start(const ProximityResult& previous);

/// Support of the Minkowski difference A1 - T(q) A2 in direction `dir`.
MinkowskiVertex minkowski_support(const ConvexShape& shape1, const ConvexShape& shape2,
                                  const Pose& pose, const Eigen::Vector3d& dir);

/// Frank-Wolfe duality gap <x, x - s> with s the support of D at -x.
double duality_gap(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                   const Eigen::Vector3d& x);

/// Terminal simplex as an OBJ (vertices w, plus a face for 3+ points).
void write_simplex_obj(const std::string& path, const ProximityResult& result);

}  // namespace diffcol
