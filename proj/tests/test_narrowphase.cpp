#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "diffcol/narrowphase.hpp"
#include "diffcol/random.hpp"
#include "oracles.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace diffcol;

namespace {

ConvexMesh random_mesh(Rng& rng, int n) {
  const Eigen::Vector3d axes = uniform_vector(rng, 0.5, 1.5);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) pts.push_back(axes.cwiseProduct(uniform_direction(rng)));
  return build_convex_mesh(pts);
}

Pose random_pose_at(Rng& rng, double distance) {
  const Eigen::Vector3d t = uniform_direction(rng) * distance;
  return Pose(t, uniform_rotation(rng));
}

Eigen::Matrix3Xd transformed(const ConvexMesh& m, const Pose& pose) {
  return (pose.rotationMatrix() * m.vertices()).colwise() + pose.translation();
}

Pose translation(double x, double y, double z) {
  return Pose(Eigen::Vector3d(x, y, z), Eigen::Quaterniond::Identity());
}

}  // namespace

TEST_CASE("separated unit spheres") {
  const auto r = proximity(make_sphere(1), make_sphere(1), translation(3, 0, 0));
  CHECK(r.ok());
  CHECK_FALSE(r.colliding);
  CHECK(r.signed_distance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((r.witness1 - Eigen::Vector3d(1, 0, 0)).norm() < 1e-10);
  CHECK((r.witness2 - Eigen::Vector3d(2, 0, 0)).norm() < 1e-10);
  CHECK((r.witness2_local - Eigen::Vector3d(-1, 0, 0)).norm() < 1e-10);
  CHECK(r.branch == Branch::Separated);
}

TEST_CASE("penetrating unit spheres") {
  const auto r = proximity(make_sphere(1), make_sphere(1), translation(1, 0, 0));
  CHECK(r.ok());
  CHECK(r.colliding);
  CHECK(r.signed_distance == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(std::abs(r.separation.normalized().dot(Eigen::Vector3d(1, 0, 0))) > 1 - 1e-8);
  CHECK(r.branch == Branch::Penetrating);
}

TEST_CASE("touching spheres") {
  const auto r = proximity(make_sphere(1), make_sphere(1), translation(0, 2, 0));
  CHECK(std::abs(r.signed_distance) <= 1e-6);
  CHECK_FALSE(r.colliding);
  CHECK((r.flags & kTouching) != 0);
  CHECK(r.separation_direction.norm() == doctest::Approx(1.0));
}

TEST_CASE("overlapping boxes go through EPA") {
  const auto shape = make_box({1, 1, 1});
  const auto g = gjk(shape, shape, translation(1.5, 0, 0));
  CHECK(std::holds_alternative<PenetrationCase>(g));
  const auto r = proximity(shape, shape, translation(1.5, 0, 0));
  CHECK(r.colliding);
  CHECK(r.signed_distance == doctest::Approx(-0.5).epsilon(1e-8));
  CHECK(std::abs(std::abs(r.separation(0)) - 0.5) < 1e-8);
  CHECK(r.separation.tail<2>().norm() < 1e-8);
}

TEST_CASE("separation is the witness difference and the distance is signed") {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const ConvexMesh a = random_mesh(rng, 12);
    const ConvexMesh b = random_mesh(rng, 12);
    const auto r = proximity(a, b, random_pose_at(rng, uniform(rng, 0.0, 3.0)));
    CHECK((r.separation - (r.witness1 - r.witness2)).norm() == 0.0);
    if (r.colliding) {
      CHECK(r.signed_distance == doctest::Approx(-r.separation.norm()));
    } else {
      CHECK(r.signed_distance == doctest::Approx(r.separation.norm()));
    }
  }
}

TEST_CASE("mesh distances match the minimum-norm-point oracle") {
  Rng rng(32);
  int separated = 0;
  for (int i = 0; i < 1000; ++i) {
    const ConvexMesh a = random_mesh(rng, 12);
    const ConvexMesh b = random_mesh(rng, 12);
    const Pose pose = random_pose_at(rng, uniform(rng, 1.0, 4.0));
    const auto r = proximity(a, b, pose);
    const Eigen::Vector3d x = oracle::min_norm_point(oracle::minkowski_difference(a.vertices(), transformed(b, pose)));
    if (r.colliding) continue;
    ++separated;
    CHECK(std::abs(r.signed_distance - x.norm()) < 1e-6);
  }
  CHECK(separated > 500);
}

TEST_CASE("penetration depth matches the brute-force face oracle") {
  Rng rng(33);
  int colliding = 0;
  for (int i = 0; i < 200; ++i) {
    const ConvexMesh a = random_mesh(rng, 8);
    const ConvexMesh b = random_mesh(rng, 8);
    const Pose pose = random_pose_at(rng, uniform(rng, 0.0, 1.0));
    const auto r = proximity(a, b, pose);
    if (!r.colliding) continue;
    ++colliding;
    const double depth = oracle::penetration_depth(oracle::minkowski_difference(a.vertices(), transformed(b, pose)));
    CHECK(std::abs(-r.signed_distance - depth) < 1e-7);
  }
  CHECK(colliding > 100);
}

TEST_CASE("coincident tetrahedra") {
  const ConvexMesh tet = build_convex_mesh({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}});
  const auto r = proximity(tet, tet, Pose::Identity());
  CHECK(r.colliding);
  const double depth = oracle::penetration_depth(oracle::minkowski_difference(tet.vertices(), tet.vertices()));
  CHECK(-r.signed_distance == doctest::Approx(depth).epsilon(1e-8));
}

TEST_CASE("Frank-Wolfe gap at convergence") {
  Rng rng(34);
  const GjkConfig cfg;
  for (int i = 0; i < 500; ++i) {
    const ConvexMesh a = random_mesh(rng, 20);
    const ConvexShape b = (i % 2) ? ConvexShape(make_ellipsoid(uniform_vector(rng, 0.5, 1.5)))
                                  : ConvexShape(random_mesh(rng, 20));
    const Pose pose = random_pose_at(rng, uniform(rng, 2.0, 4.0));
    const auto r = proximity(a, b, pose, cfg);
    if (r.colliding || !r.ok()) continue;
    // sigma_D(-x) + |x|^2 is the gap <x, x - s> with s the support at -x.
    const Eigen::Vector3d s = minkowski_support(a, b, pose, -r.separation).w;
    const double gap = r.separation.dot(r.separation - s);
    CHECK(gap <= cfg.tolerance * std::max(1.0, r.separation.norm()) + 1e-12);
    CHECK(duality_gap(a, b, pose, r.separation) == doctest::Approx(gap));
  }
}

TEST_CASE("witness points lie on analytic boundaries") {
  Rng rng(35);
  for (int i = 0; i < 300; ++i) {
    const ConvexShape a = make_ellipsoid(uniform_vector(rng, 0.5, 1.5));
    const ConvexShape b = (i % 3 == 0) ? ConvexShape(make_sphere(uniform(rng, 0.3, 1.2)))
                          : (i % 3 == 1) ? ConvexShape(make_capsule(0.5, 0.4))
                                         : ConvexShape(make_ellipsoid(uniform_vector(rng, 0.5, 1.5)));
    const Pose pose = random_pose_at(rng, uniform(rng, 0.2, 3.5));
    const auto r = proximity(a, b, pose);
    if (!r.ok() || (r.flags & kTouching)) continue;
    CHECK(std::abs(boundary_residual(a, r.witness1)) < 1e-7);
    CHECK(std::abs(boundary_residual(b, r.witness2_local)) < 1e-7);
    CHECK((apply(pose, r.witness2_local) - r.witness2).norm() < 1e-12);
  }
}

TEST_CASE("sphere pairs match the closed form") {
  Rng rng(36);
  for (int i = 0; i < 10000; ++i) {
    const double r1 = uniform(rng, 0.2, 2.0);
    const double r2 = uniform(rng, 0.2, 2.0);
    const Eigen::Vector3d c = uniform_direction(rng) * uniform(rng, 0.05, 6.0);
    const Pose pose(c, uniform_rotation(rng));
    const auto r = proximity(make_sphere(r1), make_sphere(r2), pose);
    const double expected = c.norm() - r1 - r2;
    if (std::abs(expected) < 1e-8) continue;
    CHECK(std::abs(r.signed_distance - expected) < 1e-10);
    CHECK((r.witness1 - r1 * c.normalized()).norm() < 1e-9);
  }
}

TEST_CASE("translating shape 2 along the separation") {
  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    const ConvexMesh a = random_mesh(rng, 12);
    const ConvexShape b = make_ellipsoid(uniform_vector(rng, 0.5, 1.5));
    const Pose pose = random_pose_at(rng, 4.0);
    const auto r = proximity(a, b, pose);
    REQUIRE_FALSE(r.colliding);
    const double step = 1e-3;
    const Pose moved(pose.translation() + step * r.separation.normalized(), pose.rotation());
    const auto m = proximity(a, b, moved);
    CHECK(std::abs(m.signed_distance - (r.signed_distance - step)) < 1e-8);
  }
}

TEST_CASE("swapping the shapes") {
  Rng rng(38);
  for (int i = 0; i < 300; ++i) {
    const ConvexMesh a = random_mesh(rng, 12);
    const ConvexMesh b = random_mesh(rng, 12);
    const Pose pose = random_pose_at(rng, uniform(rng, 0.0, 3.0));
    const auto r = proximity(a, b, pose);
    const auto s = proximity(b, a, inverse(pose));
    CHECK(std::abs(r.signed_distance - s.signed_distance) < 1e-8);
    if (r.colliding && std::abs(r.signed_distance) > 1e-3) {
      // Separation of the swapped query, mapped back into frame 1.
      const Eigen::Vector3d back = pose.rotationMatrix() * s.separation;
      if ((back + r.separation).norm() > 1e-6) {
        // Equal depth along a different face: both are minimal translations.
        CHECK(std::abs(back.norm() - r.separation.norm()) < 1e-8);
      }
    } else if (!r.colliding) {
      CHECK((pose.rotationMatrix() * s.separation + r.separation).norm() < 1e-6);
    }
  }
}

TEST_CASE("warm start") {
  Rng rng(39);
  for (int i = 0; i < 100; ++i) {
    const ConvexMesh a = random_mesh(rng, 30);
    const ConvexMesh b = random_mesh(rng, 30);
    const Pose pose = random_pose_at(rng, uniform(rng, 0.3, 3.0));
    const auto cold = proximity(a, b, pose);
    const auto again = proximity(a, b, pose, {}, warm_start(cold));
    CHECK(again.signed_distance == doctest::Approx(cold.signed_distance).epsilon(1e-12));
    if (!cold.colliding) CHECK(again.iterations <= 2);

    Tangent t = Tangent::Zero();
    t.head<3>() = uniform_direction(rng) * 0.5e-3;
    t.tail<3>() = uniform_direction(rng) * 0.5e-3;
    const Pose near = perturb(pose, t);
    const auto warm = proximity(a, b, near, {}, warm_start(cold));
    const auto fresh = proximity(a, b, near);
    CHECK(std::abs(warm.signed_distance - fresh.signed_distance) < 1e-9);

    const auto empty = proximity(a, b, pose, {}, GjkSeed{});
    CHECK(empty.signed_distance == cold.signed_distance);
    CHECK(empty.iterations == cold.iterations);
  }
}

TEST_CASE("iteration budget is reported") {
  GjkConfig cfg;
  cfg.max_iterations = 1;
  Rng rng(40);
  const ConvexMesh a = random_mesh(rng, 40);
  const ConvexMesh b = random_mesh(rng, 40);
  const auto r = proximity(a, b, random_pose_at(rng, 3.0), cfg);
  CHECK((r.flags & kMaxIterations) != 0);
  CHECK_FALSE(r.ok());
  CHECK(r.separation.allFinite());
}

TEST_CASE("fuzzed mesh queries stay finite") {
  Rng rng(41);
  int bad = 0;
  const int total = 5000;
  for (int i = 0; i < total; ++i) {
    const ConvexMesh a = random_mesh(rng, 8 + i % 40);
    const ConvexMesh b = random_mesh(rng, 8 + (i * 7) % 40);
    const auto r = proximity(a, b, random_pose_at(rng, uniform(rng, 0.0, 3.0)));
    if (!r.separation.allFinite() || !r.ok()) ++bad;
  }
  CHECK(bad <= total / 1000);
}

TEST_CASE("simplex dump") {
  const auto r = proximity(make_box({1, 1, 1}), make_sphere(1), translation(3, 0.5, 0));
  const auto path = (std::filesystem::temp_directory_path() / "diffcol_simplex.obj").string();
  write_simplex_obj(path, r);
  std::ifstream in(path);
  int vertices = 0;
  std::string line;
  while (std::getline(in, line)) vertices += line.rfind("v ", 0) == 0;
  CHECK(vertices == r.simplex_size);
  std::remove(path.c_str());
}
