#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "diffcol/errors.hpp"
#include "diffcol/random.hpp"
#include "diffcol/shapes.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

using namespace diffcol;

namespace {

std::vector<Eigen::Vector3d> cube_corners() {
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 8; ++i) {
    pts.emplace_back((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
  }
  return pts;
}

ConvexMesh random_ellipsoid_mesh(Rng& rng, int n) {
  const Eigen::Vector3d axes = uniform_vector(rng, 0.5, 1.5);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d u = uniform_direction(rng);
    pts.push_back(axes.cwiseProduct(u));
  }
  return build_convex_mesh(pts);
}

// Points of each shape drawn without using its support function.
std::vector<Eigen::Vector3d> boundary_samples(const ConvexShape& shape, Rng& rng, int count) {
  std::vector<Eigen::Vector3d> out;
  for (int i = 0; i < count; ++i) {
    const Eigen::Vector3d u = uniform_direction(rng);
    if (const auto* s = std::get_if<Sphere>(&shape)) {
      out.push_back(s->radius * u);
    } else if (const auto* e = std::get_if<Ellipsoid>(&shape)) {
      out.push_back(e->semi_axes.cwiseProduct(u));
    } else if (const auto* b = std::get_if<Box>(&shape)) {
      Eigen::Vector3d p = uniform_vector(rng, -1.0, 1.0);
      Eigen::Index axis;
      p.cwiseAbs().maxCoeff(&axis);
      p(axis) = p(axis) > 0 ? 1.0 : -1.0;
      out.push_back(p.cwiseProduct(b->half_extents));
    } else if (const auto* c = std::get_if<Capsule>(&shape)) {
      out.push_back(Eigen::Vector3d(0, 0, uniform(rng, -c->half_length, c->half_length)) +
                    c->radius * u);
    } else {
      const auto& v = std::get<ConvexMesh>(shape).vertices();
      Eigen::VectorXd w = Eigen::VectorXd::Zero(v.cols());
      for (Eigen::Index k = 0; k < v.cols(); ++k) w(k) = uniform(rng, 0.0, 1.0);
      out.push_back(v * (w / w.sum()));
    }
  }
  return out;
}

std::set<std::pair<int, int>> edges_of(const ConvexMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < mesh.size(); ++i) {
    for (int j : mesh.neighbors(i)) edges.insert(std::minmax(i, j));
  }
  return edges;
}

}  // namespace

TEST_CASE("support examples") {
  const SupportResult s = support(make_sphere(1.0), Eigen::Vector3d(0, 0, 2));
  CHECK((s.point - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_FALSE(s.vertex_index.has_value());

  const ConvexMesh cube = build_convex_mesh(cube_corners());
  const SupportResult c = support(cube, Eigen::Vector3d(1, 2, 3));
  CHECK((c.point - Eigen::Vector3d(1, 1, 1)).norm() == 0.0);
  CHECK(c.value == 6.0);
  REQUIRE(c.vertex_index.has_value());
  CHECK(*c.vertex_index == 7);

  const SupportResult e = support(make_ellipsoid({2, 1, 1}), Eigen::Vector3d(1, 0, 0));
  CHECK((e.point - Eigen::Vector3d(2, 0, 0)).norm() < 1e-15);
  CHECK(e.value == doctest::Approx(2.0));
}

TEST_CASE("support rejects a zero direction") {
  CHECK_THROWS_WITH_AS(support(make_sphere(1.0), Eigen::Vector3d::Zero()), doctest::Contains("ZeroDirection"),
                       Error);
  CHECK_THROWS_AS(support(make_box({1, 1, 1}), Eigen::Vector3d(1e-16, 0, 0)), Error);
}

TEST_CASE("shape constructors validate sizes") {
  CHECK_THROWS_AS(make_sphere(-1.0), Error);
  CHECK_THROWS_AS(make_ellipsoid({1, 0, 1}), Error);
  CHECK_THROWS_AS(make_box({1, 1, -2}), Error);
  CHECK_THROWS_AS(make_capsule(0.0, 1.0), Error);
}

TEST_CASE("mesh ties resolve to the lowest index") {
  const ConvexMesh cube = build_convex_mesh(cube_corners());
  CHECK(*support(cube, Eigen::Vector3d(0, 0, 1)).vertex_index == 4);
  CHECK(*support(cube, Eigen::Vector3d(1, 0, 0)).vertex_index == 1);
}

TEST_CASE("support optimality") {
  Rng rng(21);
  std::vector<ConvexShape> shapes = {make_sphere(0.7), make_ellipsoid({1.5, 0.6, 1.0}),
                                     make_box({0.5, 1.0, 1.5}), make_capsule(0.8, 0.4),
                                     random_ellipsoid_mesh(rng, 30)};
  for (const auto& shape : shapes) {
    CAPTURE(shape_name(shape));
    const auto samples = boundary_samples(shape, rng, 100);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Vector3d d = uniform_direction(rng) * uniform(rng, 0.1, 10.0);
      const SupportResult s = support(shape, d);
      CHECK(std::abs(s.value - s.point.dot(d)) <= 1e-10 * d.norm() * std::max(1.0, s.point.norm()));
      CHECK(std::abs(boundary_residual(shape, s.point)) < 1e-9);
      for (const auto& p : samples) worst = std::max(worst, p.dot(d) - s.point.dot(d));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("support point is invariant to scaling the direction") {
  Rng rng(22);
  std::vector<ConvexShape> shapes = {make_sphere(0.7), make_ellipsoid({1.5, 0.6, 1.0}),
                                     make_box({0.5, 1.0, 1.5}), make_capsule(0.8, 0.4),
                                     random_ellipsoid_mesh(rng, 30)};
  for (const auto& shape : shapes) {
    for (int i = 0; i < 200; ++i) {
      const Eigen::Vector3d d = uniform_direction(rng);
      const double lambda = uniform(rng, 0.01, 100.0);
      CHECK((support(shape, lambda * d).point - support(shape, d).point).norm() < 1e-12);
    }
  }
}

TEST_CASE("analytic support Hessian of a sphere") {
  const auto h = support_hessian_analytic(make_sphere(1.0), Eigen::Vector3d(0, 0, 1));
  REQUIRE(h.has_value());
  CHECK((*h - Eigen::Vector3d(1, 1, 0).asDiagonal().toDenseMatrix()).norm() < 1e-15);

  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const double r = uniform(rng, 0.2, 2.0);
    const Eigen::Vector3d d = uniform_direction(rng) * uniform(rng, 0.1, 5.0);
    const Eigen::Matrix3d hs = *support_hessian_analytic(make_sphere(r), d);
    CHECK((hs - oracle::sphere_support_hessian(r, d)).norm() < 1e-12 * hs.norm());
    CHECK((hs * d).norm() < 1e-14 * hs.norm() * d.norm());
  }
}

TEST_CASE("analytic support Hessian of an ellipsoid matches differences of the gradient") {
  Rng rng(24);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d axes = uniform_vector(rng, 0.5, 1.5);
    const Ellipsoid e = make_ellipsoid(axes);
    const Eigen::Vector3d d = uniform_direction(rng) * uniform(rng, 0.5, 2.0);
    const Eigen::Matrix3d h = *support_hessian_analytic(e, d);
    Eigen::Matrix3d fd;
    const double inc = 1e-6;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d step = Eigen::Vector3d::Unit(k) * inc;
      fd.col(k) = (oracle::ellipsoid_support(axes, d + step) -
                   oracle::ellipsoid_support(axes, d - step)) / (2 * inc);
    }
    CHECK((h - fd).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((h - h.transpose()).norm() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(h);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12);
    CHECK((h * d).norm() < 1e-12 * h.norm());
  }
}

TEST_CASE("analytic support Hessian is unavailable for piecewise shapes") {
  CHECK_FALSE(support_hessian_analytic(make_box({1, 1, 1}), Eigen::Vector3d(1, 2, 3)).has_value());
  CHECK_FALSE(support_hessian_analytic(make_capsule(1, 1), Eigen::Vector3d(1, 2, 3)).has_value());
  CHECK_FALSE(
      support_hessian_analytic(build_convex_mesh(cube_corners()), Eigen::Vector3d(1, 2, 3)).has_value());
  CHECK_THROWS_AS(support_hessian_analytic(make_sphere(1), Eigen::Vector3d::Zero()), Error);
}

TEST_CASE("convex hull drops interior points") {
  auto pts = cube_corners();
  pts.emplace_back(0, 0, 0);
  const ConvexMesh m = build_convex_mesh(pts);
  CHECK(m.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(m.vertices().col(i) == pts[i]);
  // Each cube corner touches three cube edges; the triangulation adds diagonals.
  for (int i = 0; i < 8; ++i) CHECK(m.neighbors(i).size() >= 3);
}

TEST_CASE("tetrahedron adjacency") {
  const ConvexMesh m = build_convex_mesh(
      {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}});
  CHECK(m.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(m.neighbors(i).size() == 3);
  CHECK(m.faces().size() == 4);
}

TEST_CASE("hull of ellipsoid samples satisfies Euler's formula") {
  Rng rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    const ConvexMesh m = random_ellipsoid_mesh(rng, 12);
    CHECK(m.size() == 12);
    const auto v = static_cast<long>(m.size());
    const auto e = static_cast<long>(edges_of(m).size());
    const auto f = static_cast<long>(m.faces().size());
    CHECK(v - e + f == 2);
    // Adjacency is symmetric.
    for (int i = 0; i < m.size(); ++i) {
      for (int j : m.neighbors(i)) {
        const auto& back = m.neighbors(j);
        CHECK(std::find(back.begin(), back.end(), i) != back.end());
      }
    }
    // Faces are outward: every vertex is on the inner side of each face plane.
    for (const auto& face : m.faces()) {
      const Eigen::Vector3d a = m.vertices().col(face(0));
      const Eigen::Vector3d n =
          (m.vertices().col(face(1)) - a).cross(m.vertices().col(face(2)) - a);
      CHECK((m.vertices().transpose() * n).maxCoeff() <= n.dot(a) + 1e-12);
    }
  }
}

TEST_CASE("degenerate point sets are rejected") {
  CHECK_THROWS_AS(build_convex_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 3, 0}}), Error);
  CHECK_THROWS_AS(build_convex_mesh({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}}), Error);
  CHECK_THROWS_AS(build_convex_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), Error);
  CHECK_THROWS_AS(build_convex_mesh({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {1, 0, 0}}), Error);
}

TEST_CASE("neighbors_to_depth") {
  const ConvexMesh cube = build_convex_mesh(cube_corners());
  CHECK(neighbors_to_depth(cube, 3, 0) == std::vector<int>{3});

  const auto ring = neighbors_to_depth(cube, 0, 1);
  CHECK(std::is_sorted(ring.begin(), ring.end()));
  std::vector<int> expected = cube.neighbors(0);
  expected.push_back(0);
  std::sort(expected.begin(), expected.end());
  CHECK(ring == expected);
  // The three cube-edge neighbours of corner 0 are always part of the ring.
  for (int k : {1, 2, 4}) CHECK(std::find(ring.begin(), ring.end(), k) != ring.end());

  CHECK(neighbors_to_depth(cube, 5, 10).size() == 8);
  CHECK_THROWS_AS(neighbors_to_depth(cube, 8, 1), Error);
  CHECK_THROWS_AS(neighbors_to_depth(cube, -1, 1), Error);
  CHECK_THROWS_AS(neighbors_to_depth(cube, 0, -1), Error);
}

TEST_CASE("neighbors_to_depth is a breadth-first ball") {
  Rng rng(26);
  const ConvexMesh m = random_ellipsoid_mesh(rng, 40);
  // Graph distances by repeated relaxation.
  const int n = static_cast<int>(m.size());
  std::vector<int> dist(n, 1 << 20);
  dist[7] = 0;
  for (int round = 0; round < n; ++round) {
    for (int i = 0; i < n; ++i) {
      for (int j : m.neighbors(i)) dist[j] = std::min(dist[j], dist[i] + 1);
    }
  }
  for (int depth = 0; depth < 5; ++depth) {
    std::vector<int> expected;
    for (int i = 0; i < n; ++i) {
      if (dist[i] <= depth) expected.push_back(i);
    }
    CHECK(neighbors_to_depth(m, 7, depth) == expected);
  }
}

TEST_CASE("OBJ round trip is bit exact") {
  Rng rng(27);
  const ConvexMesh m = random_ellipsoid_mesh(rng, 20);
  const auto path = (std::filesystem::temp_directory_path() / "diffcol_shapes_roundtrip.obj").string();
  write_obj(path, m);
  const ConvexMesh back = load_obj_mesh(path);
  CHECK(back.vertices() == m.vertices());
  CHECK(edges_of(back) == edges_of(m));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_obj_mesh("/nonexistent/file.obj"), Error);
}

TEST_CASE("box mesh corners") {
  const ConvexMesh m = box_mesh(make_box({1, 2, 3}));
  CHECK(m.size() == 8);
  CHECK(m.vertices().cwiseAbs().rowwise().maxCoeff() == Eigen::Vector3d(1, 2, 3));
}
