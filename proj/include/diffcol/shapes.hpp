#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace diffcol {

struct Sphere {
  double radius = 1.0;
};

struct Ellipsoid {
  Eigen::Vector3d semi_axes = Eigen::Vector3d::Ones();
};

struct Box {
  Eigen::Vector3d half_extents = Eigen::Vector3d::Ones();
};

/// Segment [-half_length, half_length] along the local z axis, inflated by `radius`.
struct Capsule {
  double half_length = 1.0;
  double radius = 1.0;
};

/// Convex polytope given by its vertices (all in convex position) and the
/// edge graph of its hull. Built through `build_convex_mesh`.
class ConvexMesh {
 public:
  const Eigen::Matrix3Xd& vertices() const { return vertices_; }
  Eigen::Index size() const { return vertices_.cols(); }
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }
  const std::vector<int>& neighbors(int vertex) const { return adjacency_[vertex]; }
  /// Outward-oriented hull triangles.
  const std::vector<Eigen::Vector3i>& faces() const { return faces_; }

 private:
  friend ConvexMesh build_convex_mesh(const std::vector<Eigen::Vector3d>& points);

  Eigen::Matrix3Xd vertices_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<Eigen::Vector3i> faces_;
};

using ConvexShape = std::variant<Sphere, Ellipsoid, Box, Capsule, ConvexMesh>;

Sphere make_sphere(double radius);
Ellipsoid make_ellipsoid(const Eigen::Vector3d& semi_axes);
Box make_box(const Eigen::Vector3d& half_extents);
Capsule make_capsule(double half_length, double radius);

struct SupportResult {
  Eigen::Vector3d point;
  double value = 0.0;
  std::optional<int> vertex_index;
};

/// Maximizer of <y, dir> over the shape. Throws ZeroDirection for |dir| < 1e-15.
/// Mesh ties resolve to the lowest vertex index.
SupportResult support(const ConvexShape& shape, const Eigen::Vector3d& dir);

/// Support point only, no validation; a zero direction yields some boundary point.
Eigen::Vector3d support_point(const ConvexShape& shape, const Eigen::Vector3d& dir);

/// Index of the support vertex of a mesh (lowest index on ties).
int support_vertex(const ConvexMesh& mesh, const Eigen::Vector3d& dir);

/// Exact Hessian of the support function for spheres and ellipsoids,
/// std::nullopt for shapes whose support function is piecewise linear or not
/// twice differentiable.
std::optional<Eigen::Matrix3d> support_hessian_analytic(const ConvexShape& shape,
                                                        const Eigen::Vector3d& dir);

/// Convex hull of `points`: the vertices in convex position (kept in input
/// order) together with the hull edge graph. Throws DegenerateInput for fewer
/// than four distinct points or coplanar inputs.
ConvexMesh build_convex_mesh(const std::vector<Eigen::Vector3d>& points);

/// Vertices within graph distance `depth` of `seed`, ascending.
std::vector<int> neighbors_to_depth(const ConvexMesh& mesh, int seed, int depth);

/// The 8 corners of a box as a mesh.
ConvexMesh box_mesh(const Box& box);

/// Value of the implicit function of an analytic shape at a point: zero on
/// the boundary, negative inside. Meshes use the max plane distance.
double boundary_residual(const ConvexShape& shape, const Eigen::Vector3d& p);

std::string shape_name(const ConvexShape& shape);

// Wavefront OBJ subset: `v` lines and optional `f` lines.
struct ObjData {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::vector<int>> faces;  // zero-based
};

ObjData read_obj(const std::string& path);
/// Builds the hull of the OBJ vertices. When the file has faces and every
/// vertex is kept, each face edge must be a hull edge (DegenerateInput otherwise).
ConvexMesh load_obj_mesh(const std::string& path);
void write_obj(const std::string& path, const ConvexMesh& mesh);

}  // namespace diffcol
