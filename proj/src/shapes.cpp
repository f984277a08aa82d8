#include "diffcol/shapes.hpp"

#include "diffcol/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

namespace diffcol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
  }
}

void require_positive(const Eigen::Vector3d& v, const char* what) {
  for (int i = 0; i < 3; ++i) require_positive(v(i), what);
}

}  // namespace

Sphere make_sphere(double radius) {
  require_positive(radius, "radius");
  return Sphere{radius};
}

Ellipsoid make_ellipsoid(const Eigen::Vector3d& semi_axes) {
  require_positive(semi_axes, "semi-axes");
  return Ellipsoid{semi_axes};
}

Box make_box(const Eigen::Vector3d& half_extents) {
  require_positive(half_extents, "half-extents");
  return Box{half_extents};
}

Capsule make_capsule(double half_length, double radius) {
  require_positive(half_length, "half-length");
  require_positive(radius, "radius");
  return Capsule{half_length, radius};
}

int support_vertex(const ConvexMesh& mesh, const Eigen::Vector3d& dir) {
  const Eigen::Matrix3Xd& v = mesh.vertices();
  int best = 0;
  double best_value = v.col(0).dot(dir);
  for (Eigen::Index i = 1; i < v.cols(); ++i) {
    const double value = v.col(i).dot(dir);
    if (value > best_value) {
      best_value = value;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Eigen::Vector3d support_point(const ConvexShape& shape, const Eigen::Vector3d& dir) {
  return std::visit(
      Overloaded{
          [&](const Sphere& s) -> Eigen::Vector3d {
            const double n = dir.norm();
            if (n == 0.0) return Eigen::Vector3d(s.radius, 0.0, 0.0);
            return (s.radius / n) * dir;
          },
          [&](const Ellipsoid& e) -> Eigen::Vector3d {
            const Eigen::Vector3d scaled = e.semi_axes.cwiseProduct(dir);
            const double n = scaled.norm();
            if (n == 0.0) return Eigen::Vector3d(e.semi_axes(0), 0.0, 0.0);
            return e.semi_axes.cwiseProduct(scaled) / n;
          },
          [&](const Box& b) -> Eigen::Vector3d {
            return Eigen::Vector3d(dir(0) >= 0.0 ? b.half_extents(0) : -b.half_extents(0),
                                   dir(1) >= 0.0 ? b.half_extents(1) : -b.half_extents(1),
                                   dir(2) >= 0.0 ? b.half_extents(2) : -b.half_extents(2));
          },
          [&](const Capsule& c) -> Eigen::Vector3d {
            Eigen::Vector3d p(0.0, 0.0, dir(2) >= 0.0 ? c.half_length : -c.half_length);
            const double n = dir.norm();
            if (n == 0.0) return p + Eigen::Vector3d(c.radius, 0.0, 0.0);
            return p + (c.radius / n) * dir;
          },
          [&](const ConvexMesh& m) -> Eigen::Vector3d {
            return m.vertices().col(support_vertex(m, dir));
          },
      },
      shape);
}

SupportResult support(const ConvexShape& shape, const Eigen::Vector3d& dir) {
  if (!(dir.norm() >= 1e-15)) throw Error(ErrorCode::ZeroDirection, "support direction is zero");
  SupportResult out;
  if (const auto* mesh = std::get_if<ConvexMesh>(&shape)) {
    const int i = support_vertex(*mesh, dir);
    out.point = mesh->vertices().col(i);
    out.vertex_index = i;
  } else {
    out.point = support_point(shape, dir);
  }
  out.value = out.point.dot(dir);
  return out;
}

std::optional<Eigen::Matrix3d> support_hessian_analytic(const ConvexShape& shape,
                                                        const Eigen::Vector3d& dir) {
  const double n = dir.norm();
  if (!(n >= 1e-15)) throw Error(ErrorCode::ZeroDirection, "support direction is zero");
  if (const auto* s = std::get_if<Sphere>(&shape)) {
    const Eigen::Vector3d u = dir / n;
    return Eigen::Matrix3d((s->radius / n) * (Eigen::Matrix3d::Identity() - u * u.transpose()));
  }
  if (const auto* e = std::get_if<Ellipsoid>(&shape)) {
    // sigma(d) = |D d|, grad = D^2 d / |D d|, H = (D^2 - grad grad^T) / |D d|
    const Eigen::Vector3d a2 = e->semi_axes.cwiseAbs2();
    const double norm = e->semi_axes.cwiseProduct(dir).norm();
    const Eigen::Vector3d grad = a2.cwiseProduct(dir) / norm;
    Eigen::Matrix3d h = Eigen::Matrix3d(a2.asDiagonal()) - grad * grad.transpose();
    h /= norm;
    return Eigen::Matrix3d(0.5 * (h + h.transpose()));
  }
  return std::nullopt;
}

double boundary_residual(const ConvexShape& shape, const Eigen::Vector3d& p) {
  return std::visit(
      Overloaded{
          [&](const Sphere& s) { return p.norm() - s.radius; },
          [&](const Ellipsoid& e) { return p.cwiseQuotient(e.semi_axes).norm() - 1.0; },
          [&](const Box& b) { return (p.cwiseAbs() - b.half_extents).maxCoeff(); },
          [&](const Capsule& c) {
            const double z = std::clamp(p(2), -c.half_length, c.half_length);
            return (p - Eigen::Vector3d(0.0, 0.0, z)).norm() - c.radius;
          },
          [&](const ConvexMesh& m) {
            double worst = -std::numeric_limits<double>::infinity();
            for (const Eigen::Vector3i& f : m.faces()) {
              const Eigen::Vector3d a = m.vertices().col(f(0));
              const Eigen::Vector3d n =
                  (m.vertices().col(f(1)) - a).cross(m.vertices().col(f(2)) - a).normalized();
              worst = std::max(worst, n.dot(p - a));
            }
            return worst;
          },
      },
      shape);
}

std::string shape_name(const ConvexShape& shape) {
  return std::visit(Overloaded{
                        [](const Sphere&) { return std::string("sphere"); },
                        [](const Ellipsoid&) { return std::string("ellipsoid"); },
                        [](const Box&) { return std::string("box"); },
                        [](const Capsule&) { return std::string("capsule"); },
                        [](const ConvexMesh&) { return std::string("mesh"); },
                    },
                    shape);
}

// ---------------------------------------------------------------------------
// Convex hull (quickhull with conflict lists).

namespace {

struct HullFace {
  std::array<int, 3> v;
  Eigen::Vector3d normal;
  double offset;
  bool alive = true;
  std::vector<int> outside;
};

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

class QuickHull {
 public:
  QuickHull(const std::vector<Eigen::Vector3d>& points, double eps) : p_(points), eps_(eps) {}

  // Returns the alive faces (indices into the input points).
  std::vector<std::array<int, 3>> run(const std::vector<int>& candidates) {
    initial_simplex(candidates);
    for (int idx : candidates) {
      if (std::find(simplex_.begin(), simplex_.end(), idx) != simplex_.end()) continue;
      assign(idx, 0, faces_.size());
    }
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f);
      // add_point kills f; later faces are scanned by the loop.
    }
    std::vector<std::array<int, 3>> out;
    for (const HullFace& f : faces_) {
      if (f.alive) out.push_back(f.v);
    }
    return out;
  }

 private:
  void make_face(int a, int b, int c) {
    HullFace f;
    f.v = {a, b, c};
    Eigen::Vector3d n = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
    const double len = n.norm();
    f.normal = len > 0.0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero();
    f.offset = f.normal.dot(p_[a]);
    faces_.push_back(std::move(f));
  }

  double distance(const HullFace& f, int i) const { return f.normal.dot(p_[i]) - f.offset; }

  void assign(int idx, std::size_t first, std::size_t last) {
    for (std::size_t f = first; f < last; ++f) {
      if (!faces_[f].alive) continue;
      if (distance(faces_[f], idx) > eps_) {
        faces_[f].outside.push_back(idx);
        return;
      }
    }
  }

  void initial_simplex(const std::vector<int>& c) {
    int i0 = c[0];
    for (int i : c) {
      if (p_[i](0) < p_[i0](0)) i0 = i;
    }
    int i1 = i0;
    double best = 0.0;
    for (int i : c) {
      const double d = (p_[i] - p_[i0]).squaredNorm();
      if (d > best) best = d, i1 = i;
    }
    if (std::sqrt(best) <= eps_) throw Error(ErrorCode::DegenerateInput, "all points coincide");
    const Eigen::Vector3d axis = (p_[i1] - p_[i0]).normalized();
    int i2 = i0;
    best = 0.0;
    for (int i : c) {
      const Eigen::Vector3d r = p_[i] - p_[i0];
      const double d = (r - r.dot(axis) * axis).norm();
      if (d > best) best = d, i2 = i;
    }
    if (best <= eps_) throw Error(ErrorCode::DegenerateInput, "points are collinear");
    const Eigen::Vector3d n = (p_[i1] - p_[i0]).cross(p_[i2] - p_[i0]).normalized();
    int i3 = i0;
    best = 0.0;
    for (int i : c) {
      const double d = std::abs(n.dot(p_[i] - p_[i0]));
      if (d > best) best = d, i3 = i;
    }
    if (best <= eps_) throw Error(ErrorCode::DegenerateInput, "points are coplanar");
    simplex_ = {i0, i1, i2, i3};
    if (n.dot(p_[i3] - p_[i0]) > 0.0) std::swap(i1, i2);
    // Outward orientation: i3 lies below (i0, i1, i2).
    make_face(i0, i1, i2);
    make_face(i0, i3, i1);
    make_face(i1, i3, i2);
    make_face(i2, i3, i0);
  }

  void add_point(std::size_t start) {
    HullFace& seed = faces_[start];
    int eye = seed.outside.front();
    double best = distance(seed, eye);
    for (int i : seed.outside) {
      const double d = distance(seed, i);
      if (d > best) best = d, eye = i;
    }

    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (faces_[f].alive && distance(faces_[f], eye) > eps_) visible.push_back(f);
    }

    std::unordered_set<std::uint64_t> edges;
    for (std::size_t f : visible) {
      const auto& v = faces_[f].v;
      for (int k = 0; k < 3; ++k) edges.insert(edge_key(v[k], v[(k + 1) % 3]));
    }

    std::vector<int> orphans;
    std::vector<std::pair<int, int>> horizon;
    for (std::size_t f : visible) {
      const auto& v = faces_[f].v;
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        if (!edges.count(edge_key(b, a))) horizon.emplace_back(a, b);
      }
      faces_[f].alive = false;
      for (int i : faces_[f].outside) {
        if (i != eye) orphans.push_back(i);
      }
      faces_[f].outside.clear();
      faces_[f].outside.shrink_to_fit();
    }

    const std::size_t first_new = faces_.size();
    for (const auto& [a, b] : horizon) make_face(a, b, eye);
    for (int i : orphans) assign(i, first_new, faces_.size());
  }

  const std::vector<Eigen::Vector3d>& p_;
  double eps_;
  std::vector<HullFace> faces_;
  std::array<int, 4> simplex_{};
};

// A hull vertex is extreme when the mean of its incident face normals selects
// it as the strict maximizer.
std::vector<int> non_extreme_vertices(const std::vector<Eigen::Vector3d>& p,
                                      const std::vector<std::array<int, 3>>& faces,
                                      double eps) {
  std::vector<int> used;
  for (const auto& f : faces) used.insert(used.end(), f.begin(), f.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());

  std::vector<int> out;
  for (int v : used) {
    Eigen::Vector3d dir = Eigen::Vector3d::Zero();
    for (const auto& f : faces) {
      if (f[0] == v || f[1] == v || f[2] == v) {
        dir += (p[f[1]] - p[f[0]]).cross(p[f[2]] - p[f[0]]).normalized();
      }
    }
    if (dir.norm() < 1e-9) {
      out.push_back(v);
      continue;
    }
    dir.normalize();
    const double mine = p[v].dot(dir);
    for (int w : used) {
      if (w != v && p[w].dot(dir) >= mine - eps) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

}  // namespace

ConvexMesh build_convex_mesh(const std::vector<Eigen::Vector3d>& points) {
  if (points.size() < 4) throw Error(ErrorCode::DegenerateInput, "need at least 4 points");
  double scale = 0.0;
  for (const auto& p : points) {
    if (!p.allFinite()) throw Error(ErrorCode::DegenerateInput, "non-finite vertex");
    scale = std::max(scale, p.cwiseAbs().maxCoeff());
  }
  const double eps = 1e-10 * std::max(scale, 1e-300);

  // Collapse duplicates onto their first occurrence.
  std::vector<int> candidates;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    bool duplicate = false;
    for (int j : candidates) {
      if ((points[i] - points[j]).norm() <= eps) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) candidates.push_back(i);
  }
  if (candidates.size() < 4) throw Error(ErrorCode::DegenerateInput, "fewer than 4 distinct points");

  std::vector<std::array<int, 3>> faces;
  for (int attempt = 0;; ++attempt) {
    QuickHull hull(points, eps);
    faces = hull.run(candidates);
    const std::vector<int> drop = non_extreme_vertices(points, faces, eps);
    if (drop.empty() || attempt > 8) break;
    std::vector<int> kept;
    for (int c : candidates) {
      if (!std::binary_search(drop.begin(), drop.end(), c)) kept.push_back(c);
    }
    candidates.swap(kept);
  }

  std::vector<int> used;
  for (const auto& f : faces) used.insert(used.end(), f.begin(), f.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::vector<int> remap(points.size(), -1);
  for (std::size_t k = 0; k < used.size(); ++k) remap[used[k]] = static_cast<int>(k);

  ConvexMesh mesh;
  mesh.vertices_.resize(3, static_cast<Eigen::Index>(used.size()));
  for (std::size_t k = 0; k < used.size(); ++k) mesh.vertices_.col(k) = points[used[k]];
  std::vector<std::set<int>> adj(used.size());
  for (const auto& f : faces) {
    Eigen::Vector3i t(remap[f[0]], remap[f[1]], remap[f[2]]);
    mesh.faces_.push_back(t);
    for (int k = 0; k < 3; ++k) {
      adj[t(k)].insert(t((k + 1) % 3));
      adj[t((k + 1) % 3)].insert(t(k));
    }
  }
  mesh.adjacency_.resize(used.size());
  for (std::size_t k = 0; k < used.size(); ++k) {
    mesh.adjacency_[k].assign(adj[k].begin(), adj[k].end());
  }
  return mesh;
}

std::vector<int> neighbors_to_depth(const ConvexMesh& mesh, int seed, int depth) {
  if (seed < 0 || seed >= mesh.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "seed vertex " + std::to_string(seed));
  }
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "neighbor depth must be >= 0");
  std::vector<char> seen(mesh.size(), 0);
  std::vector<int> frontier{seed};
  std::vector<int> out{seed};
  seen[seed] = 1;
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<int> next;
    for (int v : frontier) {
      for (int w : mesh.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          next.push_back(w);
          out.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ConvexMesh box_mesh(const Box& box) {
  std::vector<Eigen::Vector3d> corners;
  for (int i = 0; i < 8; ++i) {
    corners.emplace_back((i & 1) ? box.half_extents(0) : -box.half_extents(0),
                         (i & 2) ? box.half_extents(1) : -box.half_extents(1),
                         (i & 4) ? box.half_extents(2) : -box.half_extents(2));
  }
  return build_convex_mesh(corners);
}

// ---------------------------------------------------------------------------
// OBJ

ObjData read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path);
  ObjData data;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Eigen::Vector3d v;
      if (!(ls >> v(0) >> v(1) >> v(2))) {
        throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": bad vertex");
      }
      data.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string tok;
      while (ls >> tok) {
        // Accept "i", "i/t", "i/t/n", "i//n".
        const int idx = std::stoi(tok.substr(0, tok.find('/')));
        face.push_back(idx > 0 ? idx - 1 : static_cast<int>(data.vertices.size()) + idx);
      }
      if (face.size() < 3) {
        throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": bad face");
      }
      data.faces.push_back(std::move(face));
    }
  }
  return data;
}

ConvexMesh load_obj_mesh(const std::string& path) {
  const ObjData data = read_obj(path);
  ConvexMesh mesh = build_convex_mesh(data.vertices);
  if (!data.faces.empty() && mesh.size() == static_cast<Eigen::Index>(data.vertices.size())) {
    for (const auto& face : data.faces) {
      for (std::size_t k = 0; k < face.size(); ++k) {
        const int a = face[k], b = face[(k + 1) % face.size()];
        if (a < 0 || a >= mesh.size() || b < 0 || b >= mesh.size()) {
          throw Error(ErrorCode::ParseError, path + ": face index out of range");
        }
        const auto& n = mesh.neighbors(a);
        if (!std::binary_search(n.begin(), n.end(), b)) {
          throw Error(ErrorCode::DegenerateInput,
                      path + ": face edge " + std::to_string(a + 1) + "-" + std::to_string(b + 1) +
                          " is not a hull edge");
        }
      }
    }
  }
  return mesh;
}

void write_obj(const std::string& path, const ConvexMesh& mesh) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorCode::FileNotFound, path);
  for (Eigen::Index i = 0; i < mesh.size(); ++i) {
    const auto v = mesh.vertices().col(i);
    std::fprintf(f, "v %.17g %.17g %.17g\n", v(0), v(1), v(2));
  }
  for (const Eigen::Vector3i& t : mesh.faces()) {
    std::fprintf(f, "f %d %d %d\n", t(0) + 1, t(1) + 1, t(2) + 1);
  }
  std::fclose(f);
}

}  // namespace diffcol
