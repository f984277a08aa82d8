#include "diffcol/narrowphase.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace diffcol {

namespace {

class PairSupport {
 public:
  PairSupport(const ConvexShape& a, const ConvexShape& b, const Pose& pose)
      : a_(a), b_(b), R_(pose.rotationMatrix()), t_(pose.translation()) {}

  MinkowskiVertex operator()(const Eigen::Vector3d& dir) const {
    MinkowskiVertex v;
    v.dir = dir;
    v.s1 = support_point(a_, dir);
    v.s2 = R_ * support_point(b_, -(R_.transpose() * dir)) + t_;
    v.w = v.s1 - v.s2;
    return v;
  }

 private:
  const ConvexShape& a_;
  const ConvexShape& b_;
  Eigen::Matrix3d R_;
  Eigen::Vector3d t_;
};

// Closest point of a simplex to the origin, by signed volumes. `lambda` is
// indexed like the input points; `mask` marks the support of the projection.
struct Projection {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  std::array<double, 4> lambda{};
  unsigned mask = 0;
  bool inside = false;  // origin strictly inside a full tetrahedron
};

using Points = std::array<Eigen::Vector3d, 4>;

Projection project_vertex(const Points& p, int i) {
  Projection out;
  out.point = p[i];
  out.lambda[i] = 1.0;
  out.mask = 1u << i;
  return out;
}

const Projection& closer(const Projection& a, const Projection& b) {
  return b.point.squaredNorm() < a.point.squaredNorm() ? b : a;
}

Projection project_segment(const Points& p, int i, int j) {
  const Eigen::Vector3d& a = p[i];
  const Eigen::Vector3d t = p[j] - a;
  const double tt = t.squaredNorm();
  if (tt <= 1e-28 * (a.squaredNorm() + p[j].squaredNorm())) {
    return closer(project_vertex(p, i), project_vertex(p, j));
  }
  const double lb = -a.dot(t) / tt;
  if (lb <= 0.0) return project_vertex(p, i);
  if (lb >= 1.0) return project_vertex(p, j);
  Projection out;
  out.point = a + lb * t;
  out.lambda[i] = 1.0 - lb;
  out.lambda[j] = lb;
  out.mask = (1u << i) | (1u << j);
  return out;
}

Projection project_triangle(const Points& p, int i, int j, int k) {
  const Eigen::Vector3d &a = p[i], &b = p[j], &c = p[k];
  const Eigen::Vector3d n = (b - a).cross(c - a);
  const double nn = n.squaredNorm();
  if (nn <= 1e-20 * (b - a).squaredNorm() * (c - a).squaredNorm() || nn == 0.0) {
    Projection best = project_segment(p, i, j);
    best = closer(best, project_segment(p, j, k));
    return closer(best, project_segment(p, k, i));
  }
  const double la = n.dot(b.cross(c)) / nn;
  const double lb = n.dot(c.cross(a)) / nn;
  const double lc = n.dot(a.cross(b)) / nn;
  if (la > 0.0 && lb > 0.0 && lc > 0.0) {
    Projection out;
    out.point = la * a + lb * b + lc * c;
    out.lambda[i] = la;
    out.lambda[j] = lb;
    out.lambda[k] = lc;
    out.mask = (1u << i) | (1u << j) | (1u << k);
    return out;
  }
  Projection best;
  bool have = false;
  auto consider = [&](const Projection& cand) {
    if (!have || cand.point.squaredNorm() < best.point.squaredNorm()) best = cand;
    have = true;
  };
  if (la <= 0.0) consider(project_segment(p, j, k));
  if (lb <= 0.0) consider(project_segment(p, k, i));
  if (lc <= 0.0) consider(project_segment(p, i, j));
  return best;
}

double volume(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, const Eigen::Vector3d& p2,
              const Eigen::Vector3d& p3) {
  return (p1 - p0).dot((p2 - p0).cross(p3 - p0));
}

Projection project_tetrahedron(const Points& p) {
  static constexpr int kFace[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
  const double det = volume(p[0], p[1], p[2], p[3]);
  const double scale = (p[1] - p[0]).norm() * (p[2] - p[0]).norm() * (p[3] - p[0]).norm();
  if (std::abs(det) <= 1e-12 * scale || det == 0.0) {
    Projection best = project_triangle(p, 1, 2, 3);
    for (int f = 1; f < 4; ++f) {
      best = closer(best, project_triangle(p, kFace[f][0], kFace[f][1], kFace[f][2]));
    }
    return best;
  }
  const Eigen::Vector3d o = Eigen::Vector3d::Zero();
  std::array<double, 4> l{volume(o, p[1], p[2], p[3]) / det, volume(p[0], o, p[2], p[3]) / det,
                          volume(p[0], p[1], o, p[3]) / det, volume(p[0], p[1], p[2], o) / det};
  if (l[0] > 0.0 && l[1] > 0.0 && l[2] > 0.0 && l[3] > 0.0) {
    Projection out;
    out.lambda = l;
    out.mask = 0xF;
    out.inside = true;
    return out;
  }
  Projection best;
  bool have = false;
  for (int f = 0; f < 4; ++f) {
    if (l[f] > 0.0) continue;
    const Projection cand = project_triangle(p, kFace[f][0], kFace[f][1], kFace[f][2]);
    if (!have || cand.point.squaredNorm() < best.point.squaredNorm()) best = cand;
    have = true;
  }
  return best;
}

Projection project(const Points& p, int n) {
  switch (n) {
    case 1: return project_vertex(p, 0);
    case 2: return project_segment(p, 0, 1);
    case 3: return project_triangle(p, 0, 1, 2);
    default: return project_tetrahedron(p);
  }
}

struct Simplex {
  std::array<MinkowskiVertex, 4> v{};
  std::array<double, 4> lambda{};
  int size = 0;

  // Projects the origin and drops vertices with zero weight.
  Projection reduce() {
    Points pts;
    for (int i = 0; i < size; ++i) pts[i] = v[i].w;
    const Projection proj = project(pts, size);
    int m = 0;
    for (int i = 0; i < size; ++i) {
      if (proj.mask & (1u << i)) {
        v[m] = v[i];
        lambda[m] = proj.lambda[i];
        ++m;
      }
    }
    size = m;
    return proj;
  }

  bool contains(const Eigen::Vector3d& w, double eps) const {
    for (int i = 0; i < size; ++i) {
      if ((v[i].w - w).norm() <= eps) return true;
    }
    return false;
  }
};

ProximityResult separated_result(const Simplex& s, int iterations, Flags flags) {
  ProximityResult r;
  for (int i = 0; i < s.size; ++i) {
    r.witness1 += s.lambda[i] * s.v[i].s1;
    r.witness2 += s.lambda[i] * s.v[i].s2;
    r.simplex[i] = s.v[i];
  }
  r.simplex_size = s.size;
  r.separation = r.witness1 - r.witness2;
  r.signed_distance = r.separation.norm();
  if (r.signed_distance > 0.0) {
    r.separation_direction = r.separation / r.signed_distance;
  } else if (s.size > 0 && s.v[0].dir.norm() > 0.0) {
    r.separation_direction = -s.v[0].dir.normalized();
  }
  r.colliding = false;
  r.branch = Branch::Separated;
  r.iterations = iterations;
  r.flags = flags;
  return r;
}

bool has_analytic_hessian(const ConvexShape& s) {
  return std::holds_alternative<Sphere>(s) || std::holds_alternative<Ellipsoid>(s);
}

// Newton iterations on the optimality condition
//   f(x) = x - s1(sgn x) + T s2(-sgn R^T x) = 0,  sgn = -1 separated, +1 penetrating,
// started from the GJK/EPA estimate. Only used when both support Hessians exist.
void refine_smooth(const ConvexShape& a, const ConvexShape& b, const Pose& pose,
                   ProximityResult& r) {
  if (!has_analytic_hessian(a) || !has_analytic_hessian(b)) return;
  const double sgn = r.branch == Branch::Separated ? -1.0 : 1.0;
  const Eigen::Matrix3d R = pose.rotationMatrix();
  const Eigen::Vector3d& t = pose.translation();

  struct Eval {
    Eigen::Vector3d f, x1, x2, x2l;
    Eigen::Matrix3d A;
  };
  auto eval = [&](const Eigen::Vector3d& x) {
    Eval e;
    const Eigen::Vector3d d1 = sgn * x;
    const Eigen::Vector3d y = -sgn * (R.transpose() * x);
    e.x1 = support_point(a, d1);
    e.x2l = support_point(b, y);
    e.x2 = R * e.x2l + t;
    e.f = x - e.x1 + e.x2;
    const Eigen::Matrix3d h1 = *support_hessian_analytic(a, d1);
    const Eigen::Matrix3d h2 = *support_hessian_analytic(b, y);
    e.A = Eigen::Matrix3d::Identity() - sgn * (h1 + R * h2 * R.transpose());
    return e;
  };

  Eigen::Vector3d x = r.separation;
  const double scale = std::max({1.0, r.witness1.norm(), r.witness2.norm()});
  const double floor = 1e-9 * scale;
  if (x.norm() < floor) return;
  Eval cur = eval(x);
  bool improved = false;
  for (int k = 0; k < 32; ++k) {
    if (cur.f.norm() <= 1e-15 * scale) break;
    const Eigen::Vector3d dx = -cur.A.partialPivLu().solve(cur.f);
    if (!dx.allFinite()) break;
    bool accepted = false;
    for (double step = 1.0; step >= 1.0 / 64.0; step *= 0.5) {
      const Eigen::Vector3d xn = x + step * dx;
      if (xn.dot(x) <= 0.0 || xn.norm() < floor) continue;
      Eval next = eval(xn);
      if (!(next.f.norm() < cur.f.norm())) continue;
      x = xn;
      cur = next;
      accepted = true;
      break;
    }
    if (!accepted) break;
    improved = true;
  }
  if (!improved) return;
  r.witness1 = cur.x1;
  r.witness2 = cur.x2;
  r.witness2_local = cur.x2l;
  r.separation = r.witness1 - r.witness2;
  const double d = r.separation.norm();
  r.signed_distance = r.branch == Branch::Separated ? d : -d;
  if (d > 0.0) r.separation_direction = r.separation / d;
  // A budget-limited GJK/EPA estimate polished to optimality is trustworthy.
  if (cur.f.norm() <= 1e-12 * scale) r.flags &= ~(kMaxIterations | kMaxFaces);
}

}  // namespace

MinkowskiVertex minkowski_support(const ConvexShape& shape1, const ConvexShape& shape2,
                                  const Pose& pose, const Eigen::Vector3d& dir) {
  return PairSupport(shape1, shape2, pose)(dir);
}

double duality_gap(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                   const Eigen::Vector3d& x) {
  const MinkowskiVertex v = minkowski_support(shape1, shape2, pose, -x);
  return x.dot(x - v.w);
}

std::variant<ProximityResult, PenetrationCase> gjk(const ConvexShape& shape1,
                                                   const ConvexShape& shape2, const Pose& pose,
                                                   const GjkConfig& cfg, const GjkSeed& seed) {
  const PairSupport sup(shape1, shape2, pose);
  Simplex s;
  double scale = 0.0;

  auto enclosed = [&](int iterations) {
    PenetrationCase pc;
    pc.simplex = s.v;
    pc.simplex_size = s.size;
    pc.iterations = iterations;
    return pc;
  };

  if (!seed.empty()) {
    for (const Eigen::Vector3d& dir : seed.directions) {
      if (s.size == 4) break;
      const MinkowskiVertex v = sup(dir);
      scale = std::max(scale, v.w.norm());
      if (!s.contains(v.w, 1e-14 * std::max(scale, 1.0))) s.v[s.size++] = v;
    }
  }
  if (s.size == 0) {
    Eigen::Vector3d d0 = pose.translation();
    if (d0.norm() < 1e-12) d0 = Eigen::Vector3d::UnitX();
    s.v[0] = sup(d0);
    s.size = 1;
    scale = s.v[0].w.norm();
  }
  Projection proj = s.reduce();
  if (proj.inside) return enclosed(0);
  Eigen::Vector3d x = proj.point;

  int iter = 0;
  while (iter < cfg.max_iterations) {
    ++iter;
    const double xx = x.squaredNorm();
    const double tiny = 1e-12 * std::max(scale, 1e-300);
    if (xx <= tiny * tiny) return enclosed(iter);

    const MinkowskiVertex v = sup(-x);
    scale = std::max(scale, v.w.norm());
    const double xnorm = std::sqrt(xx);
    const double gap = xx - x.dot(v.w);
    if (gap <= cfg.tolerance * xnorm) return separated_result(s, iter, kConverged);
    if (s.contains(v.w, 1e-14 * scale)) return separated_result(s, iter, kConverged);

    s.v[s.size++] = v;
    proj = s.reduce();
    if (proj.inside) return enclosed(iter);
    const Eigen::Vector3d xn = proj.point;
    if (xn.squaredNorm() >= xx) {
      // No progress: the previous iterate is as good as it gets in floating point.
      return separated_result(s, iter, kConverged);
    }
    x = xn;
  }
  return separated_result(s, iter, kMaxIterations);
}

namespace {

struct EpaFace {
  std::array<int, 3> v;
  Eigen::Vector3d normal;
  double dist = 0.0;
  bool alive = true;
  bool degenerate = false;
};

EpaFace make_epa_face(const std::vector<MinkowskiVertex>& pts, int a, int b, int c) {
  EpaFace f;
  f.v = {a, b, c};
  const Eigen::Vector3d n = (pts[b].w - pts[a].w).cross(pts[c].w - pts[a].w);
  const double len = n.norm();
  const double ref = (pts[b].w - pts[a].w).norm() * (pts[c].w - pts[a].w).norm();
  if (len <= 1e-14 * ref || len == 0.0) {
    f.degenerate = true;
    f.normal = Eigen::Vector3d::Zero();
    f.dist = std::numeric_limits<double>::infinity();
    return f;
  }
  f.normal = n / len;
  f.dist = f.normal.dot(pts[a].w);
  return f;
}

// Grows a simplex of the Minkowski difference into a non-degenerate tetrahedron.
bool blow_up(const PairSupport& sup, std::vector<MinkowskiVertex>& pts, double scale) {
  const double eps = 1e-10 * std::max(scale, 1e-300);
  static const Eigen::Vector3d axes[3] = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                          Eigen::Vector3d::UnitZ()};
  if (pts.size() == 1) {
    MinkowskiVertex best = pts[0];
    double dist = 0.0;
    for (const auto& a : axes) {
      for (double s : {1.0, -1.0}) {
        const MinkowskiVertex v = sup(s * a);
        const double d = (v.w - pts[0].w).norm();
        if (d > dist) dist = d, best = v;
      }
    }
    if (dist <= eps) return false;
    pts.push_back(best);
  }
  if (pts.size() == 2) {
    const Eigen::Vector3d axis = (pts[1].w - pts[0].w).normalized();
    int k = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(axis(i)) < std::abs(axis(k))) k = i;
    }
    const Eigen::Vector3d u = axis.cross(axes[k]).normalized();
    const Eigen::Vector3d w = axis.cross(u);
    MinkowskiVertex best = pts[0];
    double dist = 0.0;
    for (const Eigen::Vector3d& d : {u, Eigen::Vector3d(-u), w, Eigen::Vector3d(-w)}) {
      const MinkowskiVertex v = sup(d);
      const Eigen::Vector3d r = v.w - pts[0].w;
      const double off = (r - r.dot(axis) * axis).norm();
      if (off > dist) dist = off, best = v;
    }
    if (dist <= eps) return false;
    pts.push_back(best);
  }
  if (pts.size() == 3) {
    const Eigen::Vector3d n =
        (pts[1].w - pts[0].w).cross(pts[2].w - pts[0].w).normalized();
    MinkowskiVertex best = pts[0];
    double dist = 0.0;
    for (double s : {1.0, -1.0}) {
      const MinkowskiVertex v = sup(s * n);
      const double off = std::abs(n.dot(v.w - pts[0].w));
      if (off > dist) dist = off, best = v;
    }
    if (dist <= eps) return false;
    pts.push_back(best);
  }
  return true;
}

}  // namespace

ProximityResult epa(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                    const PenetrationCase& seed_simplex, const GjkConfig& cfg) {
  const PairSupport sup(shape1, shape2, pose);
  std::vector<MinkowskiVertex> pts(seed_simplex.simplex.begin(),
                                   seed_simplex.simplex.begin() + seed_simplex.simplex_size);
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.w.norm());
  if (pts.empty()) {
    pts.push_back(sup(pose.translation().norm() > 0 ? pose.translation()
                                                    : Eigen::Vector3d(Eigen::Vector3d::UnitX())));
    scale = pts[0].w.norm();
  }

  ProximityResult result;
  result.iterations = seed_simplex.iterations;
  result.colliding = true;
  result.branch = Branch::Penetrating;

  if (!blow_up(sup, pts, scale)) {
    // D is flat around the origin; report a zero-depth contact.
    result.flags |= kNumericalDegeneracy;
    result.witness1 = pts[0].s1;
    result.witness2 = pts[0].s2;
    result.separation = result.witness1 - result.witness2;
    result.signed_distance = -result.separation.norm();
    return result;
  }
  for (const auto& p : pts) scale = std::max(scale, p.w.norm());

  std::vector<EpaFace> faces;
  faces.reserve(64);
  {
    const Eigen::Vector3d centroid = 0.25 * (pts[0].w + pts[1].w + pts[2].w + pts[3].w);
    static constexpr int kFace[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    for (const auto& fv : kFace) {
      int a = fv[0], b = fv[1], c = fv[2];
      const Eigen::Vector3d n = (pts[b].w - pts[a].w).cross(pts[c].w - pts[a].w);
      if (n.dot(pts[a].w - centroid) < 0.0) std::swap(b, c);
      faces.push_back(make_epa_face(pts, a, b, c));
    }
  }

  auto closest_face = [&]() {
    int best = -1;
    for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
      if (!faces[i].alive || faces[i].degenerate) continue;
      if (best < 0 || faces[i].dist < faces[best].dist) best = i;
    }
    return best;
  };

  int alive_count = 4;
  int best = closest_face();
  const int max_iterations = std::max(cfg.max_iterations, cfg.epa_max_faces);
  int it = 0;
  for (; it < max_iterations && best >= 0; ++it) {
    const EpaFace& f = faces[best];
    const MinkowskiVertex v = sup(f.normal);
    scale = std::max(scale, v.w.norm());
    if (v.w.dot(f.normal) - f.dist <= cfg.epa_tolerance) break;

    const int idx = static_cast<int>(pts.size());
    pts.push_back(v);
    const double vis_eps = 1e-14 * scale;
    std::vector<std::pair<int, int>> edges;
    bool best_visible = false;
    for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
      EpaFace& g = faces[i];
      if (!g.alive) continue;
      const bool visible = g.degenerate
                               ? false
                               : g.normal.dot(v.w - pts[g.v[0]].w) > vis_eps;
      if (!visible) continue;
      if (i == best) best_visible = true;
      g.alive = false;
      --alive_count;
      for (int k = 0; k < 3; ++k) edges.emplace_back(g.v[k], g.v[(k + 1) % 3]);
    }
    if (!best_visible) {
      // Only reachable through round-off; the closest face is final.
      pts.pop_back();
      result.flags |= kNumericalDegeneracy;
      break;
    }
    for (const auto& [a, b] : edges) {
      bool interior = false;
      for (const auto& e : edges) {
        if (e.first == b && e.second == a) {
          interior = true;
          break;
        }
      }
      if (interior) continue;
      faces.push_back(make_epa_face(pts, a, b, idx));
      if (faces.back().degenerate) result.flags |= kNumericalDegeneracy;
      ++alive_count;
    }
    if (alive_count > cfg.epa_max_faces) {
      result.flags |= kMaxFaces;
      best = closest_face();
      break;
    }
    best = closest_face();
  }
  if (it >= max_iterations) result.flags |= kMaxIterations;
  result.epa_iterations = it;

  if (best < 0) {
    result.flags |= kNumericalDegeneracy;
    return result;
  }
  auto barycentric = [&](const EpaFace& g, const Eigen::Vector3d& p) {
    const Eigen::Vector3d &a = pts[g.v[0]].w, &b = pts[g.v[1]].w, &c = pts[g.v[2]].w;
    const Eigen::Vector3d n = (b - a).cross(c - a);
    const double nn = n.squaredNorm();
    Eigen::Vector3d l(n.dot((b - p).cross(c - p)) / nn, n.dot((c - p).cross(a - p)) / nn, 0.0);
    l(2) = 1.0 - l(0) - l(1);
    return l;
  };
  // A facet of D may be split into coplanar triangles; use the one holding
  // the projection of the origin.
  const Eigen::Vector3d p = faces[best].dist * faces[best].normal;
  Eigen::Vector3d l = barycentric(faces[best], p);
  for (int i = 0; i < static_cast<int>(faces.size()) && l.minCoeff() < 0.0; ++i) {
    const EpaFace& g = faces[i];
    if (!g.alive || g.degenerate || i == best) continue;
    if (g.dist > faces[best].dist + cfg.epa_tolerance) continue;
    if (g.normal.dot(faces[best].normal) < 1.0 - 1e-6) continue;
    const Eigen::Vector3d lg = barycentric(g, p);
    if (lg.minCoeff() > l.minCoeff()) {
      l = lg;
      best = i;
    }
  }
  if ((l.array() < 0.0).any()) {
    l = l.cwiseMax(0.0);
    l /= l.sum();
  }
  const EpaFace& f = faces[best];
  for (int k = 0; k < 3; ++k) {
    result.witness1 += l(k) * pts[f.v[k]].s1;
    result.witness2 += l(k) * pts[f.v[k]].s2;
    result.simplex[k] = pts[f.v[k]];
  }
  result.simplex_size = 3;
  result.separation = result.witness1 - result.witness2;
  result.separation_direction = f.normal;
  result.signed_distance = -result.separation.norm();
  return result;
}

ProximityResult proximity(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                          const GjkConfig& cfg, const GjkSeed& seed) {
  auto out = gjk(shape1, shape2, pose, cfg, seed);
  ProximityResult r;
  if (auto* sep = std::get_if<ProximityResult>(&out)) {
    r = *sep;
  } else {
    r = epa(shape1, shape2, pose, std::get<PenetrationCase>(out), cfg);
  }
  r.witness2_local = pose.rotation().conjugate() * (r.witness2 - pose.translation());
  if (cfg.refine_smooth) refine_smooth(shape1, shape2, pose, r);
  if (std::abs(r.signed_distance) < cfg.tolerance) {
    r.colliding = false;
    r.signed_distance = 0.0;
    r.flags |= kTouching;
  }
  return r;
}

GjkSeed warm_start(const ProximityResult& previous) {
  GjkSeed seed;
  for (int i = 0; i < previous.simplex_size; ++i) {
    seed.directions.push_back(previous.simplex[i].dir);
  }
  return seed;
}

void write_simplex_obj(const std::string& path, const ProximityResult& result) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorCode::FileNotFound, path);
  for (int i = 0; i < result.simplex_size; ++i) {
    const Eigen::Vector3d& w = result.simplex[i].w;
    std::fprintf(f, "v %.17g %.17g %.17g\n", w(0), w(1), w(2));
  }
  if (result.simplex_size == 3) std::fprintf(f, "f 1 2 3\n");
  if (result.simplex_size == 4) std::fprintf(f, "f 1 2 3\nf 1 2 4\nf 1 3 4\nf 2 3 4\n");
  std::fclose(f);
}

}  // namespace diffcol
