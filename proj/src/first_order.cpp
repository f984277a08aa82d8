#include "diffcol/first_order.hpp"

#include "diffcol/random.hpp"

#include <Eigen/LU>

#include <cmath>
#include <cstdio>

namespace diffcol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Eigen::Matrix3d symmetrized(const Eigen::Matrix3d& m) { return 0.5 * (m + m.transpose()); }

void validate(const HessianBackend& backend) {
  if (const auto* g = std::get_if<GaussianHessian>(&backend)) {
    if (g->samples < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
    if (!(g->noise > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise must be positive");
  } else if (const auto* g = std::get_if<GumbelHessian>(&backend)) {
    if (!(g->temperature > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "temperature must be positive");
    }
    if (g->depth < 0) throw Error(ErrorCode::InvalidArgument, "neighbor depth must be >= 0");
  }
}

Eigen::Matrix3d gaussian_hessian(const ConvexShape& shape, const Eigen::Vector3d& dir,
                                 const GaussianHessian& cfg) {
  Rng rng(mix_seed(cfg.seed));
  const Eigen::Vector3d base = support_point(shape, dir);
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  for (int j = 0; j < cfg.samples; ++j) {
    const Eigen::Vector3d z = standard_normal<3>(rng);
    acc.noalias() += (support_point(shape, dir + cfg.noise * z) - base) * z.transpose();
  }
  return symmetrized(acc / (cfg.samples * cfg.noise));
}

Eigen::Matrix3d mesh_gumbel(const ConvexMesh& mesh, const Eigen::Vector3d& dir,
                            const GumbelHessian& cfg) {
  const int top = support_vertex(mesh, dir);
  const std::vector<int> ball = neighbors_to_depth(mesh, top, cfg.depth);
  Eigen::Matrix3Xd local(3, static_cast<Eigen::Index>(ball.size()));
  for (std::size_t k = 0; k < ball.size(); ++k) local.col(k) = mesh.vertices().col(ball[k]);
  return gumbel_hessian(local, dir, cfg.temperature);
}

// Corners of a box indexed by sign bits, restricted to Hamming distance
// `depth` from the supporting corner.
Eigen::Matrix3d box_gumbel(const Box& box, const Eigen::Vector3d& dir, const GumbelHessian& cfg) {
  int top = 0;
  for (int a = 0; a < 3; ++a) {
    if (dir(a) > 0.0) top |= 1 << a;
  }
  Eigen::Matrix3Xd local(3, 8);
  int n = 0;
  for (int i = 0; i < 8; ++i) {
    int hops = 0;
    for (int a = 0; a < 3; ++a) hops += ((i ^ top) >> a) & 1;
    if (hops > cfg.depth) continue;
    for (int a = 0; a < 3; ++a) {
      local(a, n) = ((i >> a) & 1) ? box.half_extents(a) : -box.half_extents(a);
    }
    ++n;
  }
  return gumbel_hessian(local.leftCols(n), dir, cfg.temperature);
}

Eigen::Matrix3d analytic_or_throw(const ConvexShape& shape, const Eigen::Vector3d& dir) {
  if (auto h = support_hessian_analytic(shape, dir)) return *h;
  throw Error(ErrorCode::Unavailable, "no analytic support Hessian for " + shape_name(shape));
}

bool is_smooth(const ConvexShape& shape) {
  return std::holds_alternative<Sphere>(shape) || std::holds_alternative<Ellipsoid>(shape);
}

// Backend resolution for one shape of a pair.
Eigen::Matrix3d pair_hessian(const ConvexShape& shape, const Eigen::Vector3d& dir,
                             const HessianBackend& backend, std::uint64_t stream) {
  return std::visit(
      Overloaded{
          [&](const AnalyticHessian&) { return analytic_or_throw(shape, dir); },
          [&](const GaussianHessian& g) {
            GaussianHessian per_shape = g;
            per_shape.seed = mix_seed(g.seed, stream);
            return gaussian_hessian(shape, dir, per_shape);
          },
          [&](const GumbelHessian& g) {
            if (is_smooth(shape)) return analytic_or_throw(shape, dir);
            if (const auto* b = std::get_if<Box>(&shape)) return box_gumbel(*b, dir, g);
            return support_hessian(shape, dir, backend);
          },
      },
      backend);
}

}  // namespace

EstimatorKind estimator_kind(const HessianBackend& backend) {
  return std::visit(Overloaded{
                        [](const AnalyticHessian&) { return EstimatorKind::FirstOrderAnalytic; },
                        [](const GaussianHessian&) { return EstimatorKind::FirstOrderGaussian; },
                        [](const GumbelHessian&) { return EstimatorKind::FirstOrderGumbel; },
                    },
                    backend);
}

Eigen::Matrix3d gumbel_hessian(const Eigen::Matrix3Xd& vertices, const Eigen::Vector3d& dir,
                               double temperature) {
  const Eigen::VectorXd z = vertices.transpose() * dir;
  Eigen::VectorXd a = ((z.array() - z.maxCoeff()) / temperature).exp();
  a /= a.sum();
  const Eigen::Vector3d mean = vertices * a;
  const Eigen::Matrix3Xd centered = vertices.colwise() - mean;
  const Eigen::Matrix3d h = centered * a.asDiagonal() * centered.transpose() / temperature;
  return symmetrized(h);
}

Eigen::Matrix3d support_hessian(const ConvexShape& shape, const Eigen::Vector3d& dir,
                                const HessianBackend& backend) {
  validate(backend);
  if (!(dir.norm() >= 1e-15)) throw Error(ErrorCode::ZeroDirection, "support direction is zero");
  return std::visit(
      Overloaded{
          [&](const AnalyticHessian&) { return analytic_or_throw(shape, dir); },
          [&](const GaussianHessian& g) { return gaussian_hessian(shape, dir, g); },
          [&](const GumbelHessian& g) {
            const auto* mesh = std::get_if<ConvexMesh>(&shape);
            if (!mesh) {
              throw Error(ErrorCode::BackendMismatch,
                          "Gumbel Hessian needs a mesh, got " + shape_name(shape));
            }
            return mesh_gumbel(*mesh, dir, g);
          },
      },
      backend);
}

ImplicitSystem assemble_system(const ProximityResult& prox, const Pose& pose,
                               const ConvexShape& shape1, const ConvexShape& shape2,
                               const HessianBackend& backend) {
  validate(backend);
  ImplicitSystem sys;
  sys.branch = prox.branch;
  Eigen::Vector3d x = prox.separation;
  if (x.norm() < 1e-12) x = 1e-12 * prox.separation_direction;

  const Eigen::Matrix3d R = pose.rotationMatrix();
  const double sign = sys.branch == Branch::Separated ? 1.0 : -1.0;
  // Shape 1 supports along -x (separated) or x (penetrating); shape 2 along the opposite.
  const Eigen::Vector3d dir1 = -sign * x;
  const Eigen::Vector3d dir2_local = sign * (R.transpose() * x);

  sys.H1 = pair_hessian(shape1, dir1, backend, 1);
  sys.H2 = pair_hessian(shape2, dir2_local, backend, 2);
  sys.A = Eigen::Matrix3d::Identity() + sign * (sys.H1 + R * sys.H2 * R.transpose());
  sys.B = dfdq_blocks(pose, dir2_local, prox.witness2_local, sys.H2);
  return sys;
}

Flags solve_implicit(ImplicitSystem& sys, Matrix36& d_sep) {
  constexpr double kMinRcond = 1e-12;
  Eigen::PartialPivLU<Eigen::Matrix3d> lu(sys.A);
  sys.regularization = 0.0;
  Flags flags = kConverged;
  if (!(lu.rcond() >= kMinRcond)) {
    flags = kSingularSystem;
    for (double lambda = 1e-10; lambda <= 1e-4 * (1.0 + 1e-9); lambda *= 10.0) {
      lu.compute(sys.A + lambda * Eigen::Matrix3d::Identity());
      sys.regularization = lambda;
      if (lu.rcond() >= kMinRcond) {
        flags = kConverged;
        break;
      }
    }
  }
  d_sep = -lu.solve(sys.B);
  if (!d_sep.allFinite()) {
    d_sep.setZero();
    flags |= kSingularSystem;
  }
  return flags;
}

WitnessJacobians first_order_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                       const Pose& pose, const HessianBackend& backend,
                                       const GjkConfig& gjk_cfg) {
  return first_order_jacobians(shape1, shape2, pose, proximity(shape1, shape2, pose, gjk_cfg),
                               backend);
}

WitnessJacobians first_order_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                       const Pose& pose, const ProximityResult& nominal,
                                       const HessianBackend& backend) {
  ImplicitSystem sys = assemble_system(nominal, pose, shape1, shape2, backend);
  WitnessJacobians out;
  out.kind = estimator_kind(backend);
  std::visit(Overloaded{
                 [](const AnalyticHessian&) {},
                 [&](const GaussianHessian& g) {
                   out.samples = g.samples;
                   out.noise = g.noise;
                   out.samples_used = g.samples;
                 },
                 [&](const GumbelHessian& g) {
                   out.samples = g.depth;
                   out.noise = g.temperature;
                 },
             },
             backend);
  out.flags = (nominal.flags & kFailureFlags) | solve_implicit(sys, out.d_sep_dq);
  const double sign = sys.branch == Branch::Separated ? -1.0 : 1.0;
  out.d_w1_dq = sign * sys.H1 * out.d_sep_dq;
  out.d_w2_dq = out.d_w1_dq - out.d_sep_dq;
  return out;
}

void write_system_csv(const std::string& path, const ImplicitSystem& sys) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorCode::FileNotFound, path);
  std::fprintf(f, "name,row,c0,c1,c2,c3,c4,c5\n");
  auto dump = [&](const char* name, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::fprintf(f, "%s,%ld", name, static_cast<long>(r));
      for (Eigen::Index c = 0; c < 6; ++c) {
        if (c < m.cols()) {
          std::fprintf(f, ",%.17g", m(r, c));
        } else {
          std::fprintf(f, ",");
        }
      }
      std::fprintf(f, "\n");
    }
  };
  dump("A", sys.A);
  dump("B", sys.B);
  dump("H1", sys.H1);
  dump("H2", sys.H2);
  std::fprintf(f, "regularization,0,%.17g,,,,,\n", sys.regularization);
  std::fprintf(f, "branch,0,%d,,,,,\n", sys.branch == Branch::Separated ? 1 : -1);
  std::fclose(f);
}

}  // namespace diffcol
