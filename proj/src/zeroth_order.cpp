#include "diffcol/zeroth_order.hpp"

#include "diffcol/random.hpp"

#include <cstdio>

namespace diffcol {

std::vector<Tangent> tangent_samples(int count, std::uint64_t seed) {
  Rng rng(mix_seed(seed));
  std::vector<Tangent> out(static_cast<std::size_t>(std::max(count, 0)));
  for (Tangent& z : out) z = standard_normal<6>(rng);
  return out;
}

namespace {

void validate(const SmoothingConfig& cfg) {
  if (cfg.samples < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  if (!(cfg.noise > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise must be positive");
}

}  // namespace

WitnessJacobians zeroth_order_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                        const Pose& pose, const SmoothingConfig& cfg,
                                        const GjkConfig& gjk_cfg) {
  validate(cfg);
  return zeroth_order_jacobians(shape1, shape2, pose, proximity(shape1, shape2, pose, gjk_cfg),
                                cfg, gjk_cfg);
}

WitnessJacobians zeroth_order_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                        const Pose& pose, const ProximityResult& nominal,
                                        const SmoothingConfig& cfg, const GjkConfig& gjk_cfg) {
  validate(cfg);
  const GjkSeed seed = warm_start(nominal);
  const std::vector<Tangent> zs = tangent_samples(cfg.samples, cfg.seed);
  const Eigen::Vector3d base1 = cfg.control_variate ? nominal.witness1 : Eigen::Vector3d::Zero();
  const Eigen::Vector3d base2 = cfg.control_variate ? nominal.witness2 : Eigen::Vector3d::Zero();

  Matrix36 acc1 = Matrix36::Zero();
  Matrix36 acc2 = Matrix36::Zero();
  int used = 0;
  for (const Tangent& z : zs) {
    const Tangent step = cfg.noise * z;
    const ProximityResult r = proximity(shape1, shape2, perturb(pose, step), gjk_cfg, seed);
    if (!r.ok()) continue;
    acc1.noalias() += (r.witness1 - base1) * z.transpose();
    acc2.noalias() += (r.witness2 - base2) * z.transpose();
    ++used;
  }

  WitnessJacobians out;
  out.kind = EstimatorKind::ZerothOrder;
  out.samples = cfg.samples;
  out.noise = cfg.noise;
  out.samples_used = used;
  if (2 * used < cfg.samples) out.flags |= kSampleFailure;
  if (used > 0) {
    const double scale = 1.0 / (static_cast<double>(used) * cfg.noise);
    out.d_w1_dq = scale * acc1;
    out.d_w2_dq = scale * acc2;
  }
  out.d_sep_dq = out.d_w1_dq - out.d_w2_dq;
  return out;
}

WitnessJacobians finite_difference_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                             const Pose& pose, double increment,
                                             const GjkConfig& gjk_cfg) {
  return finite_difference_jacobians(shape1, shape2, pose,
                                     proximity(shape1, shape2, pose, gjk_cfg), increment, gjk_cfg);
}

WitnessJacobians finite_difference_jacobians(const ConvexShape& shape1, const ConvexShape& shape2,
                                             const Pose& pose, const ProximityResult& nominal,
                                             double increment, const GjkConfig& gjk_cfg) {
  if (!(increment > 0.0)) throw Error(ErrorCode::InvalidArgument, "increment must be positive");
  const GjkSeed seed = warm_start(nominal);
  WitnessJacobians out;
  out.kind = EstimatorKind::FiniteDifference;
  out.samples = 12;
  out.noise = increment;
  for (int k = 0; k < 6; ++k) {
    const Tangent step = increment * Tangent::Unit(k);
    const ProximityResult plus = proximity(shape1, shape2, perturb(pose, step), gjk_cfg, seed);
    const ProximityResult minus =
        proximity(shape1, shape2, perturb(pose, Tangent(-step)), gjk_cfg, seed);
    out.samples_used += plus.ok() + minus.ok();
    if (!plus.ok() || !minus.ok()) out.flags |= kSampleFailure;
    out.d_w1_dq.col(k) = (plus.witness1 - minus.witness1) / (2.0 * increment);
    out.d_w2_dq.col(k) = (plus.witness2 - minus.witness2) / (2.0 * increment);
  }
  out.d_sep_dq = out.d_w1_dq - out.d_w2_dq;
  return out;
}

std::vector<WitnessPair> smoothed_witness_cloud(const ConvexShape& shape1,
                                                const ConvexShape& shape2, const Pose& pose,
                                                const SmoothingConfig& cfg,
                                                const GjkConfig& gjk_cfg) {
  validate(cfg);
  const GjkSeed seed = warm_start(proximity(shape1, shape2, pose, gjk_cfg));
  std::vector<WitnessPair> cloud;
  for (const Tangent& z : tangent_samples(cfg.samples, cfg.seed)) {
    const Tangent step = cfg.noise * z;
    const ProximityResult r = proximity(shape1, shape2, perturb(pose, step), gjk_cfg, seed);
    cloud.push_back({r.witness1, r.witness2});
  }
  return cloud;
}

void write_cloud_csv(const std::string& path, const std::vector<WitnessPair>& cloud) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorCode::FileNotFound, path);
  std::fprintf(f, "sample_index,w1x,w1y,w1z,w2x,w2y,w2z\n");
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& a = cloud[i].witness1;
    const auto& b = cloud[i].witness2;
    std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, a(0), a(1), a(2), b(0), b(1),
                 b(2));
  }
  std::fclose(f);
}

}  // namespace diffcol
