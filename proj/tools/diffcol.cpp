#include "diffcol/bench.hpp"
#include "diffcol/estimators.hpp"
#include "diffcol/shape_spec.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

using namespace diffcol;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct PairArgs {
  std::string shape1;
  std::string shape2;
  std::string pose;
};

void add_pair_options(CLI::App* cmd, PairArgs& args) {
  cmd->add_option("--shape1", args.shape1, "sphere:R | ellipsoid:A,B,C | box:X,Y,Z | capsule:H,R | mesh:PATH")
      ->required();
  cmd->add_option("--shape2", args.shape2, "shape spec of the second shape")->required();
  cmd->add_option("--pose", args.pose, "pose of shape 2 in shape 1: \"tx ty tz qx qy qz qw\"")
      ->required();
}

void print_matrix(const char* name, const Matrix36& m) {
  for (int r = 0; r < 3; ++r) {
    std::printf("%s,%d", name, r);
    for (int c = 0; c < 6; ++c) std::printf(",%.17g", m(r, c));
    std::printf("\n");
  }
}

int flags_exit(Flags flags) { return (flags & kFailureFlags) ? kExitNumerical : kExitOk; }

EstimatorSpec estimator_from_flags(const std::string& name, std::optional<int> samples,
                                   std::optional<int> depth, std::optional<double> eps,
                                   std::uint64_t seed) {
  std::string canonical = name;
  if (name == "analytic") canonical = "first-analytic";
  if (name == "gaussian") canonical = "first-gaussian";
  if (name == "gumbel") canonical = "first-gumbel";
  EstimatorSpec spec = parse_estimator_spec(canonical);
  if (spec.kind == EstimatorKind::FirstOrderGumbel) {
    if (samples) throw Error(ErrorCode::ParseError, "--samples does not apply to gumbel, use --nl");
    if (depth) spec.samples = *depth;
  } else {
    if (depth) throw Error(ErrorCode::ParseError, "--nl only applies to gumbel");
    if (samples) {
      if (spec.kind != EstimatorKind::ZerothOrder && spec.kind != EstimatorKind::FirstOrderGaussian) {
        throw Error(ErrorCode::ParseError, "--samples does not apply to " + name);
      }
      spec.samples = *samples;
    }
  }
  if (eps) {
    if (spec.kind == EstimatorKind::FirstOrderAnalytic) {
      throw Error(ErrorCode::ParseError, "--eps does not apply to first-analytic");
    }
    if (!(*eps > 0.0)) throw Error(ErrorCode::ParseError, "--eps must be positive");
    spec.noise = *eps;
  }
  const bool sampled =
      spec.kind == EstimatorKind::ZerothOrder || spec.kind == EstimatorKind::FirstOrderGaussian;
  if ((sampled && spec.samples < 1) || spec.samples < 0) {
    throw Error(ErrorCode::ParseError, "sample count out of range");
  }
  spec.seed = seed;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision detection with witness-point derivatives"};
  app.require_subcommand(1, 1);

  PairArgs query_args;
  std::string simplex_obj;
  double tolerance = GjkConfig{}.tolerance;
  CLI::App* query = app.add_subcommand("query", "one proximity solve");
  add_pair_options(query, query_args);
  query->add_option("--tolerance", tolerance, "GJK duality-gap tolerance");
  query->add_option("--simplex-obj", simplex_obj, "write the terminal simplex as OBJ");

  PairArgs grad_args;
  std::string estimator_name = "first-gumbel";
  std::optional<int> samples, depth;
  std::optional<double> eps;
  std::uint64_t grad_seed = 0;
  std::string system_csv;
  CLI::App* grad = app.add_subcommand("grad", "witness Jacobians at one pose");
  add_pair_options(grad, grad_args);
  grad->add_option("--estimator", estimator_name,
                   "fd | zeroth | analytic | gaussian | gumbel (or first-* names)");
  grad->add_option("--samples", samples, "M for zeroth and gaussian");
  grad->add_option("--nl", depth, "neighbor depth for gumbel");
  grad->add_option("--eps", eps, "noise, temperature or increment");
  grad->add_option("--seed", grad_seed, "random seed");
  grad->add_option("--system-csv", system_csv, "dump A, B, H1, H2 of first-order estimators");

  std::string bench_config_path;
  std::optional<std::uint64_t> bench_seed;
  std::optional<std::string> bench_output;
  std::optional<int> bench_threads;
  CLI::App* bench = app.add_subcommand("bench", "contact-pose quantile suite");
  bench->add_option("--config", bench_config_path, "TOML-style config file")->required();
  bench->add_option("--seed", bench_seed, "master seed (overrides the config)");
  bench->add_option("--output", bench_output, "output directory (overrides the config)");
  bench->add_option("--threads", bench_threads, "worker count (DIFFCOL_THREADS wins)");

  std::string time_config_path;
  std::optional<std::uint64_t> time_seed;
  std::optional<std::string> time_output;
  std::optional<int> time_problems;
  CLI::App* timing = app.add_subcommand("time", "derivative timing suite");
  timing->add_option("--config", time_config_path, "TOML-style config file");
  timing->add_option("--seed", time_seed, "master seed");
  timing->add_option("--output", time_output, "output directory");
  timing->add_option("--problems", time_problems, "number of mesh pairs");

  PairArgs cloud_args;
  int cloud_samples = 25;
  double cloud_eps = 1e-2;
  std::uint64_t cloud_seed = 0;
  std::string cloud_output;
  CLI::App* cloud = app.add_subcommand("cloud", "witness points of perturbed poses as CSV");
  add_pair_options(cloud, cloud_args);
  cloud->add_option("--samples", cloud_samples, "M")->check(CLI::PositiveNumber);
  cloud->add_option("--eps", cloud_eps, "noise")->check(CLI::PositiveNumber);
  cloud->add_option("--seed", cloud_seed, "random seed");
  cloud->add_option("--output", cloud_output, "CSV path (stdout when absent)");

  std::uint64_t mesh_seed = 0;
  int mesh_vertices = 12;
  std::string mesh_output;
  CLI::App* gen_mesh = app.add_subcommand("gen-mesh", "random polyhedral ellipsoid as OBJ");
  gen_mesh->add_option("--seed", mesh_seed, "random seed");
  gen_mesh->add_option("--vertices", mesh_vertices, "vertex count")->check(CLI::Range(4, 1000000));
  gen_mesh->add_option("--output", mesh_output, "OBJ path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (query->parsed()) {
      const ConvexShape s1 = parse_shape_spec(query_args.shape1);
      const ConvexShape s2 = parse_shape_spec(query_args.shape2);
      const Pose pose = parse_pose(query_args.pose);
      GjkConfig cfg;
      cfg.tolerance = tolerance;
      const ProximityResult r = proximity(s1, s2, pose, cfg);
      std::printf("signed_distance,colliding,w1x,w1y,w1z,w2x,w2y,w2z,sepx,sepy,sepz,iterations,"
                  "epa_iterations,flags\n");
      std::printf("%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%s\n",
                  r.signed_distance, r.colliding ? 1 : 0, r.witness1(0), r.witness1(1),
                  r.witness1(2), r.witness2(0), r.witness2(1), r.witness2(2), r.separation(0),
                  r.separation(1), r.separation(2), r.iterations, r.epa_iterations,
                  describe_flags(r.flags).c_str());
      if (!simplex_obj.empty()) write_simplex_obj(simplex_obj, r);
      return flags_exit(r.flags);
    }
    if (grad->parsed()) {
      const ConvexShape s1 = parse_shape_spec(grad_args.shape1);
      const ConvexShape s2 = parse_shape_spec(grad_args.shape2);
      const Pose pose = parse_pose(grad_args.pose);
      const EstimatorSpec spec = estimator_from_flags(estimator_name, samples, depth, eps, grad_seed);
      const ProximityResult nominal = proximity(s1, s2, pose);
      const WitnessJacobians jac = estimate(s1, s2, pose, nominal, spec);
      std::printf("matrix,row,c0,c1,c2,c3,c4,c5\n");
      print_matrix("d_w1_dq", jac.d_w1_dq);
      print_matrix("d_w2_dq", jac.d_w2_dq);
      print_matrix("d_sep_dq", jac.d_sep_dq);
      if (!system_csv.empty()) {
        HessianBackend backend = AnalyticHessian{};
        if (spec.kind == EstimatorKind::FirstOrderGaussian) {
          backend = GaussianHessian{spec.samples, spec.noise, spec.seed};
        } else if (spec.kind == EstimatorKind::FirstOrderGumbel) {
          backend = GumbelHessian{spec.noise, spec.samples};
        } else if (spec.kind != EstimatorKind::FirstOrderAnalytic) {
          throw Error(ErrorCode::InvalidArgument, "--system-csv needs a first-order estimator");
        }
        ImplicitSystem sys = assemble_system(nominal, pose, s1, s2, backend);
        Matrix36 unused;
        solve_implicit(sys, unused);
        write_system_csv(system_csv, sys);
      }
      return flags_exit(nominal.flags | jac.flags);
    }
    if (bench->parsed()) {
      BenchConfig cfg = bench_config_from(KeyValueConfig::load(bench_config_path));
      if (bench_seed) cfg.seed = *bench_seed;
      if (bench_output) cfg.output_dir = *bench_output;
      if (bench_threads) cfg.threads = *bench_threads;
      const BenchResult result = run_benchmark(cfg);
      std::fputs(format_quantile_table(result.table).c_str(), stdout);
      int flagged = 0;
      for (const QuantileRow& row : result.table) flagged += row.flagged;
      return flagged ? kExitNumerical : kExitOk;
    }
    if (timing->parsed()) {
      BenchConfig cfg = time_config_path.empty()
                            ? bench_config_from(KeyValueConfig{})
                            : bench_config_from(KeyValueConfig::load(time_config_path));
      if (time_seed) cfg.seed = *time_seed;
      if (time_output) cfg.output_dir = *time_output;
      if (time_problems) cfg.timing_problems = *time_problems;
      const std::vector<TimingRow> rows = run_timings(cfg);
      std::printf("estimator,colliding_mean_us,colliding_std_us,separated_mean_us,"
                  "separated_std_us,median_us\n");
      for (const TimingRow& r : rows) {
        std::printf("%s,%.3f,%.3f,%.3f,%.3f,%.3f\n", r.estimator.c_str(), r.colliding.mean * 1e6,
                    r.colliding.stddev * 1e6, r.separated.mean * 1e6, r.separated.stddev * 1e6,
                    r.all.median * 1e6);
      }
      return kExitOk;
    }
    if (cloud->parsed()) {
      const ConvexShape s1 = parse_shape_spec(cloud_args.shape1);
      const ConvexShape s2 = parse_shape_spec(cloud_args.shape2);
      const Pose pose = parse_pose(cloud_args.pose);
      SmoothingConfig cfg;
      cfg.samples = cloud_samples;
      cfg.noise = cloud_eps;
      cfg.seed = cloud_seed;
      const std::vector<WitnessPair> pairs = smoothed_witness_cloud(s1, s2, pose, cfg);
      if (!cloud_output.empty()) {
        write_cloud_csv(cloud_output, pairs);
      } else {
        std::printf("sample_index,w1x,w1y,w1z,w2x,w2y,w2z\n");
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const auto& a = pairs[i].witness1;
          const auto& b = pairs[i].witness2;
          std::printf("%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, a(0), a(1), a(2), b(0),
                      b(1), b(2));
        }
      }
      return kExitOk;
    }
    if (gen_mesh->parsed()) {
      write_obj(mesh_output, generate_polyhedral_ellipsoid(mesh_seed, mesh_vertices));
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
