#pragma once

#include "diffcol/config.hpp"
#include "diffcol/estimators.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace diffcol {

/// Random ellipsoid (semi-axes uniform in [0.5, 1.5]) sampled at
/// `n_vertices` uniform directions, projected onto its surface and hulled.
ConvexMesh generate_polyhedral_ellipsoid(std::uint64_t seed, int n_vertices = 12);

/// Place the witness of shape 1 on target1 and the witness of shape 2 on
/// target2 with the two in contact. target1 is in the frame of shape 1,
/// target2 in the frame of shape 2.
struct ContactPoseProblem {
  std::shared_ptr<const ConvexShape> shape1;
  std::shared_ptr<const ConvexShape> shape2;
  Eigen::Vector3d target1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d target2 = Eigen::Vector3d::Zero();
  Pose q0 = Pose::Identity();
  int problem_id = 0;
  std::uint64_t seed = 0;
};

struct LineSearchConfig {
  double beta = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 20;
  double damping = 1e-10;
};

using Residual = Eigen::Matrix<double, 9, 1>;
using ResidualJacobian = Eigen::Matrix<double, 9, 6>;

/// Residual stack (w1 - t1, w2_local - t2, w1 - w2) at a solved pose.
Residual contact_residual(const ContactPoseProblem& problem, const Pose& pose,
                          const ProximityResult& prox);

/// Maps witness Jacobians to the 9x6 Jacobian of `contact_residual`.
ResidualJacobian contact_residual_jacobian(const Pose& pose, const ProximityResult& prox,
                                           const WitnessJacobians& jac);

struct CostAndJacobian {
  double cost = 0.0;
  Residual residual = Residual::Zero();
  ResidualJacobian jacobian = ResidualJacobian::Zero();
  ProximityResult proximity;
  Flags flags = kConverged;
};

CostAndJacobian contact_cost_and_jacobian(const ContactPoseProblem& problem, const Pose& pose,
                                          const EstimatorSpec& estimator,
                                          const GjkConfig& gjk_cfg = {});

/// Cost only; +inf when the solve fails.
double contact_cost(const ContactPoseProblem& problem, const Pose& pose,
                    const GjkConfig& gjk_cfg = {}, const GjkSeed& seed = {});

struct SolveReport {
  int problem_id = 0;
  std::string estimator;
  double terminal_cost = 0.0;
  int iterations = 0;
  /// Cost at q0 followed by the cost after each iteration.
  std::vector<double> cost_trace;
  /// Accepted step length per iteration (0 on a stall).
  std::vector<double> step_sizes;
  /// Directional derivative <grad C, delta> the Armijo test used.
  std::vector<double> slopes;
  int stalls = 0;
  double wall_time = 0.0;
  Flags flags = kConverged;
  Pose final_pose = Pose::Identity();
};

/// Gauss-Newton with Armijo backtracking for a fixed number of iterations.
/// The estimator seed is re-derived per iteration from the problem seed.
SolveReport gauss_newton_solve(const ContactPoseProblem& problem, const EstimatorSpec& estimator,
                               int iterations = 50, const LineSearchConfig& ls = {},
                               const GjkConfig& gjk_cfg = {});

struct Quantiles {
  double d1 = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double d9 = 0.0;
};

/// Linearly interpolated order statistics (Hyndman-Fan type 7).
Quantiles quantiles(std::vector<double> values);

struct BenchConfig {
  /// rough: polyhedral ellipsoids; smooth: ellipsoids; spheres; meshes: OBJ files in mesh_dir.
  std::string suite = "rough";
  int pairs = 20;
  int targets = 20;
  int mesh_vertices = 12;
  std::vector<EstimatorSpec> estimators;
  std::uint64_t seed = 0;
  int iterations = 50;
  std::string output_dir = "bench_out";
  std::string mesh_dir;
  bool traces = false;
  int threads = 0;
  /// Gap between the bounding spheres at q0, in mean bounding diameters.
  double initial_gap = 1.0;
  LineSearchConfig line_search;
  GjkConfig gjk;

  int timing_problems = 200;
  int timing_vertices = 100;
  int timing_repeats = 20;
  std::vector<EstimatorSpec> timing_estimators;
};

/// Reads the `[bench]`, `[timing]`, `[line_search]` and `[gjk]` tables.
/// Unknown keys are a ParseError.
BenchConfig bench_config_from(const KeyValueConfig& kv);

/// The estimator grid of the paper's quantile table.
std::vector<EstimatorSpec> default_bench_estimators();
/// The estimator grid of the paper's timing table.
std::vector<EstimatorSpec> default_timing_estimators();

std::vector<ContactPoseProblem> make_problems(const BenchConfig& cfg);

struct QuantileRow {
  std::string estimator;
  Quantiles q;
  int problems = 0;
  int flagged = 0;
};

struct BenchResult {
  std::vector<SolveReport> reports;  // estimator-major
  std::vector<QuantileRow> table;
};

/// Worker count: DIFFCOL_THREADS, else cfg.threads, else hardware concurrency.
int worker_count(int configured);

/// Solves every problem with every estimator and, when `write` is set,
/// writes reports.csv, quantiles.csv, quantiles.txt and trace files.
BenchResult run_benchmark(const BenchConfig& cfg, bool write = true);

struct TimingStats {
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  int count = 0;
};

struct TimingRow {
  std::string estimator;
  TimingStats colliding;
  TimingStats separated;
  TimingStats all;
};

/// Time per derivative computation, in seconds. The nominal solve is shared
/// and excluded; the perturbed solves of zeroth-order and finite
/// differences are included. Single-threaded.
std::vector<TimingRow> run_timings(const BenchConfig& cfg, bool write = true);

void write_reports_csv(const std::string& path, const std::vector<SolveReport>& reports);
void write_quantiles_csv(const std::string& path, const std::vector<QuantileRow>& table);
std::string format_quantile_table(const std::vector<QuantileRow>& table);
void write_timings_csv(const std::string& path, const std::vector<TimingRow>& rows);
void write_trace_csv(const std::string& path, const SolveReport& report);

}  // namespace diffcol
