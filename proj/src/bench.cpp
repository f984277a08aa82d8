#include "diffcol/bench.hpp"

#include "diffcol/random.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <set>
#include <thread>

namespace diffcol {

namespace fs = std::filesystem;

ConvexMesh generate_polyhedral_ellipsoid(std::uint64_t seed, int n_vertices) {
  if (n_vertices < 4) throw Error(ErrorCode::InvalidArgument, "need at least 4 vertices");
  constexpr int kRetries = 16;
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    const Eigen::Vector3d axes = uniform_vector(rng, 0.5, 1.5);
    std::vector<Eigen::Vector3d> points;
    for (int i = 0; i < n_vertices; ++i) {
      const Eigen::Vector3d u = uniform_direction(rng);
      // Radial projection onto x^T D^-2 x = 1.
      points.push_back(u / u.cwiseQuotient(axes).norm());
    }
    try {
      ConvexMesh mesh = build_convex_mesh(points);
      if (mesh.size() == n_vertices) return mesh;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput) throw;
    }
  }
  throw Error(ErrorCode::DegenerateInput, "could not generate a polyhedral ellipsoid");
}

namespace {

double bounding_radius(const ConvexShape& shape) {
  if (const auto* s = std::get_if<Sphere>(&shape)) return s->radius;
  if (const auto* e = std::get_if<Ellipsoid>(&shape)) return e->semi_axes.maxCoeff();
  if (const auto* b = std::get_if<Box>(&shape)) return b->half_extents.norm();
  if (const auto* c = std::get_if<Capsule>(&shape)) return c->half_length + c->radius;
  const auto& m = std::get<ConvexMesh>(shape);
  return m.vertices().colwise().norm().maxCoeff();
}

Pose random_pose_at(Rng& rng, double distance) {
  const Eigen::Vector3d t = uniform_direction(rng) * distance;
  return Pose(t, uniform_rotation(rng));
}

struct Evaluation {
  double cost = std::numeric_limits<double>::infinity();
  ProximityResult prox;
};

Evaluation evaluate(const ContactPoseProblem& problem, const Pose& pose, const GjkConfig& gjk_cfg,
                    const GjkSeed& seed) {
  Evaluation ev;
  ev.prox = proximity(*problem.shape1, *problem.shape2, pose, gjk_cfg, seed);
  if (ev.prox.ok()) ev.cost = 0.5 * contact_residual(problem, pose, ev.prox).squaredNorm();
  return ev;
}

EstimatorSpec seeded(EstimatorSpec spec, std::uint64_t seed) {
  spec.seed = seed;
  return spec;
}

}  // namespace

Residual contact_residual(const ContactPoseProblem& problem, const Pose& pose,
                          const ProximityResult& prox) {
  (void)pose;
  Residual r;
  r.segment<3>(0) = prox.witness1 - problem.target1;
  r.segment<3>(3) = prox.witness2_local - problem.target2;
  r.segment<3>(6) = prox.witness1 - prox.witness2;
  return r;
}

ResidualJacobian contact_residual_jacobian(const Pose& pose, const ProximityResult& prox,
                                           const WitnessJacobians& jac) {
  const Eigen::Matrix3d Rt = pose.rotationMatrix().transpose();
  ResidualJacobian J;
  J.block<3, 6>(0, 0) = jac.d_w1_dq;
  // w2_local = R^T (w2 - t); a right perturbation moves it by -v + [w2_local]x w.
  J.block<3, 6>(3, 0) = Rt * jac.d_w2_dq;
  J.block<3, 3>(3, 0) -= Eigen::Matrix3d::Identity();
  J.block<3, 3>(3, 3) += hat(prox.witness2_local);
  J.block<3, 6>(6, 0) = jac.d_sep_dq;
  return J;
}

CostAndJacobian contact_cost_and_jacobian(const ContactPoseProblem& problem, const Pose& pose,
                                          const EstimatorSpec& estimator,
                                          const GjkConfig& gjk_cfg) {
  CostAndJacobian out;
  const Evaluation ev = evaluate(problem, pose, gjk_cfg, {});
  out.proximity = ev.prox;
  out.residual = contact_residual(problem, pose, ev.prox);
  out.cost = 0.5 * out.residual.squaredNorm();
  const WitnessJacobians jac =
      estimate(*problem.shape1, *problem.shape2, pose, ev.prox, estimator, gjk_cfg);
  out.jacobian = contact_residual_jacobian(pose, ev.prox, jac);
  out.flags = ev.prox.flags | jac.flags;
  return out;
}

double contact_cost(const ContactPoseProblem& problem, const Pose& pose, const GjkConfig& gjk_cfg,
                    const GjkSeed& seed) {
  return evaluate(problem, pose, gjk_cfg, seed).cost;
}

SolveReport gauss_newton_solve(const ContactPoseProblem& problem, const EstimatorSpec& estimator,
                               int iterations, const LineSearchConfig& ls,
                               const GjkConfig& gjk_cfg) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.problem_id = problem.problem_id;
  rep.estimator = format_estimator_spec(estimator);

  Pose q = problem.q0;
  Evaluation cur = evaluate(problem, q, gjk_cfg, {});
  rep.flags |= cur.prox.flags & kFailureFlags;
  rep.cost_trace.push_back(cur.cost);

  for (int it = 0; it < iterations; ++it) {
    const WitnessJacobians jac =
        estimate(*problem.shape1, *problem.shape2, q, cur.prox,
                 seeded(estimator, mix_seed(problem.seed, static_cast<std::uint64_t>(it))),
                 gjk_cfg);
    rep.flags |= jac.flags & kFailureFlags;
    const ResidualJacobian J = contact_residual_jacobian(q, cur.prox, jac);
    const Residual r = contact_residual(problem, q, cur.prox);
    const Tangent g = J.transpose() * r;
    const Eigen::Matrix<double, 6, 6> normal =
        J.transpose() * J + ls.damping * Eigen::Matrix<double, 6, 6>::Identity();
    const Tangent delta = -normal.ldlt().solve(g);
    const double slope = g.dot(delta);

    double alpha = 1.0;
    bool accepted = false;
    Evaluation trial;
    if (delta.allFinite() && std::isfinite(cur.cost)) {
      const GjkSeed seed = warm_start(cur.prox);
      for (int b = 0; b <= ls.max_backtracks; ++b) {
        trial = evaluate(problem, perturb(q, Tangent(alpha * delta)), gjk_cfg, seed);
        if (trial.cost <= cur.cost + ls.armijo * alpha * slope) {
          accepted = true;
          break;
        }
        alpha *= ls.beta;
      }
    }
    if (accepted) {
      q = perturb(q, Tangent(alpha * delta));
      cur = trial;
    } else {
      alpha = 0.0;
      ++rep.stalls;
      rep.flags |= kLineSearchStall;
    }
    rep.cost_trace.push_back(cur.cost);
    rep.step_sizes.push_back(alpha);
    rep.slopes.push_back(slope);
  }
  rep.iterations = iterations;
  rep.terminal_cost = rep.cost_trace.back();
  rep.final_pose = q;
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

Quantiles quantiles(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no values");
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) return values[lo];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  return {at(0.1), at(0.25), at(0.5), at(0.75), at(0.9)};
}

std::vector<EstimatorSpec> default_bench_estimators() {
  return {parse_estimator_spec("fd:1e-6"), parse_estimator_spec("fd:1e-3"),
          parse_estimator_spec("zeroth:50:1e-2"), parse_estimator_spec("first-gaussian:20:1e-3"),
          parse_estimator_spec("first-gumbel:1:1e-4")};
}

std::vector<EstimatorSpec> default_timing_estimators() {
  std::vector<EstimatorSpec> out{parse_estimator_spec("fd:1e-6")};
  for (const char* m : {"10", "20", "50", "100"}) {
    out.push_back(parse_estimator_spec(std::string("zeroth:") + m + ":1e-2"));
  }
  for (const char* m : {"10", "20", "50", "100"}) {
    out.push_back(parse_estimator_spec(std::string("first-gaussian:") + m + ":1e-3"));
  }
  for (const char* n : {"1", "3", "5"}) {
    out.push_back(parse_estimator_spec(std::string("first-gumbel:") + n + ":1e-4"));
  }
  return out;
}

BenchConfig bench_config_from(const KeyValueConfig& kv) {
  static const std::set<std::string> known = {
      "bench.suite",          "bench.pairs",         "bench.targets",
      "bench.mesh_vertices",  "bench.estimators",    "bench.seed",
      "bench.iterations",     "bench.output_dir",    "bench.mesh_dir",
      "bench.traces",         "bench.threads",       "bench.initial_gap",
      "line_search.beta",     "line_search.armijo",  "line_search.max_backtracks",
      "line_search.damping",  "gjk.tolerance",       "gjk.max_iterations",
      "gjk.epa_max_faces",    "gjk.epa_tolerance",   "timing.problems",
      "timing.vertices",      "timing.repeats",      "timing.estimators",
  };
  for (const std::string& k : kv.keys()) {
    if (!known.count(k)) throw Error(ErrorCode::ParseError, "unknown config key '" + k + "'");
  }
  BenchConfig c;
  c.suite = kv.get_string("bench.suite", c.suite);
  if (c.suite != "rough" && c.suite != "smooth" && c.suite != "spheres" && c.suite != "meshes") {
    throw Error(ErrorCode::ParseError, "unknown suite '" + c.suite + "'");
  }
  c.pairs = static_cast<int>(kv.get_int("bench.pairs", c.pairs));
  c.targets = static_cast<int>(kv.get_int("bench.targets", c.targets));
  c.mesh_vertices = static_cast<int>(kv.get_int("bench.mesh_vertices", c.mesh_vertices));
  c.seed = kv.get_u64("bench.seed", c.seed);
  c.iterations = static_cast<int>(kv.get_int("bench.iterations", c.iterations));
  c.output_dir = kv.get_string("bench.output_dir", c.output_dir);
  c.mesh_dir = kv.get_string("bench.mesh_dir", c.mesh_dir);
  c.traces = kv.get_bool("bench.traces", c.traces);
  c.threads = static_cast<int>(kv.get_int("bench.threads", c.threads));
  c.initial_gap = kv.get_double("bench.initial_gap", c.initial_gap);
  for (const std::string& s : kv.get_list("bench.estimators", {})) {
    c.estimators.push_back(parse_estimator_spec(s));
  }
  if (c.estimators.empty()) c.estimators = default_bench_estimators();

  c.line_search.beta = kv.get_double("line_search.beta", c.line_search.beta);
  c.line_search.armijo = kv.get_double("line_search.armijo", c.line_search.armijo);
  c.line_search.max_backtracks =
      static_cast<int>(kv.get_int("line_search.max_backtracks", c.line_search.max_backtracks));
  c.line_search.damping = kv.get_double("line_search.damping", c.line_search.damping);

  c.gjk.tolerance = kv.get_double("gjk.tolerance", c.gjk.tolerance);
  c.gjk.max_iterations = static_cast<int>(kv.get_int("gjk.max_iterations", c.gjk.max_iterations));
  c.gjk.epa_max_faces = static_cast<int>(kv.get_int("gjk.epa_max_faces", c.gjk.epa_max_faces));
  c.gjk.epa_tolerance = kv.get_double("gjk.epa_tolerance", c.gjk.epa_tolerance);

  c.timing_problems = static_cast<int>(kv.get_int("timing.problems", c.timing_problems));
  c.timing_vertices = static_cast<int>(kv.get_int("timing.vertices", c.timing_vertices));
  c.timing_repeats = static_cast<int>(kv.get_int("timing.repeats", c.timing_repeats));
  for (const std::string& s : kv.get_list("timing.estimators", {})) {
    c.timing_estimators.push_back(parse_estimator_spec(s));
  }
  if (c.timing_estimators.empty()) c.timing_estimators = default_timing_estimators();

  if (c.pairs < 1 || c.targets < 1) throw Error(ErrorCode::ParseError, "pairs and targets >= 1");
  if (c.iterations < 0) throw Error(ErrorCode::ParseError, "iterations must be >= 0");
  if (!(c.line_search.beta > 0.0 && c.line_search.beta < 1.0)) {
    throw Error(ErrorCode::ParseError, "line_search.beta must be in (0, 1)");
  }
  if (!(c.gjk.tolerance > 0.0) || c.gjk.max_iterations < 1) {
    throw Error(ErrorCode::ParseError, "invalid gjk settings");
  }
  if (c.timing_problems < 1 || c.timing_repeats < 1 || c.timing_vertices < 4) {
    throw Error(ErrorCode::ParseError, "invalid timing settings");
  }
  return c;
}

std::vector<ContactPoseProblem> make_problems(const BenchConfig& cfg) {
  std::vector<std::string> mesh_files;
  if (cfg.suite == "meshes") {
    if (cfg.mesh_dir.empty() || !fs::is_directory(cfg.mesh_dir)) {
      throw Error(ErrorCode::FileNotFound, "mesh directory '" + cfg.mesh_dir + "'");
    }
    for (const auto& entry : fs::directory_iterator(cfg.mesh_dir)) {
      if (entry.path().extension() == ".obj") mesh_files.push_back(entry.path().string());
    }
    std::sort(mesh_files.begin(), mesh_files.end());
    if (mesh_files.empty()) throw Error(ErrorCode::FileNotFound, "no .obj files in mesh_dir");
  }

  std::vector<ContactPoseProblem> problems;
  for (int p = 0; p < cfg.pairs; ++p) {
    const std::uint64_t pair_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(p));
    std::shared_ptr<const ConvexShape> shapes[2];
    for (int s = 0; s < 2; ++s) {
      const std::uint64_t shape_seed = mix_seed(pair_seed, static_cast<std::uint64_t>(s));
      Rng rng(shape_seed);
      ConvexShape shape;
      if (cfg.suite == "rough") {
        shape = generate_polyhedral_ellipsoid(shape_seed, cfg.mesh_vertices);
      } else if (cfg.suite == "smooth") {
        shape = make_ellipsoid(uniform_vector(rng, 0.5, 1.5));
      } else if (cfg.suite == "spheres") {
        shape = make_sphere(uniform(rng, 0.5, 1.5));
      } else {
        const auto pick = std::uniform_int_distribution<std::size_t>(0, mesh_files.size() - 1)(rng);
        shape = load_obj_mesh(mesh_files[pick]);
      }
      shapes[s] = std::make_shared<const ConvexShape>(std::move(shape));
    }
    const double b1 = bounding_radius(*shapes[0]);
    const double b2 = bounding_radius(*shapes[1]);
    for (int k = 0; k < cfg.targets; ++k) {
      ContactPoseProblem prob;
      prob.problem_id = p * cfg.targets + k;
      prob.seed = mix_seed(mix_seed(pair_seed, 2), static_cast<std::uint64_t>(k));
      Rng rng(prob.seed);
      prob.shape1 = shapes[0];
      prob.shape2 = shapes[1];
      prob.target1 = support_point(*shapes[0], uniform_direction(rng));
      prob.target2 = support_point(*shapes[1], uniform_direction(rng));
      prob.q0 = random_pose_at(rng, (b1 + b2) * (1.0 + cfg.initial_gap));
      prob.seed = mix_seed(prob.seed, 3);
      problems.push_back(std::move(prob));
    }
  }
  return problems;
}

int worker_count(int configured) {
  if (const char* env = std::getenv("DIFFCOL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  if (configured > 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

template <class Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  std::atomic<int> next{0};
  auto run = [&] {
    for (int i = next++; i < count; i = next++) fn(i);
  };
  workers = std::max(1, std::min(workers, count));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (std::thread& t : pool) t.join();
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& cfg, bool write) {
  const std::vector<ContactPoseProblem> problems = make_problems(cfg);
  const int n_prob = static_cast<int>(problems.size());
  const int n_est = static_cast<int>(cfg.estimators.size());
  BenchResult result;
  result.reports.resize(static_cast<std::size_t>(n_prob) * n_est);
  parallel_for(n_prob * n_est, worker_count(cfg.threads), [&](int task) {
    const int e = task / n_prob;
    const int p = task % n_prob;
    result.reports[task] = gauss_newton_solve(problems[p], cfg.estimators[e], cfg.iterations,
                                              cfg.line_search, cfg.gjk);
  });

  for (int e = 0; e < n_est; ++e) {
    QuantileRow row;
    row.estimator = format_estimator_spec(cfg.estimators[e]);
    std::vector<double> costs;
    for (int p = 0; p < n_prob; ++p) {
      const SolveReport& r = result.reports[static_cast<std::size_t>(e) * n_prob + p];
      costs.push_back(r.terminal_cost);
      if (r.flags & kFailureFlags) ++row.flagged;
    }
    row.q = quantiles(costs);
    row.problems = n_prob;
    result.table.push_back(row);
  }

  if (write) {
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);
    write_reports_csv((dir / "reports.csv").string(), result.reports);
    write_quantiles_csv((dir / "quantiles.csv").string(), result.table);
    if (std::FILE* f = std::fopen((dir / "quantiles.txt").string().c_str(), "w")) {
      std::fputs(format_quantile_table(result.table).c_str(), f);
      std::fclose(f);
    }
    if (cfg.traces) {
      for (int p = 0; p < n_prob; ++p) {
        const fs::path path = dir / ("trace_" + std::to_string(problems[p].problem_id) + ".csv");
        std::FILE* f = std::fopen(path.string().c_str(), "w");
        if (!f) throw Error(ErrorCode::FileNotFound, path.string());
        std::fprintf(f, "estimator,iteration,cost,step,slope\n");
        for (int e = 0; e < n_est; ++e) {
          const SolveReport& r = result.reports[static_cast<std::size_t>(e) * n_prob + p];
          for (std::size_t i = 0; i < r.cost_trace.size(); ++i) {
            const double step = i == 0 ? 0.0 : r.step_sizes[i - 1];
            const double slope = i == 0 ? 0.0 : r.slopes[i - 1];
            std::fprintf(f, "%s,%zu,%.17g,%.17g,%.17g\n", r.estimator.c_str(), i,
                         r.cost_trace[i], step, slope);
          }
        }
        std::fclose(f);
      }
    }
  }
  return result;
}

namespace {

TimingStats stats(std::vector<double> v) {
  TimingStats s;
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / s.count;
  double var = 0.0;
  for (double x : v) var += (x - s.mean) * (x - s.mean);
  s.stddev = s.count > 1 ? std::sqrt(var / (s.count - 1)) : 0.0;
  std::sort(v.begin(), v.end());
  s.median = s.count % 2 ? v[s.count / 2] : 0.5 * (v[s.count / 2 - 1] + v[s.count / 2]);
  return s;
}

}  // namespace

std::vector<TimingRow> run_timings(const BenchConfig& cfg, bool write) {
  struct Case {
    std::shared_ptr<const ConvexShape> a, b;
    Pose pose;
    ProximityResult nominal;
  };
  std::vector<Case> cases;
  for (int i = 0; i < cfg.timing_problems; ++i) {
    const std::uint64_t s = mix_seed(mix_seed(cfg.seed, 0x7131u), static_cast<std::uint64_t>(i));
    Case c;
    c.a = std::make_shared<const ConvexShape>(
        generate_polyhedral_ellipsoid(mix_seed(s, 0), cfg.timing_vertices));
    c.b = std::make_shared<const ConvexShape>(
        generate_polyhedral_ellipsoid(mix_seed(s, 1), cfg.timing_vertices));
    Rng rng(mix_seed(s, 2));
    const double reach = bounding_radius(*c.a) + bounding_radius(*c.b);
    c.pose = random_pose_at(rng, reach * uniform(rng, 0.5, 1.2));
    c.nominal = proximity(*c.a, *c.b, c.pose, cfg.gjk);
    cases.push_back(std::move(c));
  }

  std::vector<TimingRow> rows;
  for (const EstimatorSpec& spec0 : cfg.timing_estimators) {
    TimingRow row;
    row.estimator = format_estimator_spec(spec0);
    std::vector<double> hit, miss, all;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const Case& c = cases[i];
      const EstimatorSpec spec = seeded(spec0, mix_seed(cfg.seed, i));
      WitnessJacobians sink = estimate(*c.a, *c.b, c.pose, c.nominal, spec, cfg.gjk);
      const auto t0 = std::chrono::steady_clock::now();
      for (int r = 0; r < cfg.timing_repeats; ++r) {
        sink = estimate(*c.a, *c.b, c.pose, c.nominal, spec, cfg.gjk);
      }
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
                        cfg.timing_repeats;
      if (!sink.d_sep_dq.allFinite()) continue;
      (c.nominal.colliding ? hit : miss).push_back(dt);
      all.push_back(dt);
    }
    row.colliding = stats(hit);
    row.separated = stats(miss);
    row.all = stats(all);
    rows.push_back(row);
  }
  if (write) {
    fs::create_directories(cfg.output_dir);
    write_timings_csv((fs::path(cfg.output_dir) / "timings.csv").string(), rows);
  }
  return rows;
}

void write_reports_csv(const std::string& path, const std::vector<SolveReport>& reports) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorCode::FileNotFound, path);
  std::fprintf(f, "problem_id,estimator,terminal_cost,iterations,wall_time_s,stalls,flags\n");
  for (const SolveReport& r : reports) {
    std::fprintf(f, "%d,%s,%.17g,%d,%.9f,%d,%u\n", r.problem_id, r.estimator.c_str(),
                 r.terminal_cost, r.iterations, r.wall_time, r.stalls, r.flags);
  }
  std::fclose(f);
}

void write_quantiles_csv(const std::string& path, const std::vector<QuantileRow>& table) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorCode::FileNotFound, path);
  std::fprintf(f, "estimator,D1,Q1,Median,Q3,D9,problems,flagged\n");
  for (const QuantileRow& r : table) {
    std::fprintf(f, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", r.estimator.c_str(), r.q.d1,
                 r.q.q1, r.q.median, r.q.q3, r.q.d9, r.problems, r.flagged);
  }
  std::fclose(f);
}

std::string format_quantile_table(const std::vector<QuantileRow>& table) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %10s %10s %10s %10s %10s\n", "estimator", "D1", "Q1",
                "Median", "Q3", "D9");
  out += buf;
  for (const QuantileRow& r : table) {
    std::snprintf(buf, sizeof buf, "%-24s %10.1e %10.1e %10.1e %10.1e %10.1e\n",
                  r.estimator.c_str(), r.q.d1, r.q.q1, r.q.median, r.q.q3, r.q.d9);
    out += buf;
  }
  return out;
}

void write_timings_csv(const std::string& path, const std::vector<TimingRow>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorCode::FileNotFound, path);
  std::fprintf(f, "estimator,class,mean_us,std_us,median_us,count\n");
  for (const TimingRow& r : rows) {
    const std::pair<const char*, const TimingStats*> parts[] = {
        {"colliding", &r.colliding}, {"separated", &r.separated}, {"all", &r.all}};
    for (const auto& [name, s] : parts) {
      std::fprintf(f, "%s,%s,%.3f,%.3f,%.3f,%d\n", r.estimator.c_str(), name, s->mean * 1e6,
                   s->stddev * 1e6, s->median * 1e6, s->count);
    }
  }
  std::fclose(f);
}

void write_trace_csv(const std::string& path, const SolveReport& report) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorCode::FileNotFound, path);
  std::fprintf(f, "iteration,cost,step,slope\n");
  for (std::size_t i = 0; i < report.cost_trace.size(); ++i) {
    const double step = i == 0 ? 0.0 : report.step_sizes[i - 1];
    const double slope = i == 0 ? 0.0 : report.slopes[i - 1];
    std::fprintf(f, "%zu,%.17g,%.17g,%.17g\n", i, report.cost_trace[i], step, slope);
  }
  std::fclose(f);
}

}  // namespace diffcol
