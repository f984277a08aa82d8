#include "diffcol/estimators.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace diffcol {

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::FiniteDifference: return "fd";
    case EstimatorKind::ZerothOrder: return "zeroth";
    case EstimatorKind::FirstOrderAnalytic: return "first-analytic";
    case EstimatorKind::FirstOrderGaussian: return "first-gaussian";
    case EstimatorKind::FirstOrderGumbel: return "first-gumbel";
  }
  return "unknown";
}

EstimatorSpec default_spec(EstimatorKind kind) {
  EstimatorSpec s;
  s.kind = kind;
  switch (kind) {
    case EstimatorKind::FiniteDifference: s.samples = 12; s.noise = 1e-6; break;
    case EstimatorKind::ZerothOrder: s.samples = 50; s.noise = 1e-2; break;
    case EstimatorKind::FirstOrderAnalytic: s.samples = 0; s.noise = 0.0; break;
    case EstimatorKind::FirstOrderGaussian: s.samples = 20; s.noise = 1e-3; break;
    case EstimatorKind::FirstOrderGumbel: s.samples = 1; s.noise = 1e-4; break;
  }
  return s;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double parse_positive(const std::string& token, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) {
    throw Error(ErrorCode::ParseError, "bad " + what + " '" + token + "'");
  }
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError, what + " must be positive, got '" + token + "'");
  }
  return v;
}

int parse_count(const std::string& token, const std::string& what, int min) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) {
    throw Error(ErrorCode::ParseError, "bad " + what + " '" + token + "'");
  }
  if (v < min || v > 100000000) {
    throw Error(ErrorCode::ParseError, what + " out of range: '" + token + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

EstimatorSpec parse_estimator_spec(const std::string& text) {
  const std::vector<std::string> f = split(text, ':');
  if (f.empty()) throw Error(ErrorCode::ParseError, "empty estimator spec");
  const std::string& name = f[0];
  EstimatorSpec s;
  std::size_t max_fields = 3;
  if (name == "fd") {
    s = default_spec(EstimatorKind::FiniteDifference);
    max_fields = 2;
    if (f.size() > 1) s.noise = parse_positive(f[1], "increment");
  } else if (name == "zeroth" || name == "zeroth-raw" || name == "first-gaussian") {
    s = default_spec(name == "first-gaussian" ? EstimatorKind::FirstOrderGaussian
                                              : EstimatorKind::ZerothOrder);
    s.control_variate = name != "zeroth-raw";
    if (f.size() > 1) s.samples = parse_count(f[1], "sample count", 1);
    if (f.size() > 2) s.noise = parse_positive(f[2], "noise");
  } else if (name == "first-analytic") {
    s = default_spec(EstimatorKind::FirstOrderAnalytic);
    max_fields = 1;
  } else if (name == "first-gumbel") {
    s = default_spec(EstimatorKind::FirstOrderGumbel);
    if (f.size() > 1) s.samples = parse_count(f[1], "neighbor depth", 0);
    if (f.size() > 2) s.noise = parse_positive(f[2], "temperature");
  } else {
    throw Error(ErrorCode::ParseError,
                "unknown estimator '" + name +
                    "' (expected fd, zeroth, zeroth-raw, first-analytic, first-gaussian, first-gumbel)");
  }
  if (f.size() > max_fields) {
    throw Error(ErrorCode::ParseError, "unexpected field '" + f[max_fields] + "' in '" + text + "'");
  }
  return s;
}

std::string format_estimator_spec(const EstimatorSpec& spec) {
  char buf[96];
  switch (spec.kind) {
    case EstimatorKind::FiniteDifference:
      std::snprintf(buf, sizeof buf, "fd:%g", spec.noise);
      break;
    case EstimatorKind::FirstOrderAnalytic:
      std::snprintf(buf, sizeof buf, "first-analytic");
      break;
    default:
      std::snprintf(buf, sizeof buf, "%s:%d:%g",
                    spec.kind == EstimatorKind::ZerothOrder && !spec.control_variate
                        ? "zeroth-raw"
                        : to_string(spec.kind),
                    spec.samples, spec.noise);
  }
  return buf;
}

WitnessJacobians estimate(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                          const ProximityResult& nominal, const EstimatorSpec& spec,
                          const GjkConfig& gjk_cfg) {
  switch (spec.kind) {
    case EstimatorKind::FiniteDifference:
      return finite_difference_jacobians(shape1, shape2, pose, nominal, spec.noise, gjk_cfg);
    case EstimatorKind::ZerothOrder: {
      SmoothingConfig cfg;
      cfg.samples = spec.samples;
      cfg.noise = spec.noise;
      cfg.seed = spec.seed;
      cfg.control_variate = spec.control_variate;
      return zeroth_order_jacobians(shape1, shape2, pose, nominal, cfg, gjk_cfg);
    }
    case EstimatorKind::FirstOrderAnalytic:
      return first_order_jacobians(shape1, shape2, pose, nominal, AnalyticHessian{});
    case EstimatorKind::FirstOrderGaussian:
      return first_order_jacobians(shape1, shape2, pose, nominal,
                                   GaussianHessian{spec.samples, spec.noise, spec.seed});
    case EstimatorKind::FirstOrderGumbel:
      return first_order_jacobians(shape1, shape2, pose, nominal,
                                   GumbelHessian{spec.noise, spec.samples});
  }
  throw Error(ErrorCode::InvalidArgument, "unknown estimator kind");
}

WitnessJacobians estimate(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                          const EstimatorSpec& spec, const GjkConfig& gjk_cfg) {
  return estimate(shape1, shape2, pose, proximity(shape1, shape2, pose, gjk_cfg), spec, gjk_cfg);
}

}  // namespace diffcol
