#pragma once

#include "diffcol/first_order.hpp"
#include "diffcol/zeroth_order.hpp"

#include <cstdint>
#include <string>

namespace diffcol {

/// One derivative estimator with its parameters. Text form:
/// `fd:INC`, `zeroth:M:EPS`, `zeroth-raw:M:EPS`, `first-analytic`, `first-gaussian:M:EPS`,
/// `first-gumbel:NL:EPS`; omitted fields take the defaults below.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::FirstOrderGumbel;
  int samples = 1;       // M, or n_l for Gumbel
  double noise = 1e-4;   // eps, temperature, or increment
  std::uint64_t seed = 0;
  /// Zeroth order only; `zeroth-raw` turns it off.
  bool control_variate = true;
};

EstimatorSpec default_spec(EstimatorKind kind);
EstimatorSpec parse_estimator_spec(const std::string& text);
std::string format_estimator_spec(const EstimatorSpec& spec);

/// Dispatches to the estimator, reusing the nominal solve at `pose`.
WitnessJacobians estimate(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                          const ProximityResult& nominal, const EstimatorSpec& spec,
                          const GjkConfig& gjk_cfg = {});

WitnessJacobians estimate(const ConvexShape& shape1, const ConvexShape& shape2, const Pose& pose,
                          const EstimatorSpec& spec, const GjkConfig& gjk_cfg = {});

}  // namespace diffcol
