#pragma once

#include "diffcol/errors.hpp"
#include "diffcol/se3.hpp"

#include <string>

namespace diffcol {

enum class EstimatorKind {
  FiniteDifference,
  ZerothOrder,
  FirstOrderAnalytic,
  FirstOrderGaussian,
  FirstOrderGumbel,
};

const char* to_string(EstimatorKind kind);

/// Derivatives of the witness points and separation vector with respect to a
/// right tangent perturbation of the relative pose. All three are expressed in
/// the frame of shape 1.
struct WitnessJacobians {
  Matrix36 d_w1_dq = Matrix36::Zero();
  Matrix36 d_w2_dq = Matrix36::Zero();
  Matrix36 d_sep_dq = Matrix36::Zero();

  EstimatorKind kind = EstimatorKind::FirstOrderAnalytic;
  int samples = 0;       // M (or 12 for central differences)
  double noise = 0.0;    // epsilon, temperature, or increment
  int samples_used = 0;  // perturbed solves that converged
  Flags flags = kConverged;
};

}  // namespace diffcol
