#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <string>

namespace diffcol {

template <typename Scalar>
using Vector3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3T = Eigen::Matrix<Scalar, 3, 3>;

/// Element of the tangent space of SE(3): (linear x,y,z, angular x,y,z).
template <typename Scalar>
using TangentT = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix36T = Eigen::Matrix<Scalar, 3, 6>;

using Tangent = TangentT<double>;
using Matrix36 = Matrix36T<double>;

/// Skew-symmetric matrix such that hat(a) * b == a.cross(b).
template <typename Derived>
Matrix3T<typename Derived::Scalar> hat(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Matrix3T<Scalar> m;
  m << Scalar(0), -v(2), v(1),
       v(2), Scalar(0), -v(0),
       -v(1), v(0), Scalar(0);
  return m;
}

/// Rigid transform p -> R p + t. The rotation is stored as a unit quaternion
/// and serialized scalar-last (qx qy qz qw).
template <typename Scalar>
class PoseT {
 public:
  using Vector3 = Vector3T<Scalar>;
  using Matrix3 = Matrix3T<Scalar>;
  using Quaternion = Eigen::Quaternion<Scalar>;
  using Parameters = Eigen::Matrix<Scalar, 7, 1>;

  PoseT() : translation_(Vector3::Zero()), rotation_(Quaternion::Identity()) {}

  PoseT(const Vector3& translation, const Quaternion& rotation)
      : translation_(translation), rotation_(rotation.normalized()) {}

  static PoseT Identity() { return PoseT(); }

  /// From `tx ty tz qx qy qz qw`.
  static PoseT fromParameters(const Parameters& p) {
    return PoseT(p.template head<3>(), Quaternion(p(6), p(3), p(4), p(5)));
  }

  Parameters parameters() const {
    Parameters p;
    p << translation_, rotation_.x(), rotation_.y(), rotation_.z(), rotation_.w();
    return p;
  }

  const Vector3& translation() const { return translation_; }
  const Quaternion& rotation() const { return rotation_; }
  Matrix3 rotationMatrix() const { return rotation_.toRotationMatrix(); }

  template <typename NewScalar>
  PoseT<NewScalar> cast() const {
    return PoseT<NewScalar>(translation_.template cast<NewScalar>(),
                            rotation_.template cast<NewScalar>());
  }

 private:
  Vector3 translation_;
  Quaternion rotation_;
};

using Pose = PoseT<double>;

template <typename Scalar, typename Derived>
Vector3T<Scalar> apply(const PoseT<Scalar>& pose, const Eigen::MatrixBase<Derived>& p) {
  return pose.rotation() * p + pose.translation();
}

template <typename Scalar, typename Derived>
Vector3T<Scalar> rotate(const PoseT<Scalar>& pose, const Eigen::MatrixBase<Derived>& v) {
  return pose.rotation() * v;
}

template <typename Scalar>
PoseT<Scalar> compose(const PoseT<Scalar>& a, const PoseT<Scalar>& b) {
  return PoseT<Scalar>(a.rotation() * b.translation() + a.translation(),
                       a.rotation() * b.rotation());
}

template <typename Scalar>
PoseT<Scalar> inverse(const PoseT<Scalar>& pose) {
  const auto qinv = pose.rotation().conjugate();
  return PoseT<Scalar>(-(qinv * pose.translation()), qinv);
}

namespace detail {

// Coefficients of the SE(3) left Jacobian V(w) = I + b [w]x + c [w]x^2.
template <typename Scalar>
void left_jacobian_coefficients(Scalar theta, Scalar& b, Scalar& c) {
  const Scalar t2 = theta * theta;
  if (theta < Scalar(1e-4)) {
    b = Scalar(0.5) - t2 / Scalar(24);
    c = Scalar(1) / Scalar(6) - t2 / Scalar(120);
  } else {
    b = (Scalar(1) - std::cos(theta)) / t2;
    c = (theta - std::sin(theta)) / (t2 * theta);
  }
}

}  // namespace detail

template <typename Scalar>
Eigen::Quaternion<Scalar> exp_so3(const Vector3T<Scalar>& w) {
  const Scalar theta = w.norm();
  const Scalar half = theta / Scalar(2);
  Scalar k;  // sin(theta/2) / theta
  if (theta < Scalar(1e-4)) {
    k = Scalar(0.5) - theta * theta / Scalar(48);
  } else {
    k = std::sin(half) / theta;
  }
  Eigen::Quaternion<Scalar> q(std::cos(half), k * w(0), k * w(1), k * w(2));
  return q.normalized();
}

template <typename Scalar>
Vector3T<Scalar> log_so3(const Eigen::Quaternion<Scalar>& q_in) {
  Eigen::Quaternion<Scalar> q = q_in.normalized();
  if (q.w() < Scalar(0)) q.coeffs() = -q.coeffs();
  const Vector3T<Scalar> v = q.vec();
  const Scalar s = v.norm();
  const Scalar theta = Scalar(2) * std::atan2(s, q.w());
  if (s < Scalar(1e-8)) {
    // theta / s = (2 / w) (1 - s^2 / (3 w^2)) + O(s^4)
    return (Scalar(2) / q.w()) * (Scalar(1) - s * s / (Scalar(3) * q.w() * q.w())) * v;
  }
  return (theta / s) * v;
}

template <typename Scalar>
PoseT<Scalar> exp(const TangentT<Scalar>& t) {
  const Vector3T<Scalar> v = t.template head<3>();
  const Vector3T<Scalar> w = t.template tail<3>();
  Scalar b, c;
  detail::left_jacobian_coefficients(w.norm(), b, c);
  const Matrix3T<Scalar> W = hat(w);
  const Vector3T<Scalar> translation = v + b * (W * v) + c * (W * (W * v));
  return PoseT<Scalar>(translation, exp_so3(w));
}

template <typename Scalar>
TangentT<Scalar> log(const PoseT<Scalar>& pose) {
  const Vector3T<Scalar> w = log_so3(pose.rotation());
  const Scalar theta = w.norm();
  const Matrix3T<Scalar> W = hat(w);
  // V^-1 = I - W/2 + d W^2, d = (1 - theta sin / (2 (1 - cos))) / theta^2.
  Scalar d;
  if (theta < Scalar(1e-4)) {
    d = Scalar(1) / Scalar(12) + theta * theta / Scalar(720);
  } else {
    d = (Scalar(1) - theta * std::sin(theta) / (Scalar(2) * (Scalar(1) - std::cos(theta)))) /
        (theta * theta);
  }
  const Vector3T<Scalar>& p = pose.translation();
  TangentT<Scalar> out;
  out.template head<3>() = p - Scalar(0.5) * (W * p) + d * (W * (W * p));
  out.template tail<3>() = w;
  return out;
}

/// Right perturbation q * exp(t).
template <typename Scalar>
PoseT<Scalar> perturb(const PoseT<Scalar>& pose, const TangentT<Scalar>& t) {
  return compose(pose, exp(t));
}

/// Jacobian with respect to a right tangent perturbation of the pose of the
/// map q -> T(q) s2(R(q)^T u), for fixed u, where `support_dir_local` is the
/// argument R^T u, `support_local` is s2 at that argument and `support_hessian`
/// is the Hessian of the shape-2 support function there.
template <typename Scalar>
Matrix36T<Scalar> dfdq_blocks(const PoseT<Scalar>& pose,
                              const Vector3T<Scalar>& support_dir_local,
                              const Vector3T<Scalar>& support_local,
                              const Matrix3T<Scalar>& support_hessian) {
  const Matrix3T<Scalar> R = pose.rotationMatrix();
  Matrix36T<Scalar> J;
  J.template leftCols<3>() = R;
  J.template rightCols<3>() =
      R * (support_hessian * hat(support_dir_local) - hat(support_local));
  return J;
}

/// `tx ty tz qx qy qz qw`, `%.17g`.
std::string format_pose(const Pose& pose);
/// Parses seven whitespace-separated scalars; throws Error(ParseError).
Pose parse_pose(const std::string& text);

}  // namespace diffcol
