#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <random>

namespace diffcol {

/// splitmix64 finalizer; derives independent stream seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index = 0) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

template <int N>
Eigen::Matrix<double, N, 1> standard_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix<double, N, 1> z;
  for (int i = 0; i < N; ++i) z(i) = normal(rng);
  return z;
}

inline Eigen::Vector3d uniform_direction(Rng& rng) {
  Eigen::Vector3d d;
  do {
    d = standard_normal<3>(rng);
  } while (d.norm() < 1e-12);
  return d.normalized();
}

inline Eigen::Quaterniond uniform_rotation(Rng& rng) {
  Eigen::Vector4d q;
  do {
    q = standard_normal<4>(rng);
  } while (q.norm() < 1e-12);
  q.normalize();
  return Eigen::Quaterniond(q(3), q(0), q(1), q(2));
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Components drawn in x, y, z order.
inline Eigen::Vector3d uniform_vector(Rng& rng, double lo, double hi) {
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

}  // namespace diffcol
