#pragma once

#include <random>

#include "mixedfem/tensors.hpp"

namespace testutil {

inline std::mt19937& rng() {
  static std::mt19937 gen(12345);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline mixedfem::Vec3 random_vec3(double scale = 1.0) {
  return mixedfem::Vec3(uniform(-scale, scale), uniform(-scale, scale),
                        uniform(-scale, scale));
}

inline mixedfem::Mat3 random_rotation() {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng()), n(rng()), n(rng()), n(rng()));
  q.normalize();
  return q.toRotationMatrix();
}

inline mixedfem::Mat3 random_matrix(double scale = 1.0) {
  mixedfem::Mat3 M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = uniform(-scale, scale);
  return M;
}

}  // namespace testutil
