#pragma once

#include <random>

#include <Eigen/Dense>

#include "mvdepth/geometry.hpp"
#include "mvdepth/types.hpp"

namespace mvd::testutil {

inline Eigen::Matrix3d random_rotation(std::mt19937& rng, double max_angle_rad) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Vector3d axis(u(rng), u(rng), u(rng));
  while (axis.norm() < 1e-6) axis = {u(rng), u(rng), u(rng)};
  axis.normalize();
  std::uniform_real_distribution<double> a(-max_angle_rad, max_angle_rad);
  return Eigen::AngleAxisd(a(rng), axis).toRotationMatrix();
}

inline Pose random_pose(std::mt19937& rng, double max_angle_rad,
                        double max_translation) {
  std::uniform_real_distribution<double> u(-max_translation, max_translation);
  Pose p;
  p.rotation = random_rotation(rng, max_angle_rad);
  p.translation = {u(rng), u(rng), u(rng)};
  return p;
}

inline Image ramp_image(int w, int h) {
  Image img(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.at(x, y) = static_cast<float>((x + 2.0 * y) / (w + 2.0 * h));
  return img;
}

inline CameraIntrinsics test_camera(int w = 160, int h = 120) {
  return CameraIntrinsics(100.0, 100.0, w / 2.0, h / 2.0, w, h);
}

}  // namespace mvd::testutil
