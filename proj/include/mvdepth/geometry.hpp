#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mvdepth/types.hpp"

namespace mvd {

// Pinhole model. Pixel centers sit at integer coordinates and homogeneous
// pixels are u = (x, y, 1)^T.
struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx_, double fy_, double cx_, double cy_, int w, int h);

  Eigen::Matrix3d matrix() const;
  Eigen::Matrix3d inverse_matrix() const;
  void validate() const;
};

// Rigid transform mapping points into this camera's frame: p_cam = R p + t.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return {}; }
  Pose inverse() const;
  // this * other: applies `other` first.
  Pose compose(const Pose& other) const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
  void validate() const;  // orthonormal within 1e-9, det = +1
};

// Pose of `src` relative to `ref`, both given as world-to-camera transforms.
Pose relative_pose(const Pose& world_to_ref, const Pose& world_to_src);

// Uniformly sampled fronto-parallel depth planes over [d_min, d_max].
struct PlaneSampling {
  double d_min = 0.5;
  double d_max = 10.0;
  int count = 64;

  PlaneSampling() = default;
  PlaneSampling(double dmin, double dmax, int n);

  double spacing() const { return (d_max - d_min) / (count - 1); }
  double depth_at(double n) const { return d_min + n * spacing(); }
  void validate() const;
  bool operator==(const PlaneSampling& o) const {
    return d_min == o.d_min && d_max == o.d_max && count == o.count;
  }
};

// Plane-induced homography for the fronto-parallel plane at depth d_n:
// H = K (R + t [0, 0, 1/d_n]) K^-1, mapping reference pixels to source
// pixels up to scale. `pose` is the source camera relative to the reference.
Eigen::Matrix3d homography_for_plane(const CameraIntrinsics& K, const Pose& pose,
                                     double d_n);

struct WarpedImage {
  Image image;
  std::vector<uint8_t> covered;  // false where the sample left the source

  bool is_covered(int x, int y) const {
    return covered[static_cast<size_t>(y) * image.width + x] != 0;
  }
};

// Resamples `source` so that output pixel u reads source at H u (after
// dehomogenization), with bilinear interpolation. Throws on singular H.
WarpedImage warp_to_reference_plane(const Image& source, const Eigen::Matrix3d& H);

// q at depth d to a camera-frame 3D point.
Eigen::Vector3d backproject(const Eigen::Vector2d& q, double d,
                            const CameraIntrinsics& K);

struct PixelProjection {
  Eigen::Vector2d pixel;
  double depth = 0;      // camera-frame z after applying the pose
  bool in_front = false; // depth > 0
};

PixelProjection project(const Eigen::Vector3d& p, const CameraIntrinsics& K,
                        const Pose& pose);

// Bilinear sample with pixel centers at integer coordinates; `covered` is
// false when (x, y) falls outside [0, W-1] x [0, H-1].
float bilinear_sample(const Image& img, double x, double y, int channel,
                      bool* covered);

}  // namespace mvd
