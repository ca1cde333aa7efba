#include "mvdepth/geometry.hpp"

#include <cmath>

namespace mvd {

CameraIntrinsics::CameraIntrinsics(double fx_, double fy_, double cx_, double cy_,
                                   int w, int h)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(w), height(h) {
  validate();
}

void CameraIntrinsics::validate() const {
  require(fx > 0 && fy > 0, "intrinsics: focal lengths must be positive");
  require(width > 0 && height > 0, "intrinsics: image size must be positive");
  require(cx >= 0 && cx < width, "intrinsics: cx out of image");
  require(cy >= 0 && cy < height, "intrinsics: cy out of image");
  require(std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) &&
              std::isfinite(cy),
          "intrinsics: non-finite value");
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d K;
  K << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return K;
}

Eigen::Matrix3d CameraIntrinsics::inverse_matrix() const {
  Eigen::Matrix3d Ki;
  Ki << 1.0 / fx, 0, -cx / fx, 0, 1.0 / fy, -cy / fy, 0, 0, 1;
  return Ki;
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation = rotation.transpose();
  out.translation = -(rotation.transpose() * translation);
  return out;
}

Pose Pose::compose(const Pose& other) const {
  Pose out;
  out.rotation = rotation * other.rotation;
  out.translation = rotation * other.translation + translation;
  return out;
}

void Pose::validate() const {
  require(rotation.allFinite() && translation.allFinite(),
          "pose: non-finite value");
  const Eigen::Matrix3d err =
      rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
  require(err.cwiseAbs().maxCoeff() <= 1e-9, "pose: rotation not orthonormal");
  require(std::abs(rotation.determinant() - 1.0) <= 1e-9,
          "pose: rotation determinant != +1");
}

Pose relative_pose(const Pose& world_to_ref, const Pose& world_to_src) {
  return world_to_src.compose(world_to_ref.inverse());
}

PlaneSampling::PlaneSampling(double dmin, double dmax, int n)
    : d_min(dmin), d_max(dmax), count(n) {
  validate();
}

void PlaneSampling::validate() const {
  require(d_min > 0 && d_min < d_max, "plane sampling: need 0 < d_min < d_max");
  require(count >= 2, "plane sampling: need at least two planes");
}

Eigen::Matrix3d homography_for_plane(const CameraIntrinsics& K, const Pose& pose,
                                     double d_n) {
  require(std::isfinite(d_n) && d_n > 0, "homography: depth must be positive");
  pose.validate();
  K.validate();
  Eigen::Matrix3d M = pose.rotation;
  M.col(2) += pose.translation / d_n;
  return K.matrix() * M * K.inverse_matrix();
}

float bilinear_sample(const Image& img, double x, double y, int channel,
                      bool* covered) {
  if (x < 0.0 || y < 0.0 || x > img.width - 1 || y > img.height - 1) {
    if (covered) *covered = false;
    return 0.f;
  }
  if (covered) *covered = true;
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  if (x0 >= img.width - 1) x0 = img.width - 2;
  if (y0 >= img.height - 1) y0 = img.height - 2;
  if (x0 < 0) x0 = 0;  // single-column / single-row images
  if (y0 < 0) y0 = 0;
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double ax = x - x0;
  const double ay = y - y0;
  const double v00 = img.at(x0, y0, channel);
  const double v10 = img.at(x1, y0, channel);
  const double v01 = img.at(x0, y1, channel);
  const double v11 = img.at(x1, y1, channel);
  const double top = v00 + ax * (v10 - v00);
  const double bot = v01 + ax * (v11 - v01);
  return static_cast<float>(top + ay * (bot - top));
}

WarpedImage warp_to_reference_plane(const Image& source, const Eigen::Matrix3d& H) {
  require(H.allFinite(), "warp: non-finite homography");
  require(std::abs(H.determinant()) > 1e-15, "warp: singular homography");
  WarpedImage out;
  out.image = Image(source.width, source.height, source.channels, 0.f);
  out.covered.assign(static_cast<size_t>(source.width) * source.height, 0);
  for (int y = 0; y < source.height; ++y) {
    for (int x = 0; x < source.width; ++x) {
      const Eigen::Vector3d v = H * Eigen::Vector3d(x, y, 1.0);
      if (std::abs(v.z()) < 1e-12) continue;
      const double sx = v.x() / v.z();
      const double sy = v.y() / v.z();
      bool cov = false;
      for (int c = 0; c < source.channels; ++c) {
        out.image.at(x, y, c) = bilinear_sample(source, sx, sy, c, &cov);
        if (!cov) break;
      }
      out.covered[static_cast<size_t>(y) * source.width + x] = cov ? 1 : 0;
    }
  }
  return out;
}

Eigen::Vector3d backproject(const Eigen::Vector2d& q, double d,
                            const CameraIntrinsics& K) {
  require(d > 0, "backproject: depth must be positive");
  return {(q.x() - K.cx) / K.fx * d, (q.y() - K.cy) / K.fy * d, d};
}

PixelProjection project(const Eigen::Vector3d& p, const CameraIntrinsics& K,
                        const Pose& pose) {
  const Eigen::Vector3d pc = pose.apply(p);
  PixelProjection out;
  out.depth = pc.z();
  out.in_front = pc.z() > 0;
  if (out.in_front) {
    out.pixel = {K.fx * pc.x() / pc.z() + K.cx, K.fy * pc.y() / pc.z() + K.cy};
  } else {
    out.pixel = {0, 0};
  }
  return out;
}

}  // namespace mvd
