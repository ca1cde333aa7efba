#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvdepth/geometry.hpp"
#include "mvdepth/types.hpp"

namespace mvd {

// Analytic test scenes: posed rectangles, boxes and spheres with procedural
// textures, rendered by per-pixel ray casting so depth, normals, labels and
// cross-view visibility are exact.

enum class PrimitiveKind { Plane, Box, Sphere };

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Plane;
  Pose to_world;                  // local-to-world
  Eigen::Vector3d extent{1, 1, 1};  // plane: half sizes (x, y); box: half
                                    // sizes; sphere: radius in x
  int texture = 0;                // palette index; -1 = untextured gray
};

struct Scene {
  std::vector<Primitive> primitives;
  uint32_t seed = 1;

  void validate() const;
};

struct RenderResult {
  Image color;  // 3-channel
  DepthMap depth;
  NormalMap normals;       // camera frame, camera-facing
  PlaneMaskSet plane_masks;  // k-th plane primitive gets label k (1-based)
};

RenderResult render(const Scene& scene, const CameraIntrinsics& K,
                    const Pose& world_to_camera);

// Occlusion ground truth: a reference pixel is occluded iff its surface
// point is hidden (a strictly nearer hit by more than 1e-6 m) or out of
// frame in every source view. Background pixels are not occluded.
std::vector<uint8_t> visibility_ground_truth(const Scene& scene,
                                             const CameraIntrinsics& K,
                                             const Pose& ref_pose,
                                             const std::vector<Pose>& src_poses);

// Seeded additive Gaussian noise on intensities, clamped back to [0, 1].
void add_intensity_noise(Image& image, double sigma, uint32_t seed);

// World-to-camera pose for a camera at `eye` looking at `target`. The world
// follows the camera convention (x right, y down, z forward); `up` defaults
// to -y.
Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
             const Eigen::Vector3d& up = {0, -1, 0});

// Rotation from XYZ Euler angles in degrees (applied x, then y, then z).
Eigen::Matrix3d euler_deg(double rx, double ry, double rz);

Scene scene_from_json(const std::string& json_text);

// Canned scenes used across the test suites.
namespace scenes {
// Fronto-parallel textured rectangle at z = depth, spanning +-half_size.
Scene fronto_plane(double depth, double half_size = 4.0, int texture = 0);
// Plane z = depth + slope_x * X + slope_y * Y (camera-frame metric coords).
Scene slanted_plane(double depth, double slope_x, double slope_y,
                    double half_size = 6.0, int texture = 0);
Scene sphere(const Eigen::Vector3d& center, double radius, int texture = 2);
// Textured back wall with two boxes in front; strong parallax occlusion.
Scene two_boxes();
// Closed desk-scale corner: back wall, floor, side walls plus a box.
Scene textured_room();
}  // namespace scenes

}  // namespace mvd
