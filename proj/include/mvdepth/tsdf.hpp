#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mvdepth/geometry.hpp"
#include "mvdepth/types.hpp"

namespace mvd {

// Truncated signed distance grid with per-voxel accumulated weights and a
// running color mean. tsdf is meaningful only where weight > 0.
struct TsdfVolume {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double voxel_size = 0.02;
  std::array<int, 3> dims{0, 0, 0};
  std::vector<float> tsdf;    // in [-1, 1], init 1 (free space)
  std::vector<float> weight;  // >= 0
  std::vector<float> color;   // 3 per voxel

  TsdfVolume() = default;
  TsdfVolume(const Eigen::Vector3d& origin_, double voxel_size_,
             const std::array<int, 3>& dims_);

  size_t voxel_count() const {
    return static_cast<size_t>(dims[0]) * dims[1] * dims[2];
  }
  size_t idx(int x, int y, int z) const {
    return (static_cast<size_t>(z) * dims[1] + y) * dims[0] + x;
  }
  Eigen::Vector3d voxel_center(int x, int y, int z) const {
    return origin + voxel_size * Eigen::Vector3d(x + 0.5, y + 0.5, z + 0.5);
  }
};

// Fuses one depth frame by projective point-to-plane SDF along camera rays.
// Each voxel that projects to a valid depth pixel q with sdf > -trunc gets a
// weighted running-mean update with sample weight (1 - P(q)) when `occ` is
// given (1 where the occlusion map is invalid), else 1. Zero-weight samples
// are exact no-ops. `world_to_camera` maps world points into the camera.
void integrate(TsdfVolume& volume, const DepthMap& depth, const Image& color,
               const OcclusionMap* occ, const CameraIntrinsics& K,
               const Pose& world_to_camera, double trunc);

struct TriangleMesh {
  std::vector<std::array<float, 3>> vertices;
  std::vector<std::array<float, 3>> colors;  // in [0, 1]
  std::vector<std::array<uint32_t, 3>> triangles;
};

struct MeshEdgeStats {
  size_t boundary_edges = 0;     // used by exactly one triangle
  size_t nonmanifold_edges = 0;  // used by three or more
};

// Isosurface of tsdf = 0 over cells whose eight corners all reach
// min_weight. Vertices sit on linearly interpolated zero crossings of the
// cell edges; per-vertex color interpolates the corner accumulators. Face
// saddle cases are resolved from the face's own values, so adjacent cells
// always agree and the surface is crack-free.
TriangleMesh extract_mesh(const TsdfVolume& volume, double min_weight);

MeshEdgeStats mesh_edge_stats(const TriangleMesh& mesh);

}  // namespace mvd
