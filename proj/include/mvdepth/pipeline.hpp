#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvdepth/cost_volume.hpp"
#include "mvdepth/dataset.hpp"
#include "mvdepth/depth_extraction.hpp"
#include "mvdepth/losses.hpp"
#include "mvdepth/metrics.hpp"
#include "mvdepth/normals.hpp"
#include "mvdepth/occlusion.hpp"
#include "mvdepth/tsdf.hpp"

namespace mvd {

enum class ReferenceChoice { Middle, Last };

struct FusionConfig {
  double voxel_size = 0.02;
  double trunc = 0.08;
  double min_weight = 1.0;
  std::array<int, 3> dims{128, 128, 128};
  Eigen::Vector3d origin{-1.28, -1.28, 1.0};
  bool use_occlusion = true;
  size_t max_voxels = 256u * 256u * 256u;

  void validate() const;
};

struct PipelineConfig {
  int frame_interval = 10;
  int window = 2;  // number of source views N
  ReferenceChoice reference = ReferenceChoice::Middle;
  PlaneSampling sampling{0.5, 10.0, 64};
  int agg_radius = 4;
  double agg_sigma = 0.1;
  int normal_radius = 2;
  LossConfig loss;
  RefineConfig refine;
  FusionConfig fusion;

  void validate() const;
  static PipelineConfig from_key_values(const KeyValueConfig& kv);
};

struct FrameInput {
  int frame_id = 0;
  Image image;
  Pose world_to_camera;
};

struct WindowResult {
  DepthMap d_fin;
  OcclusionMap occlusion;
  std::vector<DepthMap> per_pair;  // aligned with the source order
  CostVolume avg_volume;
  std::string metrics_json;  // empty when no ground truth was supplied
};

// One reference frame against N sources: per-pair sweep + aggregation +
// extraction, volume averaging, occlusion estimation, refinement. Metrics
// are computed when ground-truth depth is supplied; the normal metrics
// additionally need plane masks (the reference combined normal map is built
// from the ground-truth depth).
WindowResult run_window(const FrameInput& reference,
                        const std::vector<FrameInput>& sources,
                        const CameraIntrinsics& K, const PipelineConfig& config,
                        const DepthMap* gt_depth = nullptr,
                        const PlaneMaskSet* plane_masks = nullptr);

struct SequenceResult {
  TriangleMesh mesh;
  MeshEdgeStats edge_stats;
  int windows_run = 0;
  int windows_skipped = 0;
  std::string metrics_json;  // per-window records + aggregate means
};

// Slides the window over the sampled frames, fuses every refined depth with
// (1 - P) weights, extracts the mesh, and writes all artifacts under
// out_dir (depth/, occlusion/, initial/, mesh.ply, metrics.json).
SequenceResult run_sequence(const Dataset& dataset, const PipelineConfig& config,
                            const std::string& out_dir);

// Renders a scene description (JSON: camera, frames or a line path, and the
// primitive list) into a dataset directory the pipeline can consume.
void generate_synth_dataset(const std::string& scene_json_path,
                            const std::string& out_dir);

// Source positions around the reference for a window of N views, in units
// of the frame interval (middle: -1, +1, -2, +2, ...; last: -1, -2, ...).
std::vector<int> window_offsets(int n_sources, ReferenceChoice reference);

}  // namespace mvd
