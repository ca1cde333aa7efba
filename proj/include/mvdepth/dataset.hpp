#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvdepth/geometry.hpp"
#include "mvdepth/types.hpp"

namespace mvd {

// One trajectory entry: per-frame intrinsics plus the world-to-camera pose.
struct TrajectoryEntry {
  int frame_id = 0;
  double fx = 0, fy = 0, cx = 0, cy = 0;
  Pose world_to_camera;
};

// Plain text, one line per frame:
//   frame_id fx fy cx cy r00 r01 r02 r10 r11 r12 r20 r21 r22 tx ty tz
std::vector<TrajectoryEntry> read_trajectory(const std::string& path);
void write_trajectory(const std::string& path,
                      const std::vector<TrajectoryEntry>& entries);

// "fx fy cx cy width height" on a single line.
CameraIntrinsics read_intrinsics(const std::string& path);
void write_intrinsics(const std::string& path, const CameraIntrinsics& K);

// Dataset directory: color/%06d.png, optional depth/%06d.pfm ground truth,
// optional planes/%06d.png label masks, trajectory.txt, intrinsics.txt.
struct Dataset {
  std::string root;
  CameraIntrinsics intrinsics;
  std::vector<TrajectoryEntry> trajectory;  // sorted by frame id
  std::vector<int> frame_ids;               // sorted ids found under color/
  bool has_gt_depth = false;
  bool has_plane_masks = false;

  const TrajectoryEntry* find_frame(int frame_id) const;
  std::string color_path(int frame_id) const;
  std::string depth_path(int frame_id) const;
  std::string planes_path(int frame_id) const;

  Image load_color(int frame_id) const;
  DepthMap load_gt_depth(int frame_id) const;
  PlaneMaskSet load_plane_masks(int frame_id) const;
};

Dataset open_dataset(const std::string& root);

// Flat key = value configuration text; '#' starts a comment. Typed getters
// throw ConfigError on malformed values.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_text(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get(const std::string& key, double fallback) const;
  int get(const std::string& key, int fallback) const;
  bool get(const std::string& key, bool fallback) const;
  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace mvd
