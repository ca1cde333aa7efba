#pragma once

#include <vector>

#include "mvdepth/geometry.hpp"
#include "mvdepth/types.hpp"

namespace mvd {

// W x H x D photometric matching costs over the sampled planes. Cells where
// the warp left the source image carry valid = false and are excluded from
// aggregation, averaging and extraction; they never hold sentinel costs.
struct CostVolume {
  int width = 0;
  int height = 0;
  int planes = 0;
  PlaneSampling sampling;
  std::vector<float> costs;    // slice-major: ((n * H) + y) * W + x
  std::vector<uint8_t> valid;

  CostVolume() = default;
  CostVolume(int w, int h, const PlaneSampling& s)
      : width(w), height(h), planes(s.count), sampling(s),
        costs(static_cast<size_t>(w) * h * s.count, 0.f),
        valid(static_cast<size_t>(w) * h * s.count, 0) {}

  size_t idx(int x, int y, int n) const {
    return (static_cast<size_t>(n) * height + y) * width + x;
  }
  float at(int x, int y, int n) const { return costs[idx(x, y, n)]; }
  bool is_valid(int x, int y, int n) const { return valid[idx(x, y, n)] != 0; }
  bool same_shape(const CostVolume& o) const {
    return width == o.width && height == o.height && planes == o.planes &&
           sampling == o.sampling;
  }
};

// Per-plane warp of `source` against `reference`, scored as the mean
// absolute difference over a 3x3 patch and over channels. A cell is valid
// only when every patch sample (patch clipped to the image rect) is covered
// by the warp.
CostVolume build_cost_volume(const Image& reference, const Image& source,
                             const CameraIntrinsics& K, const Pose& source_pose,
                             const PlaneSampling& sampling);

// Cross-bilateral filtering of each depth slice, guided by the reference
// image: w(q,p) = exp(-||g(q)-g(p)||^2 / (2 sigma_color^2)) over the
// (2 radius + 1)^2 window, normalized over valid cells only. A cell with no
// valid neighbor stays invalid.
CostVolume aggregate_cost_volume(const CostVolume& raw, const Image& guide,
                                 int radius, double sigma_color);

// Per-cell mean over the volumes in which the cell is valid.
CostVolume average_cost_volumes(const std::vector<CostVolume>& volumes);

}  // namespace mvd
