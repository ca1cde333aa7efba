#pragma once

#include <string>

#include "mvdepth/cost_volume.hpp"
#include "mvdepth/tsdf.hpp"
#include "mvdepth/types.hpp"

namespace mvd {

// PNG. Intensities are normalized to [0, 1] on load (8- or 16-bit, gray or
// RGB; alpha is dropped). Label images round-trip as raw 16-bit values.
Image read_png(const std::string& path);
void write_png(const std::string& path, const Image& image, int bit_depth = 8);
PlaneMaskSet read_label_png(const std::string& path);
void write_label_png(const std::string& path, const PlaneMaskSet& masks);

// PFM, little-endian 32-bit float (scale header -1.0). Depth maps pair with
// an 8-bit PNG validity mask at <path>.mask.png; without one, positive
// finite values count as valid.
void write_depth_pfm(const std::string& path, const DepthMap& depth,
                     bool write_mask = true);
DepthMap read_depth_pfm(const std::string& path);

// Normals: lossless 3-channel PFM (invalid pixels zeroed) and an 8-bit PNG
// visualization mapping [-1, 1] to [0, 255].
void write_normals_pfm(const std::string& path, const NormalMap& normals);
NormalMap read_normals_pfm(const std::string& path);
void write_normals_png(const std::string& path, const NormalMap& normals);

// Occlusion maps: 8-bit PNG (P * 255) and 32-bit PFM.
void write_occlusion_png(const std::string& path, const OcclusionMap& occ);
void write_occlusion_pfm(const std::string& path, const OcclusionMap& occ);
OcclusionMap read_occlusion_pfm(const std::string& path);

// Raw float volume dumps: one JSON header line, then little-endian float32
// payload (costs then a validity byte plane for cost volumes).
void write_cost_volume(const std::string& path, const CostVolume& volume);
CostVolume read_cost_volume(const std::string& path);
void write_tsdf_volume(const std::string& path, const TsdfVolume& volume);
TsdfVolume read_tsdf_volume(const std::string& path);

}  // namespace mvd
