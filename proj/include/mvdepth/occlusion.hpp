#pragma once

#include <vector>

#include "mvdepth/cost_volume.hpp"
#include "mvdepth/depth_extraction.hpp"
#include "mvdepth/types.hpp"

namespace mvd {

struct RefineConfig {
  double tau_rel = 0.05;  // relative depth-discrepancy scale
  double kappa = 0.5;     // weight of the cost-profile flatness cue
  double occluded_threshold = 0.5;
  DepthExtractionConfig extraction;

  void validate() const;
};

// Occlusion probability from two cues: the relative spread of the per-pair
// initial depths, delta = (max - min) / median, and the flatness of the
// averaged cost profile, f = c_min / c_mean over the valid planes (1 for a
// flat profile, toward 0 for a sharp peak; columns with no valid plane or an
// all-zero profile count as flat). P = clamp((1-kappa) min(1, delta/tau) +
// kappa f, 0, 1); invalid where fewer than 2 initial depths are valid.
OcclusionMap occlusion_probability(const std::vector<DepthMap>& initial_depths,
                                   const CostVolume& avg_volume,
                                   const RefineConfig& cfg);

// Final depth: pixels judged occluded (P >= threshold) or with fewer than 2
// valid initial depths take the averaged-volume extraction; the rest take
// the median of the valid initial depths plus the extraction value.
DepthMap refine_depth(const std::vector<DepthMap>& initial_depths,
                      const CostVolume& avg_volume, const OcclusionMap& occ,
                      const RefineConfig& cfg);

}  // namespace mvd
