#pragma once

#include "mvdepth/cost_volume.hpp"
#include "mvdepth/types.hpp"

namespace mvd {

enum class ExtractionMode { Argmin, SoftArgmin };

struct DepthExtractionConfig {
  ExtractionMode mode = ExtractionMode::Argmin;
  double softness = 0.01;  // temperature for soft-argmin, cost units
  bool subplane = true;    // quadratic refinement around the argmin

  void validate() const;
};

// Per-pixel depth from a cost volume. Argmin mode takes the lowest-cost
// plane (ties broken toward the lowest index) and, with `subplane` on, fits
// a parabola through the neighbouring planes; the refined offset is clamped
// to half the plane spacing and skipped at boundary indices or when a
// neighbour is invalid. Soft-argmin takes the exp(-cost/softness)-weighted
// mean of the plane depths. Pixels with no valid plane come out invalid.
DepthMap extract_depth(const CostVolume& volume, const DepthExtractionConfig& config);

}  // namespace mvd
