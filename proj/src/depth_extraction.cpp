#include "mvdepth/depth_extraction.hpp"

#include <algorithm>
#include <cmath>

#include "mvdepth/parallel.hpp"

namespace mvd {

void DepthExtractionConfig::validate() const {
  if (mode == ExtractionMode::SoftArgmin)
    require(softness > 0, "extraction: softness must be positive");
}

namespace {

void extract_argmin_row(const CostVolume& v, const DepthExtractionConfig& cfg,
                        int y, DepthMap& out) {
  for (int x = 0; x < v.width; ++x) {
    int best = -1;
    float best_cost = 0.f;
    for (int n = 0; n < v.planes; ++n) {
      if (!v.is_valid(x, y, n)) continue;
      const float c = v.at(x, y, n);
      if (best < 0 || c < best_cost) {
        best = n;
        best_cost = c;
      }
    }
    if (best < 0) continue;
    double plane = best;
    if (cfg.subplane && best > 0 && best < v.planes - 1 &&
        v.is_valid(x, y, best - 1) && v.is_valid(x, y, best + 1)) {
      const double cm = v.at(x, y, best - 1);
      const double c0 = best_cost;
      const double cp = v.at(x, y, best + 1);
      const double denom = cm - 2.0 * c0 + cp;
      if (denom > 1e-30) {
        const double offset =
            std::clamp((cm - cp) / (2.0 * denom), -0.5, 0.5);
        plane += offset;
      }
    }
    out.set(x, y, static_cast<float>(v.sampling.depth_at(plane)));
  }
}

void extract_soft_row(const CostVolume& v, const DepthExtractionConfig& cfg,
                      int y, DepthMap& out) {
  for (int x = 0; x < v.width; ++x) {
    float min_cost = 0.f;
    bool any = false;
    for (int n = 0; n < v.planes; ++n) {
      if (!v.is_valid(x, y, n)) continue;
      if (!any || v.at(x, y, n) < min_cost) min_cost = v.at(x, y, n);
      any = true;
    }
    if (!any) continue;
    // Shift by the minimum before exponentiating; the normalization cancels
    // the shift exactly.
    double wsum = 0.0, dsum = 0.0;
    for (int n = 0; n < v.planes; ++n) {
      if (!v.is_valid(x, y, n)) continue;
      const double w = std::exp(-(v.at(x, y, n) - min_cost) / cfg.softness);
      wsum += w;
      dsum += w * v.sampling.depth_at(n);
    }
    out.set(x, y, static_cast<float>(dsum / wsum));
  }
}

}  // namespace

DepthMap extract_depth(const CostVolume& volume, const DepthExtractionConfig& config) {
  config.validate();
  DepthMap out(volume.width, volume.height);
  parallel_for(0, volume.height, [&](int y) {
    if (config.mode == ExtractionMode::Argmin)
      extract_argmin_row(volume, config, y, out);
    else
      extract_soft_row(volume, config, y, out);
  });
  return out;
}

}  // namespace mvd
