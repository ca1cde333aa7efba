#include "mvdepth/occlusion.hpp"

#include <algorithm>
#include <cmath>

#include "mvdepth/parallel.hpp"

namespace mvd {

void RefineConfig::validate() const {
  require(tau_rel > 0, "refine config: tau_rel must be positive");
  require(kappa >= 0 && kappa <= 1, "refine config: kappa must be in [0, 1]");
  extraction.validate();
}

namespace {

double median_inplace(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_inputs(const std::vector<DepthMap>& depths, const CostVolume& volume) {
  require(depths.size() >= 2, "occlusion: need at least two initial depth maps");
  for (const auto& d : depths)
    require(d.width == volume.width && d.height == volume.height,
            "occlusion: depth map size differs from volume slices");
}

}  // namespace

OcclusionMap occlusion_probability(const std::vector<DepthMap>& initial_depths,
                                   const CostVolume& avg_volume,
                                   const RefineConfig& cfg) {
  cfg.validate();
  check_inputs(initial_depths, avg_volume);

  const int W = avg_volume.width;
  const int H = avg_volume.height;
  OcclusionMap out(W, H);

  parallel_for(0, H, [&](int y) {
    std::vector<double> ds;
    ds.reserve(initial_depths.size());
    for (int x = 0; x < W; ++x) {
      ds.clear();
      for (const auto& d : initial_depths)
        if (d.is_valid(x, y)) ds.push_back(d.at(x, y));
      if (ds.size() < 2) continue;

      const auto [lo, hi] = std::minmax_element(ds.begin(), ds.end());
      const double spread_abs = *hi - *lo;
      const double med = median_inplace(ds);
      const double delta = med > 0 ? spread_abs / med : 0.0;
      const double spread = std::min(1.0, delta / cfg.tau_rel);

      double c_min = 0.0, c_sum = 0.0;
      int c_count = 0;
      for (int n = 0; n < avg_volume.planes; ++n) {
        if (!avg_volume.is_valid(x, y, n)) continue;
        const double c = avg_volume.at(x, y, n);
        if (c_count == 0 || c < c_min) c_min = c;
        c_sum += c;
        ++c_count;
      }
      // No photometric evidence, or a uniformly zero profile, reads as flat.
      double flat = 1.0;
      if (c_count > 0 && c_sum > 0.0) flat = c_min * c_count / c_sum;

      const double p =
          std::clamp((1.0 - cfg.kappa) * spread + cfg.kappa * flat, 0.0, 1.0);
      out.p[out.idx(x, y)] = static_cast<float>(p);
      out.valid[out.idx(x, y)] = 1;
    }
  });
  return out;
}

DepthMap refine_depth(const std::vector<DepthMap>& initial_depths,
                      const CostVolume& avg_volume, const OcclusionMap& occ,
                      const RefineConfig& cfg) {
  cfg.validate();
  check_inputs(initial_depths, avg_volume);
  require(occ.width == avg_volume.width && occ.height == avg_volume.height,
          "refine: occlusion map size differs from volume slices");

  const DepthMap extracted = extract_depth(avg_volume, cfg.extraction);
  const int W = avg_volume.width;
  const int H = avg_volume.height;
  DepthMap out(W, H);

  parallel_for(0, H, [&](int y) {
    std::vector<double> vals;
    vals.reserve(initial_depths.size() + 1);
    for (int x = 0; x < W; ++x) {
      vals.clear();
      for (const auto& d : initial_depths)
        if (d.is_valid(x, y)) vals.push_back(d.at(x, y));

      const bool occluded =
          occ.is_valid(x, y) && occ.at(x, y) >= cfg.occluded_threshold;
      if (occluded || vals.size() < 2) {
        if (extracted.is_valid(x, y)) out.set(x, y, extracted.at(x, y));
        continue;
      }
      if (extracted.is_valid(x, y)) vals.push_back(extracted.at(x, y));
      out.set(x, y, static_cast<float>(median_inplace(vals)));
    }
  });
  return out;
}

}  // namespace mvd
