#include "mvdepth/cost_volume.hpp"

#include <algorithm>
#include <cmath>

#include "mvdepth/parallel.hpp"

namespace mvd {

CostVolume build_cost_volume(const Image& reference, const Image& source,
                             const CameraIntrinsics& K, const Pose& source_pose,
                             const PlaneSampling& sampling) {
  require(reference.same_size(source), "cost volume: image sizes differ");
  require(!reference.empty(), "cost volume: empty images");
  sampling.validate();

  const int W = reference.width;
  const int H = reference.height;
  const int C = reference.channels;
  CostVolume volume(W, H, sampling);

  parallel_for(0, sampling.count, [&](int n) {
    const Eigen::Matrix3d Hn =
        homography_for_plane(K, source_pose, sampling.depth_at(n));
    const WarpedImage warped = warp_to_reference_plane(source, Hn);
    for (int y = 0; y < H; ++y) {
      const int y0 = std::max(0, y - 1);
      const int y1 = std::min(H - 1, y + 1);
      for (int x = 0; x < W; ++x) {
        const int x0 = std::max(0, x - 1);
        const int x1 = std::min(W - 1, x + 1);
        bool all_covered = true;
        double sum = 0.0;
        for (int py = y0; py <= y1 && all_covered; ++py) {
          for (int px = x0; px <= x1; ++px) {
            if (!warped.is_covered(px, py)) {
              all_covered = false;
              break;
            }
            for (int c = 0; c < C; ++c)
              sum += std::abs(static_cast<double>(reference.at(px, py, c)) -
                              warped.image.at(px, py, c));
          }
        }
        if (!all_covered) continue;
        const int patch = (y1 - y0 + 1) * (x1 - x0 + 1);
        const size_t i = volume.idx(x, y, n);
        volume.costs[i] = static_cast<float>(sum / (patch * C));
        volume.valid[i] = 1;
      }
    }
  });
  return volume;
}

CostVolume aggregate_cost_volume(const CostVolume& raw, const Image& guide,
                                 int radius, double sigma_color) {
  require(guide.width == raw.width && guide.height == raw.height,
          "aggregate: guide size differs from volume slices");
  require(radius >= 0, "aggregate: radius must be >= 0");
  require(sigma_color > 0, "aggregate: sigma_color must be positive");
  if (radius == 0) return raw;

  const int W = raw.width;
  const int H = raw.height;
  const int C = guide.channels;
  const int win = 2 * radius + 1;
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma_color * sigma_color);

  // Guide weights are shared by all depth slices; build them once.
  std::vector<float> weights(static_cast<size_t>(W) * H * win * win, 0.f);
  parallel_for(0, H, [&](int y) {
    for (int x = 0; x < W; ++x) {
      float* wq = &weights[(static_cast<size_t>(y) * W + x) * win * win];
      for (int dy = -radius; dy <= radius; ++dy) {
        const int py = y + dy;
        for (int dx = -radius; dx <= radius; ++dx) {
          const int px = x + dx;
          if (px < 0 || py < 0 || px >= W || py >= H) continue;
          double d2 = 0.0;
          for (int c = 0; c < C; ++c) {
            const double d = static_cast<double>(guide.at(x, y, c)) -
                             guide.at(px, py, c);
            d2 += d * d;
          }
          wq[(dy + radius) * win + (dx + radius)] =
              static_cast<float>(std::exp(-d2 * inv_two_sigma2));
        }
      }
    }
  });

  CostVolume out(W, H, raw.sampling);
  parallel_for(0, raw.planes, [&](int n) {
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const float* wq = &weights[(static_cast<size_t>(y) * W + x) * win * win];
        double num = 0.0, den = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) {
          const int py = y + dy;
          if (py < 0 || py >= H) continue;
          for (int dx = -radius; dx <= radius; ++dx) {
            const int px = x + dx;
            if (px < 0 || px >= W) continue;
            if (!raw.is_valid(px, py, n)) continue;
            const double w = wq[(dy + radius) * win + (dx + radius)];
            num += w * raw.at(px, py, n);
            den += w;
          }
        }
        if (den > 0.0) {
          const size_t i = out.idx(x, y, n);
          out.costs[i] = static_cast<float>(num / den);
          out.valid[i] = 1;
        }
      }
    }
  });
  return out;
}

CostVolume average_cost_volumes(const std::vector<CostVolume>& volumes) {
  require(!volumes.empty(), "average: need at least one volume");
  for (const auto& v : volumes)
    require(v.same_shape(volumes.front()), "average: volume shapes differ");
  if (volumes.size() == 1) return volumes.front();

  CostVolume out(volumes.front().width, volumes.front().height,
                 volumes.front().sampling);
  const size_t cells = out.costs.size();
  parallel_for(0, out.planes, [&](int n) {
    const size_t base = static_cast<size_t>(n) * out.width * out.height;
    const size_t slice = static_cast<size_t>(out.width) * out.height;
    for (size_t i = base; i < base + slice && i < cells; ++i) {
      double sum = 0.0;
      int count = 0;
      for (const auto& v : volumes) {
        if (!v.valid[i]) continue;
        sum += v.costs[i];
        ++count;
      }
      if (count > 0) {
        out.costs[i] = static_cast<float>(sum / count);
        out.valid[i] = 1;
      }
    }
  });
  return out;
}

}  // namespace mvd
