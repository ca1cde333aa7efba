#include "mvdepth/normals.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "mvdepth/parallel.hpp"

namespace mvd {

NormalMap normals_from_depth(const DepthMap& depth, const CameraIntrinsics& K,
                             int radius, double discontinuity_rel) {
  require(radius >= 1, "normals: radius must be >= 1");
  require(discontinuity_rel > 0, "normals: discontinuity threshold must be > 0");
  K.validate();

  const int W = depth.width;
  const int H = depth.height;
  NormalMap out(W, H);

  parallel_for(0, H, [&](int y) {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(static_cast<size_t>(2 * radius + 1) * (2 * radius + 1));
    for (int x = 0; x < W; ++x) {
      if (!depth.is_valid(x, y)) continue;
      const double dc = depth.at(x, y);

      pts.clear();
      double dmin = dc, dmax = dc;
      const int y0 = std::max(0, y - radius), y1 = std::min(H - 1, y + radius);
      const int x0 = std::max(0, x - radius), x1 = std::min(W - 1, x + radius);
      for (int py = y0; py <= y1; ++py) {
        for (int px = x0; px <= x1; ++px) {
          if (!depth.is_valid(px, py)) continue;
          const double d = depth.at(px, py);
          dmin = std::min(dmin, d);
          dmax = std::max(dmax, d);
          pts.push_back(backproject({double(px), double(py)}, d, K));
        }
      }
      if (pts.size() < 3) continue;
      if (dmax - dmin > discontinuity_rel * dc) continue;

      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      for (const auto& p : pts) mean += p;
      mean /= static_cast<double>(pts.size());
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (const auto& p : pts) {
        const Eigen::Vector3d d = p - mean;
        cov.noalias() += d * d.transpose();
      }
      cov /= static_cast<double>(pts.size());

      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
      const Eigen::Vector3d evals = eig.eigenvalues();  // ascending
      if (evals(1) - evals(0) < 1e-12) continue;
      Eigen::Vector3d n = eig.eigenvectors().col(0);

      const Eigen::Vector3d ray((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
      if (n.dot(ray) > 0) n = -n;
      out.set(x, y, n.cast<float>());
    }
  });
  return out;
}

NormalMap build_cnm(const NormalMap& local, const PlaneMaskSet& masks) {
  require(local.width == masks.width && local.height == masks.height,
          "cnm: mask size differs from normal map");

  const int W = local.width;
  const int H = local.height;

  struct RegionStats {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    size_t count = 0;
    Eigen::Vector3f first;
    bool constant = true;
  };
  std::map<uint16_t, RegionStats> regions;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const uint16_t label = masks.at(x, y);
      if (label == 0 || !local.is_valid(x, y)) continue;
      auto& r = regions[label];
      const Eigen::Vector3f n = local.at(x, y);
      if (r.count == 0)
        r.first = n;
      else if (n != r.first)
        r.constant = false;
      r.sum += n.cast<double>();
      ++r.count;
    }
  }

  struct RegionMean {
    Eigen::Vector3f value;
    bool ok = false;
  };
  std::map<uint16_t, RegionMean> means;
  for (auto& [label, r] : regions) {
    RegionMean m;
    if (r.constant) {
      // Mean of a constant field is that constant; reusing the stored value
      // keeps repeated applications bit-identical.
      m.value = r.first;
      m.ok = true;
    } else if (r.sum.norm() >= 1e-8) {
      m.value = r.sum.normalized().cast<float>();
      m.ok = true;
    }
    means[label] = m;
  }

  NormalMap out(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (!local.is_valid(x, y)) continue;
      const uint16_t label = masks.at(x, y);
      if (label == 0) {
        out.set(x, y, local.at(x, y));
        continue;
      }
      const auto it = means.find(label);
      if (it != means.end() && it->second.ok) out.set(x, y, it->second.value);
    }
  }
  return out;
}

}  // namespace mvd
