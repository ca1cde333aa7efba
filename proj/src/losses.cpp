#include "mvdepth/losses.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "mvdepth/parallel.hpp"

namespace mvd {

void LossConfig::validate() const {
  require(lambda >= 0 && alpha >= 0 && beta >= 0,
          "loss config: weights must be >= 0");
}

namespace {

void check_same_size(int w1, int h1, int w2, int h2, const char* what) {
  require(w1 == w2 && h1 == h2, std::string("loss: ") + what + " size mismatch");
}

double mean_over_q(std::vector<double>& terms) {
  if (terms.empty()) throw EmptyDomainError("loss: no jointly valid pixels");
  return pairwise_sum(terms) / static_cast<double>(terms.size());
}

}  // namespace

double depth_loss_l1(const DepthMap& pred, const DepthMap& gt) {
  check_same_size(pred.width, pred.height, gt.width, gt.height, "depth maps");
  std::vector<double> terms;
  terms.reserve(pred.depth.size());
  for (size_t i = 0; i < pred.depth.size(); ++i) {
    if (!pred.valid[i] || !gt.valid[i]) continue;
    terms.push_back(std::abs(static_cast<double>(gt.depth[i]) - pred.depth[i]));
  }
  return mean_over_q(terms);
}

double combined_normal_loss(const NormalMap& pred_normals, const NormalMap& cnm) {
  check_same_size(pred_normals.width, pred_normals.height, cnm.width, cnm.height,
                  "normal maps");
  std::vector<double> terms;
  terms.reserve(pred_normals.valid.size());
  for (size_t i = 0; i < pred_normals.valid.size(); ++i) {
    if (!pred_normals.valid[i] || !cnm.valid[i]) continue;
    double dot = 0.0;
    for (int c = 0; c < 3; ++c)
      dot += static_cast<double>(cnm.normals[i * 3 + c]) *
             pred_normals.normals[i * 3 + c];
    terms.push_back(dot);
  }
  return -mean_over_q(terms);
}

double total_initial_loss(const DepthMap& pred_depth, const DepthMap& gt_depth,
                          const NormalMap& pred_normals, const NormalMap& cnm,
                          const LossConfig& cfg) {
  cfg.validate();
  return depth_loss_l1(pred_depth, gt_depth) +
         cfg.lambda * combined_normal_loss(pred_normals, cnm);
}

double occlusion_aware_loss(const DepthMap& pred_depth, const DepthMap& gt_depth,
                            const NormalMap& pred_normals, const NormalMap& cnm,
                            const OcclusionMap& occ, const LossConfig& cfg) {
  cfg.validate();
  check_same_size(pred_depth.width, pred_depth.height, gt_depth.width,
                  gt_depth.height, "depth maps");
  check_same_size(pred_depth.width, pred_depth.height, pred_normals.width,
                  pred_normals.height, "normal maps");
  check_same_size(pred_depth.width, pred_depth.height, cnm.width, cnm.height,
                  "combined normal map");
  check_same_size(pred_depth.width, pred_depth.height, occ.width, occ.height,
                  "occlusion map");

  const size_t total = pred_depth.depth.size();
  std::vector<double> depth_terms, normal_terms, penalty_terms;
  depth_terms.reserve(total);
  normal_terms.reserve(total);
  penalty_terms.reserve(total);
  for (size_t i = 0; i < total; ++i) {
    if (!pred_depth.valid[i] || !gt_depth.valid[i] || !pred_normals.valid[i] ||
        !cnm.valid[i] || !occ.valid[i])
      continue;
    const double p = occ.p[i];
    require(p >= 0.0 && p <= 1.0, "loss: occlusion probability outside [0, 1]");
    const double keep = 1.0 - p;
    depth_terms.push_back(
        keep * std::abs(static_cast<double>(gt_depth.depth[i]) - pred_depth.depth[i]));
    double dot = 0.0;
    for (int c = 0; c < 3; ++c)
      dot += static_cast<double>(cnm.normals[i * 3 + c]) *
             pred_normals.normals[i * 3 + c];
    normal_terms.push_back(keep * dot);
    penalty_terms.push_back(keep);
  }
  const double l_rd = mean_over_q(depth_terms);
  const double l_rn = -mean_over_q(normal_terms);
  const double penalty = mean_over_q(penalty_terms);
  return (l_rd + cfg.beta * l_rn) - cfg.alpha * penalty;
}

}  // namespace mvd
