#pragma once

#include "mvdepth/types.hpp"

namespace mvd {

struct LossConfig {
  double lambda = 1.0;  // combined normal loss weight
  double alpha = 0.2;   // occlusion penalty weight
  double beta = 1.0;    // refined normal loss weight

  void validate() const;
};

// Mean absolute depth difference over the jointly valid pixel set Q.
// Throws EmptyDomainError when Q is empty.
double depth_loss_l1(const DepthMap& pred, const DepthMap& gt);

// -(1/|Q|) sum of dot(pred, cnm); -1 iff perfectly aligned.
double combined_normal_loss(const NormalMap& pred_normals, const NormalMap& cnm);

// depth_loss_l1 + lambda * combined_normal_loss.
double total_initial_loss(const DepthMap& pred_depth, const DepthMap& gt_depth,
                          const NormalMap& pred_normals, const NormalMap& cnm,
                          const LossConfig& cfg);

// Occlusion-aware refinement loss: the (1-P)-weighted depth and normal
// terms minus alpha * mean(1-P). Q is the set of pixels valid in every
// input; P must lie in [0, 1] there.
double occlusion_aware_loss(const DepthMap& pred_depth, const DepthMap& gt_depth,
                            const NormalMap& pred_normals, const NormalMap& cnm,
                            const OcclusionMap& occ, const LossConfig& cfg);

}  // namespace mvd
