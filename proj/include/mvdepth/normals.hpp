#pragma once

#include "mvdepth/geometry.hpp"
#include "mvdepth/types.hpp"

namespace mvd {

// Per-pixel surface normals by total least squares over the (2 radius + 1)^2
// window: backproject the valid window pixels, take the eigenvector of the
// smallest eigenvalue of the centered covariance, orient toward the camera.
// A pixel comes out invalid when the center is invalid, fewer than 3 window
// pixels are valid, the fit is degenerate (two smallest eigenvalues within
// 1e-12), or the window straddles a depth discontinuity (max - min window
// depth above `discontinuity_rel` of the center depth).
NormalMap normals_from_depth(const DepthMap& depth, const CameraIntrinsics& K,
                             int radius, double discontinuity_rel = 0.05);

// Combined normal map: label-0 pixels keep their local normal; inside each
// planar region the normalized mean of the valid local normals replaces
// every valid pixel. The mean of a constant field is that constant, so the
// operation is idempotent. Regions with no valid local normal, or whose mean
// direction cancels below 1e-8, come out invalid.
NormalMap build_cnm(const NormalMap& local, const PlaneMaskSet& masks);

}  // namespace mvd
