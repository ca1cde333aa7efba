#pragma once

#include <string>

#include "mvdepth/types.hpp"

namespace mvd {

struct DepthMetrics {
  double delta1 = 0, delta2 = 0, delta3 = 0;  // % with max ratio < 1.25^i
  double abs_rel = 0, sq_rel = 0, rmse = 0, rmse_log = 0, scale_inv = 0;
};

struct NormalMetrics {
  double mean = 0, median = 0, rmse = 0;           // degrees
  double pct_11_25 = 0, pct_22_5 = 0, pct_30 = 0;  // % strictly below
};

// Standard depth-error statistics over the jointly valid set. Threshold
// comparisons are strict. Throws on empty Q or nonpositive depths in Q.
DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt);

// Angular error statistics between unit normal maps, in degrees.
NormalMetrics normal_metrics(const NormalMap& pred, const NormalMap& gt);

std::string depth_metrics_json(const DepthMetrics& m);
std::string normal_metrics_json(const NormalMetrics& m);

// Aligned-column table; one header line, one value line.
std::string depth_metrics_table(const DepthMetrics& m);
std::string normal_metrics_table(const NormalMetrics& m);

}  // namespace mvd
