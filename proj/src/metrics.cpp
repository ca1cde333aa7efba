#include "mvdepth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "mvdepth/parallel.hpp"

#include <json.hpp>

namespace mvd {

namespace {

double mean_of(std::vector<double>& v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt) {
  require(pred.width == gt.width && pred.height == gt.height,
          "metrics: depth map size mismatch");

  std::vector<double> abs_rel, sq_rel, sq, log_d, log_d2;
  std::vector<double> r1, r2, r3;
  const double t1 = 1.25, t2 = 1.25 * 1.25, t3 = 1.25 * 1.25 * 1.25;
  for (size_t i = 0; i < pred.depth.size(); ++i) {
    if (!pred.valid[i] || !gt.valid[i]) continue;
    const double p = pred.depth[i];
    const double g = gt.depth[i];
    require(p > 0 && g > 0, "metrics: nonpositive depth in the valid set");
    const double ratio = std::max(p / g, g / p);
    r1.push_back(ratio < t1 ? 1.0 : 0.0);
    r2.push_back(ratio < t2 ? 1.0 : 0.0);
    r3.push_back(ratio < t3 ? 1.0 : 0.0);
    const double e = p - g;
    abs_rel.push_back(std::abs(e) / g);
    sq_rel.push_back(e * e / g);
    sq.push_back(e * e);
    const double d = std::log(p) - std::log(g);
    log_d.push_back(d);
    log_d2.push_back(d * d);
  }
  if (abs_rel.empty()) throw EmptyDomainError("metrics: no jointly valid pixels");

  DepthMetrics m;
  m.delta1 = 100.0 * mean_of(r1);
  m.delta2 = 100.0 * mean_of(r2);
  m.delta3 = 100.0 * mean_of(r3);
  m.abs_rel = mean_of(abs_rel);
  m.sq_rel = mean_of(sq_rel);
  m.rmse = std::sqrt(mean_of(sq));
  m.rmse_log = std::sqrt(mean_of(log_d2));
  const double mu = mean_of(log_d);
  m.scale_inv = std::sqrt(std::max(0.0, mean_of(log_d2) - mu * mu));
  return m;
}

NormalMetrics normal_metrics(const NormalMap& pred, const NormalMap& gt) {
  require(pred.width == gt.width && pred.height == gt.height,
          "metrics: normal map size mismatch");

  std::vector<double> angles, angles2;
  std::vector<double> a11, a22, a30;
  for (size_t i = 0; i < pred.valid.size(); ++i) {
    if (!pred.valid[i] || !gt.valid[i]) continue;
    double dot = 0.0;
    for (int c = 0; c < 3; ++c)
      dot += static_cast<double>(pred.normals[i * 3 + c]) * gt.normals[i * 3 + c];
    dot = std::clamp(dot, -1.0, 1.0);
    const double deg = std::acos(dot) * 180.0 / std::numbers::pi;
    angles.push_back(deg);
    angles2.push_back(deg * deg);
    a11.push_back(deg < 11.25 ? 1.0 : 0.0);
    a22.push_back(deg < 22.5 ? 1.0 : 0.0);
    a30.push_back(deg < 30.0 ? 1.0 : 0.0);
  }
  if (angles.empty()) throw EmptyDomainError("metrics: no jointly valid pixels");

  NormalMetrics m;
  m.mean = mean_of(angles);
  m.median = median_of(angles);
  m.rmse = std::sqrt(mean_of(angles2));
  m.pct_11_25 = 100.0 * mean_of(a11);
  m.pct_22_5 = 100.0 * mean_of(a22);
  m.pct_30 = 100.0 * mean_of(a30);
  return m;
}

std::string depth_metrics_json(const DepthMetrics& m) {
  nlohmann::json j{{"delta1", m.delta1},     {"delta2", m.delta2},
                   {"delta3", m.delta3},     {"abs_rel", m.abs_rel},
                   {"sq_rel", m.sq_rel},     {"rmse", m.rmse},
                   {"rmse_log", m.rmse_log}, {"scale_inv", m.scale_inv}};
  return j.dump();
}

std::string normal_metrics_json(const NormalMetrics& m) {
  nlohmann::json j{{"mean", m.mean},           {"median", m.median},
                   {"rmse", m.rmse},           {"pct_11_25", m.pct_11_25},
                   {"pct_22_5", m.pct_22_5},   {"pct_30", m.pct_30}};
  return j.dump();
}

namespace {
std::string table(const char* const* headers, const double* values, int n) {
  std::string head, row;
  char buf[64];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%11s", headers[i]);
    head += buf;
    std::snprintf(buf, sizeof(buf), "%11.4f", values[i]);
    row += buf;
  }
  return head + "\n" + row + "\n";
}
}  // namespace

std::string depth_metrics_table(const DepthMetrics& m) {
  static const char* headers[] = {"d<1.25", "d<1.25^2", "d<1.25^3", "abs.rel",
                                  "sq.rel", "rmse",     "rmse.log", "scale.inv"};
  const double values[] = {m.delta1, m.delta2,  m.delta3, m.abs_rel,
                           m.sq_rel, m.rmse,    m.rmse_log, m.scale_inv};
  return table(headers, values, 8);
}

std::string normal_metrics_table(const NormalMetrics& m) {
  static const char* headers[] = {"mean",   "median", "rmse",
                                  "<11.25", "<22.5",  "<30"};
  const double values[] = {m.mean, m.median, m.rmse, m.pct_11_25, m.pct_22_5,
                           m.pct_30};
  return table(headers, values, 6);
}

}  // namespace mvd
