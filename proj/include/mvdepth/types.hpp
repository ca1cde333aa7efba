#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mvd {

// Thrown when a loss or metric is asked to reduce over zero valid pixels.
class EmptyDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-facing configuration (missing frames, malformed config keys).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major intensity image, 1 or 3 channels, values in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.f)
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {}

  bool empty() const { return width == 0 || height == 0; }
  size_t idx(int x, int y, int c = 0) const {
    return (static_cast<size_t>(y) * width + x) * channels + c;
  }
  float at(int x, int y, int c = 0) const { return data[idx(x, y, c)]; }
  float& at(int x, int y, int c = 0) { return data[idx(x, y, c)]; }
  bool same_size(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

// Per-pixel depth in meters with a validity mask. Invalid pixels are
// excluded from every loss and metric.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> depth;
  std::vector<uint8_t> valid;

  DepthMap() = default;
  DepthMap(int w, int h)
      : width(w), height(h),
        depth(static_cast<size_t>(w) * h, 0.f),
        valid(static_cast<size_t>(w) * h, 0) {}

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  float at(int x, int y) const { return depth[idx(x, y)]; }
  bool is_valid(int x, int y) const { return valid[idx(x, y)] != 0; }
  void set(int x, int y, float d) {
    depth[idx(x, y)] = d;
    valid[idx(x, y)] = 1;
  }
  void invalidate(int x, int y) {
    depth[idx(x, y)] = 0.f;
    valid[idx(x, y)] = 0;
  }
};

// Unit normals in camera coordinates, camera-facing (n . ray <= 0).
struct NormalMap {
  int width = 0;
  int height = 0;
  std::vector<float> normals;  // 3 floats per pixel
  std::vector<uint8_t> valid;

  NormalMap() = default;
  NormalMap(int w, int h)
      : width(w), height(h),
        normals(static_cast<size_t>(w) * h * 3, 0.f),
        valid(static_cast<size_t>(w) * h, 0) {}

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  bool is_valid(int x, int y) const { return valid[idx(x, y)] != 0; }
  Eigen::Vector3f at(int x, int y) const {
    const size_t i = idx(x, y) * 3;
    return {normals[i], normals[i + 1], normals[i + 2]};
  }
  void set(int x, int y, const Eigen::Vector3f& n) {
    const size_t i = idx(x, y) * 3;
    normals[i] = n.x();
    normals[i + 1] = n.y();
    normals[i + 2] = n.z();
    valid[idx(x, y)] = 1;
  }
  void invalidate(int x, int y) {
    const size_t i = idx(x, y) * 3;
    normals[i] = normals[i + 1] = normals[i + 2] = 0.f;
    valid[idx(x, y)] = 0;
  }
};

// Per-pixel occlusion probability in [0, 1]; high means occluded.
struct OcclusionMap {
  int width = 0;
  int height = 0;
  std::vector<float> p;
  std::vector<uint8_t> valid;

  OcclusionMap() = default;
  OcclusionMap(int w, int h)
      : width(w), height(h),
        p(static_cast<size_t>(w) * h, 0.f),
        valid(static_cast<size_t>(w) * h, 0) {}

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  bool is_valid(int x, int y) const { return valid[idx(x, y)] != 0; }
  float at(int x, int y) const { return p[idx(x, y)]; }
};

// Integer region labels; 0 marks non-planar pixels, k >= 1 a planar region.
struct PlaneMaskSet {
  int width = 0;
  int height = 0;
  std::vector<uint16_t> labels;

  PlaneMaskSet() = default;
  PlaneMaskSet(int w, int h)
      : width(w), height(h), labels(static_cast<size_t>(w) * h, 0) {}

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  uint16_t at(int x, int y) const { return labels[idx(x, y)]; }
};

void require(bool cond, const std::string& msg);

}  // namespace mvd
