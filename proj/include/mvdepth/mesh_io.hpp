#pragma once

#include <string>

#include "mvdepth/tsdf.hpp"

namespace mvd {

// Binary little-endian PLY with per-vertex uchar color.
void write_ply(const std::string& path, const TriangleMesh& mesh);
TriangleMesh read_ply(const std::string& path);

}  // namespace mvd
