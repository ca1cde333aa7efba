#include "mvdepth/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mvdepth/types.hpp"

namespace mvd {

void write_ply(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path);
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "element face " << mesh.triangles.size() << "\n"
      << "property list uchar int vertex_indices\n"
      << "end_header\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    out.write(reinterpret_cast<const char*>(mesh.vertices[i].data()),
              3 * sizeof(float));
    uint8_t rgb[3];
    for (int c = 0; c < 3; ++c) {
      const float v = i < mesh.colors.size() ? mesh.colors[i][c] : 0.5f;
      rgb[c] = static_cast<uint8_t>(
          std::lround(std::clamp(v, 0.f, 1.f) * 255.0f));
    }
    out.write(reinterpret_cast<const char*>(rgb), 3);
  }
  for (const auto& tri : mesh.triangles) {
    const uint8_t n = 3;
    out.write(reinterpret_cast<const char*>(&n), 1);
    int32_t idx[3] = {static_cast<int32_t>(tri[0]), static_cast<int32_t>(tri[1]),
                      static_cast<int32_t>(tri[2])};
    out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
  }
  if (!out) throw DataError("short write: " + path);
}

TriangleMesh read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  size_t n_vertices = 0, n_faces = 0;
  bool header_ok = false;
  std::getline(in, line);
  if (line != "ply") throw DataError("not a PLY file: " + path);
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "binary_little_endian")
        throw DataError("unsupported PLY format in " + path);
    } else if (word == "element") {
      std::string what;
      size_t count;
      ss >> what >> count;
      if (what == "vertex") n_vertices = count;
      if (what == "face") n_faces = count;
    } else if (word == "end_header") {
      header_ok = true;
      break;
    }
  }
  if (!header_ok) throw DataError("bad PLY header: " + path);

  TriangleMesh mesh;
  mesh.vertices.resize(n_vertices);
  mesh.colors.resize(n_vertices);
  for (size_t i = 0; i < n_vertices; ++i) {
    float pos[3];
    uint8_t rgb[3];
    in.read(reinterpret_cast<char*>(pos), sizeof(pos));
    in.read(reinterpret_cast<char*>(rgb), sizeof(rgb));
    mesh.vertices[i] = {pos[0], pos[1], pos[2]};
    mesh.colors[i] = {rgb[0] / 255.f, rgb[1] / 255.f, rgb[2] / 255.f};
  }
  mesh.triangles.resize(n_faces);
  for (size_t i = 0; i < n_faces; ++i) {
    uint8_t n = 0;
    int32_t idx[3];
    in.read(reinterpret_cast<char*>(&n), 1);
    if (n != 3) throw DataError("non-triangle face in " + path);
    in.read(reinterpret_cast<char*>(idx), sizeof(idx));
    mesh.triangles[i] = {static_cast<uint32_t>(idx[0]),
                         static_cast<uint32_t>(idx[1]),
                         static_cast<uint32_t>(idx[2])};
  }
  if (!in) throw DataError("short read: " + path);
  return mesh;
}

}  // namespace mvd
