#include "mvdepth/tsdf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "mvdepth/parallel.hpp"

namespace mvd {

TsdfVolume::TsdfVolume(const Eigen::Vector3d& origin_, double voxel_size_,
                       const std::array<int, 3>& dims_)
    : origin(origin_), voxel_size(voxel_size_), dims(dims_) {
  require(voxel_size > 0, "tsdf: voxel size must be positive");
  require(dims[0] > 0 && dims[1] > 0 && dims[2] > 0,
          "tsdf: grid dims must be positive");
  tsdf.assign(voxel_count(), 1.f);
  weight.assign(voxel_count(), 0.f);
  color.assign(voxel_count() * 3, 0.f);
}

void integrate(TsdfVolume& volume, const DepthMap& depth, const Image& color,
               const OcclusionMap* occ, const CameraIntrinsics& K,
               const Pose& world_to_camera, double trunc) {
  require(trunc > 0, "integrate: trunc must be positive");
  require(trunc >= 2.0 * volume.voxel_size,
          "integrate: trunc must be at least two voxels");
  world_to_camera.validate();
  require(depth.width == K.width && depth.height == K.height,
          "integrate: depth size differs from intrinsics");
  if (!color.empty())
    require(color.width == depth.width && color.height == depth.height,
            "integrate: color size differs from depth");
  if (occ)
    require(occ->width == depth.width && occ->height == depth.height,
            "integrate: occlusion map size differs from depth");

  const Eigen::Matrix3d R = world_to_camera.rotation;
  const Eigen::Vector3d t = world_to_camera.translation;

  parallel_for(0, volume.dims[2], [&](int z) {
    for (int y = 0; y < volume.dims[1]; ++y) {
      for (int x = 0; x < volume.dims[0]; ++x) {
        const Eigen::Vector3d pc = R * volume.voxel_center(x, y, z) + t;
        if (pc.z() <= 0) continue;
        const int qx = static_cast<int>(std::lround(K.fx * pc.x() / pc.z() + K.cx));
        const int qy = static_cast<int>(std::lround(K.fy * pc.y() / pc.z() + K.cy));
        if (qx < 0 || qy < 0 || qx >= depth.width || qy >= depth.height) continue;
        if (!depth.is_valid(qx, qy)) continue;

        const double sdf = depth.at(qx, qy) - pc.z();
        if (sdf <= -trunc) continue;
        const double d = std::clamp(sdf / trunc, -1.0, 1.0);

        double w = 1.0;
        if (occ && occ->is_valid(qx, qy)) w = 1.0 - occ->at(qx, qy);
        if (w <= 0.0) continue;

        const size_t i = volume.idx(x, y, z);
        const double w_old = volume.weight[i];
        const double w_new = w_old + w;
        volume.tsdf[i] =
            static_cast<float>((volume.tsdf[i] * w_old + d * w) / w_new);
        if (!color.empty()) {
          for (int c = 0; c < 3; ++c) {
            const int src = color.channels == 3 ? c : 0;
            volume.color[i * 3 + c] = static_cast<float>(
                (volume.color[i * 3 + c] * w_old + color.at(qx, qy, src) * w) /
                w_new);
          }
        }
        volume.weight[i] = static_cast<float>(w_new);
      }
    }
  });
}

namespace {

// Cell corners are indexed by their offset bits: corner i sits at
// (i & 1, (i >> 1) & 1, (i >> 2) & 1). Edges connect corners differing in
// one bit; faces collect the four corners sharing one fixed bit.
struct CellTopology {
  std::array<std::array<int, 2>, 12> edges;
  int edge_of[8][8];                       // corner pair -> edge id
  std::array<std::array<int, 4>, 6> face_corners;  // cyclic order
};

CellTopology make_topology() {
  CellTopology t{};
  for (auto& row : t.edge_of)
    for (auto& v : row) v = -1;
  int e = 0;
  for (int a = 0; a < 8; ++a) {
    for (int bit = 0; bit < 3; ++bit) {
      const int b = a ^ (1 << bit);
      if (b < a) continue;
      t.edges[e] = {a, b};
      t.edge_of[a][b] = t.edge_of[b][a] = e;
      ++e;
    }
  }
  int f = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      // Corners in cyclic order around the face.
      t.face_corners[f][0] = side << axis;
      t.face_corners[f][1] = (side << axis) | (1 << u);
      t.face_corners[f][2] = (side << axis) | (1 << u) | (1 << v);
      t.face_corners[f][3] = (side << axis) | (1 << v);
      ++f;
    }
  }
  return t;
}

const CellTopology& topology() {
  static const CellTopology t = make_topology();
  return t;
}

}  // namespace

TriangleMesh extract_mesh(const TsdfVolume& volume, double min_weight) {
  require(min_weight >= 0, "extract_mesh: min_weight must be >= 0");
  const auto& topo = topology();
  TriangleMesh mesh;

  const int X = volume.dims[0], Y = volume.dims[1], Z = volume.dims[2];
  if (X < 2 || Y < 2 || Z < 2) return mesh;

  // One shared vertex per crossing grid edge; keyed by the low corner and
  // the edge axis so neighbouring cells agree.
  std::unordered_map<uint64_t, uint32_t> edge_vertex;
  const auto grid_edge_key = [&](int x, int y, int z, int axis) {
    return (static_cast<uint64_t>((static_cast<size_t>(z) * Y + y) * X + x)) * 3 +
           axis;
  };

  double vals[8];
  double cols[8][3];
  int corner_xyz[8][3];
  int edge_vert[12];
  int segments[12][2];  // per crossing edge: the two partner edges

  for (int z = 0; z + 1 < Z; ++z) {
    for (int y = 0; y + 1 < Y; ++y) {
      for (int x = 0; x + 1 < X; ++x) {
        bool gated = false;
        bool any_in = false, any_out = false;
        for (int c = 0; c < 8; ++c) {
          const int cx = x + (c & 1);
          const int cy = y + ((c >> 1) & 1);
          const int cz = z + ((c >> 2) & 1);
          const size_t i = volume.idx(cx, cy, cz);
          if (volume.weight[i] < min_weight) {
            gated = true;
            break;
          }
          vals[c] = volume.tsdf[i];
          for (int k = 0; k < 3; ++k) cols[c][k] = volume.color[i * 3 + k];
          corner_xyz[c][0] = cx;
          corner_xyz[c][1] = cy;
          corner_xyz[c][2] = cz;
          (vals[c] < 0 ? any_in : any_out) = true;
        }
        if (gated || !any_in || !any_out) continue;

        const auto inside = [&](int c) { return vals[c] < 0.0; };

        // Vertices on crossing edges, deduplicated across cells.
        for (int e = 0; e < 12; ++e) {
          edge_vert[e] = -1;
          segments[e][0] = segments[e][1] = -1;
          const int a = topo.edges[e][0];
          const int b = topo.edges[e][1];
          if (inside(a) == inside(b)) continue;
          const int axis = (a ^ b) == 1 ? 0 : ((a ^ b) == 2 ? 1 : 2);
          const uint64_t key =
              grid_edge_key(corner_xyz[a][0], corner_xyz[a][1], corner_xyz[a][2],
                            axis);
          auto it = edge_vertex.find(key);
          if (it == edge_vertex.end()) {
            const double tpar = vals[a] / (vals[a] - vals[b]);
            std::array<float, 3> pos, col;
            for (int k = 0; k < 3; ++k) {
              const double g0 = corner_xyz[a][k];
              const double g1 = corner_xyz[b][k];
              pos[k] = static_cast<float>(volume.origin[k] +
                                          volume.voxel_size *
                                              (g0 + tpar * (g1 - g0) + 0.5));
              col[k] = static_cast<float>(cols[a][k] +
                                          tpar * (cols[b][k] - cols[a][k]));
            }
            it = edge_vertex
                     .emplace(key, static_cast<uint32_t>(mesh.vertices.size()))
                     .first;
            mesh.vertices.push_back(pos);
            mesh.colors.push_back(col);
          }
          edge_vert[e] = static_cast<int>(it->second);
        }

        // Per-face segments between crossing edges. A face holds 0, 2 or 4
        // crossings; with 4, the bilinear face-center sign picks which
        // diagonal corner pair the isolines wrap.
        const auto add_segment = [&](int ea, int eb) {
          if (segments[ea][0] < 0) segments[ea][0] = eb;
          else segments[ea][1] = eb;
          if (segments[eb][0] < 0) segments[eb][0] = ea;
          else segments[eb][1] = ea;
        };

        for (int f = 0; f < 6; ++f) {
          const auto& fc = topo.face_corners[f];
          int crossing[4];
          int ncross = 0;
          for (int k = 0; k < 4; ++k) {
            const int a = fc[k];
            const int b = fc[(k + 1) % 4];
            if (inside(a) != inside(b)) crossing[ncross++] = k;
          }
          if (ncross == 0) continue;
          if (ncross == 2) {
            const int ea = topo.edge_of[fc[crossing[0]]][fc[(crossing[0] + 1) % 4]];
            const int eb = topo.edge_of[fc[crossing[1]]][fc[(crossing[1] + 1) % 4]];
            add_segment(ea, eb);
            continue;
          }
          // Saddle: all four face edges cross. Wrap the inside corners when
          // the face center is outside, the outside corners otherwise.
          const double center =
              0.25 * (vals[fc[0]] + vals[fc[1]] + vals[fc[2]] + vals[fc[3]]);
          const bool wrap_inside = center >= 0.0;
          for (int k = 0; k < 4; ++k) {
            if (inside(fc[k]) != wrap_inside) continue;
            const int prev = topo.edge_of[fc[(k + 3) % 4]][fc[k]];
            const int next = topo.edge_of[fc[k]][fc[(k + 1) % 4]];
            add_segment(prev, next);
          }
        }

        // Walk the segment graph into closed loops and fan-triangulate.
        const Eigen::Vector3d grad(
            (vals[1] + vals[3] + vals[5] + vals[7] - vals[0] - vals[2] -
             vals[4] - vals[6]),
            (vals[2] + vals[3] + vals[6] + vals[7] - vals[0] - vals[1] -
             vals[4] - vals[5]),
            (vals[4] + vals[5] + vals[6] + vals[7] - vals[0] - vals[1] -
             vals[2] - vals[3]));
        bool visited[12] = {};
        for (int e0 = 0; e0 < 12; ++e0) {
          if (edge_vert[e0] < 0 || visited[e0] || segments[e0][0] < 0) continue;
          int loop[12];
          int len = 0;
          int prev = -1, cur = e0;
          while (true) {
            visited[cur] = true;
            loop[len++] = cur;
            const int next = segments[cur][0] == prev ? segments[cur][1]
                                                      : segments[cur][0];
            if (next == e0 || next < 0) break;
            prev = cur;
            cur = next;
          }
          for (int k = 1; k + 1 < len; ++k) {
            uint32_t ia = static_cast<uint32_t>(edge_vert[loop[0]]);
            uint32_t ib = static_cast<uint32_t>(edge_vert[loop[k]]);
            uint32_t ic = static_cast<uint32_t>(edge_vert[loop[k + 1]]);
            const auto& va = mesh.vertices[ia];
            const auto& vb = mesh.vertices[ib];
            const auto& vc = mesh.vertices[ic];
            const Eigen::Vector3d ab(vb[0] - va[0], vb[1] - va[1], vb[2] - va[2]);
            const Eigen::Vector3d ac(vc[0] - va[0], vc[1] - va[1], vc[2] - va[2]);
            if (ab.cross(ac).dot(grad) < 0) std::swap(ib, ic);
            mesh.triangles.push_back({ia, ib, ic});
          }
        }
      }
    }
  }
  return mesh;
}

MeshEdgeStats mesh_edge_stats(const TriangleMesh& mesh) {
  std::map<std::pair<uint32_t, uint32_t>, int> uses;
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      uint32_t a = tri[k];
      uint32_t b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++uses[{a, b}];
    }
  }
  MeshEdgeStats stats;
  for (const auto& [edge, n] : uses) {
    if (n == 1) ++stats.boundary_edges;
    if (n >= 3) ++stats.nonmanifold_edges;
  }
  return stats;
}

}  // namespace mvd
