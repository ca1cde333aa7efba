#include "mvdepth/synth.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <json.hpp>

#include "mvdepth/parallel.hpp"

namespace mvd {

void Scene::validate() const {
  for (const auto& p : primitives) {
    if (p.kind == PrimitiveKind::Sphere)
      require(p.extent.x() > 0, "scene: sphere radius must be positive");
    else
      require(p.extent.x() > 0 && p.extent.y() > 0,
              "scene: extents must be positive");
  }
}

namespace {

// Integer lattice hash -> [0, 1). splitmix-style finalizer keeps renders
// bit-identical everywhere.
double lattice_noise(int32_t ix, int32_t iy, uint32_t seed) {
  uint64_t h = (static_cast<uint64_t>(static_cast<uint32_t>(ix)) << 32) ^
               static_cast<uint32_t>(iy);
  h ^= static_cast<uint64_t>(seed) * 0x9e3779b97f4a7c15ull;
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebull;
  h ^= h >> 31;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(double u, double v, uint32_t seed) {
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const int32_t iu = static_cast<int32_t>(fu);
  const int32_t iv = static_cast<int32_t>(fv);
  const double tu = smooth(u - fu);
  const double tv = smooth(v - fv);
  const double a = lattice_noise(iu, iv, seed);
  const double b = lattice_noise(iu + 1, iv, seed);
  const double c = lattice_noise(iu, iv + 1, seed);
  const double d = lattice_noise(iu + 1, iv + 1, seed);
  const double top = a + tu * (b - a);
  const double bot = c + tu * (d - c);
  return top + tv * (bot - top);
}

struct Rgb {
  double r, g, b;
};

constexpr Rgb kPalette[] = {
    {0.90, 0.45, 0.35}, {0.35, 0.85, 0.45}, {0.40, 0.50, 0.95},
    {0.90, 0.85, 0.35}, {0.80, 0.40, 0.85}, {0.40, 0.85, 0.85},
    {0.95, 0.65, 0.30}, {0.60, 0.60, 0.60},
};

Rgb texture_color(int texture, double u, double v, uint32_t seed) {
  if (texture < 0) return {0.5, 0.5, 0.5};
  const Rgb base = kPalette[texture % (sizeof(kPalette) / sizeof(kPalette[0]))];
  const uint32_t tseed = seed * 977u + static_cast<uint32_t>(texture) * 131u + 7u;
  // Checker at 12.5 cm cells plus two octaves of value noise.
  const int pu = static_cast<int>(std::floor(u * 8.0));
  const int pv = static_cast<int>(std::floor(v * 8.0));
  const double checker = ((pu + pv) & 1) ? 0.85 : 0.45;
  const double n1 = value_noise(u * 20.0, v * 20.0, tseed);
  const double n2 = value_noise(u * 67.0, v * 67.0, tseed + 1);
  const double lum = 0.45 * checker + 0.35 * n1 + 0.20 * n2;
  const double s = 0.25 + 0.75 * lum;
  return {base.r * s, base.g * s, base.b * s};
}

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Eigen::Vector3d normal_world;  // unnormalized orientation from primitive
  double u = 0, v = 0;
  int primitive = -1;
};

// Ray in world space; direction need not be unit length (t keeps the
// caller's parameterization).
bool intersect_primitive(const Primitive& prim, const Eigen::Vector3d& origin,
                         const Eigen::Vector3d& dir, Hit* hit) {
  const Eigen::Matrix3d Rt = prim.to_world.rotation.transpose();
  const Eigen::Vector3d o = Rt * (origin - prim.to_world.translation);
  const Eigen::Vector3d d = Rt * dir;
  constexpr double kMinT = 1e-9;

  switch (prim.kind) {
    case PrimitiveKind::Plane: {
      if (std::abs(d.z()) < 1e-15) return false;
      const double t = -o.z() / d.z();
      if (t <= kMinT || t >= hit->t) return false;
      const Eigen::Vector3d q = o + t * d;
      if (std::abs(q.x()) > prim.extent.x() || std::abs(q.y()) > prim.extent.y())
        return false;
      hit->t = t;
      hit->normal_world = prim.to_world.rotation * Eigen::Vector3d(0, 0, 1);
      hit->u = q.x();
      hit->v = q.y();
      return true;
    }
    case PrimitiveKind::Box: {
      double t0 = kMinT, t1 = hit->t;
      int axis0 = -1;
      for (int k = 0; k < 3; ++k) {
        const double e = prim.extent[k];
        if (std::abs(d[k]) < 1e-15) {
          if (std::abs(o[k]) > e) return false;
          continue;
        }
        double tn = (-e - o[k]) / d[k];
        double tf = (e - o[k]) / d[k];
        if (tn > tf) std::swap(tn, tf);
        if (tn > t0) {
          t0 = tn;
          axis0 = k;
        }
        t1 = std::min(t1, tf);
        if (t0 > t1) return false;
      }
      if (axis0 < 0) return false;  // origin inside; ignore exit face
      const Eigen::Vector3d q = o + t0 * d;
      Eigen::Vector3d n = Eigen::Vector3d::Zero();
      n[axis0] = q[axis0] > 0 ? 1.0 : -1.0;
      hit->t = t0;
      hit->normal_world = prim.to_world.rotation * n;
      // Face-local surface coordinates.
      const int ua = (axis0 + 1) % 3;
      const int va = (axis0 + 2) % 3;
      hit->u = q[ua] + 2.0 * prim.extent[ua] * axis0;  // offset per face pair
      hit->v = q[va] + (n[axis0] > 0 ? 0.0 : 2.0 * prim.extent[va]);
      return true;
    }
    case PrimitiveKind::Sphere: {
      const double r = prim.extent.x();
      const double a = d.squaredNorm();
      const double b = 2.0 * o.dot(d);
      const double c = o.squaredNorm() - r * r;
      const double disc = b * b - 4 * a * c;
      if (disc < 0) return false;
      const double sq = std::sqrt(disc);
      double t = (-b - sq) / (2 * a);
      if (t <= kMinT) t = (-b + sq) / (2 * a);
      if (t <= kMinT || t >= hit->t) return false;
      const Eigen::Vector3d q = o + t * d;
      hit->t = t;
      hit->normal_world = prim.to_world.rotation * (q / r);
      hit->u = r * std::atan2(q.y(), q.x());
      hit->v = r * std::acos(std::clamp(q.z() / r, -1.0, 1.0));
      return true;
    }
  }
  return false;
}

bool cast_ray(const Scene& scene, const Eigen::Vector3d& origin,
              const Eigen::Vector3d& dir, Hit* hit) {
  bool any = false;
  for (size_t i = 0; i < scene.primitives.size(); ++i) {
    if (intersect_primitive(scene.primitives[i], origin, dir, hit)) {
      hit->primitive = static_cast<int>(i);
      any = true;
    }
  }
  return any;
}

}  // namespace

RenderResult render(const Scene& scene, const CameraIntrinsics& K,
                    const Pose& world_to_camera) {
  K.validate();
  world_to_camera.validate();
  scene.validate();

  const int W = K.width;
  const int H = K.height;
  RenderResult out;
  out.color = Image(W, H, 3, 0.f);
  out.depth = DepthMap(W, H);
  out.normals = NormalMap(W, H);
  out.plane_masks = PlaneMaskSet(W, H);

  // Label the k-th plane primitive with k (1-based).
  std::vector<uint16_t> plane_label(scene.primitives.size(), 0);
  uint16_t next_label = 1;
  for (size_t i = 0; i < scene.primitives.size(); ++i)
    if (scene.primitives[i].kind == PrimitiveKind::Plane)
      plane_label[i] = next_label++;

  const Pose cam_to_world = world_to_camera.inverse();
  const Eigen::Vector3d center = cam_to_world.translation;
  const Eigen::Matrix3d Rcw = cam_to_world.rotation;

  parallel_for(0, H, [&](int y) {
    for (int x = 0; x < W; ++x) {
      // Unnormalized direction with camera z = 1, so the hit parameter is
      // the camera-frame depth.
      const Eigen::Vector3d dir_cam((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
      const Eigen::Vector3d dir_world = Rcw * dir_cam;
      Hit hit;
      if (!cast_ray(scene, center, dir_world, &hit)) continue;

      const Primitive& prim = scene.primitives[hit.primitive];
      out.depth.set(x, y, static_cast<float>(hit.t));
      Eigen::Vector3d n_cam = world_to_camera.rotation * hit.normal_world;
      if (n_cam.dot(dir_cam) > 0) n_cam = -n_cam;
      out.normals.set(x, y, n_cam.normalized().cast<float>());
      out.plane_masks.labels[out.plane_masks.idx(x, y)] =
          plane_label[hit.primitive];
      const Rgb c = texture_color(prim.texture, hit.u, hit.v, scene.seed);
      out.color.at(x, y, 0) = static_cast<float>(c.r);
      out.color.at(x, y, 1) = static_cast<float>(c.g);
      out.color.at(x, y, 2) = static_cast<float>(c.b);
    }
  });
  return out;
}

std::vector<uint8_t> visibility_ground_truth(const Scene& scene,
                                             const CameraIntrinsics& K,
                                             const Pose& ref_pose,
                                             const std::vector<Pose>& src_poses) {
  require(!src_poses.empty(), "visibility: need at least one source pose");
  const RenderResult ref = render(scene, K, ref_pose);
  const Pose ref_to_world = ref_pose.inverse();

  std::vector<uint8_t> occluded(static_cast<size_t>(K.width) * K.height, 0);
  std::vector<Eigen::Vector3d> src_centers;
  for (const auto& p : src_poses) src_centers.push_back(p.inverse().translation);

  parallel_for(0, K.height, [&](int y) {
    for (int x = 0; x < K.width; ++x) {
      if (!ref.depth.is_valid(x, y)) continue;
      const Eigen::Vector3d pw = ref_to_world.apply(
          backproject({double(x), double(y)}, ref.depth.at(x, y), K));
      bool visible_somewhere = false;
      for (size_t s = 0; s < src_poses.size(); ++s) {
        const PixelProjection proj = project(pw, K, src_poses[s]);
        if (!proj.in_front || proj.pixel.x() < 0 || proj.pixel.y() < 0 ||
            proj.pixel.x() > K.width - 1 || proj.pixel.y() > K.height - 1)
          continue;
        const Eigen::Vector3d seg = pw - src_centers[s];
        const double dist = seg.norm();
        Hit hit;
        hit.t = dist;  // unit direction: t measures meters
        const bool blocked =
            cast_ray(scene, src_centers[s], seg / dist, &hit) &&
            hit.t < dist - 1e-6;
        if (!blocked) {
          visible_somewhere = true;
          break;
        }
      }
      if (!visible_somewhere)
        occluded[static_cast<size_t>(y) * K.width + x] = 1;
    }
  });
  return occluded;
}

void add_intensity_noise(Image& image, double sigma, uint32_t seed) {
  if (sigma <= 0) return;
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (auto& v : image.data)
    v = static_cast<float>(std::clamp(static_cast<double>(v) + gauss(rng), 0.0, 1.0));
}

Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
             const Eigen::Vector3d& up) {
  const Eigen::Vector3d z = (target - eye).normalized();
  Eigen::Vector3d y = -up;
  Eigen::Vector3d x = y.cross(z);
  require(x.norm() > 1e-12, "look_at: view direction parallel to up");
  x.normalize();
  y = z.cross(x);
  Eigen::Matrix3d cam_to_world;
  cam_to_world.col(0) = x;
  cam_to_world.col(1) = y;
  cam_to_world.col(2) = z;
  Pose pose;
  pose.rotation = cam_to_world.transpose();
  pose.translation = -(pose.rotation * eye);
  return pose;
}

Eigen::Matrix3d euler_deg(double rx, double ry, double rz) {
  const double d2r = std::numbers::pi / 180.0;
  return (Eigen::AngleAxisd(rz * d2r, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(ry * d2r, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rx * d2r, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Scene scene_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("scene json: ") + e.what());
  }
  Scene scene;
  scene.seed = j.value("seed", 1u);
  if (!j.contains("primitives") || !j["primitives"].is_array())
    throw DataError("scene json: missing primitives array");
  for (const auto& p : j["primitives"]) {
    Primitive prim;
    const std::string type = p.value("type", "plane");
    if (type == "plane") prim.kind = PrimitiveKind::Plane;
    else if (type == "box") prim.kind = PrimitiveKind::Box;
    else if (type == "sphere") prim.kind = PrimitiveKind::Sphere;
    else throw DataError("scene json: unknown primitive type " + type);

    if (p.contains("center")) {
      const auto& c = p["center"];
      prim.to_world.translation = Eigen::Vector3d(
          c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>());
    }
    if (p.contains("rpy_deg")) {
      const auto& r = p["rpy_deg"];
      prim.to_world.rotation =
          euler_deg(r.at(0).get<double>(), r.at(1).get<double>(),
                    r.at(2).get<double>());
    }
    if (prim.kind == PrimitiveKind::Sphere) {
      prim.extent.x() = p.value("radius", 1.0);
    } else if (p.contains("extent")) {
      const auto& e = p["extent"];
      prim.extent.x() = e.at(0).get<double>();
      prim.extent.y() = e.at(1).get<double>();
      prim.extent.z() = e.size() > 2 ? e.at(2).get<double>() : 0.0;
    }
    prim.texture = p.value("texture", 0);
    scene.primitives.push_back(prim);
  }
  scene.validate();
  return scene;
}

namespace scenes {

Scene fronto_plane(double depth, double half_size, int texture) {
  Scene s;
  Primitive p;
  p.kind = PrimitiveKind::Plane;
  p.to_world.translation = {0, 0, depth};
  p.extent = {half_size, half_size, 0};
  p.texture = texture;
  s.primitives.push_back(p);
  return s;
}

Scene slanted_plane(double depth, double slope_x, double slope_y,
                    double half_size, int texture) {
  // z = depth + slope_x * X + slope_y * Y has plane normal
  // (slope_x, slope_y, -1) / norm; build the local frame from it.
  Scene s;
  Primitive p;
  p.kind = PrimitiveKind::Plane;
  Eigen::Vector3d n(slope_x, slope_y, -1.0);
  n.normalize();
  Eigen::Vector3d u = n.cross(Eigen::Vector3d::UnitY());
  if (u.norm() < 1e-9) u = n.cross(Eigen::Vector3d::UnitX());
  u.normalize();
  const Eigen::Vector3d v = n.cross(u);
  p.to_world.rotation.col(0) = u;
  p.to_world.rotation.col(1) = v;
  p.to_world.rotation.col(2) = n;
  p.to_world.translation = {0, 0, depth};
  p.extent = {half_size, half_size, 0};
  p.texture = texture;
  s.primitives.push_back(p);
  return s;
}

Scene sphere(const Eigen::Vector3d& center, double radius, int texture) {
  Scene s;
  Primitive p;
  p.kind = PrimitiveKind::Sphere;
  p.to_world.translation = center;
  p.extent = {radius, radius, radius};
  p.texture = texture;
  s.primitives.push_back(p);
  return s;
}

Scene two_boxes() {
  Scene s;
  s.seed = 7;
  Primitive wall;
  wall.kind = PrimitiveKind::Plane;
  wall.to_world.translation = {0, 0, 4.0};
  wall.extent = {6, 5, 0};
  wall.texture = 0;
  s.primitives.push_back(wall);

  Primitive near_box;
  near_box.kind = PrimitiveKind::Box;
  near_box.to_world.translation = {-0.35, 0.05, 2.0};
  near_box.extent = {0.45, 0.55, 0.25};
  near_box.texture = 1;
  s.primitives.push_back(near_box);

  Primitive far_box;
  far_box.kind = PrimitiveKind::Box;
  far_box.to_world.translation = {0.75, -0.15, 3.1};
  far_box.extent = {0.5, 0.45, 0.2};
  far_box.texture = 2;
  s.primitives.push_back(far_box);
  return s;
}

Scene textured_room() {
  Scene s;
  s.seed = 11;
  Primitive back;
  back.kind = PrimitiveKind::Plane;
  back.to_world.translation = {0, 0, 4.0};
  back.extent = {5, 4, 0};
  back.texture = 0;
  s.primitives.push_back(back);

  Primitive floor;
  floor.kind = PrimitiveKind::Plane;
  floor.to_world.rotation = euler_deg(-90, 0, 0);
  floor.to_world.translation = {0, 1.1, 2.5};
  floor.extent = {5, 3, 0};
  floor.texture = 3;
  s.primitives.push_back(floor);

  Primitive left;
  left.kind = PrimitiveKind::Plane;
  left.to_world.rotation = euler_deg(0, 75, 0);
  left.to_world.translation = {-1.9, 0, 2.6};
  left.extent = {3, 4, 0};
  left.texture = 5;
  s.primitives.push_back(left);

  Primitive box;
  box.kind = PrimitiveKind::Box;
  box.to_world.rotation = euler_deg(0, 25, 0);
  box.to_world.translation = {0.5, 0.62, 2.6};
  box.extent = {0.4, 0.45, 0.35};
  box.texture = 1;
  s.primitives.push_back(box);
  return s;
}

}  // namespace scenes

}  // namespace mvd
