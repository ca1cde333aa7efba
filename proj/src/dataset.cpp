#include "mvdepth/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mvdepth/image_io.hpp"

namespace fs = std::filesystem;

namespace mvd {

std::vector<TrajectoryEntry> read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<TrajectoryEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    TrajectoryEntry e;
    double r[9], t[3];
    if (!(ss >> e.frame_id >> e.fx >> e.fy >> e.cx >> e.cy >> r[0] >> r[1] >>
          r[2] >> r[3] >> r[4] >> r[5] >> r[6] >> r[7] >> r[8] >> t[0] >> t[1] >>
          t[2]))
      throw DataError(path + ": malformed trajectory line " +
                      std::to_string(lineno));
    e.world_to_camera.rotation << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7],
        r[8];
    e.world_to_camera.translation = {t[0], t[1], t[2]};
    e.world_to_camera.validate();
    entries.push_back(e);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.frame_id < b.frame_id; });
  return entries;
}

void write_trajectory(const std::string& path,
                      const std::vector<TrajectoryEntry>& entries) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot open " + path);
  for (const auto& e : entries) {
    const auto& R = e.world_to_camera.rotation;
    const auto& t = e.world_to_camera.translation;
    std::fprintf(f, "%d %.17g %.17g %.17g %.17g", e.frame_id, e.fx, e.fy, e.cx,
                 e.cy);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) std::fprintf(f, " %.17g", R(r, c));
    std::fprintf(f, " %.17g %.17g %.17g\n", t.x(), t.y(), t.z());
  }
  std::fclose(f);
}

CameraIntrinsics read_intrinsics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  double fx, fy, cx, cy;
  int w, h;
  if (!(in >> fx >> fy >> cx >> cy >> w >> h))
    throw DataError("malformed intrinsics file " + path);
  return CameraIntrinsics(fx, fy, cx, cy, w, h);
}

void write_intrinsics(const std::string& path, const CameraIntrinsics& K) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot open " + path);
  std::fprintf(f, "%.17g %.17g %.17g %.17g %d %d\n", K.fx, K.fy, K.cx, K.cy,
               K.width, K.height);
  std::fclose(f);
}

namespace {
std::string frame_file(const std::string& dir, int frame_id, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d%s", frame_id, ext);
  return dir + "/" + buf;
}
}  // namespace

const TrajectoryEntry* Dataset::find_frame(int frame_id) const {
  for (const auto& e : trajectory)
    if (e.frame_id == frame_id) return &e;
  return nullptr;
}

std::string Dataset::color_path(int frame_id) const {
  return frame_file(root + "/color", frame_id, ".png");
}
std::string Dataset::depth_path(int frame_id) const {
  return frame_file(root + "/depth", frame_id, ".pfm");
}
std::string Dataset::planes_path(int frame_id) const {
  return frame_file(root + "/planes", frame_id, ".png");
}

Image Dataset::load_color(int frame_id) const {
  return read_png(color_path(frame_id));
}
DepthMap Dataset::load_gt_depth(int frame_id) const {
  return read_depth_pfm(depth_path(frame_id));
}
PlaneMaskSet Dataset::load_plane_masks(int frame_id) const {
  return read_label_png(planes_path(frame_id));
}

Dataset open_dataset(const std::string& root) {
  if (!fs::is_directory(root))
    throw ConfigError("dataset directory does not exist: " + root);
  Dataset ds;
  ds.root = root;
  const std::string traj = root + "/trajectory.txt";
  const std::string intr = root + "/intrinsics.txt";
  if (!fs::exists(traj) || !fs::exists(intr) || !fs::is_directory(root + "/color"))
    throw ConfigError("not a dataset directory (need color/, trajectory.txt, "
                      "intrinsics.txt): " +
                      root);
  ds.intrinsics = read_intrinsics(intr);
  ds.trajectory = read_trajectory(traj);
  if (ds.trajectory.empty())
    throw ConfigError("dataset has an empty trajectory: " + root);
  for (const auto& entry : fs::directory_iterator(root + "/color")) {
    const std::string name = entry.path().filename().string();
    if (name.size() < 5 || name.substr(name.size() - 4) != ".png") continue;
    try {
      ds.frame_ids.push_back(std::stoi(name.substr(0, name.size() - 4)));
    } catch (const std::exception&) {
      continue;  // unrelated file
    }
  }
  std::sort(ds.frame_ids.begin(), ds.frame_ids.end());
  if (ds.frame_ids.empty())
    throw ConfigError("dataset has no color frames: " + root);
  ds.has_gt_depth = fs::is_directory(root + "/depth");
  ds.has_plane_masks = fs::is_directory(root + "/planes");
  return ds;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

KeyValueConfig KeyValueConfig::from_text(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

std::string KeyValueConfig::get(const std::string& key,
                                const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: " + it->second);
  }
}

int KeyValueConfig::get(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not an integer: " + it->second);
  }
}

bool KeyValueConfig::get(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key " + key + ": not a boolean: " + it->second);
}

}  // namespace mvd
