#include "mvdepth/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "mvdepth/image_io.hpp"
#include "mvdepth/mesh_io.hpp"
#include "mvdepth/synth.hpp"

namespace fs = std::filesystem;

namespace mvd {

void FusionConfig::validate() const {
  require(voxel_size > 0, "fusion: voxel size must be positive");
  require(trunc >= 2.0 * voxel_size, "fusion: trunc must be at least two voxels");
  require(min_weight >= 0, "fusion: min_weight must be >= 0");
  require(dims[0] > 0 && dims[1] > 0 && dims[2] > 0,
          "fusion: grid dims must be positive");
}

void PipelineConfig::validate() const {
  if (frame_interval < 1) throw ConfigError("frame_interval must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1 source view");
  sampling.validate();
  if (agg_radius < 0) throw ConfigError("agg_radius must be >= 0");
  if (agg_sigma <= 0) throw ConfigError("agg_sigma must be positive");
  if (normal_radius < 1) throw ConfigError("normal_radius must be >= 1");
  loss.validate();
  refine.validate();
  fusion.validate();
}

PipelineConfig PipelineConfig::from_key_values(const KeyValueConfig& kv) {
  PipelineConfig c;
  c.frame_interval = kv.get("interval", c.frame_interval);
  c.window = kv.get("window", c.window);
  const std::string ref = kv.get("reference", std::string("middle"));
  if (ref == "middle") c.reference = ReferenceChoice::Middle;
  else if (ref == "last") c.reference = ReferenceChoice::Last;
  else throw ConfigError("reference must be 'middle' or 'last'");

  c.sampling.d_min = kv.get("d_min", c.sampling.d_min);
  c.sampling.d_max = kv.get("d_max", c.sampling.d_max);
  c.sampling.count = kv.get("planes", c.sampling.count);
  c.agg_radius = kv.get("agg_radius", c.agg_radius);
  c.agg_sigma = kv.get("agg_sigma", c.agg_sigma);
  c.normal_radius = kv.get("normal_radius", c.normal_radius);

  c.loss.lambda = kv.get("lambda", c.loss.lambda);
  c.loss.alpha = kv.get("alpha", c.loss.alpha);
  c.loss.beta = kv.get("beta", c.loss.beta);

  c.refine.tau_rel = kv.get("tau_rel", c.refine.tau_rel);
  c.refine.kappa = kv.get("kappa", c.refine.kappa);
  c.refine.occluded_threshold =
      kv.get("occluded_threshold", c.refine.occluded_threshold);
  const std::string mode = kv.get("mode", std::string("argmin"));
  if (mode == "argmin") c.refine.extraction.mode = ExtractionMode::Argmin;
  else if (mode == "soft") c.refine.extraction.mode = ExtractionMode::SoftArgmin;
  else throw ConfigError("mode must be 'argmin' or 'soft'");
  c.refine.extraction.softness =
      kv.get("softness", c.refine.extraction.softness);
  c.refine.extraction.subplane = kv.get("subplane", c.refine.extraction.subplane);

  c.fusion.voxel_size = kv.get("voxel_size", c.fusion.voxel_size);
  c.fusion.trunc = kv.get("trunc", c.fusion.trunc);
  c.fusion.min_weight = kv.get("min_weight", c.fusion.min_weight);
  c.fusion.dims[0] = kv.get("grid_x", c.fusion.dims[0]);
  c.fusion.dims[1] = kv.get("grid_y", c.fusion.dims[1]);
  c.fusion.dims[2] = kv.get("grid_z", c.fusion.dims[2]);
  c.fusion.origin.x() = kv.get("origin_x", c.fusion.origin.x());
  c.fusion.origin.y() = kv.get("origin_y", c.fusion.origin.y());
  c.fusion.origin.z() = kv.get("origin_z", c.fusion.origin.z());
  c.fusion.use_occlusion = kv.get("use_occlusion_weights", c.fusion.use_occlusion);

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::vector<int> window_offsets(int n_sources, ReferenceChoice reference) {
  std::vector<int> offsets;
  offsets.reserve(static_cast<size_t>(n_sources));
  if (reference == ReferenceChoice::Last) {
    for (int k = 1; k <= n_sources; ++k) offsets.push_back(-k);
  } else {
    for (int k = 1; k <= n_sources; ++k) {
      const int step = (k + 1) / 2;
      offsets.push_back(k % 2 == 1 ? -step : step);
    }
  }
  return offsets;
}

WindowResult run_window(const FrameInput& reference,
                        const std::vector<FrameInput>& sources,
                        const CameraIntrinsics& K, const PipelineConfig& config,
                        const DepthMap* gt_depth,
                        const PlaneMaskSet* plane_masks) {
  config.validate();
  require(!sources.empty(), "run_window: need at least one source view");

  WindowResult out;
  std::vector<CostVolume> aggregated;
  aggregated.reserve(sources.size());
  for (const auto& src : sources) {
    const Pose rel = relative_pose(reference.world_to_camera, src.world_to_camera);
    const CostVolume raw =
        build_cost_volume(reference.image, src.image, K, rel, config.sampling);
    aggregated.push_back(aggregate_cost_volume(raw, reference.image,
                                               config.agg_radius,
                                               config.agg_sigma));
    out.per_pair.push_back(
        extract_depth(aggregated.back(), config.refine.extraction));
  }
  out.avg_volume = average_cost_volumes(aggregated);

  if (sources.size() >= 2) {
    out.occlusion =
        occlusion_probability(out.per_pair, out.avg_volume, config.refine);
    out.d_fin =
        refine_depth(out.per_pair, out.avg_volume, out.occlusion, config.refine);
  } else {
    // Single pair: no cross-view evidence; the refined depth is the pair
    // depth and the occlusion map stays invalid.
    out.occlusion = OcclusionMap(K.width, K.height);
    out.d_fin = out.per_pair.front();
  }

  if (gt_depth) {
    nlohmann::json j;
    j["d_fin"] = nlohmann::json::parse(
        depth_metrics_json(depth_metrics(out.d_fin, *gt_depth)));
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& d : out.per_pair)
      pairs.push_back(
          nlohmann::json::parse(depth_metrics_json(depth_metrics(d, *gt_depth))));
    j["pairs"] = pairs;
    if (plane_masks) {
      const NormalMap gt_local =
          normals_from_depth(*gt_depth, K, config.normal_radius);
      const NormalMap gt_cnm = build_cnm(gt_local, *plane_masks);
      const NormalMap pred =
          normals_from_depth(out.d_fin, K, config.normal_radius);
      j["normal"] = nlohmann::json::parse(
          normal_metrics_json(normal_metrics(pred, gt_cnm)));
    }
    out.metrics_json = j.dump();
  }
  return out;
}

namespace {

std::string frame_name(int frame_id, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%06d%s", frame_id, suffix);
  return buf;
}

nlohmann::json aggregate_depth_metrics(const std::vector<nlohmann::json>& records) {
  nlohmann::json mean;
  if (records.empty()) return mean;
  for (const auto& [key, value] : records.front().items()) {
    double sum = 0;
    for (const auto& r : records) sum += r.at(key).get<double>();
    mean[key] = sum / static_cast<double>(records.size());
  }
  return mean;
}

}  // namespace

SequenceResult run_sequence(const Dataset& dataset, const PipelineConfig& config,
                            const std::string& out_dir) {
  config.validate();
  const size_t voxels = static_cast<size_t>(config.fusion.dims[0]) *
                        config.fusion.dims[1] * config.fusion.dims[2];
  if (voxels > config.fusion.max_voxels)
    throw ConfigError("fusion grid exceeds the volume memory bound");

  const auto offsets = window_offsets(config.window, config.reference);
  const int n_frames = static_cast<int>(dataset.frame_ids.size());

  // Reference positions stride the color sequence by the frame interval;
  // windows whose sources would leave the sequence are skipped.
  std::vector<std::pair<int, std::vector<int>>> windows;  // ref pos, src pos
  int skipped = 0;
  for (int pos = 0; pos < n_frames; pos += config.frame_interval) {
    std::vector<int> src_pos;
    bool ok = true;
    for (const int off : offsets) {
      const int p = pos + off * config.frame_interval;
      if (p < 0 || p >= n_frames) {
        ok = false;
        break;
      }
      src_pos.push_back(p);
    }
    if (!ok) {
      ++skipped;
      continue;
    }
    windows.emplace_back(pos, std::move(src_pos));
  }
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/depth");
  fs::create_directories(out_dir + "/occlusion");
  fs::create_directories(out_dir + "/initial");

  TsdfVolume volume(config.fusion.origin, config.fusion.voxel_size,
                    config.fusion.dims);
  SequenceResult result;
  result.windows_skipped = skipped;

  const auto load_frame = [&](int pos) {
    FrameInput f;
    f.frame_id = dataset.frame_ids[static_cast<size_t>(pos)];
    const TrajectoryEntry* entry = dataset.find_frame(f.frame_id);
    if (!entry)
      throw ConfigError("missing pose for frame " + std::to_string(f.frame_id));
    f.image = dataset.load_color(f.frame_id);
    f.world_to_camera = entry->world_to_camera;
    return f;
  };

  std::vector<nlohmann::json> window_records;
  std::vector<nlohmann::json> dfin_records;
  for (const auto& [ref_pos, src_pos] : windows) {
    const FrameInput ref = load_frame(ref_pos);
    std::vector<FrameInput> sources;
    for (const int p : src_pos) sources.push_back(load_frame(p));

    DepthMap gt;
    PlaneMaskSet masks;
    const DepthMap* gt_ptr = nullptr;
    const PlaneMaskSet* mask_ptr = nullptr;
    if (dataset.has_gt_depth && fs::exists(dataset.depth_path(ref.frame_id))) {
      gt = dataset.load_gt_depth(ref.frame_id);
      gt_ptr = &gt;
      if (dataset.has_plane_masks &&
          fs::exists(dataset.planes_path(ref.frame_id))) {
        masks = dataset.load_plane_masks(ref.frame_id);
        mask_ptr = &masks;
      }
    }

    const WindowResult w =
        run_window(ref, sources, dataset.intrinsics, config, gt_ptr, mask_ptr);

    write_depth_pfm(out_dir + "/depth/" + frame_name(ref.frame_id, ".pfm"),
                    w.d_fin);
    write_occlusion_pfm(
        out_dir + "/occlusion/" + frame_name(ref.frame_id, ".pfm"), w.occlusion);
    write_occlusion_png(
        out_dir + "/occlusion/" + frame_name(ref.frame_id, ".png"), w.occlusion);
    for (size_t k = 0; k < w.per_pair.size(); ++k) {
      const std::string suffix = "_" + std::to_string(k) + ".pfm";
      write_depth_pfm(
          out_dir + "/initial/" + frame_name(ref.frame_id, suffix.c_str()),
          w.per_pair[k]);
    }

    integrate(volume, w.d_fin, ref.image,
              config.fusion.use_occlusion ? &w.occlusion : nullptr,
              dataset.intrinsics, ref.world_to_camera, config.fusion.trunc);

    nlohmann::json record;
    record["frame"] = ref.frame_id;
    if (!w.metrics_json.empty()) {
      record["metrics"] = nlohmann::json::parse(w.metrics_json);
      dfin_records.push_back(record["metrics"]["d_fin"]);
    }
    window_records.push_back(std::move(record));
    ++result.windows_run;
  }

  result.mesh = extract_mesh(volume, config.fusion.min_weight);
  result.edge_stats = mesh_edge_stats(result.mesh);
  write_ply(out_dir + "/mesh.ply", result.mesh);

  nlohmann::json summary;
  summary["windows"] = window_records;
  summary["windows_run"] = result.windows_run;
  summary["windows_skipped"] = result.windows_skipped;
  summary["mesh"] = {{"vertices", result.mesh.vertices.size()},
                     {"triangles", result.mesh.triangles.size()},
                     {"boundary_edges", result.edge_stats.boundary_edges},
                     {"nonmanifold_edges", result.edge_stats.nonmanifold_edges}};
  if (!dfin_records.empty())
    summary["mean_d_fin"] = aggregate_depth_metrics(dfin_records);
  result.metrics_json = summary.dump(2);

  std::ofstream(out_dir + "/metrics.json") << result.metrics_json << "\n";
  if (!dfin_records.empty()) {
    DepthMetrics mean;
    const auto& j = summary["mean_d_fin"];
    mean.delta1 = j["delta1"];
    mean.delta2 = j["delta2"];
    mean.delta3 = j["delta3"];
    mean.abs_rel = j["abs_rel"];
    mean.sq_rel = j["sq_rel"];
    mean.rmse = j["rmse"];
    mean.rmse_log = j["rmse_log"];
    mean.scale_inv = j["scale_inv"];
    std::ofstream(out_dir + "/metrics.txt") << depth_metrics_table(mean);
  }
  return result;
}

void generate_synth_dataset(const std::string& scene_json_path,
                            const std::string& out_dir) {
  std::ifstream in(scene_json_path);
  if (!in) throw DataError("cannot open " + scene_json_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("scene json: ") + e.what());
  }
  const Scene scene = scene_from_json(text);

  if (!j.contains("camera")) throw DataError("scene json: missing camera");
  const auto& c = j["camera"];
  const CameraIntrinsics K(c.at("fx"), c.at("fy"), c.at("cx"), c.at("cy"),
                           c.at("width"), c.at("height"));

  struct Frame {
    Eigen::Vector3d eye, lookat;
  };
  std::vector<Frame> frames;
  const auto vec3 = [](const nlohmann::json& a) {
    return Eigen::Vector3d(a.at(0).get<double>(), a.at(1).get<double>(),
                           a.at(2).get<double>());
  };
  if (j.contains("frames")) {
    for (const auto& f : j["frames"])
      frames.push_back({vec3(f.at("eye")), vec3(f.at("lookat"))});
  } else if (j.contains("path")) {
    const auto& p = j["path"];
    const int n = p.at("frames");
    if (n < 1) throw DataError("scene json: path.frames must be >= 1");
    const Eigen::Vector3d a = vec3(p.at("from"));
    const Eigen::Vector3d b = vec3(p.at("to"));
    const Eigen::Vector3d l = vec3(p.at("lookat"));
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      frames.push_back({a + t * (b - a), l});
    }
  } else {
    throw DataError("scene json: need either frames or path");
  }
  const double noise_sigma = j.value("noise_sigma", 0.0);

  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/color");
  fs::create_directories(out_dir + "/depth");
  fs::create_directories(out_dir + "/planes");
  write_intrinsics(out_dir + "/intrinsics.txt", K);

  std::vector<TrajectoryEntry> trajectory;
  for (size_t i = 0; i < frames.size(); ++i) {
    const Pose pose = look_at(frames[i].eye, frames[i].lookat);
    RenderResult r = render(scene, K, pose);
    if (noise_sigma > 0)
      add_intensity_noise(r.color, noise_sigma,
                          scene.seed * 1000u + static_cast<uint32_t>(i));
    const int id = static_cast<int>(i);
    write_png(out_dir + "/color/" + frame_name(id, ".png"), r.color, 8);
    write_depth_pfm(out_dir + "/depth/" + frame_name(id, ".pfm"), r.depth);
    write_label_png(out_dir + "/planes/" + frame_name(id, ".png"), r.plane_masks);
    TrajectoryEntry e;
    e.frame_id = id;
    e.fx = K.fx;
    e.fy = K.fy;
    e.cx = K.cx;
    e.cy = K.cy;
    e.world_to_camera = pose;
    trajectory.push_back(e);
  }
  write_trajectory(out_dir + "/trajectory.txt", trajectory);
}

}  // namespace mvd
