// Command-line driver: plane-sweep depth, occlusion-aware refinement,
// evaluation and TSDF fusion over dataset directories.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvdepth/image_io.hpp"
#include "mvdepth/mesh_io.hpp"
#include "mvdepth/parallel.hpp"
#include "mvdepth/pipeline.hpp"
#include "mvdepth/synth.hpp"

namespace fs = std::filesystem;
using namespace mvd;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value pairs
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("--config", opts->config_path, "key = value config file");
  cmd->add_option("--set", opts->overrides,
                  "config override, key=value (repeatable)");
  cmd->add_option("--threads", opts->threads, "worker threads (0 = auto)");
}

PipelineConfig resolve_config(const CommonOptions& opts) {
  KeyValueConfig kv;
  if (!opts.config_path.empty()) kv = KeyValueConfig::from_file(opts.config_path);
  for (const auto& kvpair : opts.overrides) {
    const auto eq = kvpair.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got: " + kvpair);
    kv.set(kvpair.substr(0, eq), kvpair.substr(eq + 1));
  }
  set_thread_count(opts.threads);
  return PipelineConfig::from_key_values(kv);
}

// Loads a window around the reference position of the sampled sequence.
struct LoadedWindow {
  FrameInput reference;
  std::vector<FrameInput> sources;
  DepthMap gt;
  PlaneMaskSet masks;
  bool has_gt = false;
  bool has_masks = false;
};

LoadedWindow load_window(const Dataset& ds, const PipelineConfig& cfg,
                         int ref_pos) {
  const int n = static_cast<int>(ds.frame_ids.size());
  if (ref_pos < 0 || ref_pos >= n)
    throw ConfigError("reference position out of range");
  LoadedWindow w;
  const auto load = [&](int pos) {
    FrameInput f;
    f.frame_id = ds.frame_ids[static_cast<size_t>(pos)];
    const TrajectoryEntry* e = ds.find_frame(f.frame_id);
    if (!e)
      throw ConfigError("missing pose for frame " + std::to_string(f.frame_id));
    f.image = ds.load_color(f.frame_id);
    f.world_to_camera = e->world_to_camera;
    return f;
  };
  w.reference = load(ref_pos);
  for (const int off : window_offsets(cfg.window, cfg.reference)) {
    const int p = ref_pos + off * cfg.frame_interval;
    if (p < 0 || p >= n)
      throw ConfigError("window leaves the sequence at reference position " +
                        std::to_string(ref_pos));
    w.sources.push_back(load(p));
  }
  if (ds.has_gt_depth && fs::exists(ds.depth_path(w.reference.frame_id))) {
    w.gt = ds.load_gt_depth(w.reference.frame_id);
    w.has_gt = true;
    if (ds.has_plane_masks && fs::exists(ds.planes_path(w.reference.frame_id))) {
      w.masks = ds.load_plane_masks(w.reference.frame_id);
      w.has_masks = true;
    }
  }
  return w;
}

std::string frame_path(const std::string& dir, int id, const std::string& suffix) {
  char name[16];
  std::snprintf(name, sizeof(name), "%06d", id);
  return dir + "/" + name + suffix;
}

void write_window_outputs(const WindowResult& w, const std::string& out_dir,
                          int frame_id) {
  fs::create_directories(out_dir);
  write_depth_pfm(frame_path(out_dir, frame_id, "_fin.pfm"), w.d_fin);
  write_occlusion_pfm(frame_path(out_dir, frame_id, "_occ.pfm"), w.occlusion);
  write_occlusion_png(frame_path(out_dir, frame_id, "_occ.png"), w.occlusion);
  for (size_t k = 0; k < w.per_pair.size(); ++k)
    write_depth_pfm(
        frame_path(out_dir, frame_id, "_pair" + std::to_string(k) + ".pfm"),
        w.per_pair[k]);
  if (!w.metrics_json.empty())
    std::ofstream(frame_path(out_dir, frame_id, "_metrics.json"))
        << w.metrics_json << "\n";
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Multi-view plane-sweep depth estimation toolkit"};
  app.require_subcommand(1);

  CommonOptions opts;

  // synth
  auto* synth = app.add_subcommand("synth", "render a scene JSON to a dataset");
  std::string scene_path, synth_out;
  synth->add_option("scene", scene_path, "scene JSON file")->required();
  synth->add_option("-o,--out", synth_out, "output dataset directory")->required();

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "per-pair cost volumes and initial depths for one window");
  std::string dataset_dir, out_dir;
  int ref_pos = 0;
  bool dump_volumes = false;
  sweep->add_option("dataset", dataset_dir, "dataset directory")->required();
  sweep->add_option("-o,--out", out_dir, "output directory")->required();
  sweep->add_option("--ref", ref_pos, "reference position in the sampled sequence");
  sweep->add_flag("--dump-volumes", dump_volumes, "write aggregated volumes");
  add_common(sweep, &opts);

  // refine
  auto* refine = app.add_subcommand(
      "refine", "full window: sweep, average, occlusion, refined depth");
  refine->add_option("dataset", dataset_dir, "dataset directory")->required();
  refine->add_option("-o,--out", out_dir, "output directory")->required();
  refine->add_option("--ref", ref_pos, "reference position in the sampled sequence");
  add_common(refine, &opts);

  // cnm
  auto* cnm = app.add_subcommand(
      "cnm", "normals from a depth PFM, combined over plane masks");
  std::string depth_path, masks_path, cnm_out;
  cnm->add_option("depth", depth_path, "depth PFM")->required();
  cnm->add_option("-m,--masks", masks_path, "plane label PNG");
  cnm->add_option("-o,--out", cnm_out, "output prefix")->required();
  add_common(cnm, &opts);

  // eval
  auto* eval = app.add_subcommand("eval", "depth (and normal) metrics");
  std::string pred_path, gt_path, eval_json;
  std::string pred_normals_path, gt_normals_path;
  eval->add_option("pred", pred_path, "predicted depth PFM")->required();
  eval->add_option("gt", gt_path, "ground-truth depth PFM")->required();
  eval->add_option("--pred-normals", pred_normals_path, "predicted normals PFM");
  eval->add_option("--gt-normals", gt_normals_path, "ground-truth normals PFM");
  eval->add_option("--json-out", eval_json, "write metrics JSON here too");
  add_common(eval, &opts);

  // fuse
  auto* fuse = app.add_subcommand(
      "fuse", "integrate depth maps from a finished run into a mesh");
  std::string run_dir, mesh_out;
  bool no_occ = false;
  fuse->add_option("dataset", dataset_dir, "dataset directory")->required();
  fuse->add_option("run", run_dir, "directory with depth/ and occlusion/ outputs")
      ->required();
  fuse->add_option("-o,--out", mesh_out, "output mesh PLY")->required();
  fuse->add_flag("--no-occlusion", no_occ, "ignore occlusion weights");
  add_common(fuse, &opts);

  // run
  auto* run = app.add_subcommand("run", "window the sequence, refine, fuse");
  run->add_option("dataset", dataset_dir, "dataset directory")->required();
  run->add_option("-o,--out", out_dir, "output directory")->required();
  add_common(run, &opts);

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    generate_synth_dataset(scene_path, synth_out);
    std::cout << "dataset written to " << synth_out << "\n";
    return 0;
  }

  if (sweep->parsed() || refine->parsed()) {
    const PipelineConfig cfg = resolve_config(opts);
    const Dataset ds = open_dataset(dataset_dir);
    const LoadedWindow w = load_window(ds, cfg, ref_pos);
    const WindowResult result =
        run_window(w.reference, w.sources, ds.intrinsics, cfg,
                   w.has_gt ? &w.gt : nullptr, w.has_masks ? &w.masks : nullptr);
    write_window_outputs(result, out_dir, w.reference.frame_id);
    if (sweep->parsed() && dump_volumes)
      write_cost_volume(frame_path(out_dir, w.reference.frame_id, "_avg_volume.bin"),
                        result.avg_volume);
    if (!result.metrics_json.empty()) std::cout << result.metrics_json << "\n";
    return 0;
  }

  if (cnm->parsed()) {
    resolve_config(opts);
    const DepthMap depth = read_depth_pfm(depth_path);
    KeyValueConfig kv;
    if (!opts.config_path.empty()) kv = KeyValueConfig::from_file(opts.config_path);
    // Intrinsics are needed to backproject; look for them next to the depth.
    const fs::path parent = fs::path(depth_path).parent_path().parent_path();
    const std::string intr = (parent / "intrinsics.txt").string();
    if (!fs::exists(intr))
      throw ConfigError("cnm: expected intrinsics.txt two levels above the depth");
    const CameraIntrinsics K = read_intrinsics(intr);
    const int radius = kv.get("normal_radius", 2);
    const NormalMap local = normals_from_depth(depth, K, radius);
    NormalMap result = local;
    if (!masks_path.empty()) {
      const PlaneMaskSet masks = read_label_png(masks_path);
      result = build_cnm(local, masks);
    }
    write_normals_pfm(cnm_out + ".pfm", result);
    write_normals_png(cnm_out + ".png", result);
    return 0;
  }

  if (eval->parsed()) {
    resolve_config(opts);
    const DepthMap pred = read_depth_pfm(pred_path);
    const DepthMap gt = read_depth_pfm(gt_path);
    const DepthMetrics dm = depth_metrics(pred, gt);
    nlohmann::json j;
    j["depth"] = nlohmann::json::parse(depth_metrics_json(dm));
    std::cout << depth_metrics_table(dm);
    if (!pred_normals_path.empty() && !gt_normals_path.empty()) {
      const NormalMap pn = read_normals_pfm(pred_normals_path);
      const NormalMap gn = read_normals_pfm(gt_normals_path);
      const NormalMetrics nm = normal_metrics(pn, gn);
      j["normal"] = nlohmann::json::parse(normal_metrics_json(nm));
      std::cout << normal_metrics_table(nm);
    }
    std::cout << j.dump() << "\n";
    if (!eval_json.empty()) std::ofstream(eval_json) << j.dump(2) << "\n";
    return 0;
  }

  if (fuse->parsed()) {
    const PipelineConfig cfg = resolve_config(opts);
    const Dataset ds = open_dataset(dataset_dir);
    const size_t voxels = static_cast<size_t>(cfg.fusion.dims[0]) *
                          cfg.fusion.dims[1] * cfg.fusion.dims[2];
    if (voxels > cfg.fusion.max_voxels)
      throw ConfigError("fusion grid exceeds the volume memory bound");
    TsdfVolume volume(cfg.fusion.origin, cfg.fusion.voxel_size, cfg.fusion.dims);
    int fused = 0;
    for (const int id : ds.frame_ids) {
      const std::string depth_file = frame_path(run_dir + "/depth", id, ".pfm");
      if (!fs::exists(depth_file)) continue;
      const DepthMap depth = read_depth_pfm(depth_file);
      const TrajectoryEntry* e = ds.find_frame(id);
      if (!e) throw ConfigError("missing pose for frame " + std::to_string(id));
      const Image color = ds.load_color(id);
      OcclusionMap occ;
      bool has_occ = false;
      const std::string occ_file = frame_path(run_dir + "/occlusion", id, ".pfm");
      if (!no_occ && cfg.fusion.use_occlusion && fs::exists(occ_file)) {
        occ = read_occlusion_pfm(occ_file);
        has_occ = true;
      }
      integrate(volume, depth, color, has_occ ? &occ : nullptr, ds.intrinsics,
                e->world_to_camera, cfg.fusion.trunc);
      ++fused;
    }
    if (fused == 0) throw ConfigError("fuse: no depth maps found in " + run_dir);
    const TriangleMesh mesh = extract_mesh(volume, cfg.fusion.min_weight);
    write_ply(mesh_out, mesh);
    const MeshEdgeStats stats = mesh_edge_stats(mesh);
    nlohmann::json j{{"frames_fused", fused},
                     {"vertices", mesh.vertices.size()},
                     {"triangles", mesh.triangles.size()},
                     {"boundary_edges", stats.boundary_edges},
                     {"nonmanifold_edges", stats.nonmanifold_edges}};
    std::cout << j.dump() << "\n";
    return 0;
  }

  if (run->parsed()) {
    const PipelineConfig cfg = resolve_config(opts);
    const Dataset ds = open_dataset(dataset_dir);
    const SequenceResult result = run_sequence(ds, cfg, out_dir);
    std::cout << result.metrics_json << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
