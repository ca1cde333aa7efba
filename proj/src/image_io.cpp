#include "mvdepth/image_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <png.h>

#include <json.hpp>

namespace mvd {

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw DataError("cannot open " + path);
  return f;
}

struct PngData {
  int width = 0, height = 0, channels = 0, bit_depth = 0;
  std::vector<uint16_t> pixels;  // interleaved, native values
};

PngData read_png_raw(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("failed to decode PNG " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
  png_read_update_info(png, info);

  PngData out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = static_cast<int>(png_get_channels(png, info));
  out.bit_depth = static_cast<int>(png_get_bit_depth(png, info));

  const size_t row_px = static_cast<size_t>(out.width) * out.channels;
  out.pixels.resize(row_px * out.height);
  std::vector<png_bytep> rows(out.height);
  std::vector<uint8_t> buf8;
  if (out.bit_depth == 16) {
    for (int y = 0; y < out.height; ++y)
      rows[y] = reinterpret_cast<png_bytep>(&out.pixels[row_px * y]);
  } else {
    buf8.resize(row_px * out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = &buf8[row_px * y];
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  if (out.bit_depth != 16)
    for (size_t i = 0; i < buf8.size(); ++i) out.pixels[i] = buf8[i];
  return out;
}

void write_png_raw(const std::string& path, int width, int height, int channels,
                   int bit_depth, const uint16_t* pixels) {
  FilePtr f = open_file(path, "wb");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("failed to encode PNG " + path);
  }
  png_init_io(png, f.get());
  const int color = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, width, height, bit_depth, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);

  const size_t row_px = static_cast<size_t>(width) * channels;
  if (bit_depth == 16) {
    std::vector<uint16_t> row(row_px);
    for (int y = 0; y < height; ++y) {
      std::memcpy(row.data(), pixels + row_px * y, row_px * sizeof(uint16_t));
      png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
    }
  } else {
    std::vector<uint8_t> row(row_px);
    for (int y = 0; y < height; ++y) {
      for (size_t i = 0; i < row_px; ++i)
        row[i] = static_cast<uint8_t>(pixels[row_px * y + i]);
      png_write_row(png, row.data());
    }
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Image read_png(const std::string& path) {
  const PngData raw = read_png_raw(path);
  Image img(raw.width, raw.height, raw.channels == 3 ? 3 : 1);
  const float scale = raw.bit_depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
  const size_t n = img.data.size();
  for (size_t i = 0; i < n; ++i) img.data[i] = raw.pixels[i] * scale;
  return img;
}

void write_png(const std::string& path, const Image& image, int bit_depth) {
  require(bit_depth == 8 || bit_depth == 16, "png: bit depth must be 8 or 16");
  require(image.channels == 1 || image.channels == 3,
          "png: 1 or 3 channels only");
  const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<uint16_t> pixels(image.data.size());
  for (size_t i = 0; i < image.data.size(); ++i) {
    const double v = std::clamp(static_cast<double>(image.data[i]), 0.0, 1.0);
    pixels[i] = static_cast<uint16_t>(std::lround(v * maxv));
  }
  write_png_raw(path, image.width, image.height, image.channels, bit_depth,
                pixels.data());
}

PlaneMaskSet read_label_png(const std::string& path) {
  const PngData raw = read_png_raw(path);
  if (raw.channels != 1) throw DataError("label PNG must be grayscale: " + path);
  PlaneMaskSet masks(raw.width, raw.height);
  masks.labels.assign(raw.pixels.begin(), raw.pixels.end());
  return masks;
}

void write_label_png(const std::string& path, const PlaneMaskSet& masks) {
  write_png_raw(path, masks.width, masks.height, 1, 16, masks.labels.data());
}

namespace {

void write_pfm(const std::string& path, int width, int height, int channels,
               const float* data) {
  FilePtr f = open_file(path, "wb");
  std::fprintf(f.get(), "%s\n%d %d\n-1.0\n", channels == 3 ? "PF" : "Pf", width,
               height);
  // PFM stores rows bottom-to-top.
  const size_t row_n = static_cast<size_t>(width) * channels;
  for (int y = height - 1; y >= 0; --y) {
    if (std::fwrite(data + row_n * y, sizeof(float), row_n, f.get()) != row_n)
      throw DataError("short write: " + path);
  }
}

struct PfmData {
  int width = 0, height = 0, channels = 1;
  std::vector<float> data;  // top-to-bottom rows
};

PfmData read_pfm(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  char tag[3] = {};
  if (std::fscanf(f.get(), "%2s", tag) != 1)
    throw DataError("bad PFM header: " + path);
  PfmData out;
  if (std::strcmp(tag, "PF") == 0) out.channels = 3;
  else if (std::strcmp(tag, "Pf") == 0) out.channels = 1;
  else throw DataError("bad PFM magic: " + path);
  double scale = 0;
  if (std::fscanf(f.get(), "%d %d %lf", &out.width, &out.height, &scale) != 3 ||
      out.width <= 0 || out.height <= 0)
    throw DataError("bad PFM header: " + path);
  if (scale >= 0) throw DataError("big-endian PFM unsupported: " + path);
  std::fgetc(f.get());  // the single whitespace after the scale

  const size_t row_n = static_cast<size_t>(out.width) * out.channels;
  out.data.resize(row_n * out.height);
  for (int y = out.height - 1; y >= 0; --y) {
    if (std::fread(out.data.data() + row_n * y, sizeof(float), row_n, f.get()) !=
        row_n)
      throw DataError("short read: " + path);
  }
  return out;
}

std::string mask_path(const std::string& pfm_path) {
  return pfm_path + ".mask.png";
}

bool file_exists(const std::string& path) {
  if (std::FILE* f = std::fopen(path.c_str(), "rb")) {
    std::fclose(f);
    return true;
  }
  return false;
}

}  // namespace

void write_depth_pfm(const std::string& path, const DepthMap& depth,
                     bool write_mask) {
  std::vector<float> data(depth.depth.size(), 0.f);
  for (size_t i = 0; i < data.size(); ++i)
    if (depth.valid[i]) data[i] = depth.depth[i];
  write_pfm(path, depth.width, depth.height, 1, data.data());
  if (write_mask) {
    Image mask(depth.width, depth.height, 1);
    for (size_t i = 0; i < depth.valid.size(); ++i)
      mask.data[i] = depth.valid[i] ? 1.f : 0.f;
    write_png(mask_path(path), mask, 8);
  }
}

DepthMap read_depth_pfm(const std::string& path) {
  const PfmData raw = read_pfm(path);
  if (raw.channels != 1) throw DataError("depth PFM must be 1-channel: " + path);
  DepthMap depth(raw.width, raw.height);
  depth.depth = raw.data;
  if (file_exists(mask_path(path))) {
    const Image mask = read_png(mask_path(path));
    if (mask.width != raw.width || mask.height != raw.height)
      throw DataError("mask size differs from depth: " + path);
    for (size_t i = 0; i < depth.valid.size(); ++i)
      depth.valid[i] = mask.data[i] > 0.5f ? 1 : 0;
  } else {
    for (size_t i = 0; i < depth.valid.size(); ++i)
      depth.valid[i] =
          std::isfinite(depth.depth[i]) && depth.depth[i] > 0.f ? 1 : 0;
  }
  for (size_t i = 0; i < depth.valid.size(); ++i)
    if (!depth.valid[i]) depth.depth[i] = 0.f;
  return depth;
}

void write_normals_pfm(const std::string& path, const NormalMap& normals) {
  std::vector<float> data(normals.normals.size(), 0.f);
  for (size_t i = 0; i < normals.valid.size(); ++i)
    if (normals.valid[i])
      for (int c = 0; c < 3; ++c) data[i * 3 + c] = normals.normals[i * 3 + c];
  write_pfm(path, normals.width, normals.height, 3, data.data());
}

NormalMap read_normals_pfm(const std::string& path) {
  const PfmData raw = read_pfm(path);
  if (raw.channels != 3) throw DataError("normal PFM must be 3-channel: " + path);
  NormalMap out(raw.width, raw.height);
  out.normals = raw.data;
  for (size_t i = 0; i < out.valid.size(); ++i) {
    const float* n = &out.normals[i * 3];
    out.valid[i] = (n[0] != 0.f || n[1] != 0.f || n[2] != 0.f) ? 1 : 0;
  }
  return out;
}

void write_normals_png(const std::string& path, const NormalMap& normals) {
  Image img(normals.width, normals.height, 3);
  for (size_t i = 0; i < normals.valid.size(); ++i)
    if (normals.valid[i])
      for (int c = 0; c < 3; ++c)
        img.data[i * 3 + c] = 0.5f * (normals.normals[i * 3 + c] + 1.f);
  write_png(path, img, 8);
}

void write_occlusion_png(const std::string& path, const OcclusionMap& occ) {
  Image img(occ.width, occ.height, 1);
  for (size_t i = 0; i < occ.valid.size(); ++i)
    img.data[i] = occ.valid[i] ? occ.p[i] : 0.f;
  write_png(path, img, 8);
}

void write_occlusion_pfm(const std::string& path, const OcclusionMap& occ) {
  std::vector<float> data(occ.p.size(), -1.f);  // -1 marks invalid
  for (size_t i = 0; i < occ.valid.size(); ++i)
    if (occ.valid[i]) data[i] = occ.p[i];
  write_pfm(path, occ.width, occ.height, 1, data.data());
}

OcclusionMap read_occlusion_pfm(const std::string& path) {
  const PfmData raw = read_pfm(path);
  if (raw.channels != 1)
    throw DataError("occlusion PFM must be 1-channel: " + path);
  OcclusionMap out(raw.width, raw.height);
  for (size_t i = 0; i < out.valid.size(); ++i) {
    if (raw.data[i] >= 0.f) {
      out.p[i] = raw.data[i];
      out.valid[i] = 1;
    }
  }
  return out;
}

void write_cost_volume(const std::string& path, const CostVolume& volume) {
  FilePtr f = open_file(path, "wb");
  nlohmann::json header{{"type", "cost_volume"},
                        {"width", volume.width},
                        {"height", volume.height},
                        {"planes", volume.planes},
                        {"d_min", volume.sampling.d_min},
                        {"d_max", volume.sampling.d_max}};
  const std::string h = header.dump() + "\n";
  std::fwrite(h.data(), 1, h.size(), f.get());
  std::fwrite(volume.costs.data(), sizeof(float), volume.costs.size(), f.get());
  std::fwrite(volume.valid.data(), 1, volume.valid.size(), f.get());
}

namespace {
nlohmann::json read_header_line(std::FILE* f, const std::string& path) {
  std::string line;
  for (int c = std::fgetc(f); c != EOF && c != '\n'; c = std::fgetc(f))
    line.push_back(static_cast<char>(c));
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad volume header in " + path + ": " + e.what());
  }
}
}  // namespace

CostVolume read_cost_volume(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  const nlohmann::json h = read_header_line(f.get(), path);
  if (h.value("type", "") != "cost_volume")
    throw DataError("not a cost volume dump: " + path);
  const PlaneSampling sampling(h.at("d_min"), h.at("d_max"), h.at("planes"));
  CostVolume v(h.at("width"), h.at("height"), sampling);
  if (std::fread(v.costs.data(), sizeof(float), v.costs.size(), f.get()) !=
          v.costs.size() ||
      std::fread(v.valid.data(), 1, v.valid.size(), f.get()) != v.valid.size())
    throw DataError("short read: " + path);
  return v;
}

void write_tsdf_volume(const std::string& path, const TsdfVolume& volume) {
  FilePtr f = open_file(path, "wb");
  nlohmann::json header{
      {"type", "tsdf"},
      {"dims", {volume.dims[0], volume.dims[1], volume.dims[2]}},
      {"voxel_size", volume.voxel_size},
      {"origin", {volume.origin.x(), volume.origin.y(), volume.origin.z()}}};
  const std::string h = header.dump() + "\n";
  std::fwrite(h.data(), 1, h.size(), f.get());
  std::fwrite(volume.tsdf.data(), sizeof(float), volume.tsdf.size(), f.get());
  std::fwrite(volume.weight.data(), sizeof(float), volume.weight.size(), f.get());
  std::fwrite(volume.color.data(), sizeof(float), volume.color.size(), f.get());
}

TsdfVolume read_tsdf_volume(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  const nlohmann::json h = read_header_line(f.get(), path);
  if (h.value("type", "") != "tsdf") throw DataError("not a tsdf dump: " + path);
  const auto& dims = h.at("dims");
  const auto& origin = h.at("origin");
  TsdfVolume v(Eigen::Vector3d(origin.at(0), origin.at(1), origin.at(2)),
               h.at("voxel_size"), {dims.at(0), dims.at(1), dims.at(2)});
  if (std::fread(v.tsdf.data(), sizeof(float), v.tsdf.size(), f.get()) !=
          v.tsdf.size() ||
      std::fread(v.weight.data(), sizeof(float), v.weight.size(), f.get()) !=
          v.weight.size() ||
      std::fread(v.color.data(), sizeof(float), v.color.size(), f.get()) !=
          v.color.size())
    throw DataError("short read: " + path);
  return v;
}

}  // namespace mvd
