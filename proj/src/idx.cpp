#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include "geocert/model.hpp"

namespace geocert {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path, const char* field) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw IdxError(IdxError::Kind::truncated,
                   path.string() + ": truncated while reading " + field);
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                              static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b.data(), 4);
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Kind::io, "cannot open " + path.string());
  return in;
}

std::vector<unsigned char> read_payload(std::istream& in, std::size_t bytes,
                                        const std::filesystem::path& path) {
  std::vector<unsigned char> buf(bytes);
  if (bytes > 0 && !in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes))) {
    throw IdxError(IdxError::Kind::truncated, path.string() + ": expected " +
                                                  std::to_string(bytes) + " payload bytes");
  }
  return buf;
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  std::ifstream img = open_binary(images_path);
  std::ifstream lab = open_binary(labels_path);

  const std::uint32_t img_magic = read_be32(img, images_path, "magic");
  if (img_magic != kImageMagic) {
    throw IdxError(IdxError::Kind::bad_magic, images_path.string() + ": bad image magic " +
                                                  std::to_string(img_magic));
  }
  const std::uint32_t lab_magic = read_be32(lab, labels_path, "magic");
  if (lab_magic != kLabelMagic) {
    throw IdxError(IdxError::Kind::bad_magic, labels_path.string() + ": bad label magic " +
                                                  std::to_string(lab_magic));
  }

  const std::uint32_t n_images = read_be32(img, images_path, "image count");
  const std::uint32_t rows = read_be32(img, images_path, "row count");
  const std::uint32_t cols = read_be32(img, images_path, "column count");
  const std::uint32_t n_labels = read_be32(lab, labels_path, "label count");
  if (n_images != n_labels) {
    throw IdxError(IdxError::Kind::count_mismatch,
                   std::to_string(n_images) + " images but " + std::to_string(n_labels) + " labels");
  }

  const std::size_t dim = std::size_t{rows} * cols;
  const auto pixels = read_payload(img, dim * n_images, images_path);
  const auto labels = read_payload(lab, n_labels, labels_path);

  Dataset out;
  out.name = images_path.stem().string();
  out.dim = dim;
  out.inputs.reserve(n_images);
  std::size_t max_label = 1;
  for (std::size_t i = 0; i < n_images; ++i) {
    Vec x(dim);
    for (std::size_t j = 0; j < dim; ++j) x[j] = pixels[i * dim + j] / 255.0;
    out.inputs.push_back(std::move(x));
    out.labels.push_back(labels[i]);
    max_label = std::max<std::size_t>(max_label, labels[i]);
  }
  out.num_classes = max_label + 1;
  return out;
}

void save_idx(const Dataset& data, std::size_t rows, std::size_t cols,
              const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  if (rows * cols != data.dim) throw DataError("save_idx: rows * cols must equal the dimension");
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img || !lab) throw IdxError(IdxError::Kind::io, "cannot write IDX files");

  write_be32(img, kImageMagic);
  write_be32(img, static_cast<std::uint32_t>(data.size()));
  write_be32(img, static_cast<std::uint32_t>(rows));
  write_be32(img, static_cast<std::uint32_t>(cols));
  write_be32(lab, kLabelMagic);
  write_be32(lab, static_cast<std::uint32_t>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.inputs[i]) {
      img.put(static_cast<char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    }
    lab.put(static_cast<char>(data.labels[i]));
  }
}

}  // namespace geocert
