#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbtm/bn.hpp"

namespace mbtm::data {

/// Boolean feature matrix with binary labels, row-major.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::uint32_t feature_count, std::vector<std::uint8_t> features,
          std::vector<std::uint8_t> labels,
          std::vector<std::string> feature_names = {})
      : feature_count_(feature_count),
        features_(std::move(features)),
        labels_(std::move(labels)),
        feature_names_(std::move(feature_names)) {
    if (feature_count_ == 0)
      throw std::invalid_argument("feature_count must be >= 1");
    if (features_.size() != labels_.size() * std::size_t{feature_count_})
      throw std::invalid_argument("feature/label row counts disagree");
    for (const auto b : features_)
      if (b > 1) throw std::invalid_argument("features must be bits");
    for (const auto b : labels_)
      if (b > 1) throw std::invalid_argument("labels must be bits");
    if (!feature_names_.empty() && feature_names_.size() != feature_count_)
      throw std::invalid_argument("feature name count mismatch");
  }

  std::size_t size() const { return labels_.size(); }
  std::uint32_t feature_count() const { return feature_count_; }
  std::span<const std::uint8_t> row(std::size_t i) const {
    return {features_.data() + i * feature_count_, feature_count_};
  }
  std::uint8_t label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

 private:
  std::uint32_t feature_count_ = 1;
  std::vector<std::uint8_t> features_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::string> feature_names_;
};

/// Ancestral samples turned into a supervised dataset: features are the
/// non-target nodes in declaration order, the label is the target.
inline Dataset bn_dataset(const bn::BayesNet& net, const std::string& target,
                          std::size_t count, std::uint64_t seed) {
  if (!net.has_node(target)) throw std::invalid_argument("unknown target");
  const std::size_t ti = net.index_of(target);
  const std::uint32_t F = static_cast<std::uint32_t>(net.size() - 1);
  if (F == 0) throw std::invalid_argument("net has no feature nodes");

  std::vector<std::string> names;
  names.reserve(F);
  for (std::size_t i = 0; i < net.size(); ++i)
    if (i != ti) names.push_back(net.node(i).name);

  std::vector<std::uint8_t> features(count * F);
  std::vector<std::uint8_t> labels(count);
  Rng rng(seed);
  bn::Assignment a;
  for (std::size_t r = 0; r < count; ++r) {
    bn::sample_into(net, rng, a);
    std::size_t c = 0;
    for (std::size_t i = 0; i < net.size(); ++i)
      if (i != ti) features[r * F + c++] = a[i];
    labels[r] = a[ti];
  }
  return Dataset(F, std::move(features), std::move(labels), std::move(names));
}

/// Grayscale images plus integer class labels, as read from IDX files.
struct RawImageDataset {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols
  std::vector<std::uint8_t> labels;  // count

  std::size_t size() const { return labels.size(); }
};

/// Bit features with integer class labels (pre two-class filtering).
struct MulticlassDataset {
  std::uint32_t feature_count = 0;
  std::vector<std::uint8_t> features;  // count * feature_count, bits
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
};

namespace detail {

inline std::uint32_t read_u32_be(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("truncated IDX file: " + what);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

inline void write_u32_be(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Reads paired IDX image/label files (big-endian headers).
inline RawImageDataset load_idx(const std::filesystem::path& images_path,
                                const std::filesystem::path& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img)
    throw std::runtime_error("cannot open file: " + images_path.string());
  if (detail::read_u32_be(img, "image magic") != kIdxImagesMagic)
    throw std::runtime_error("bad IDX image magic: " + images_path.string());
  const std::uint32_t count = detail::read_u32_be(img, "image count");
  const std::uint32_t rows = detail::read_u32_be(img, "image rows");
  const std::uint32_t cols = detail::read_u32_be(img, "image cols");
  if (rows == 0 || cols == 0 ||
      std::uint64_t{count} * rows * cols > (std::uint64_t{1} << 32))
    throw std::runtime_error("implausible IDX dimensions: " +
                             images_path.string());

  RawImageDataset out;
  out.rows = rows;
  out.cols = cols;
  out.pixels.resize(std::size_t{count} * rows * cols);
  if (!img.read(reinterpret_cast<char*>(out.pixels.data()),
                static_cast<std::streamsize>(out.pixels.size())))
    throw std::runtime_error("truncated IDX image data: " +
                             images_path.string());
  if (img.peek() != std::istream::traits_type::eof())
    throw std::runtime_error("trailing bytes in IDX image file: " +
                             images_path.string());

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab)
    throw std::runtime_error("cannot open file: " + labels_path.string());
  if (detail::read_u32_be(lab, "label magic") != kIdxLabelsMagic)
    throw std::runtime_error("bad IDX label magic: " + labels_path.string());
  const std::uint32_t label_count = detail::read_u32_be(lab, "label count");
  if (label_count != count)
    throw std::runtime_error("IDX image/label count mismatch");
  out.labels.resize(label_count);
  if (label_count > 0 &&
      !lab.read(reinterpret_cast<char*>(out.labels.data()),
                static_cast<std::streamsize>(out.labels.size())))
    throw std::runtime_error("truncated IDX label data: " +
                             labels_path.string());
  if (lab.peek() != std::istream::traits_type::eof())
    throw std::runtime_error("trailing bytes in IDX label file: " +
                             labels_path.string());
  return out;
}

inline void write_idx_images(const std::filesystem::path& path,
                             std::uint32_t count, std::uint32_t rows,
                             std::uint32_t cols,
                             std::span<const std::uint8_t> pixels) {
  if (pixels.size() != std::size_t{count} * rows * cols)
    throw std::invalid_argument("pixel buffer size mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open file: " + path.string());
  detail::write_u32_be(out, kIdxImagesMagic);
  detail::write_u32_be(out, count);
  detail::write_u32_be(out, rows);
  detail::write_u32_be(out, cols);
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_idx_labels(const std::filesystem::path& path,
                             std::span<const std::uint8_t> labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open file: " + path.string());
  detail::write_u32_be(out, kIdxLabelsMagic);
  detail::write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Pixel > threshold becomes 1. Default threshold 75.
inline MulticlassDataset binarize(const RawImageDataset& raw,
                                  std::uint8_t threshold = 75) {
  MulticlassDataset out;
  out.feature_count = raw.rows * raw.cols;
  out.labels = raw.labels;
  out.features.resize(raw.pixels.size());
  for (std::size_t i = 0; i < raw.pixels.size(); ++i)
    out.features[i] = raw.pixels[i] > threshold ? 1 : 0;
  return out;
}

/// Two-class reduction: rows of class_a become label 1, class_b label 0.
inline Dataset filter_classes(const MulticlassDataset& mc,
                              std::uint8_t class_a, std::uint8_t class_b) {
  if (class_a == class_b)
    throw std::invalid_argument("classes must be distinct");
  std::vector<std::uint8_t> features;
  std::vector<std::uint8_t> labels;
  for (std::size_t r = 0; r < mc.size(); ++r) {
    if (mc.labels[r] != class_a && mc.labels[r] != class_b) continue;
    const auto* begin = mc.features.data() + r * mc.feature_count;
    features.insert(features.end(), begin, begin + mc.feature_count);
    labels.push_back(mc.labels[r] == class_a ? 1 : 0);
  }
  if (labels.empty())
    throw std::runtime_error("no rows of the requested classes");
  return Dataset(mc.feature_count, std::move(features), std::move(labels));
}

/// First min(n, size) rows.
inline Dataset head(const Dataset& ds, std::size_t n) {
  const std::size_t keep = std::min(n, ds.size());
  std::vector<std::uint8_t> features;
  std::vector<std::uint8_t> labels;
  features.reserve(keep * ds.feature_count());
  labels.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) {
    const auto row = ds.row(r);
    features.insert(features.end(), row.begin(), row.end());
    labels.push_back(ds.label(r));
  }
  return Dataset(ds.feature_count(), std::move(features), std::move(labels),
                 ds.feature_names());
}

}  // namespace mbtm::data
