#include "adlforge/model/feature_matrix.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "adlforge/model/error.hpp"
#include "adlforge/model/json_io.hpp"
#include "adlforge/model/manifest.hpp"

namespace adlforge {

namespace fs = std::filesystem;

FeatureMatrix::FeatureMatrix(int rows, int dim, FeatureMeta meta)
    : rows_(rows), dim_(dim), data_(static_cast<std::size_t>(rows) * dim, 0.0f), meta_(std::move(meta)) {
  if (rows < 0 || dim < 0) throw PreconditionError("feature matrix shape must be non-negative");
}

FeatureMatrix::FeatureMatrix(int rows, int dim, std::vector<float> data, FeatureMeta meta)
    : rows_(rows), dim_(dim), data_(std::move(data)), meta_(std::move(meta)) {
  if (rows < 0 || dim < 0) throw PreconditionError("feature matrix shape must be non-negative");
  if (data_.size() != static_cast<std::size_t>(rows) * dim)
    throw ValidationError(fmt::format("feature data has {} values, expected {}x{}", data_.size(),
                                      rows, dim));
}

std::span<const float> FeatureMatrix::row(int r) const {
  return {data_.data() + static_cast<std::size_t>(r) * dim_, static_cast<std::size_t>(dim_)};
}

std::span<float> FeatureMatrix::row(int r) {
  return {data_.data() + static_cast<std::size_t>(r) * dim_, static_cast<std::size_t>(dim_)};
}

int expected_dim_for_producer(const std::string& producer) {
  if (producer == kProducerObject) return kObjectFeatureDim;
  if (producer == kProducerPose) return kPoseFeatureDim;
  return 0;
}

void FeatureMatrix::validate() const {
  if (data_.size() != static_cast<std::size_t>(rows_) * dim_)
    throw ValidationError(fmt::format("feature data has {} values, expected {}x{}", data_.size(),
                                      rows_, dim_));
  if (int want = expected_dim_for_producer(meta_.producer); want != 0 && dim_ != want)
    throw ValidationError(fmt::format("producer '{}' requires dim {}, found {}", meta_.producer,
                                      want, dim_));
}

bool FeatureMatrix::bit_equal(const FeatureMatrix& o) const {
  return rows_ == o.rows_ && dim_ == o.dim_ && meta_ == o.meta_ &&
         (data_.empty() ||
          std::memcmp(data_.data(), o.data_.data(), data_.size() * sizeof(float)) == 0);
}

fs::path feature_stem(const fs::path& path) {
  if (path.extension() == ".f32" || path.extension() == ".json") {
    fs::path stem = path;
    stem.replace_extension();
    return stem;
  }
  return path;
}

namespace {

fs::path with_suffix(const fs::path& stem, const char* suffix) {
  fs::path p = stem;
  p += suffix;
  return p;
}

}  // namespace

void write_feature_matrix(const FeatureMatrix& m, const fs::path& path) {
  m.validate();
  const fs::path stem = feature_stem(path);
  std::string bytes(m.data().size() * sizeof(float), '\0');
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(m.data()[i]);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  }
  nlohmann::json sidecar{{"rows", m.rows()},
                         {"dim", m.dim()},
                         {"dtype", "float32"},
                         {"byte_order", "little"},
                         {"meta", m.meta()}};
  write_file_atomic(with_suffix(stem, ".f32"), bytes);
  write_file_atomic(with_suffix(stem, ".json"), sidecar.dump(2) + "\n");
}

FeatureMatrix read_feature_matrix(const fs::path& path) {
  const fs::path stem = feature_stem(path);
  const fs::path json_path = with_suffix(stem, ".json");
  const fs::path bin_path = with_suffix(stem, ".f32");
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(read_file(json_path));
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(fmt::format("{}: bad sidecar ({})", json_path.string(), e.what()));
  }
  const int rows = sidecar.at("rows").get<int>();
  const int dim = sidecar.at("dim").get<int>();
  if (sidecar.value("dtype", "float32") != "float32" || sidecar.value("byte_order", "little") != "little")
    throw ManifestError(fmt::format("{}: unsupported dtype/byte order", json_path.string()));
  const std::string bytes = read_file(bin_path);
  const std::size_t expected = static_cast<std::size_t>(rows) * dim * sizeof(float);
  if (bytes.size() != expected)
    throw ManifestError(fmt::format("{}: {} bytes on disk but sidecar declares {}x{} ({} bytes)",
                                    bin_path.string(), bytes.size(), rows, dim, expected));
  std::vector<float> data(static_cast<std::size_t>(rows) * dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b)
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
    data[i] = std::bit_cast<float>(bits);
  }
  FeatureMeta meta;
  if (sidecar.contains("meta")) meta = sidecar["meta"].get<FeatureMeta>();
  return FeatureMatrix(rows, dim, std::move(data), std::move(meta));
}

}  // namespace adlforge
