#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace adlforge {

inline constexpr int kObjectFeatureDim = 512;  // D_o
inline constexpr int kPoseFeatureDim = 216;    // D_p

inline constexpr const char* kProducerObject = "objectlm";
inline constexpr const char* kProducerPose = "poselm";

struct FeatureMeta {
  std::string producer;
  std::string model_id;
  std::string subject_id;  // video or clip the rows describe

  friend bool operator==(const FeatureMeta&, const FeatureMeta&) = default;
};

/// Dense row-major float32 matrix plus provenance metadata.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(int rows, int dim, FeatureMeta meta = {});
  FeatureMatrix(int rows, int dim, std::vector<float> data, FeatureMeta meta = {});

  int rows() const { return rows_; }
  int dim() const { return dim_; }
  const FeatureMeta& meta() const { return meta_; }
  FeatureMeta& meta() { return meta_; }
  const std::vector<float>& data() const { return data_; }

  std::span<const float> row(int r) const;
  std::span<float> row(int r);
  float at(int r, int c) const { return data_[static_cast<std::size_t>(r) * dim_ + c]; }
  float& at(int r, int c) { return data_[static_cast<std::size_t>(r) * dim_ + c]; }

  /// Shape and producer-specific dimension checks. Throws ValidationError.
  void validate() const;

  /// Bitwise equality (distinguishes -0.0f from 0.0f, NaN payloads).
  bool bit_equal(const FeatureMatrix& other) const;

 private:
  int rows_ = 0;
  int dim_ = 0;
  std::vector<float> data_;
  FeatureMeta meta_;
};

/// Expected dimension for a producer id, or 0 when the producer is free-form.
int expected_dim_for_producer(const std::string& producer);

/// Writes `<stem>.f32` (little-endian float32, row-major) and `<stem>.json`
/// (sidecar with rows, dim, meta). `stem` has no extension.
void write_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& stem);

/// Reads a pair written by write_feature_matrix. Accepts either the stem or
/// the path of one of the two files.
FeatureMatrix read_feature_matrix(const std::filesystem::path& path);

/// Normalizes the stem/.f32/.json spelling of a feature pair to its stem.
std::filesystem::path feature_stem(const std::filesystem::path& path);

}  // namespace adlforge
