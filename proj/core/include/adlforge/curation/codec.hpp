#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "adlforge/backends/request.hpp"

namespace adlforge::curation {

/// Sequential frame source. Frames are 8-bit BGR.
class FrameReader {
 public:
  virtual ~FrameReader() = default;
  /// Next frame; false at end of stream.
  virtual bool read(cv::Mat& frame) = 0;
  /// Skips one frame without decoding where the container allows it.
  virtual bool skip() {
    cv::Mat m;
    return read(m);
  }
  virtual int frame_count() const = 0;
  virtual double fps() const = 0;
};

class FrameWriter {
 public:
  virtual ~FrameWriter() = default;
  virtual void write(const cv::Mat& frame) = 0;
  virtual void close() = 0;
};

/// Injected decode/encode capability with a frame-array contract.
class VideoCodec {
 public:
  virtual ~VideoCodec() = default;
  virtual std::unique_ptr<FrameReader> open(const std::filesystem::path& path) = 0;
  virtual std::unique_ptr<FrameWriter> create(const std::filesystem::path& path, double fps, cv::Size size) = 0;
  /// Container extension including the dot, e.g. ".avi".
  virtual std::string extension() const = 0;
};

/// Motion-JPEG in AVI through OpenCV's videoio.
class OpenCvCodec : public VideoCodec {
 public:
  std::unique_ptr<FrameReader> open(const std::filesystem::path& path) override;
  std::unique_ptr<FrameWriter> create(const std::filesystem::path& path, double fps, cv::Size size) override;
  std::string extension() const override { return ".avi"; }
};

/// Keeps "files" in memory; for tests and dry runs. Thread-safe.
class MemoryCodec : public VideoCodec {
 public:
  std::unique_ptr<FrameReader> open(const std::filesystem::path& path) override;
  std::unique_ptr<FrameWriter> create(const std::filesystem::path& path, double fps, cv::Size size) override;
  std::string extension() const override { return ".mem"; }

  void put(const std::filesystem::path& path, std::vector<cv::Mat> frames, double fps);
  bool exists(const std::filesystem::path& path) const;

 private:
  struct Clip {
    std::vector<cv::Mat> frames;
    double fps = 0;
  };
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Clip>> clips_;
};

/// Decodes the frames at `indices` (ascending, duplicates allowed).
std::vector<cv::Mat> read_frames(VideoCodec& codec, const std::filesystem::path& path,
                                 const std::vector<int>& indices);
std::vector<cv::Mat> read_all_frames(VideoCodec& codec, const std::filesystem::path& path);

backends::EncodedImage encode_jpeg(const cv::Mat& frame, int quality = 90);

}  // namespace adlforge::curation
