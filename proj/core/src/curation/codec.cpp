#include "adlforge/curation/codec.hpp"

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/videoio.hpp>

#include "adlforge/model/error.hpp"

namespace adlforge::curation {

namespace fs = std::filesystem;

namespace {

class CvReader : public FrameReader {
 public:
  // The built-in MJPEG reader can hand libjpeg truncated chunks; prefer FFmpeg.
  explicit CvReader(const fs::path& path) : cap_(path.string(), cv::CAP_FFMPEG) {
    if (!cap_.isOpened()) cap_.open(path.string(), cv::CAP_OPENCV_MJPEG);
    if (!cap_.isOpened()) cap_.open(path.string(), cv::CAP_ANY);
    if (!cap_.isOpened()) throw MediaError(fmt::format("cannot open video {}", path.string()));
    count_ = static_cast<int>(cap_.get(cv::CAP_PROP_FRAME_COUNT));
    fps_ = cap_.get(cv::CAP_PROP_FPS);
  }
  bool read(cv::Mat& frame) override { return cap_.read(frame) && !frame.empty(); }
  bool skip() override { return cap_.grab(); }
  int frame_count() const override { return count_; }
  double fps() const override { return fps_; }

 private:
  cv::VideoCapture cap_;
  int count_ = 0;
  double fps_ = 0;
};

class CvWriter : public FrameWriter {
 public:
  CvWriter(const fs::path& path, double fps, cv::Size size) : path_(path), size_(size) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const int fourcc = cv::VideoWriter::fourcc('M', 'J', 'P', 'G');
    writer_.open(path.string(), cv::CAP_FFMPEG, fourcc, fps, size);
    if (!writer_.isOpened()) writer_.open(path.string(), cv::CAP_OPENCV_MJPEG, fourcc, fps, size);
    if (!writer_.isOpened()) throw MediaError(fmt::format("cannot create video {}", path.string()));
  }
  void write(const cv::Mat& frame) override {
    if (frame.size() != size_ || frame.type() != CV_8UC3)
      throw MediaError(fmt::format("frame {}x{} does not match writer {}x{} for {}", frame.cols, frame.rows,
                                   size_.width, size_.height, path_.string()));
    writer_.write(frame);
  }
  void close() override { writer_.release(); }

 private:
  fs::path path_;
  cv::Size size_;
  cv::VideoWriter writer_;
};

}  // namespace

std::unique_ptr<FrameReader> OpenCvCodec::open(const fs::path& path) { return std::make_unique<CvReader>(path); }

std::unique_ptr<FrameWriter> OpenCvCodec::create(const fs::path& path, double fps, cv::Size size) {
  return std::make_unique<CvWriter>(path, fps, size);
}

namespace {

class MemReader : public FrameReader {
 public:
  MemReader(std::shared_ptr<const void> keep, const std::vector<cv::Mat>* frames, double fps)
      : keep_(std::move(keep)), frames_(frames), fps_(fps) {}
  bool read(cv::Mat& frame) override {
    if (pos_ >= frames_->size()) return false;
    frame = (*frames_)[pos_++].clone();
    return true;
  }
  bool skip() override { return pos_ < frames_->size() && ++pos_; }
  int frame_count() const override { return static_cast<int>(frames_->size()); }
  double fps() const override { return fps_; }

 private:
  std::shared_ptr<const void> keep_;
  const std::vector<cv::Mat>* frames_;
  double fps_;
  std::size_t pos_ = 0;
};

class MemWriter : public FrameWriter {
 public:
  MemWriter(MemoryCodec& codec, fs::path path, double fps, cv::Size size)
      : codec_(codec), path_(std::move(path)), fps_(fps), size_(size) {}
  ~MemWriter() override { close(); }
  void write(const cv::Mat& frame) override {
    if (frame.size() != size_) throw MediaError("frame size does not match writer");
    frames_.push_back(frame.clone());
  }
  void close() override {
    if (closed_) return;
    closed_ = true;
    codec_.put(path_, std::move(frames_), fps_);
  }

 private:
  MemoryCodec& codec_;
  fs::path path_;
  double fps_;
  cv::Size size_;
  std::vector<cv::Mat> frames_;
  bool closed_ = false;
};

}  // namespace

std::unique_ptr<FrameReader> MemoryCodec::open(const fs::path& path) {
  std::lock_guard lk(mu_);
  auto it = clips_.find(path.lexically_normal().string());
  if (it == clips_.end()) throw MediaError(fmt::format("cannot open video {}", path.string()));
  return std::make_unique<MemReader>(it->second, &it->second->frames, it->second->fps);
}

std::unique_ptr<FrameWriter> MemoryCodec::create(const fs::path& path, double fps, cv::Size size) {
  return std::make_unique<MemWriter>(*this, path, fps, size);
}

void MemoryCodec::put(const fs::path& path, std::vector<cv::Mat> frames, double fps) {
  auto clip = std::make_shared<Clip>();
  clip->frames = std::move(frames);
  clip->fps = fps;
  std::lock_guard lk(mu_);
  clips_[path.lexically_normal().string()] = std::move(clip);
}

bool MemoryCodec::exists(const fs::path& path) const {
  std::lock_guard lk(mu_);
  return clips_.count(path.lexically_normal().string()) != 0;
}

std::vector<cv::Mat> read_frames(VideoCodec& codec, const fs::path& path, const std::vector<int>& indices) {
  std::vector<cv::Mat> out;
  if (indices.empty()) return out;
  out.reserve(indices.size());
  auto reader = codec.open(path);
  int pos = 0;
  cv::Mat current;
  bool have_current = false;
  for (int idx : indices) {
    if (idx < pos - 1 || idx < 0)
      throw PreconditionError("frame indices must be ascending and non-negative");
    if (have_current && idx == pos - 1) {
      out.push_back(current.clone());
      continue;
    }
    while (pos < idx) {
      if (!reader->skip()) throw MediaError(fmt::format("{} has fewer than {} frames", path.string(), idx + 1));
      ++pos;
    }
    if (!reader->read(current))
      throw MediaError(fmt::format("{} has fewer than {} frames", path.string(), idx + 1));
    ++pos;
    have_current = true;
    out.push_back(current.clone());
  }
  return out;
}

std::vector<cv::Mat> read_all_frames(VideoCodec& codec, const fs::path& path) {
  auto reader = codec.open(path);
  std::vector<cv::Mat> out;
  cv::Mat m;
  while (reader->read(m)) out.push_back(m.clone());
  return out;
}

backends::EncodedImage encode_jpeg(const cv::Mat& frame, int quality) {
  std::vector<unsigned char> buf;
  if (!cv::imencode(".jpg", frame, buf, {cv::IMWRITE_JPEG_QUALITY, quality}))
    throw MediaError("JPEG encoding failed");
  return {std::string(buf.begin(), buf.end())};
}

}  // namespace adlforge::curation
