#include "adlforge/curation/crop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <opencv2/imgproc.hpp>

#include "adlforge/model/error.hpp"

namespace adlforge::curation {

bool contains_point(const CropBox& box, double u, double v) {
  return box.x1 <= u && u <= box.x2 && box.y1 <= v && v <= box.y2;
}

CropBox union_box(const CropBox& a, const CropBox& b) {
  return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2), std::max(a.y2, b.y2),
          std::max(a.frame_w, b.frame_w), std::max(a.frame_h, b.frame_h)};
}

namespace {

// Padded, rounded-outward interval for one axis, clamped to [0, limit].
std::pair<int, int> pad_axis(double lo, double hi, double margin, int min_box, int limit) {
  double a, b;
  if (hi - lo < 1.0) {
    const double c = (lo + hi) / 2.0;
    a = c - min_box / 2.0;
    b = c + min_box / 2.0;
  } else {
    const double pad = margin * (hi - lo);
    a = lo - pad;
    b = hi + pad;
  }
  int ia = static_cast<int>(std::floor(a));
  int ib = static_cast<int>(std::ceil(b));
  ia = std::clamp(ia, 0, limit);
  ib = std::clamp(ib, 0, limit);
  if (ib <= ia) {  // only possible for extents touching the far border
    if (ia == limit) ia = limit - 1;
    ib = ia + 1;
  }
  return {ia, ib};
}

}  // namespace

std::optional<CropBox> frame_crop(const PoseFrame& frame, int frame_w, int frame_h, const CropOptions& opt) {
  if (opt.margin_frac < 0 || opt.margin_frac > 1) throw PreconditionError("margin_frac must lie in [0, 1]");
  double minu = std::numeric_limits<double>::infinity(), minv = minu;
  double maxu = -minu, maxv = -minu;
  bool any = false;
  for (const auto& person : frame.persons)
    for (const auto& j : person.joints) {
      if (!j.valid_2d || !(j.u >= 0 && j.u < frame_w && j.v >= 0 && j.v < frame_h)) continue;
      minu = std::min(minu, j.u);
      maxu = std::max(maxu, j.u);
      minv = std::min(minv, j.v);
      maxv = std::max(maxv, j.v);
      any = true;
    }
  if (!any) return std::nullopt;
  const auto [x1, x2] = pad_axis(minu, maxu, opt.margin_frac, opt.min_box, frame_w);
  const auto [y1, y2] = pad_axis(minv, maxv, opt.margin_frac, opt.min_box, frame_h);
  return CropBox{x1, y1, x2, y2, frame_w, frame_h};
}

std::vector<std::optional<CropBox>> crop_per_frame(const PoseSequence& poses, const CropOptions& opt) {
  std::vector<std::optional<CropBox>> out;
  out.reserve(poses.frames.size());
  bool any = false;
  for (const auto& f : poses.frames) {
    out.push_back(frame_crop(f, poses.frame_width, poses.frame_height, opt));
    any = any || out.back().has_value();
  }
  if (!any) throw PreconditionError("no person detected");
  return out;
}

CropBox crop_union(const std::vector<const PoseSequence*>& poses, const CropOptions& opt) {
  std::optional<CropBox> acc;
  for (const auto* seq : poses)
    for (const auto& f : seq->frames)
      if (auto b = frame_crop(f, seq->frame_width, seq->frame_height, opt)) acc = acc ? union_box(*acc, *b) : *b;
  if (!acc) throw PreconditionError("no person detected");
  return *acc;
}

CropBox crop_union(const PoseSequence& poses, const CropOptions& opt) { return crop_union({&poses}, opt); }

Letterbox make_letterbox(const CropBox& crop, int out_w, int out_h) {
  if (!crop.valid() || out_w <= 0 || out_h <= 0) throw PreconditionError("invalid crop or output size");
  Letterbox lb;
  lb.crop = crop;
  lb.out_w = out_w;
  lb.out_h = out_h;
  lb.scale = std::min(static_cast<double>(out_w) / crop.width(), static_cast<double>(out_h) / crop.height());
  lb.offset_x = (out_w - crop.width() * lb.scale) / 2.0;
  lb.offset_y = (out_h - crop.height() * lb.scale) / 2.0;
  return lb;
}

cv::Mat apply_letterbox(const cv::Mat& frame, const Letterbox& lb) {
  const CropBox& c = lb.crop;
  if (frame.cols < c.x2 || frame.rows < c.y2)
    throw PreconditionError("crop box exceeds the frame");
  cv::Mat roi = frame(cv::Rect(c.x1, c.y1, c.width(), c.height()));
  const int w = std::clamp(static_cast<int>(std::lround(c.width() * lb.scale)), 1, lb.out_w);
  const int h = std::clamp(static_cast<int>(std::lround(c.height() * lb.scale)), 1, lb.out_h);
  cv::Mat resized;
  cv::resize(roi, resized, cv::Size(w, h), 0, 0, lb.scale >= 1 ? cv::INTER_LINEAR : cv::INTER_AREA);
  cv::Mat out(lb.out_h, lb.out_w, frame.type(), cv::Scalar::all(0));
  const int ox = std::clamp(static_cast<int>(std::lround(lb.offset_x)), 0, lb.out_w - w);
  const int oy = std::clamp(static_cast<int>(std::lround(lb.offset_y)), 0, lb.out_h - h);
  resized.copyTo(out(cv::Rect(ox, oy, w, h)));
  return out;
}

}  // namespace adlforge::curation
