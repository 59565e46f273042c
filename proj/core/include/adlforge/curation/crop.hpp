#pragma once

#include <optional>
#include <vector>

#include <opencv2/core.hpp>

#include "adlforge/model/types.hpp"

namespace adlforge::curation {

enum class CropMode { per_frame, per_video_union };

struct CropOptions {
  double margin_frac = 0.2;
  /// Side length a degenerate (sub-pixel) extent is expanded to.
  int min_box = 32;
};

/// Closed containment test used for joints: x1 <= u <= x2, y1 <= v <= y2.
bool contains_point(const CropBox& box, double u, double v);

CropBox union_box(const CropBox& a, const CropBox& b);

/// Box around the valid joints of every person of one frame; nullopt when the
/// frame has no valid 2D joint.
std::optional<CropBox> frame_crop(const PoseFrame& frame, int frame_w, int frame_h,
                                  const CropOptions& opt = {});

/// One entry per frame; frames without persons are nullopt.
/// Throws PreconditionError("no person detected") when no frame has a joint.
std::vector<std::optional<CropBox>> crop_per_frame(const PoseSequence& poses, const CropOptions& opt = {});

/// Union of all per-frame boxes.
CropBox crop_union(const PoseSequence& poses, const CropOptions& opt = {});
/// Union over several sequences sharing one frame geometry.
CropBox crop_union(const std::vector<const PoseSequence*>& poses, const CropOptions& opt = {});

/// Aspect-preserving fit of a crop into an output canvas.
struct Letterbox {
  CropBox crop;
  int out_w = 0, out_h = 0;
  double scale = 1.0;
  double offset_x = 0.0, offset_y = 0.0;

  /// Source pixel coordinates -> output canvas coordinates.
  cv::Point2d map(double u, double v) const {
    return {(u - crop.x1) * scale + offset_x, (v - crop.y1) * scale + offset_y};
  }
};

Letterbox make_letterbox(const CropBox& crop, int out_w, int out_h);
cv::Mat apply_letterbox(const cv::Mat& frame, const Letterbox& lb);

}  // namespace adlforge::curation
