#include <doctest.h>

#include <cmath>

#include <opencv2/core.hpp>

#include "../common/generators.hpp"
#include "adlforge/curation/crop.hpp"
#include "adlforge/model/error.hpp"

using namespace adlforge;
using namespace adlforge::curation;

namespace {

PoseFrame frame_with(std::vector<std::pair<double, double>> pts) {
  Skeleton s;
  for (auto [u, v] : pts) {
    Joint j;
    j.u = u;
    j.v = v;
    s.joints.push_back(j);
  }
  return PoseFrame{{s}};
}

PoseSequence seq_of(std::vector<PoseFrame> frames, int w, int h) {
  PoseSequence p;
  p.frame_width = w;
  p.frame_height = h;
  p.frames = std::move(frames);
  return p;
}

}  // namespace

TEST_SUITE("crop") {

TEST_CASE("hand-computed box") {
  const auto box = frame_crop(frame_with({{10, 20}, {30, 60}}), 100, 100, {0.2, 32});
  REQUIRE(box);
  CHECK(*box == CropBox{6, 12, 34, 68, 100, 100});
}

TEST_CASE("degenerate extent expands to the minimum box") {
  const auto box = frame_crop(frame_with({{50, 50}}), 100, 100, {0.0, 32});
  REQUIRE(box);
  CHECK(*box == CropBox{34, 34, 66, 66, 100, 100});
  const auto edge = frame_crop(frame_with({{2, 98}}), 100, 100, {0.0, 32});
  REQUIRE(edge);
  CHECK(edge->valid());
  CHECK(contains_point(*edge, 2, 98));
}

TEST_CASE("union of two boxes") {
  CHECK(union_box({6, 12, 34, 68, 100, 100}, {40, 10, 90, 50, 100, 100}) == CropBox{6, 10, 90, 68, 100, 100});
  // Boxes (6,12,34,68) and (40,10,90,50) come from these joint sets at margin 0.2.
  auto p = seq_of({frame_with({{10, 20}, {30, 60}}), frame_with({{45, 15}, {85, 45}})}, 100, 100);
  const auto per = crop_per_frame(p, {0.2, 32});
  CHECK(*per[0] == CropBox{6, 12, 34, 68, 100, 100});
  CHECK(*per[1] == CropBox{37, 9, 93, 51, 100, 100});
  CHECK(crop_union(p, {0.2, 32}) == CropBox{6, 9, 93, 68, 100, 100});
}

TEST_CASE("frames without persons are skipped; none at all is an error") {
  auto p = seq_of({PoseFrame{}, frame_with({{10, 20}, {30, 60}}), PoseFrame{}}, 100, 100);
  const auto per = crop_per_frame(p);
  CHECK_FALSE(per[0]);
  CHECK(per[1]);
  CHECK_FALSE(per[2]);
  auto none = seq_of({PoseFrame{}, PoseFrame{}}, 100, 100);
  CHECK_THROWS_WITH_AS(crop_union(none), "no person detected", PreconditionError);
  CHECK_THROWS_AS(crop_per_frame(none), PreconditionError);
  CHECK_THROWS_AS(frame_crop(frame_with({{1, 1}}), 10, 10, {1.5, 32}), PreconditionError);
}

TEST_CASE("properties on random skeleton frames") {
  Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const int w = rng.uniform_int(40, 640), h = rng.uniform_int(40, 480);
    const auto f = testing::random_pose_frame(rng, w, h);
    const double a = rng.uniform01() * 0.5, b = a + rng.uniform01() * 0.5;
    const auto box_a = frame_crop(f, w, h, {a, 32});
    const auto box_b = frame_crop(f, w, h, {b, 32});
    const auto ext = testing::joint_extent(f, w, h);
    REQUIRE(box_a.has_value() == ext.has_value());
    if (!ext) continue;
    CHECK(box_a->valid());
    CHECK(box_b->contains(*box_a));
    for (const auto& person : f.persons)
      for (const auto& j : person.joints)
        if (testing::in_frame(j, w, h)) CHECK(contains_point(*box_a, j.u, j.v));
  }
}

TEST_CASE("letterbox maps crop corners into the canvas") {
  const CropBox crop{40, 10, 140, 210, 320, 240};
  const auto lb = make_letterbox(crop, 512, 512);
  CHECK(lb.scale == doctest::Approx(512.0 / 200.0));
  const auto tl = lb.map(40, 10), br = lb.map(140, 210);
  CHECK(tl.y == doctest::Approx(0.0));
  CHECK(br.y == doctest::Approx(512.0));
  CHECK(tl.x == doctest::Approx(lb.offset_x));
  CHECK(br.x - tl.x == doctest::Approx(256.0));
  cv::Mat frame(240, 320, CV_8UC3, cv::Scalar(10, 200, 30));
  const auto out = apply_letterbox(frame, lb);
  CHECK(out.cols == 512);
  CHECK(out.rows == 512);
  CHECK(out.at<cv::Vec3b>(256, 256)[1] == 200);
  CHECK(out.at<cv::Vec3b>(256, 5)[1] == 0);
  CHECK_THROWS_AS(make_letterbox(CropBox{0, 0, 0, 0, 10, 10}, 512, 512), PreconditionError);
}

}  // TEST_SUITE
