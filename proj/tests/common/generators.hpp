#pragma once
// Random instances and brute-force oracles shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "adlforge/curation/crop.hpp"
#include "adlforge/model/rng.hpp"
#include "adlforge/model/types.hpp"
#include "adlforge/objects/objects.hpp"

namespace testing {

/// Skeleton frame with 0-3 persons, some joints invalid or outside the frame.
inline adlforge::PoseFrame random_pose_frame(adlforge::Rng& rng, int w, int h) {
  adlforge::PoseFrame f;
  const int persons = rng.uniform_int(0, 3);
  for (int p = 0; p < persons; ++p) {
    adlforge::Skeleton s;
    const double cx = rng.uniform01() * w, cy = rng.uniform01() * h;
    const double spread = 1.0 + rng.uniform01() * std::min(w, h) * 0.4;
    const bool collapsed = rng.uniform01() < 0.05;
    for (int j = 0; j < 25; ++j) {
      adlforge::Joint jt;
      jt.u = collapsed ? cx : cx + (rng.uniform01() - 0.5) * 2 * spread;
      jt.v = collapsed ? cy : cy + (rng.uniform01() - 0.5) * 2 * spread;
      jt.valid_2d = rng.uniform01() > 0.1;
      s.joints.push_back(jt);
    }
    f.persons.push_back(std::move(s));
  }
  return f;
}

inline bool in_frame(const adlforge::Joint& j, int w, int h) {
  return j.valid_2d && j.u >= 0 && j.u < w && j.v >= 0 && j.v < h;
}

struct Extent {
  double x1, y1, x2, y2;
};

inline std::optional<Extent> joint_extent(const adlforge::PoseFrame& f, int w, int h) {
  std::optional<Extent> e;
  for (const auto& p : f.persons)
    for (const auto& j : p.joints) {
      if (!in_frame(j, w, h)) continue;
      if (!e) e = Extent{j.u, j.v, j.u, j.v};
      e->x1 = std::min(e->x1, j.u);
      e->y1 = std::min(e->y1, j.v);
      e->x2 = std::max(e->x2, j.u);
      e->y2 = std::max(e->y2, j.v);
    }
  return e;
}

/// Random features for a tracking instance: frames x n rows of `dim`, with
/// occasional exact duplicates so ties occur.
struct TrackInstance {
  int frames = 8, n = 1, dim = 1;
  std::vector<float> data;
  std::vector<std::vector<bool>> present;
};

inline TrackInstance random_track_instance(adlforge::Rng& rng) {
  TrackInstance t;
  t.n = rng.uniform_int(1, 4);
  t.dim = rng.uniform_int(1, 16);
  t.data.resize(static_cast<std::size_t>(t.frames) * t.n * t.dim);
  t.present.assign(t.frames, std::vector<bool>(t.n, true));
  for (int f = 0; f < t.frames; ++f)
    for (int i = 0; i < t.n; ++i) {
      float* row = &t.data[(static_cast<std::size_t>(f) * t.n + i) * t.dim];
      const double r = rng.uniform01();
      if (r < 0.1 && i > 0) {
        std::copy(row - t.dim, row, row);  // duplicate of the previous object: forces ties
      } else if (r < 0.15) {
        for (int d = 0; d < t.dim; ++d) row[d] = static_cast<float>(rng.uniform_int(-1, 1));  // small lattice: ties
      } else {
        for (int d = 0; d < t.dim; ++d) row[d] = static_cast<float>(rng.normal(0.0, 1.0));
      }
      if (rng.uniform01() < 0.1) t.present[f][i] = false;
    }
  return t;
}

/// All-pairs cosine argmax, lowest successor index on ties, in plain double
/// arithmetic.
inline adlforge::objects::Links brute_force_links(const TrackInstance& t, double min_sim) {
  auto row = [&](int f, int i) { return &t.data[(static_cast<std::size_t>(f) * t.n + i) * t.dim]; };
  auto cos = [&](const float* a, const float* b) {
    double ab = 0, aa = 0, bb = 0;
    for (int d = 0; d < t.dim; ++d) {
      ab += static_cast<double>(a[d]) * b[d];
      aa += static_cast<double>(a[d]) * a[d];
      bb += static_cast<double>(b[d]) * b[d];
    }
    if (aa == 0 || bb == 0) return 0.0;
    return ab / (std::sqrt(aa) * std::sqrt(bb));
  };
  adlforge::objects::Links links(t.frames - 1, std::vector<std::optional<int>>(t.n));
  for (int f = 0; f + 1 < t.frames; ++f)
    for (int i = 0; i < t.n; ++i) {
      if (!t.present[f][i]) continue;
      std::vector<std::pair<int, double>> all;
      for (int j = 0; j < t.n; ++j)
        if (t.present[f + 1][j]) all.emplace_back(j, cos(row(f, i), row(f + 1, j)));
      if (all.empty()) continue;
      auto best = all.front();
      for (const auto& c : all)
        if (c.second > best.second) best = c;
      if (best.second >= min_sim) links[f][i] = best.first;
    }
  return links;
}

}  // namespace testing
