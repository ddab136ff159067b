// Copyright 2026 The socialgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SOCIALGEN_GEOMETRY_HPP_
#define SOCIALGEN_GEOMETRY_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace socialgen {

using Vec2 = Eigen::Vector2d;
using Polyline = std::vector<Vec2>;

/// Wraps an angle into (-pi, pi]; exactly -pi maps to +pi.
inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) a = M_PI;
  return a;
}

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Result of projecting a point onto a polyline.
struct PolylineProjection {
  double distance = 0.0;         // unsigned point-to-polyline distance
  double signed_lateral = 0.0;   // positive left of travel direction
  double tangent_heading = 0.0;  // heading of the closest segment
  double arc_length = 0.0;       // distance along the polyline to the foot
  int segment = 0;               // index of the closest segment
  double param = 0.0;            // position within that segment, in [0, 1]
};

/// Nearest-point projection onto an open polyline (>= 2 points).
inline PolylineProjection project_to_polyline(const Vec2& p, const Polyline& line) {
  PolylineProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  double arc = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec2 a = line[i];
    const Vec2 b = line[i + 1];
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    double s = 0.0;
    if (len2 > 0.0) s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    const Vec2 foot = a + s * ab;
    const double d2 = (p - foot).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.distance = std::sqrt(d2);
      best.tangent_heading = std::atan2(ab.y(), ab.x());
      const double side = cross2(ab, p - foot);
      best.signed_lateral = (side >= 0.0 ? 1.0 : -1.0) * best.distance;
      best.arc_length = arc + s * std::sqrt(len2);
      best.segment = static_cast<int>(i);
      best.param = s;
    }
    arc += std::sqrt(len2);
  }
  return best;
}

inline double polyline_length(const Polyline& line) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) len += (line[i + 1] - line[i]).norm();
  return len;
}

/// Proper intersection of segments [p0,p1] and [q0,q1]. Returns the segment
/// parameters (s, u) in [0,1]^2, or nullopt for parallel/disjoint segments.
inline std::optional<std::pair<double, double>> segment_intersection(
    const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
  const Vec2 r = p1 - p0;
  const Vec2 d = q1 - q0;
  const double denom = cross2(r, d);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const Vec2 qp = q0 - p0;
  const double s = cross2(qp, d) / denom;
  const double u = cross2(qp, r) / denom;
  if (s < 0.0 || s > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return std::make_pair(s, u);
}

/// First intersection of two polylines in traversal order of `a`.
/// Positions along each polyline are encoded as segment index plus the
/// parameter within that segment.
struct PolylineCrossing {
  double along_a = 0.0;  // segment index + param on polyline a
  double along_b = 0.0;
  Vec2 point = Vec2::Zero();
};

inline std::optional<PolylineCrossing> first_crossing(const Polyline& a, const Polyline& b) {
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    std::optional<PolylineCrossing> best;
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      const auto hit = segment_intersection(a[i], a[i + 1], b[j], b[j + 1]);
      if (!hit) continue;
      PolylineCrossing c;
      c.along_a = static_cast<double>(i) + hit->first;
      c.along_b = static_cast<double>(j) + hit->second;
      c.point = a[i] + hit->first * (a[i + 1] - a[i]);
      if (!best || c.along_a < best->along_a) best = c;
    }
    if (best) return best;
  }
  return std::nullopt;
}

}  // namespace socialgen

#endif  // SOCIALGEN_GEOMETRY_HPP_
