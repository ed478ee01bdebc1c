// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/common.hpp"

#include <optional>

namespace vats {

/// Ray hits closer than this (mm) are ignored.
inline constexpr double kMinHitDistance = 1e-6;

struct TriangleHit {
  double t = 0.0;        // distance along the (unit) direction
  bool on_edge = false;  // an edge function evaluated to exactly zero
};

/// Watertight ray/triangle test (Woop, Benthin, Wald 2013). Rays crossing a
/// shared edge are reported by at least one of the adjacent triangles, and
/// such hits carry `on_edge`. Only hits with t > kMinHitDistance count.
std::optional<TriangleHit> intersect_ray_triangle(const Vec3& origin, const Vec3& dir,
                                                  const Vec3& a, const Vec3& b, const Vec3& c);

/// Closed segment [p, q] against a closed triangle.
bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c);

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);
double segment_triangle_distance(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c);

/// Separating-axis overlap of a triangle and an axis-aligned box given by
/// center and half extents (Akenine-Möller). Touching counts as overlap.
bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c);

/// Entry distance of a ray into a box, if the ray meets it at t in [0, t_max].
std::optional<double> ray_box_entry(const Vec3& origin, const Vec3& dir, const Aabb& box,
                                    double t_max = kInf);

/// Whether the segment [p, q] passes through `box` grown by `radius`.
bool segment_box_overlap(const Vec3& p, const Vec3& q, const Aabb& box, double radius = 0.0);

}  // namespace vats
