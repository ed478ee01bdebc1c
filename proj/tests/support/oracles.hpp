// SPDX-License-Identifier: Apache-2.0
// Slow, independent reference implementations the fast paths are checked
// against. None of these use the spatial index or the optimized predicates.
#pragma once

#include "vats/mesh.hpp"
#include "vats/predicates.hpp"
#include "vats/spatial_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace vats::testing {

/// Every triangle tested with the same predicate, then normalized.
inline std::vector<RayHit> brute_force_hits(const MeshModel& mesh, const Ray& ray) {
  std::vector<RayHit> hits;
  for (std::uint32_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto c = mesh.corners(t);
    if (const auto h = intersect_ray_triangle(ray.origin, ray.direction, c[0], c[1], c[2])) {
      hits.push_back(RayHit{h->t, t, h->on_edge});
    }
  }
  normalize_hits(hits);
  return hits;
}

/// Möller-Trumbore. Returns nullopt when the ray is within `eps` of an edge
/// (ambiguous) through `ambiguous`.
inline std::optional<double> mt_hit(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                                    const Vec3& c, bool& ambiguous, double eps = 1e-9) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-15) return std::nullopt;
  const Vec3 s = o - a;
  const double u = s.dot(p) / det;
  const Vec3 q = s.cross(e1);
  const double v = d.dot(q) / det;
  const double t = e2.dot(q) / det;
  if (t <= 1e-6) return std::nullopt;
  const double w = 1.0 - u - v;
  if (u < -eps || v < -eps || w < -eps) return std::nullopt;
  if (u < eps || v < eps || w < eps) {
    ambiguous = true;
    return std::nullopt;
  }
  return t;
}

/// Ray parity over all triangles; retries other directions when a ray
/// passes near an edge.
inline bool parity_inside(const MeshModel& mesh, const Vec3& p) {
  static const std::array<Vec3, 5> dirs = {
      Vec3(0.5377, 0.8622, -0.3188).normalized(), Vec3(-0.3034, 0.2939, 0.9064).normalized(),
      Vec3(0.7254, -0.0631, 0.6855).normalized(), Vec3(-0.2050, -0.1241, -0.9709).normalized(),
      Vec3(0.1102, -0.8637, 0.0774).normalized()};
  for (const Vec3& d : dirs) {
    bool ambiguous = false;
    int crossings = 0;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      const auto c = mesh.corners(t);
      if (mt_hit(p, d, c[0], c[1], c[2], ambiguous)) ++crossings;
      if (ambiguous) break;
    }
    if (!ambiguous) return crossings % 2 == 1;
  }
  return false;
}

/// Generic separating-axis test: project all 8 box corners and 3 triangle
/// vertices onto the 13 candidate axes. Touching counts as overlap.
inline bool sat_oracle(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                       const Vec3& c) {
  std::vector<Vec3> axes = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  const std::array<Vec3, 3> edges = {b - a, c - b, a - c};
  axes.push_back(edges[0].cross(edges[1]));
  for (const Vec3& e : edges) {
    for (int k = 0; k < 3; ++k) axes.push_back(Vec3::Unit(k).cross(e));
  }
  std::array<Vec3, 8> corners;
  for (int i = 0; i < 8; ++i) {
    corners[i] = center + Vec3((i & 1) ? half.x() : -half.x(), (i & 2) ? half.y() : -half.y(),
                               (i & 4) ? half.z() : -half.z());
  }
  for (const Vec3& axis : axes) {
    if (axis.squaredNorm() < 1e-24) continue;
    double bmin = kInf, bmax = -kInf, tmin = kInf, tmax = -kInf;
    for (const Vec3& p : corners) {
      bmin = std::min(bmin, axis.dot(p));
      bmax = std::max(bmax, axis.dot(p));
    }
    for (const Vec3& p : {a, b, c}) {
      tmin = std::min(tmin, axis.dot(p));
      tmax = std::max(tmax, axis.dot(p));
    }
    const double slack = 1e-9 * axis.norm() * (1.0 + center.norm() + half.norm());
    if (tmin > bmax + slack || bmin > tmax + slack) return false;
  }
  return true;
}

/// Distance from p to triangle by dense barycentric sampling (upper bound on
/// the true distance, converging as n grows).
inline double sampled_point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                                              const Vec3& c, int n = 200) {
  double best = kInf;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const double u = static_cast<double>(i) / n;
      const double v = static_cast<double>(j) / n;
      best = std::min(best, (a + u * (b - a) + v * (c - a) - p).norm());
    }
  }
  return best;
}

}  // namespace vats::testing
