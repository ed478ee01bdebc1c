// SPDX-License-Identifier: Apache-2.0
#include "vats/predicates.hpp"

#include <algorithm>
#include <cmath>

namespace vats {

namespace {

struct EdgeFunctions {
  double u, v, w, det, t_scaled;
};

// Shear/scale setup of the watertight test; returns std::nullopt when the ray
// misses the triangle's projection or is parallel to its plane.
std::optional<EdgeFunctions> watertight(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                        const Vec3& b, const Vec3& c) {
  int kz = 0;
  dir.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (dir[kz] < 0.0) std::swap(kx, ky);

  const double sx = dir[kx] / dir[kz];
  const double sy = dir[ky] / dir[kz];
  const double sz = 1.0 / dir[kz];

  const Vec3 pa = a - origin;
  const Vec3 pb = b - origin;
  const Vec3 pc = c - origin;

  const double ax = pa[kx] - sx * pa[kz];
  const double ay = pa[ky] - sy * pa[kz];
  const double bx = pb[kx] - sx * pb[kz];
  const double by = pb[ky] - sy * pb[kz];
  const double cx = pc[kx] - sx * pc[kz];
  const double cy = pc[ky] - sy * pc[kz];

  const double u = cx * by - cy * bx;
  const double v = ax * cy - ay * cx;
  const double w = bx * ay - by * ax;

  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double t_scaled = u * (sz * pa[kz]) + v * (sz * pb[kz]) + w * (sz * pc[kz]);
  return EdgeFunctions{u, v, w, det, t_scaled};
}

}  // namespace

std::optional<TriangleHit> intersect_ray_triangle(const Vec3& origin, const Vec3& dir,
                                                  const Vec3& a, const Vec3& b, const Vec3& c) {
  const auto ef = watertight(origin, dir, a, b, c);
  if (!ef) return std::nullopt;
  const double t = ef->t_scaled / ef->det;
  if (!(t > kMinHitDistance)) return std::nullopt;
  return TriangleHit{t, ef->u == 0.0 || ef->v == 0.0 || ef->w == 0.0};
}

bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c) {
  const Vec3 d = q - p;
  const double len = d.norm();
  if (len == 0.0) return point_triangle_distance(p, a, b, c) == 0.0;
  const auto ef = watertight(p, d / len, a, b, c);
  if (!ef) return false;
  const double t = ef->t_scaled / ef->det;
  return t >= 0.0 && t <= len;
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  return (p - closest_point_on_triangle(p, a, b, c)).norm();
}

// Ericson 5.1.9.
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= 0.0 && e <= 0.0) return r.norm();
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + d1 * s) - (q0 + d2 * t)).norm();
}

double segment_triangle_distance(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c) {
  if (segment_intersects_triangle(p, q, a, b, c)) return 0.0;
  // Without a crossing the minimum is attained at a segment endpoint or on a
  // triangle edge.
  double best = std::min(point_triangle_distance(p, a, b, c), point_triangle_distance(q, a, b, c));
  best = std::min(best, segment_segment_distance(p, q, a, b));
  best = std::min(best, segment_segment_distance(p, q, b, c));
  best = std::min(best, segment_segment_distance(p, q, c, a));
  return best;
}

bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c) {
  const Vec3 v0 = a - center;
  const Vec3 v1 = b - center;
  const Vec3 v2 = c - center;
  const Vec3 e0 = v1 - v0;
  const Vec3 e1 = v2 - v1;
  const Vec3 e2 = v0 - v2;

  // Nine edge-cross-axis tests: axis = unit_k x edge.
  const Vec3* verts[3] = {&v0, &v1, &v2};
  const Vec3* edges[3] = {&e0, &e1, &e2};
  for (const Vec3* edge : edges) {
    for (int k = 0; k < 3; ++k) {
      Vec3 axis = Vec3::Zero();
      axis[k] = 1.0;
      axis = axis.cross(*edge);
      double lo = kInf;
      double hi = -kInf;
      for (const Vec3* v : verts) {
        const double proj = axis.dot(*v);
        lo = std::min(lo, proj);
        hi = std::max(hi, proj);
      }
      const double rad = half.dot(axis.cwiseAbs());
      if (lo > rad || hi < -rad) return false;
    }
  }

  // Box face normals.
  for (int k = 0; k < 3; ++k) {
    const double lo = std::min({v0[k], v1[k], v2[k]});
    const double hi = std::max({v0[k], v1[k], v2[k]});
    if (lo > half[k] || hi < -half[k]) return false;
  }

  // Triangle plane.
  const Vec3 normal = e0.cross(e1);
  const double dist = normal.dot(v0);
  const double rad = half.dot(normal.cwiseAbs());
  return std::abs(dist) <= rad;
}

namespace {
// 1 + 2 gamma(3), the bound on the slab-distance rounding error (Ize 2013).
constexpr double kSlabRoundUp = 1.0 + 2.0 * (3.0 * 0x1p-53) / (1.0 - 3.0 * 0x1p-53);
}  // namespace

std::optional<double> ray_box_entry(const Vec3& origin, const Vec3& dir, const Aabb& box,
                                    double t_max) {
  double lo = 0.0;
  double hi = t_max;
  for (int k = 0; k < 3; ++k) {
    if (dir[k] == 0.0) {
      if (origin[k] < box.min[k] || origin[k] > box.max[k]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / dir[k];
    double t0 = (box.min[k] - origin[k]) * inv;
    double t1 = (box.max[k] - origin[k]) * inv;
    if (t0 > t1) std::swap(t0, t1);
    t1 *= kSlabRoundUp;  // conservative: never cull a box the ray grazes
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
    if (lo > hi) return std::nullopt;
  }
  return lo;
}

bool segment_box_overlap(const Vec3& p, const Vec3& q, const Aabb& box, double radius) {
  const Aabb grown{(box.min.array() - radius).matrix(), (box.max.array() + radius).matrix()};
  const Vec3 d = q - p;
  const double len = d.norm();
  if (len == 0.0) {
    return (p.array() >= grown.min.array()).all() && (p.array() <= grown.max.array()).all();
  }
  return ray_box_entry(p, d / len, grown, len).has_value();
}

}  // namespace vats
