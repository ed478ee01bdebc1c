// SPDX-License-Identifier: Apache-2.0
#include "vats/spatial_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace vats {

namespace {

constexpr std::uint32_t kLeafSize = 4;

// Parity probe directions. None is axis-aligned or lies in a coordinate
// plane, so axis-aligned geometry never grazes the first probe.
const std::array<Vec3, 6>& probe_directions() {
  static const std::array<Vec3, 6> dirs = {
      Vec3(0.5377, 0.6193, 0.5720).normalized(),  Vec3(-0.3141, 0.8660, 0.3891).normalized(),
      Vec3(0.7071, -0.2718, 0.6522).normalized(), Vec3(-0.6180, -0.5772, 0.5338).normalized(),
      Vec3(0.1414, 0.4142, -0.8989).normalized(), Vec3(-0.8312, 0.2236, -0.5090).normalized(),
  };
  return dirs;
}

}  // namespace

Ray::Ray(const Vec3& o, const Vec3& d) : origin(o) {
  const double n = d.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("ray direction must be nonzero");
  direction = d / n;
}

SpatialIndex::SpatialIndex(MeshModel mesh) : mesh_(std::move(mesh)), closed_(is_closed(mesh_)) {
  const auto n = static_cast<std::uint32_t>(mesh_.triangle_count());
  if (n == 0) return;
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t i = 0; i < n; ++i) centroids[i] = mesh_.centroid(i);
  nodes_.reserve(2 * n / kLeafSize + 2);
  build(0, n, centroids);
}

std::uint32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end,
                                  std::vector<Vec3>& centroids) {
  const auto ni = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb bounds;
  Aabb centroid_bounds;
  for (std::uint32_t i = begin; i < end; ++i) {
    for (const Vec3& v : mesh_.corners(order_[i])) bounds.extend(v);
    centroid_bounds.extend(centroids[order_[i]]);
  }
  nodes_[ni].bounds = bounds;
  if (end - begin <= kLeafSize) {
    nodes_[ni].first = begin;
    nodes_[ni].count = end - begin;
    return ni;
  }
  int axis = 0;
  centroid_bounds.extent().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t l, std::uint32_t r) {
                     if (centroids[l][axis] != centroids[r][axis]) {
                       return centroids[l][axis] < centroids[r][axis];
                     }
                     return l < r;
                   });
  build(begin, mid, centroids);
  const std::uint32_t right = build(mid, end, centroids);
  nodes_[ni].first = right;
  nodes_[ni].count = 0;
  return ni;
}

void normalize_hits(std::vector<RayHit>& hits) {
  std::sort(hits.begin(), hits.end(), [](const RayHit& l, const RayHit& r) {
    return l.distance != r.distance ? l.distance < r.distance : l.triangle < r.triangle;
  });
  std::vector<RayHit> merged;
  merged.reserve(hits.size());
  for (const RayHit& h : hits) {
    if (!merged.empty() && h.on_edge && merged.back().on_edge &&
        h.distance - merged.back().distance <= kHitMergeDistance) {
      continue;  // same crossing reported by the neighbor across the edge
    }
    merged.push_back(h);
  }
  hits = std::move(merged);
}

std::vector<RayHit> ray_intersect(const SpatialIndex& index, const Ray& ray) {
  std::vector<RayHit> hits;
  const MeshModel& mesh = index.mesh();
  index.traverse([&](const Aabb& box) { return ray_box_entry(ray.origin, ray.direction, box).has_value(); },
                 [&](std::uint32_t tri) {
                   const auto c = mesh.corners(tri);
                   if (auto h = intersect_ray_triangle(ray.origin, ray.direction, c[0], c[1], c[2])) {
                     hits.push_back({h->t, tri, h->on_edge});
                   }
                   return true;
                 });
  normalize_hits(hits);
  return hits;
}

bool segment_blocked(const SpatialIndex& index, const Segment& seg) {
  if ((seg.b - seg.a).norm() <= 0.0) throw InvalidArgument("segment length must be positive");
  const MeshModel& mesh = index.mesh();
  const double radius = std::max(0.0, seg.radius);
  bool blocked = false;
  index.traverse([&](const Aabb& box) { return segment_box_overlap(seg.a, seg.b, box, radius); },
                 [&](std::uint32_t tri) {
                   const auto c = mesh.corners(tri);
                   if (radius == 0.0) {
                     blocked = segment_intersects_triangle(seg.a, seg.b, c[0], c[1], c[2]);
                   } else {
                     blocked = segment_triangle_distance(seg.a, seg.b, c[0], c[1], c[2]) <= radius;
                   }
                   return !blocked;
                 });
  return blocked;
}

double segment_clearance(const SpatialIndex& index, const Segment& seg) {
  const MeshModel& mesh = index.mesh();
  double best = kInf;
  index.traverse(
      [&](const Aabb& box) {
        return std::isinf(best) || segment_box_overlap(seg.a, seg.b, box, best);
      },
      [&](std::uint32_t tri) {
        const auto c = mesh.corners(tri);
        best = std::min(best, segment_triangle_distance(seg.a, seg.b, c[0], c[1], c[2]));
        return best > 0.0;
      });
  return best;
}

bool point_in_mesh_unchecked(const SpatialIndex& index, const Vec3& p) {
  const Aabb box = index.bounds();
  if (box.empty() || (p.array() < box.min.array()).any() || (p.array() > box.max.array()).any()) {
    return false;
  }
  bool inside = false;
  for (const Vec3& dir : probe_directions()) {
    const auto hits = ray_intersect(index, Ray(p, dir));
    inside = hits.size() % 2 == 1;
    const bool grazing =
        std::any_of(hits.begin(), hits.end(), [](const RayHit& h) { return h.on_edge; });
    if (!grazing) break;
  }
  return inside;
}

bool point_in_mesh(const SpatialIndex& index, const Vec3& p) {
  if (!index.closed()) {
    throw OpenMeshError("point_in_mesh needs a closed mesh ('" + index.mesh().name() + "')");
  }
  return point_in_mesh_unchecked(index, p);
}

std::optional<NearestTriangle> nearest_triangle(const SpatialIndex& index, const Vec3& p,
                                                double max_distance) {
  std::optional<NearestTriangle> best;
  double limit = max_distance;
  const MeshModel& mesh = index.mesh();
  index.traverse(
      [&](const Aabb& box) {
        const Vec3 q = p.cwiseMax(box.min).cwiseMin(box.max);
        return (q - p).norm() <= limit;
      },
      [&](std::uint32_t tri) {
        const auto c = mesh.corners(tri);
        const double d = point_triangle_distance(p, c[0], c[1], c[2]);
        if (d <= limit && (!best || d < best->distance ||
                           (d == best->distance && tri < best->triangle))) {
          best = NearestTriangle{tri, d};
          limit = d;
        }
        return true;
      });
  return best;
}

}  // namespace vats
