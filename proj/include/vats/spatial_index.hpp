// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/mesh.hpp"
#include "vats/predicates.hpp"

#include <cstdint>
#include <vector>

namespace vats {

/// Half-line with a unit direction. Construct through `Ray::through` or the
/// constructor; both normalize.
struct Ray {
  Vec3 origin;
  Vec3 direction;

  Ray(const Vec3& origin, const Vec3& direction);
  static Ray through(const Vec3& from, const Vec3& to) { return Ray(from, to - from); }
};

/// Segment from `a` to `b`, optionally swept by a sphere (capsule).
struct Segment {
  Vec3 a;
  Vec3 b;
  double radius = 0.0;
};

struct RayHit {
  double distance;
  std::uint32_t triangle;
  bool on_edge;
};

/// Hits that lie within this distance (mm) of each other and are both edge
/// hits are reported once.
inline constexpr double kHitMergeDistance = 1e-6;

/// Median-split bounding-volume hierarchy over one mesh. Owns its mesh and is
/// immutable after construction, so concurrent queries are safe.
class SpatialIndex {
 public:
  struct Node {
    Aabb bounds;
    std::uint32_t first = 0;  // first triangle slot (leaf) or right child (inner)
    std::uint32_t count = 0;  // > 0 for leaves
  };

  explicit SpatialIndex(MeshModel mesh);

  const MeshModel& mesh() const { return mesh_; }
  bool closed() const { return closed_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  /// Triangle ids in leaf order; a leaf covers [first, first + count).
  const std::vector<std::uint32_t>& leaf_triangles() const { return order_; }
  Aabb bounds() const { return nodes_.empty() ? Aabb{} : nodes_.front().bounds; }

  /// Visits every triangle whose leaf box passes `box_test`.
  template <typename BoxTest, typename TriVisitor>
  void traverse(BoxTest&& box_test, TriVisitor&& visit) const;

 private:
  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);

  MeshModel mesh_;
  bool closed_ = false;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

/// All crossings with distance > kMinHitDistance, ascending by distance.
std::vector<RayHit> ray_intersect(const SpatialIndex& index, const Ray& ray);

/// Sorts hits and collapses coincident edge hits; shared by the indexed query
/// and exhaustive checks.
void normalize_hits(std::vector<RayHit>& hits);

/// True iff some triangle lies within `seg.radius` of the segment.
bool segment_blocked(const SpatialIndex& index, const Segment& seg);

/// Smallest distance from the segment to any triangle (ignores seg.radius);
/// +inf for an empty mesh.
double segment_clearance(const SpatialIndex& index, const Segment& seg);

/// Raised when an operation needs a closed mesh.
class OpenMeshError : public Error {
 public:
  using Error::Error;
};

/// Ray-parity inside test. Requires a closed mesh. Grazing rays (edge or
/// vertex hits) are retried along a different fixed direction.
bool point_in_mesh(const SpatialIndex& index, const Vec3& p);

/// Parity test without the closedness precondition; used by the open-mesh
/// fill fallback.
bool point_in_mesh_unchecked(const SpatialIndex& index, const Vec3& p);

/// Nearest triangle to `p` within `max_distance`, if any.
struct NearestTriangle {
  std::uint32_t triangle;
  double distance;
};
std::optional<NearestTriangle> nearest_triangle(const SpatialIndex& index, const Vec3& p,
                                                double max_distance);

template <typename BoxTest, typename TriVisitor>
void SpatialIndex::traverse(BoxTest&& box_test, TriVisitor&& visit) const {
  if (nodes_.empty()) return;
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const std::uint32_t ni = stack[--top];
    const Node& node = nodes_[ni];
    if (!box_test(node.bounds)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        if (!visit(order_[i])) return;
      }
    } else {
      stack[top++] = node.first;
      stack[top++] = ni + 1;
    }
  }
}

}  // namespace vats
