// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/common.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace vats {

using Triangle = std::array<std::uint32_t, 3>;

/// Triangles whose area falls at or below this (mm²) are dropped on ingestion.
inline constexpr double kDegenerateAreaMm2 = 1e-6;

/// Triangulated surface in millimeters.
///
/// Construction validates indices and drops degenerate triangles, so every
/// MeshModel in the engine satisfies both invariants. Immutable afterwards.
class MeshModel {
 public:
  MeshModel() = default;
  MeshModel(std::string name, std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  const std::string& name() const { return name_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  std::size_t triangle_count() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }

  std::array<Vec3, 3> corners(std::size_t tri) const {
    const Triangle& t = triangles_[tri];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
  }
  Vec3 centroid(std::size_t tri) const;
  Aabb bounds() const;

  /// Number of input triangles removed as degenerate during construction.
  std::size_t dropped_degenerate() const { return dropped_; }

  MeshModel transformed(const Rigid& xf) const;

 private:
  std::string name_;
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::size_t dropped_ = 0;
};

/// Raised for unreadable or malformed OBJ input. `line()` is 1-based, 0 when
/// the problem is not tied to a line (missing file, empty mesh).
class ObjError : public Error {
 public:
  ObjError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads an ASCII OBJ. Only `v` and `f` records matter; polygons are fan
/// triangulated, normals/texcoords/groups/materials are ignored.
MeshModel load_obj(const std::filesystem::path& path);
MeshModel parse_obj(std::istream& in, std::string name);

void write_obj(const MeshModel& mesh, std::ostream& out);
void write_obj(const MeshModel& mesh, const std::filesystem::path& path);

/// True iff every edge is shared by exactly two triangles traversing it in
/// opposite directions.
bool is_closed(const MeshModel& mesh);

}  // namespace vats
