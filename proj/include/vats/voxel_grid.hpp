// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/common.hpp"
#include "vats/mesh.hpp"

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace vats {

inline constexpr double kDefaultVoxelSpacingMm = 15.0;

/// Handle of a mesh registered in a VoxelGrid. At most kMaxMeshIds per grid.
struct MeshId {
  std::uint8_t value = 0;
  auto operator<=>(const MeshId&) const = default;
};
inline constexpr unsigned kMaxMeshIds = 64;

/// Set of mesh ids held by one voxel.
class IdSet {
 public:
  constexpr IdSet() = default;
  constexpr void insert(MeshId id) { bits_ |= bit(id); }
  constexpr bool contains(MeshId id) const { return (bits_ & bit(id)) != 0; }
  constexpr bool contains_all(IdSet other) const { return (bits_ & other.bits_) == other.bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const IdSet&) const = default;
  static IdSet of(std::span<const MeshId> ids);

 private:
  static constexpr std::uint64_t bit(MeshId id) { return std::uint64_t{1} << id.value; }
  std::uint64_t bits_ = 0;
};

/// Regular grid that is axis-aligned in its own frame (`world_from_grid`).
///
/// Each cell records two id sets: `ids` holds every mesh that touches the
/// cell (surface voxels plus filled interior), `solid` holds the meshes whose
/// interior contains the cell center. Volumes are measured on `solid`.
class VoxelGrid {
 public:
  const Rigid& world_from_grid() const { return world_from_grid_; }
  const Vec3& origin() const { return origin_; }  // min corner, grid frame
  double spacing() const { return spacing_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t cell_count() const { return ids_.size(); }
  double cell_volume_mm3() const { return spacing_ * spacing_ * spacing_; }

  std::size_t linear(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_[1]) * k);
  }
  std::array<int, 3> cell_of(std::size_t linear_index) const;
  Vec3 center_local(int i, int j, int k) const {
    return origin_ + spacing_ * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  Vec3 center_world(int i, int j, int k) const { return world_from_grid_ * center_local(i, j, k); }

  IdSet ids(std::size_t cell) const { return ids_[cell]; }
  IdSet solid(std::size_t cell) const { return solid_[cell]; }
  bool surface(std::size_t cell, MeshId id) const;

  IdSet registered() const { return registered_; }
  IdSet filled() const { return filled_; }

 private:
  friend VoxelGrid build_grid(std::span<const MeshModel>, double, const Rigid&);
  friend void voxelize_surface(VoxelGrid&, const MeshModel&, MeshId);
  friend void fill_interior(VoxelGrid&, const MeshModel&, MeshId, bool);

  Rigid world_from_grid_ = Rigid::Identity();
  Vec3 origin_ = Vec3::Zero();
  double spacing_ = kDefaultVoxelSpacingMm;
  std::array<int, 3> dims_{0, 0, 0};
  std::vector<IdSet> ids_;
  std::vector<IdSet> solid_;
  std::vector<std::vector<bool>> surface_;  // per mesh id value
  IdSet registered_;
  IdSet filled_;
};

/// Empty grid covering every mesh with at least one voxel of margin on each
/// side. The grid is centered on the union bounds measured in the grid frame.
VoxelGrid build_grid(std::span<const MeshModel> meshes, double spacing = kDefaultVoxelSpacingMm,
                     const Rigid& world_from_grid = Rigid::Identity());

/// Tags `id` on every cell whose box overlaps at least one triangle.
/// Registers `id`; throws InvalidArgument if it is already registered.
void voxelize_surface(VoxelGrid& grid, const MeshModel& mesh, MeshId id);

/// Scan-line interior fill along +x: tags `id` (both `ids` and `solid`) on
/// every cell whose center lies inside the mesh. Needs a prior
/// voxelize_surface for `id`. Open meshes throw OpenMeshError unless
/// `allow_open`, which switches to per-cell ray parity.
void fill_interior(VoxelGrid& grid, const MeshModel& mesh, MeshId id, bool allow_open = false);

/// voxelize_surface followed by fill_interior.
void add_mesh(VoxelGrid& grid, const MeshModel& mesh, MeshId id, bool allow_open = false);

/// Cells whose solid set contains every id in `ids`.
std::size_t overlap_cell_count(const VoxelGrid& grid, std::span<const MeshId> ids);

/// overlap_cell_count x spacing³, in liters.
double overlap_volume(const VoxelGrid& grid, std::span<const MeshId> ids);

/// World-space centers of the overlap cells, x index fastest.
std::vector<Vec3> export_overlap_cells(const VoxelGrid& grid, std::span<const MeshId> ids);

}  // namespace vats
