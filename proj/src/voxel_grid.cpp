// SPDX-License-Identifier: Apache-2.0
#include "vats/voxel_grid.hpp"

#include "vats/predicates.hpp"
#include "vats/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

namespace vats {

namespace {

constexpr std::size_t kMaxCells = std::size_t{1} << 28;

void require_known(const VoxelGrid& grid, std::span<const MeshId> ids) {
  if (ids.empty()) throw InvalidArgument("overlap query needs at least one mesh id");
  for (MeshId id : ids) {
    if (id.value >= kMaxMeshIds || !grid.filled().contains(id)) {
      throw InvalidArgument("mesh id " + std::to_string(id.value) +
                            " is not registered and filled in this grid");
    }
  }
}

// Range of coordinate `b` over the part of triangle `c` (projected onto the
// a-b plane) with a in [slab_lo, slab_hi]; empty if the triangle misses the
// slab.
std::optional<std::pair<double, double>> projected_extent_in_slab(const std::array<Vec3, 3>& c,
                                                                 int a, int b, double slab_lo,
                                                                 double slab_hi) {
  double lo = kInf;
  double hi = -kInf;
  const auto take = [&](double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (int e = 0; e < 3; ++e) {
    const Vec3& p = c[e];
    const Vec3& q = c[(e + 1) % 3];
    if (p[a] >= slab_lo && p[a] <= slab_hi) take(p[b]);
    const double da = q[a] - p[a];
    if (da == 0.0) continue;
    for (const double bound : {slab_lo, slab_hi}) {
      const double t = (bound - p[a]) / da;
      if (t > 0.0 && t < 1.0) take(p[b] + t * (q[b] - p[b]));
    }
  }
  if (lo > hi) return std::nullopt;
  return std::pair{lo, hi};
}

}  // namespace

IdSet IdSet::of(std::span<const MeshId> ids) {
  IdSet s;
  for (MeshId id : ids) s.insert(id);
  return s;
}

std::array<int, 3> VoxelGrid::cell_of(std::size_t linear_index) const {
  const auto nx = static_cast<std::size_t>(dims_[0]);
  const auto ny = static_cast<std::size_t>(dims_[1]);
  return {static_cast<int>(linear_index % nx), static_cast<int>((linear_index / nx) % ny),
          static_cast<int>(linear_index / (nx * ny))};
}

bool VoxelGrid::surface(std::size_t cell, MeshId id) const {
  return id.value < surface_.size() && !surface_[id.value].empty() && surface_[id.value][cell];
}

VoxelGrid build_grid(std::span<const MeshModel> meshes, double spacing,
                     const Rigid& world_from_grid) {
  if (meshes.empty()) throw InvalidArgument("build_grid needs at least one mesh");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvalidArgument("voxel spacing must be positive");
  }
  const Rigid grid_from_world = world_from_grid.inverse();
  Aabb bounds;
  for (const MeshModel& m : meshes) {
    for (const Vec3& v : m.vertices()) bounds.extend(grid_from_world * v);
  }
  if (bounds.empty()) throw InvalidArgument("build_grid: meshes have no vertices");

  VoxelGrid grid;
  grid.world_from_grid_ = world_from_grid;
  grid.spacing_ = spacing;
  const Vec3 extent = bounds.extent();
  std::size_t total = 1;
  for (int k = 0; k < 3; ++k) {
    grid.dims_[k] = static_cast<int>(std::ceil(extent[k] / spacing)) + 2;
    total *= static_cast<std::size_t>(grid.dims_[k]);
  }
  if (total > kMaxCells) throw InvalidArgument("voxel grid too large; increase spacing");
  const Vec3 size(grid.dims_[0] * spacing, grid.dims_[1] * spacing, grid.dims_[2] * spacing);
  grid.origin_ = bounds.center() - 0.5 * size;
  grid.ids_.assign(total, IdSet{});
  grid.solid_.assign(total, IdSet{});
  grid.surface_.resize(kMaxMeshIds);
  return grid;
}

void voxelize_surface(VoxelGrid& grid, const MeshModel& mesh, MeshId id) {
  if (id.value >= kMaxMeshIds) throw InvalidArgument("mesh id out of range");
  if (grid.registered_.contains(id)) {
    throw InvalidArgument("mesh id " + std::to_string(id.value) + " already registered");
  }
  grid.registered_.insert(id);
  auto& surface = grid.surface_[id.value];
  surface.assign(grid.cell_count(), false);

  const Rigid grid_from_world = grid.world_from_grid_.inverse();
  const double h = grid.spacing_;
  const Vec3 half = Vec3::Constant(0.5 * h);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    auto c = mesh.corners(t);
    for (Vec3& v : c) v = grid_from_world * v;
    Aabb box;
    for (const Vec3& v : c) box.extend(v);
    std::array<int, 3> lo{};
    std::array<int, 3> hi{};
    const Vec3 n = (c[1] - c[0]).cross(c[2] - c[0]);
    const double reach = 0.5 * h * n.cwiseAbs().sum() * (1.0 + 1e-9);
    for (int k = 0; k < 3; ++k) {
      // one extra cell either side so boundary-touching cells reach the SAT test
      lo[k] = std::max(0, static_cast<int>(std::floor((box.min[k] - grid.origin_[k]) / h)) - 1);
      hi[k] = std::min(grid.dims_[k] - 1,
                       static_cast<int>(std::floor((box.max[k] - grid.origin_[k]) / h)) + 1);
    }
    // Walk the two axes where the normal is smallest; along the dominant
    // axis only cells near the triangle's plane can overlap it.
    int d = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::abs(n[k]) > std::abs(n[d])) d = k;
    }
    const int a = (d + 1) % 3;
    const int b = (d + 2) % 3;
    const double half_band = reach / std::abs(n[d]);
    std::array<int, 3> idx{};
    for (idx[a] = lo[a]; idx[a] <= hi[a]; ++idx[a]) {
      // Columns whose footprint can touch the triangle's projection.
      const double slab_lo = grid.origin_[a] + idx[a] * h;
      const double slab_hi = slab_lo + h;
      const auto b_range = projected_extent_in_slab(c, a, b, slab_lo, slab_hi);
      if (!b_range) continue;
      const int b_first =
          std::max(lo[b], static_cast<int>(std::floor((b_range->first - grid.origin_[b]) / h)) - 1);
      const int b_last =
          std::min(hi[b], static_cast<int>(std::floor((b_range->second - grid.origin_[b]) / h)) + 1);
      for (idx[b] = b_first; idx[b] <= b_last; ++idx[b]) {
        const Vec3 column = grid.center_local(idx[0], idx[1], idx[2]);
        const double on_plane =
            c[0][d] - (n[a] * (column[a] - c[0][a]) + n[b] * (column[b] - c[0][b])) / n[d];
        const double from = (on_plane - half_band - grid.origin_[d]) / h - 0.5;
        const double to = (on_plane + half_band - grid.origin_[d]) / h - 0.5;
        const int first = std::max(lo[d], static_cast<int>(std::ceil(from)) - 1);
        const int last = std::min(hi[d], static_cast<int>(std::floor(to)) + 1);
        for (idx[d] = first; idx[d] <= last; ++idx[d]) {
          const std::size_t cell = grid.linear(idx[0], idx[1], idx[2]);
          if (surface[cell]) continue;
          const Vec3 center = grid.center_local(idx[0], idx[1], idx[2]);
          if (std::abs(n.dot(center - c[0])) > reach) continue;  // box misses the plane
          if (triangle_box_overlap(center, half, c[0], c[1], c[2])) {
            surface[cell] = true;
            grid.ids_[cell].insert(id);
          }
        }
      }
    }
  }
}

void fill_interior(VoxelGrid& grid, const MeshModel& mesh, MeshId id, bool allow_open) {
  if (id.value >= kMaxMeshIds || !grid.registered_.contains(id)) {
    throw InvalidArgument("fill_interior: surface voxelization has not run for mesh id " +
                          std::to_string(id.value));
  }
  if (grid.filled_.contains(id)) throw InvalidArgument("fill_interior: mesh id already filled");

  const SpatialIndex local(mesh.transformed(grid.world_from_grid_.inverse()));
  if (!local.closed() && !allow_open) {
    throw OpenMeshError("fill_interior: mesh '" + mesh.name() +
                        "' is not closed (enable the open-mesh fallback to fill anyway)");
  }
  grid.filled_.insert(id);
  const auto& surface = grid.surface_[id.value];
  const auto [nx, ny, nz] = grid.dims_;
  const double h = grid.spacing_;

  const auto mark = [&](std::size_t cell) {
    grid.ids_[cell].insert(id);
    grid.solid_[cell].insert(id);
  };

  if (!local.closed()) {
    for (int k = 0; k < nz; ++k) {
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          if (point_in_mesh_unchecked(local, grid.center_local(i, j, k))) mark(grid.linear(i, j, k));
        }
      }
    }
    return;
  }

  const double x0 = grid.origin_.x() - h;
  std::vector<double> crossings;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      const Vec3 start = grid.center_local(0, j, k) - Vec3(0.5 * h + h, 0.0, 0.0);
      const auto hits = ray_intersect(local, Ray(start, Vec3::UnitX()));
      const bool grazing =
          std::any_of(hits.begin(), hits.end(), [](const RayHit& hit) { return hit.on_edge; });
      crossings.clear();
      for (const RayHit& hit : hits) crossings.push_back(x0 + hit.distance);

      bool flip = false;
      std::size_t passed = 0;  // crossings strictly left of the current center
      int run = 0;             // length of the surface run just left behind
      for (int i = 0; i < nx; ++i) {
        const std::size_t cell = grid.linear(i, j, k);
        const Vec3 center = grid.center_local(i, j, k);
        while (passed < crossings.size() && crossings[passed] < center.x()) ++passed;
        const bool on_center =
            passed < crossings.size() && std::abs(crossings[passed] - center.x()) < 1e-9;

        bool inside = false;
        if (grazing || on_center) {
          inside = point_in_mesh(local, center);
        } else {
          inside = ((passed % 2) == 1) != flip;
          if (!surface[cell] && run > 1) {
            // Thick surface run: confirm the state of the first cell after it.
            const bool truth = point_in_mesh(local, center);
            if (truth != inside) {
              flip = !flip;
              inside = truth;
            }
          }
        }
        run = surface[cell] ? run + 1 : 0;
        if (inside) mark(cell);
      }
    }
  }
}

void add_mesh(VoxelGrid& grid, const MeshModel& mesh, MeshId id, bool allow_open) {
  voxelize_surface(grid, mesh, id);
  fill_interior(grid, mesh, id, allow_open);
}

std::size_t overlap_cell_count(const VoxelGrid& grid, std::span<const MeshId> ids) {
  require_known(grid, ids);
  const IdSet want = IdSet::of(ids);
  std::size_t count = 0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (grid.solid(c).contains_all(want)) ++count;
  }
  return count;
}

double overlap_volume(const VoxelGrid& grid, std::span<const MeshId> ids) {
  return static_cast<double>(overlap_cell_count(grid, ids)) * grid.cell_volume_mm3() /
         kMm3PerLiter;
}

std::vector<Vec3> export_overlap_cells(const VoxelGrid& grid, std::span<const MeshId> ids) {
  require_known(grid, ids);
  const IdSet want = IdSet::of(ids);
  std::vector<Vec3> centers;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!grid.solid(c).contains_all(want)) continue;
    const auto [i, j, k] = grid.cell_of(c);
    centers.push_back(grid.center_world(i, j, k));
  }
  return centers;
}

}  // namespace vats
