// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/spatial_index.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vats {

enum class Role { Skin, Rib, Vertebra, Scapula, Trachea, Vasculature, Other };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view name);

/// Ribs, vertebrae and scapulae block instrument and camera paths.
/// Trachea and vasculature are display-only.
constexpr bool is_bony(Role role) {
  return role == Role::Rib || role == Role::Vertebra || role == Role::Scapula;
}

/// Tunable thresholds and model parameters. Lengths in mm, angles in degrees.
struct PlanningDefaults {
  double spacing_mm = 15.0;
  double reach_mm = 280.0;
  double half_angle_deg = 20.0;
  double fov_deg = 60.0;
  double tilt_deg = 30.0;
  double aim_tol_mm = 5.0;
  double capsule_radius_mm = 5.0;
  double snap_tol_mm = 10.0;
  double fov_length_mm = 280.0;
  double tube_length_mm = 300.0;
  double camera_depth_mm = 80.0;
  double crowding_step_mm = 5.0;
  double skin_tolerance_mm = 1.0;
  double angle_band_min_deg = 45.0;
  double angle_band_max_deg = 75.0;
  int cone_segments = 64;
  bool clip_to_thorax = false;
};

struct SceneMesh {
  std::string name;
  Role role;
  std::shared_ptr<const SpatialIndex> index;

  const MeshModel& mesh() const { return index->mesh(); }
};

/// The planning world: role-labeled meshes, the surgical target and the
/// permitted entry regions (triangle indices of the skin mesh).
class AnatomicalScene {
 public:
  struct MeshInput {
    std::string name;
    Role role;
    MeshModel mesh;
  };

  AnatomicalScene(std::vector<MeshInput> meshes, const Vec3& convergent_point,
                  std::vector<std::uint32_t> tool_entry_region,
                  std::vector<std::uint32_t> camera_entry_region,
                  PlanningDefaults defaults = {});

  const std::vector<SceneMesh>& meshes() const { return meshes_; }
  const SceneMesh& skin() const { return meshes_[skin_]; }
  const Vec3& convergent_point() const { return convergent_point_; }
  /// Sorted, unique.
  const std::vector<std::uint32_t>& tool_entry_region() const { return tool_region_; }
  const std::vector<std::uint32_t>& camera_entry_region() const { return camera_region_; }
  bool in_tool_region(std::uint32_t tri) const;
  bool in_camera_region(std::uint32_t tri) const;
  const PlanningDefaults& defaults() const { return defaults_; }

  /// Bony meshes in manifest order.
  std::vector<const SceneMesh*> bony() const;

  AnatomicalScene with_defaults(const PlanningDefaults& d) const;
  AnatomicalScene with_regions(std::vector<std::uint32_t> tool,
                               std::vector<std::uint32_t> camera) const;
  AnatomicalScene transformed(const Rigid& xf) const;

 private:
  AnatomicalScene() = default;
  void validate() const;

  std::vector<SceneMesh> meshes_;
  std::size_t skin_ = 0;
  Vec3 convergent_point_ = Vec3::Zero();
  std::vector<std::uint32_t> tool_region_;
  std::vector<std::uint32_t> camera_region_;
  PlanningDefaults defaults_;
};

}  // namespace vats
