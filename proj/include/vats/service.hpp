// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/auto_plan.hpp"
#include "vats/json_io.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vats {

struct ManifestMesh {
  std::filesystem::path path;  // resolved against the manifest directory
  Role role;
  std::string name;
};

struct SceneManifest {
  std::filesystem::path source;
  std::vector<ManifestMesh> meshes;
  Vec3 convergent_point = Vec3::Zero();
  std::vector<std::uint32_t> tool_entry_region;
  std::vector<std::uint32_t> camera_entry_region;
  PlanningDefaults defaults;
};

SceneManifest parse_manifest(const Json& j, const std::filesystem::path& base_dir);
SceneManifest load_manifest(const std::filesystem::path& path);
std::shared_ptr<const AnatomicalScene> build_scene(const SceneManifest& manifest);
PlanningDefaults defaults_from_json(const Json& j, PlanningDefaults base = {});
Json to_json(const PlanningDefaults& d);

/// Stored placements plus the report they produced when written.
struct PlanFile {
  std::string manifest;
  Vec3 left_entry = Vec3::Zero();
  Vec3 right_entry = Vec3::Zero();
  std::optional<Vec3> left_target;  // default: the convergent point
  std::optional<Vec3> right_target;
  CameraSubmission camera;
  std::optional<Json> report;  // frozen at write time
  std::string engine_version = kEngineVersion;
};

PlanFile plan_from_json(const Json& j);
Json to_json(const PlanFile& plan);
PlanFile load_plan(const std::filesystem::path& path);

struct Placements {
  TrocarTrajectory left;
  TrocarTrajectory right;
  CameraPose camera;
};

Placements placements_of(const PlanFile& plan, const AnatomicalScene& scene);
PlanReport evaluate_plan_file(const PlanFile& plan, const AnatomicalScene& scene,
                              double spacing_mm, const EvaluateOptions& options = {});

/// Plan file for an auto-planner result.
PlanFile plan_file_of(const AutoPlan& plan, const std::string& manifest);

/// Vertices, triangles, roles, regions, convergent point and defaults.
Json scene_json(const AnatomicalScene& scene);

}  // namespace vats
