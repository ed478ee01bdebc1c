// SPDX-License-Identifier: Apache-2.0
#include "vats/service.hpp"

#include <fstream>
#include <limits>

namespace vats {

namespace {

std::vector<std::uint32_t> indices_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + ": expected an array of triangle indices");
  std::vector<std::uint32_t> out;
  out.reserve(j.size());
  for (const Json& v : j) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
        v.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max()) {
      throw FormatError(std::string(what) + ": triangle indices must be non-negative integers");
    }
    out.push_back(static_cast<std::uint32_t>(v.get<std::int64_t>()));
  }
  return out;
}

const Json& require(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string(what) + ": missing '" + key + "'");
  }
  return j.at(key);
}

void read_number(const Json& j, const char* key, double& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number()) throw FormatError(std::string("defaults.") + key + " must be a number");
  out = j.at(key).get<double>();
}

}  // namespace

PlanningDefaults defaults_from_json(const Json& j, PlanningDefaults d) {
  if (j.is_null()) return d;
  if (!j.is_object()) throw FormatError("defaults must be an object");
  read_number(j, "spacing_mm", d.spacing_mm);
  read_number(j, "reach_mm", d.reach_mm);
  read_number(j, "half_angle_deg", d.half_angle_deg);
  read_number(j, "fov_deg", d.fov_deg);
  read_number(j, "tilt_deg", d.tilt_deg);
  read_number(j, "aim_tol_mm", d.aim_tol_mm);
  read_number(j, "capsule_radius_mm", d.capsule_radius_mm);
  read_number(j, "snap_tol_mm", d.snap_tol_mm);
  read_number(j, "fov_length_mm", d.fov_length_mm);
  read_number(j, "tube_length_mm", d.tube_length_mm);
  read_number(j, "camera_depth_mm", d.camera_depth_mm);
  read_number(j, "crowding_step_mm", d.crowding_step_mm);
  read_number(j, "skin_tolerance_mm", d.skin_tolerance_mm);
  read_number(j, "angle_band_min_deg", d.angle_band_min_deg);
  read_number(j, "angle_band_max_deg", d.angle_band_max_deg);
  if (j.contains("cone_segments")) {
    if (!j.at("cone_segments").is_number_integer()) throw FormatError("defaults.cone_segments must be an integer");
    d.cone_segments = j.at("cone_segments").get<int>();
  }
  if (j.contains("clip_to_thorax")) {
    if (!j.at("clip_to_thorax").is_boolean()) throw FormatError("defaults.clip_to_thorax must be a boolean");
    d.clip_to_thorax = j.at("clip_to_thorax").get<bool>();
  }
  if (!(d.spacing_mm > 0.0) || !(d.reach_mm > 0.0) || !(d.capsule_radius_mm >= 0.0) ||
      !(d.tube_length_mm > 0.0) || !(d.crowding_step_mm > 0.0) || d.cone_segments < 3) {
    throw FormatError("defaults: out-of-range value");
  }
  return d;
}

Json to_json(const PlanningDefaults& d) {
  return {{"spacing_mm", d.spacing_mm},
          {"reach_mm", d.reach_mm},
          {"half_angle_deg", d.half_angle_deg},
          {"fov_deg", d.fov_deg},
          {"tilt_deg", d.tilt_deg},
          {"aim_tol_mm", d.aim_tol_mm},
          {"capsule_radius_mm", d.capsule_radius_mm},
          {"snap_tol_mm", d.snap_tol_mm},
          {"fov_length_mm", d.fov_length_mm},
          {"tube_length_mm", d.tube_length_mm},
          {"camera_depth_mm", d.camera_depth_mm},
          {"crowding_step_mm", d.crowding_step_mm},
          {"skin_tolerance_mm", d.skin_tolerance_mm},
          {"angle_band_min_deg", d.angle_band_min_deg},
          {"angle_band_max_deg", d.angle_band_max_deg},
          {"cone_segments", d.cone_segments},
          {"clip_to_thorax", d.clip_to_thorax}};
}

SceneManifest parse_manifest(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw FormatError("manifest must be a JSON object");
  SceneManifest m;
  const Json& meshes = require(j, "meshes", "manifest");
  if (!meshes.is_array() || meshes.empty()) throw FormatError("manifest: 'meshes' must be a non-empty array");
  int skins = 0;
  for (const Json& e : meshes) {
    const Json& path = require(e, "path", "mesh entry");
    const Json& role = require(e, "role", "mesh entry");
    if (!path.is_string() || !role.is_string()) throw FormatError("mesh entry: path and role must be strings");
    const auto r = parse_role(role.get<std::string>());
    if (!r) throw FormatError("mesh entry: unknown role '" + role.get<std::string>() + "'");
    if (*r == Role::Skin) ++skins;
    std::filesystem::path p = path.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) throw FormatError("mesh file not found: " + p.string());
    std::string name = e.contains("name") ? e.at("name").get<std::string>() : p.stem().string();
    m.meshes.push_back(ManifestMesh{p, *r, std::move(name)});
  }
  if (skins != 1) throw FormatError("manifest must list exactly one skin mesh");
  m.convergent_point = vec3_from_json(require(j, "convergent_point_mm", "manifest"), "convergent_point_mm");
  m.tool_entry_region = indices_from_json(require(j, "tool_entry_region", "manifest"), "tool_entry_region");
  m.camera_entry_region =
      indices_from_json(require(j, "camera_entry_region", "manifest"), "camera_entry_region");
  m.defaults = defaults_from_json(j.value("defaults", Json()));
  return m;
}

SceneManifest load_manifest(const std::filesystem::path& path) {
  const auto resolved = resolve_input_path(path);
  if (!std::filesystem::exists(resolved)) throw Error("manifest not found: " + path.string());
  SceneManifest m = parse_manifest(read_json_file(resolved), resolved.parent_path());
  m.source = resolved;
  return m;
}

std::shared_ptr<const AnatomicalScene> build_scene(const SceneManifest& manifest) {
  std::vector<AnatomicalScene::MeshInput> inputs;
  inputs.reserve(manifest.meshes.size());
  for (const ManifestMesh& e : manifest.meshes) {
    MeshModel mesh = load_obj(e.path);
    inputs.push_back({e.name, e.role, std::move(mesh)});
  }
  return std::make_shared<const AnatomicalScene>(std::move(inputs), manifest.convergent_point,
                                                 manifest.tool_entry_region,
                                                 manifest.camera_entry_region, manifest.defaults);
}

PlanFile plan_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("plan must be a JSON object");
  PlanFile p;
  p.manifest = j.value("manifest", "");
  const Json& left = require(j, "left", "plan");
  const Json& right = require(j, "right", "plan");
  p.left_entry = vec3_from_json(require(left, "entry", "plan.left"), "left.entry");
  p.right_entry = vec3_from_json(require(right, "entry", "plan.right"), "right.entry");
  if (left.contains("target")) p.left_target = vec3_from_json(left.at("target"), "left.target");
  if (right.contains("target")) p.right_target = vec3_from_json(right.at("target"), "right.target");
  p.camera = std::get<CameraSubmission>(submission_from_json("camera", require(j, "camera", "plan")));
  if (j.contains("report") && !j.at("report").is_null()) p.report = j.at("report");
  p.engine_version = j.value("engine_version", "");
  return p;
}

Json to_json(const PlanFile& plan) {
  Json left = {{"entry", to_json(plan.left_entry)}};
  Json right = {{"entry", to_json(plan.right_entry)}};
  if (plan.left_target) left["target"] = to_json(*plan.left_target);
  if (plan.right_target) right["target"] = to_json(*plan.right_target);
  Json j = {{"engine_version", plan.engine_version},
            {"manifest", plan.manifest},
            {"left", left},
            {"right", right},
            {"camera", submission_payload(plan.camera)}};
  j["report"] = plan.report ? *plan.report : Json(nullptr);
  return j;
}

PlanFile load_plan(const std::filesystem::path& path) {
  const auto resolved = resolve_input_path(path);
  if (!std::filesystem::exists(resolved)) throw Error("plan not found: " + path.string());
  return plan_from_json(read_json_file(resolved));
}

Placements placements_of(const PlanFile& plan, const AnatomicalScene& scene) {
  const Vec3& c = scene.convergent_point();
  return Placements{make_trajectory(plan.left_entry, plan.left_target.value_or(c), Hand::Left),
                    make_trajectory(plan.right_entry, plan.right_target.value_or(c), Hand::Right),
                    submitted_pose(scene, plan.camera)};
}

PlanReport evaluate_plan_file(const PlanFile& plan, const AnatomicalScene& scene,
                              double spacing_mm, const EvaluateOptions& options) {
  const Placements p = placements_of(plan, scene);
  return evaluate_plan(p.left, p.right, p.camera, scene, spacing_mm, options);
}

PlanFile plan_file_of(const AutoPlan& plan, const std::string& manifest) {
  PlanFile f;
  f.manifest = manifest;
  f.left_entry = plan.left.entry;
  f.right_entry = plan.right.entry;
  f.left_target = plan.left.target;
  f.right_target = plan.right.target;
  f.camera = CameraSubmission{plan.camera.tip, plan.camera.tube_axis, plan.camera.roll_deg};
  f.report = to_json(plan.report);
  return f;
}

Json scene_json(const AnatomicalScene& scene) {
  Json meshes = Json::array();
  for (const SceneMesh& m : scene.meshes()) {
    Json verts = Json::array();
    for (const Vec3& v : m.mesh().vertices()) verts.push_back(to_json(v));
    Json tris = Json::array();
    for (const Triangle& t : m.mesh().triangles()) tris.push_back({t[0], t[1], t[2]});
    meshes.push_back({{"name", m.name},
                      {"role", to_string(m.role)},
                      {"vertices", std::move(verts)},
                      {"triangles", std::move(tris)}});
  }
  return {{"meshes", std::move(meshes)},
          {"convergent_point_mm", to_json(scene.convergent_point())},
          {"tool_entry_region", scene.tool_entry_region()},
          {"camera_entry_region", scene.camera_entry_region()},
          {"defaults", to_json(scene.defaults())}};
}

}  // namespace vats
