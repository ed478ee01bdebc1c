// SPDX-License-Identifier: Apache-2.0
#include "vats/rules.hpp"

#include "vats/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vats {

namespace {

// Slack for thresholds stated at mm / degree precision, so values computed
// from exact boundary geometry are not rejected by rounding.
constexpr double kThresholdSlack = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double bony_clearance(const AnatomicalScene& scene, const Segment& seg) {
  double clearance = kInf;
  for (const SceneMesh* m : scene.bony()) {
    clearance = std::min(clearance, segment_clearance(*m->index, seg));
  }
  return clearance;
}

bool bony_blocked(const AnatomicalScene& scene, const Segment& seg) {
  const auto bones = scene.bony();
  return std::any_of(bones.begin(), bones.end(),
                     [&](const SceneMesh* m) { return segment_blocked(*m->index, seg); });
}

}  // namespace

std::uint32_t trajectory_entry_triangle(const TrocarTrajectory& traj,
                                        const AnatomicalScene& scene) {
  const SpatialIndex& skin = *scene.skin().index;
  const double tol = scene.defaults().skin_tolerance_mm;
  // Project along the trajectory: the crossing nearest the entry point.
  const auto hits = ray_intersect(skin, Ray::through(traj.target, traj.entry));
  const RayHit* best = nullptr;
  for (const RayHit& h : hits) {
    const double off = std::abs(h.distance - traj.length);
    if (off <= tol && (!best || off < std::abs(best->distance - traj.length))) best = &h;
  }
  if (best) return best->triangle;
  if (const auto near = nearest_triangle(skin, traj.entry, tol)) return near->triangle;
  std::ostringstream os;
  os << to_string(traj.hand) << " entry (" << traj.entry.transpose()
     << ") is not on the skin surface (tolerance " << tol << " mm)";
  throw EntryNotOnSkin(os.str());
}

TubeCrossing camera_entry(const CameraPose& pose, const AnatomicalScene& scene) {
  const auto hits = ray_intersect(*scene.skin().index, Ray(pose.tip, pose.tube_axis));
  if (hits.empty() || hits.front().distance > pose.tube_length) {
    throw TubeMissesSkin("camera tube does not cross the skin surface");
  }
  return TubeCrossing{hits.front().triangle, pose.tip + hits.front().distance * pose.tube_axis};
}

RuleResult check_endpoint(const Vec3& p, const AnatomicalScene& scene) {
  const double tol = scene.defaults().snap_tol_mm;
  const double d = (p - scene.convergent_point()).norm();
  return RuleResult{"endpoint", d <= tol + kThresholdSlack, d, "mm", "<= " + fmt(tol) + " mm"};
}

std::vector<RuleResult> check_trajectory(const TrocarTrajectory& traj,
                                         const AnatomicalScene& scene) {
  const PlanningDefaults& d = scene.defaults();
  const std::string hand(to_string(traj.hand));
  const std::uint32_t tri = trajectory_entry_triangle(traj, scene);

  std::vector<RuleResult> out;
  out.push_back(RuleResult{hand + ".length", traj.length <= d.reach_mm + kThresholdSlack,
                           traj.length, "mm", "<= " + fmt(d.reach_mm) + " mm"});
  out.push_back(RuleResult{hand + ".region", scene.in_tool_region(tri), static_cast<double>(tri),
                           "triangle", "in tool entry region"});
  const Segment path{traj.entry, traj.target, d.capsule_radius_mm};
  out.push_back(RuleResult{hand + ".obstruction", !bony_blocked(scene, path),
                           bony_clearance(scene, path), "mm",
                           "> " + fmt(d.capsule_radius_mm) + " mm from bone"});
  return out;
}

RuleResult manipulation_angle(const TrocarTrajectory& left, const TrocarTrajectory& right,
                              const PlanningDefaults& defaults) {
  if ((left.target - right.target).norm() > defaults.snap_tol_mm + kThresholdSlack) {
    throw MismatchedTargets("left and right trajectories end at different targets");
  }
  const double angle = angle_between(left.entry - left.target, right.entry - right.target);
  const bool in_band = angle >= defaults.angle_band_min_deg - kThresholdSlack &&
                       angle <= defaults.angle_band_max_deg + kThresholdSlack;
  return RuleResult{"manipulation_angle", in_band, angle, "deg",
                    fmt(defaults.angle_band_min_deg) + "-" + fmt(defaults.angle_band_max_deg) +
                        " deg (advisory)"};
}

int crowding_samples(const CameraPose& pose, const std::array<Cone, 2>& tool_cones,
                     double step_mm) {
  if (!(step_mm > 0.0)) throw InvalidArgument("crowding step must be positive");
  const auto inside = [&](const Vec3& p) {
    return cone_contains(tool_cones[0], p) || cone_contains(tool_cones[1], p);
  };
  int count = 0;
  const auto steps = static_cast<int>(std::floor(pose.tube_length / step_mm));
  for (int i = 0; i <= steps; ++i) {
    if (inside(pose.tip + (i * step_mm) * pose.tube_axis)) ++count;
  }
  if (steps * step_mm < pose.tube_length && inside(pose.handle())) ++count;
  return count;
}

std::vector<RuleResult> check_camera_pose(const CameraPose& pose, const AnatomicalScene& scene) {
  const PlanningDefaults& d = scene.defaults();
  const Vec3& target = scene.convergent_point();
  const TubeCrossing crossing = camera_entry(pose, scene);

  std::vector<RuleResult> out;
  const double aim = aim_error(pose, target);
  out.push_back(RuleResult{"camera.aim", aim <= d.aim_tol_mm + kThresholdSlack, aim, "mm",
                           "<= " + fmt(d.aim_tol_mm) + " mm"});

  // The inserted tube and the line of sight must both stay clear of bone.
  const Segment tube{crossing.point, pose.tip, d.capsule_radius_mm};
  const Segment sight{pose.tip, target, d.capsule_radius_mm};
  bool blocked = false;
  double clearance = kInf;
  for (const Segment& s : {tube, sight}) {
    if (!((s.b - s.a).norm() > 0.0)) continue;
    blocked = blocked || bony_blocked(scene, s);
    clearance = std::min(clearance, bony_clearance(scene, s));
  }
  out.push_back(RuleResult{"camera.obstruction", !blocked, clearance, "mm",
                           "> " + fmt(d.capsule_radius_mm) + " mm from bone"});

  out.push_back(RuleResult{"camera.region", scene.in_camera_region(crossing.triangle),
                           static_cast<double>(crossing.triangle), "triangle",
                           "in camera entry region"});
  return out;
}

RuleResult check_crowding(const CameraPose& pose, const std::array<Cone, 2>& tool_cones,
                          const PlanningDefaults& defaults) {
  const int crowded = crowding_samples(pose, tool_cones, defaults.crowding_step_mm);
  return RuleResult{"camera.crowding", crowded == 0, static_cast<double>(crowded), "samples",
                    "no tube sample inside a tool cone"};
}

std::vector<RuleResult> check_camera(const CameraPose& pose, const AnatomicalScene& scene,
                                     const std::array<Cone, 2>& tool_cones) {
  auto out = check_camera_pose(pose, scene);
  out.push_back(check_crowding(pose, tool_cones, scene.defaults()));
  return out;
}

Rigid plan_frame(const TrocarTrajectory& left, const TrocarTrajectory& right,
                 const CameraPose& camera) {
  const Vec3 e1 = left.axis.normalized();
  Vec3 e2 = Vec3::Zero();
  for (const Vec3& c : {right.axis, camera.optical_axis, Vec3(Vec3::UnitX()),
                        Vec3(Vec3::UnitY()), Vec3(Vec3::UnitZ())}) {
    const Vec3 perp = c - c.dot(e1) * e1;
    if (perp.norm() > 1e-6) {
      e2 = perp.normalized();
      break;
    }
  }
  Rigid frame = Rigid::Identity();
  frame.linear().col(0) = e1;
  frame.linear().col(1) = e2;
  frame.linear().col(2) = e1.cross(e2);
  frame.translation() = left.target;
  return frame;
}

OverlapResult cone_overlap(const std::vector<Cone>& cones, const Rigid& frame, double spacing_mm,
                           int segments, const SceneMesh* clip, bool export_cells) {
  if (cones.empty()) throw InvalidArgument("cone_overlap needs at least one cone");
  const Rigid local_from_world = frame.inverse();
  std::vector<MeshModel> meshes;
  meshes.reserve(cones.size() + 1);
  for (std::size_t i = 0; i < cones.size(); ++i) {
    // Tessellate in the plan frame so the polygon phase moves with the plan.
    Cone local = cones[i];
    local.apex = local_from_world * cones[i].apex;
    local.axis = local_from_world.linear() * cones[i].axis;
    meshes.push_back(
        tessellate_cone(local, segments, "cone" + std::to_string(i)).transformed(frame));
  }
  if (clip) meshes.push_back(clip->mesh());

  VoxelGrid grid = build_grid(meshes, spacing_mm, frame);
  std::vector<MeshId> ids;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const MeshId id{static_cast<std::uint8_t>(i)};
    add_mesh(grid, meshes[i], id);
    ids.push_back(id);
  }
  OverlapResult out{overlap_volume(grid, ids), {}};
  if (export_cells) out.cells = export_overlap_cells(grid, ids);
  return out;
}

PlanReport evaluate_plan(const TrocarTrajectory& left, const TrocarTrajectory& right,
                         const CameraPose& camera, const AnatomicalScene& scene,
                         double spacing_mm, const EvaluateOptions& options) {
  const PlanningDefaults& d = scene.defaults();
  PlanReport report;
  report.spacing_mm = spacing_mm;
  for (const auto& traj : {left, right}) {
    auto rules = check_trajectory(traj, scene);
    report.rules.insert(report.rules.end(), rules.begin(), rules.end());
  }
  report.manipulation = manipulation_angle(left, right, d);

  const std::array<Cone, 2> tool_cones = {dof_cone_of(left, d.half_angle_deg, d.reach_mm),
                                          dof_cone_of(right, d.half_angle_deg, d.reach_mm)};
  auto cam_rules = check_camera(camera, scene, tool_cones);
  report.rules.insert(report.rules.end(), cam_rules.begin(), cam_rules.end());
  report.overall_valid = std::all_of(report.rules.begin(), report.rules.end(),
                                     [](const RuleResult& r) { return r.pass; });

  const std::vector<Cone> cones = {tool_cones[0], tool_cones[1],
                                   fov_cone_of(camera, d.fov_length_mm)};
  const SceneMesh* clip = d.clip_to_thorax ? &scene.skin() : nullptr;
  auto overlap = cone_overlap(cones, plan_frame(left, right, camera), spacing_mm,
                              d.cone_segments, clip, options.export_cells);
  report.operable_volume_l = overlap.volume_l;
  report.overlap_cells = std::move(overlap.cells);
  return report;
}

PlanReport evaluate_plan(const TrocarTrajectory& left, const TrocarTrajectory& right,
                         const CameraPose& camera, const AnatomicalScene& scene) {
  return evaluate_plan(left, right, camera, scene, scene.defaults().spacing_mm);
}

}  // namespace vats
