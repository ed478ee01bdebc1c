// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/geometry.hpp"
#include "vats/scene.hpp"

#include <array>
#include <string>
#include <vector>

namespace vats {

/// Outcome of one placement rule. `value` is the measured quantity in `unit`;
/// it is +inf only for an aim error with the target behind the camera.
struct RuleResult {
  std::string id;
  bool pass = false;
  double value = 0.0;
  std::string unit;
  std::string threshold;
};

/// The trajectory entry does not lie on the skin surface.
class EntryNotOnSkin : public Error {
 public:
  using Error::Error;
};

/// The camera tube never crosses the skin.
class TubeMissesSkin : public Error {
 public:
  using Error::Error;
};

/// The two tool trajectories do not end at the same target.
class MismatchedTargets : public Error {
 public:
  using Error::Error;
};

/// Skin triangle the trajectory enters through. Throws EntryNotOnSkin.
std::uint32_t trajectory_entry_triangle(const TrocarTrajectory& traj,
                                        const AnatomicalScene& scene);

/// Skin triangle where the camera tube crosses, and the crossing point.
struct TubeCrossing {
  std::uint32_t triangle;
  Vec3 point;
};
TubeCrossing camera_entry(const CameraPose& pose, const AnatomicalScene& scene);

/// Endpoint snapping onto the convergent point ("endpoint").
RuleResult check_endpoint(const Vec3& p, const AnatomicalScene& scene);

/// `<hand>.length`, `<hand>.region`, `<hand>.obstruction`.
std::vector<RuleResult> check_trajectory(const TrocarTrajectory& traj,
                                         const AnatomicalScene& scene);

/// Advisory 45-75 degree band on the angle between the two instruments at
/// the target. Never part of plan validity.
RuleResult manipulation_angle(const TrocarTrajectory& left, const TrocarTrajectory& right,
                              const PlanningDefaults& defaults = {});

/// Number of tube sample points (every `step_mm`, both ends included) inside
/// either cone.
int crowding_samples(const CameraPose& pose, const std::array<Cone, 2>& tool_cones,
                     double step_mm);

/// `camera.aim`, `camera.obstruction`, `camera.region`: the camera rules that
/// do not depend on the instruments.
std::vector<RuleResult> check_camera_pose(const CameraPose& pose, const AnatomicalScene& scene);

/// `camera.crowding`.
RuleResult check_crowding(const CameraPose& pose, const std::array<Cone, 2>& tool_cones,
                          const PlanningDefaults& defaults);

/// check_camera_pose followed by check_crowding.
std::vector<RuleResult> check_camera(const CameraPose& pose, const AnatomicalScene& scene,
                                     const std::array<Cone, 2>& tool_cones);

struct PlanReport {
  std::vector<RuleResult> rules;  // hard rules only
  RuleResult manipulation;        // advisory band
  double operable_volume_l = 0.0;
  bool overall_valid = false;
  double spacing_mm = 0.0;
  std::vector<Vec3> overlap_cells;  // world-space centers, mm

  bool in_band() const { return manipulation.pass; }
};

struct EvaluateOptions {
  bool export_cells = true;
};

/// Frame the operable-volume grid is aligned to: origin at the target, axes
/// from the left and right instrument axes (then the optical axis). It moves
/// rigidly with the plan, so the voxel count does not depend on how the
/// scene is posed in world coordinates.
Rigid plan_frame(const TrocarTrajectory& left, const TrocarTrajectory& right,
                 const CameraPose& camera);

/// Runs every rule and measures the operable volume: the voxel overlap of
/// both instrument cones and the camera view cone.
PlanReport evaluate_plan(const TrocarTrajectory& left, const TrocarTrajectory& right,
                         const CameraPose& camera, const AnatomicalScene& scene,
                         double spacing_mm, const EvaluateOptions& options = {});
PlanReport evaluate_plan(const TrocarTrajectory& left, const TrocarTrajectory& right,
                         const CameraPose& camera, const AnatomicalScene& scene);

/// Voxel overlap of the given cones in the plan frame (liters); the volume
/// half of evaluate_plan.
struct OverlapResult {
  double volume_l;
  std::vector<Vec3> cells;
};
OverlapResult cone_overlap(const std::vector<Cone>& cones, const Rigid& frame, double spacing_mm,
                           int segments, const SceneMesh* clip = nullptr,
                           bool export_cells = true);

}  // namespace vats
