// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/common.hpp"
#include "vats/mesh.hpp"

#include <string_view>

namespace vats {

enum class Hand { Left, Right };
std::string_view to_string(Hand hand);

/// Instrument path from a skin entry to the target point.
struct TrocarTrajectory {
  Vec3 entry;
  Vec3 target;
  double length;  // |target - entry|
  Vec3 axis;      // unit, entry -> target
  Hand hand;
};

/// Throws InvalidArgument when entry == target.
TrocarTrajectory make_trajectory(const Vec3& entry, const Vec3& target, Hand hand);

/// Solid right-circular cone truncated by a flat cap `length` mm along the
/// axis from the apex. Serves as both the instrument working cone and the
/// endoscope view cone.
struct Cone {
  Vec3 apex;
  Vec3 axis;  // unit
  double half_angle_deg;
  double length;

  double cap_radius() const;
  /// Analytic volume in mm³.
  double volume() const;
};

/// Validated construction: normalizes `axis`, requires 0 <= half angle < 90
/// and length > 0. A zero half angle is the degenerate on-axis limit.
Cone make_cone(const Vec3& apex, const Vec3& axis, double half_angle_deg, double length);

inline constexpr double kDefaultDofHalfAngleDeg = 20.0;
inline constexpr double kDefaultReachMm = 280.0;

/// Working cone of an instrument pivoting about its skin entry, opening
/// inward along the trajectory.
Cone dof_cone_of(const TrocarTrajectory& traj, double half_angle_deg = kDefaultDofHalfAngleDeg,
                 double reach_mm = kDefaultReachMm);

bool cone_contains(const Cone& cone, const Vec3& p);

/// Closed triangulation: lateral fan from the apex plus a base disk. Needs a
/// positive half angle and radial_segments >= 3.
MeshModel tessellate_cone(const Cone& cone, int radial_segments = 64,
                          std::string name = "cone");

/// Angle in degrees in [0, 180]; throws InvalidArgument on a zero vector.
double angle_between(const Vec3& a, const Vec3& b);

inline constexpr double kDefaultTiltDeg = 30.0;
inline constexpr double kDefaultFovDeg = 60.0;
inline constexpr double kDefaultTubeLengthMm = 300.0;
inline constexpr double kDefaultFovLengthMm = 280.0;

/// Rigid angled endoscope. The tube runs from `tip` toward the handle along
/// `tube_axis`; the scope looks along -tube_axis tilted by `tilt_deg`. The
/// tilt direction is a reference perpendicular of the tube, rotated about
/// the viewing direction by `roll_deg`.
struct CameraPose {
  Vec3 tip;
  Vec3 tube_axis;  // unit, tip -> handle
  double tube_length;
  double tilt_deg;
  double roll_deg;
  double fov_half_angle_deg;
  Vec3 optical_axis;  // derived

  Vec3 viewing_direction() const { return -tube_axis; }
  Vec3 handle() const { return tip + tube_length * tube_axis; }
};

CameraPose make_camera_pose(const Vec3& tip, const Vec3& tube_axis, double roll_deg = 0.0,
                            double tilt_deg = kDefaultTiltDeg, double fov_deg = kDefaultFovDeg,
                            double tube_length = kDefaultTubeLengthMm);

/// Unit vector perpendicular to `viewing` that roll 0 tilts toward.
Vec3 roll_reference(const Vec3& viewing);

/// Unit direction (perpendicular to `viewing`) the optical axis leans toward.
Vec3 tilt_direction(const Vec3& viewing, double roll_deg);

/// Roll that makes the optical axis lean toward `toward` (its component
/// perpendicular to the viewing direction must be nonzero).
double roll_toward(const Vec3& viewing, const Vec3& toward);

/// Pose whose tube passes through `entry` with the tip `depth_mm` inside and
/// whose optical axis passes through `target` for the given roll. Solved by
/// fixed-point iteration; check the result with aim_error.
CameraPose camera_aimed_at(const Vec3& entry, const Vec3& target, double depth_mm,
                           double roll_deg, double tilt_deg = kDefaultTiltDeg,
                           double fov_deg = kDefaultFovDeg,
                           double tube_length = kDefaultTubeLengthMm);

/// Rigidly moved pose; roll is recomputed so the optical axis moves with it.
CameraPose transformed(const CameraPose& pose, const Rigid& xf);

Cone fov_cone_of(const CameraPose& pose, double length_mm = kDefaultFovLengthMm);

/// Perpendicular distance (mm) from `target` to the optical-axis ray; +inf
/// when the target is behind the tip.
double aim_error(const CameraPose& pose, const Vec3& target);

}  // namespace vats
