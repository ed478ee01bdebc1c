// SPDX-License-Identifier: Apache-2.0
#include "vats/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace vats {

namespace {

Vec3 unit_or_throw(const Vec3& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument(std::string(what) + " must be nonzero");
  return v / n;
}

}  // namespace

std::string_view to_string(Hand hand) { return hand == Hand::Left ? "left" : "right"; }

TrocarTrajectory make_trajectory(const Vec3& entry, const Vec3& target, Hand hand) {
  const Vec3 d = target - entry;
  const double length = d.norm();
  if (!(length > 0.0)) throw InvalidArgument("trajectory entry and target coincide");
  return TrocarTrajectory{entry, target, length, d / length, hand};
}

double Cone::cap_radius() const { return length * std::tan(deg_to_rad(half_angle_deg)); }

double Cone::volume() const {
  const double r = cap_radius();
  return EIGEN_PI * r * r * length / 3.0;
}

Cone make_cone(const Vec3& apex, const Vec3& axis, double half_angle_deg, double length) {
  if (!(half_angle_deg >= 0.0 && half_angle_deg < 90.0)) {
    throw InvalidArgument("cone half angle must lie in [0, 90) degrees");
  }
  if (!(length > 0.0)) throw InvalidArgument("cone length must be positive");
  return Cone{apex, unit_or_throw(axis, "cone axis"), half_angle_deg, length};
}

Cone dof_cone_of(const TrocarTrajectory& traj, double half_angle_deg, double reach_mm) {
  return make_cone(traj.entry, traj.axis, half_angle_deg, reach_mm);
}

bool cone_contains(const Cone& cone, const Vec3& p) {
  const Vec3 u = p - cone.apex;
  const double t = u.dot(cone.axis);
  if (t < 0.0 || t > cone.length) return false;
  const double radial = (u - t * cone.axis).norm();
  if (radial == 0.0) return true;
  const double angle = rad_to_deg(std::atan2(radial, t));
  // 1e-9 degrees absorbs rounding for points placed exactly on the surface
  return angle <= cone.half_angle_deg + 1e-9;
}

MeshModel tessellate_cone(const Cone& cone, int radial_segments, std::string name) {
  if (radial_segments < 3) throw InvalidArgument("cone tessellation needs >= 3 segments");
  if (!(cone.half_angle_deg > 0.0)) throw InvalidArgument("cannot tessellate a zero-angle cone");
  const Vec3 base_center = cone.apex + cone.length * cone.axis;
  const Vec3 e1 = roll_reference(cone.axis);
  const Vec3 e2 = cone.axis.cross(e1);
  const double r = cone.cap_radius();

  std::vector<Vec3> verts;
  verts.reserve(radial_segments + 2);
  verts.push_back(cone.apex);
  verts.push_back(base_center);
  for (int i = 0; i < radial_segments; ++i) {
    const double phi = 2.0 * EIGEN_PI * i / radial_segments;
    verts.push_back(base_center + r * (std::cos(phi) * e1 + std::sin(phi) * e2));
  }
  std::vector<Triangle> tris;
  tris.reserve(2 * radial_segments);
  for (int i = 0; i < radial_segments; ++i) {
    const auto a = static_cast<std::uint32_t>(2 + i);
    const auto b = static_cast<std::uint32_t>(2 + (i + 1) % radial_segments);
    // ring runs counter-clockwise about +axis; both faces wind outward
    tris.push_back({0u, b, a});
    tris.push_back({1u, a, b});
  }
  return MeshModel(std::move(name), std::move(verts), std::move(tris));
}

double angle_between(const Vec3& a, const Vec3& b) {
  const Vec3 ua = unit_or_throw(a, "angle_between operand");
  const Vec3 ub = unit_or_throw(b, "angle_between operand");
  return rad_to_deg(std::acos(std::clamp(ua.dot(ub), -1.0, 1.0)));
}

Vec3 roll_reference(const Vec3& viewing) {
  const Vec3 v = viewing.normalized();
  // +z everywhere except at the poles, so the frame varies continuously.
  const Vec3 up = std::abs(v.z()) < 1.0 - 1e-9 ? Vec3::UnitZ() : Vec3::UnitX();
  return (up - up.dot(v) * v).normalized();
}

Vec3 tilt_direction(const Vec3& viewing, double roll_deg) {
  const Vec3 v = viewing.normalized();
  const Vec3 p0 = roll_reference(v);
  const double r = deg_to_rad(roll_deg);
  return std::cos(r) * p0 + std::sin(r) * v.cross(p0);
}

double roll_toward(const Vec3& viewing, const Vec3& toward) {
  const Vec3 v = viewing.normalized();
  const Vec3 perp = toward - toward.dot(v) * v;
  if (!(perp.norm() > 1e-12)) throw InvalidArgument("roll direction is parallel to the tube");
  const Vec3 p0 = roll_reference(v);
  return rad_to_deg(std::atan2(perp.dot(v.cross(p0)), perp.dot(p0)));
}

CameraPose make_camera_pose(const Vec3& tip, const Vec3& tube_axis, double roll_deg,
                            double tilt_deg, double fov_deg, double tube_length) {
  if (!(tilt_deg >= 0.0 && tilt_deg < 90.0)) throw InvalidArgument("tilt must lie in [0, 90)");
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw InvalidArgument("field of view must lie in (0, 180)");
  if (!(tube_length > 0.0)) throw InvalidArgument("tube length must be positive");
  const Vec3 axis = unit_or_throw(tube_axis, "tube axis");
  const Vec3 view = -axis;
  const double t = deg_to_rad(tilt_deg);
  const Vec3 optical =
      (std::cos(t) * view + std::sin(t) * tilt_direction(view, roll_deg)).normalized();
  return CameraPose{tip, axis, tube_length, tilt_deg, roll_deg, fov_deg / 2.0, optical};
}

CameraPose camera_aimed_at(const Vec3& entry, const Vec3& target, double depth_mm,
                           double roll_deg, double tilt_deg, double fov_deg,
                           double tube_length) {
  const Vec3 to_target = target - entry;
  const double dist = to_target.norm();
  if (!(dist > 0.0)) throw InvalidArgument("camera entry coincides with target");
  const Vec3 dir = to_target / dist;
  const double tilt = deg_to_rad(tilt_deg);
  const double s = depth_mm * std::sin(tilt) / dist;
  if (s >= 1.0) throw InvalidArgument("camera tip depth too large to aim at the target");
  // Triangle entry/tip/target: angle at the tip is 180 - tilt, so the tube
  // leans `lean` away from the entry->target line.
  const double lean = tilt - std::asin(s);

  // Tube directions consistent with the tip depth lie on a circle of
  // half-angle `lean` about `dir`; `phi` picks one.
  const Vec3 e0 = roll_reference(dir);
  const Vec3 e1 = dir.cross(e0);
  const auto view_at = [&](double phi) {
    const Vec3 u = std::cos(phi) * e0 + std::sin(phi) * e1;
    return (std::cos(lean) * dir - std::sin(lean) * u).normalized();
  };
  // Out-of-plane component of the tilt direction; zero when the optical axis
  // lies in the entry/tip/target plane. `toward` > 0 on the target side.
  const auto residual = [&](double phi, double* toward) {
    const Vec3 v = view_at(phi);
    const Vec3 w = tilt_direction(v, roll_deg);
    const Vec3 in_plane = dir - dir.dot(v) * v;
    const Vec3 normal = v.cross(in_plane);
    if (toward) *toward = lean > 0.0 ? w.dot(in_plane) : 1.0;
    return normal.norm() > 1e-15 ? w.dot(normal.normalized()) : 0.0;
  };
  const auto pose_at = [&](const Vec3& v) {
    return make_camera_pose(entry + depth_mm * v, -v, roll_deg, tilt_deg, fov_deg, tube_length);
  };
  const auto error_of = [&](const Vec3& v) { return aim_error(pose_at(v), target); };

  // Fixed-point iteration converges in the common case.
  Vec3 view = dir;
  for (int it = 0; it < 100; ++it) {
    const Vec3 w = tilt_direction(view, roll_deg);
    const Vec3 u_raw = w - w.dot(dir) * dir;
    if (u_raw.norm() < 1e-12) break;
    const Vec3 u = u_raw.normalized();
    const Vec3 next = (std::cos(lean) * dir - std::sin(lean) * u).normalized();
    const double step = (next - view).norm();
    view = next;
    if (step < 1e-13) break;
  }
  const double tol = 1e-9 * (1.0 + dist);
  if (error_of(view) <= tol) return pose_at(view);

  // Otherwise bracket the roots of the residual around the circle and keep
  // the aimed solution closest to the fixed-point iterate.
  constexpr int kSamples = 720;
  std::optional<Vec3> best;
  double best_gap = kInf;
  double prev_phi = 0.0;
  double prev = residual(prev_phi, nullptr);
  for (int i = 1; i <= kSamples; ++i) {
    const double phi = 2.0 * EIGEN_PI * i / kSamples;
    const double cur = residual(phi, nullptr);
    if ((prev <= 0.0) != (cur <= 0.0)) {
      double lo = prev_phi;
      double hi = phi;
      const bool lo_neg = prev <= 0.0;
      for (int b = 0; b < 80; ++b) {
        const double mid = 0.5 * (lo + hi);
        ((residual(mid, nullptr) <= 0.0) == lo_neg ? lo : hi) = mid;
      }
      double toward = 0.0;
      residual(0.5 * (lo + hi), &toward);
      const Vec3 v = view_at(0.5 * (lo + hi));
      if (toward > 0.0 && error_of(v) <= tol && (v - view).norm() < best_gap) {
        best_gap = (v - view).norm();
        best = v;
      }
    }
    prev_phi = phi;
    prev = cur;
  }
  if (!best) throw InvalidArgument("no camera pose with this roll aims at the target");
  return pose_at(*best);
}

CameraPose transformed(const CameraPose& pose, const Rigid& xf) {
  const Vec3 axis = xf.linear() * pose.tube_axis;
  const Vec3 optical = xf.linear() * pose.optical_axis;
  const double roll = pose.tilt_deg > 0.0 ? roll_toward(-axis, optical) : pose.roll_deg;
  return make_camera_pose(xf * pose.tip, axis, roll, pose.tilt_deg, 2.0 * pose.fov_half_angle_deg,
                          pose.tube_length);
}

Cone fov_cone_of(const CameraPose& pose, double length_mm) {
  return make_cone(pose.tip, pose.optical_axis, pose.fov_half_angle_deg, length_mm);
}

double aim_error(const CameraPose& pose, const Vec3& target) {
  const Vec3 u = target - pose.tip;
  const double t = u.dot(pose.optical_axis);
  if (t < 0.0) return kInf;
  return (u - t * pose.optical_axis).norm();
}

}  // namespace vats
