// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>
#include <stdexcept>
#include <string>

namespace vats {

/// All engine lengths are millimeters.
using Vec3 = Eigen::Vector3d;
using Rigid = Eigen::Isometry3d;

inline constexpr double kMm3PerLiter = 1e6;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double deg_to_rad(double deg) { return deg * (EIGEN_PI / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / EIGEN_PI); }

/// Base class of every error the engine raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller handed in a value that violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

struct Aabb {
  Vec3 min = Vec3::Constant(kInf);
  Vec3 max = Vec3::Constant(-kInf);

  bool empty() const { return (min.array() > max.array()).any(); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  bool contains(const Aabb& b) const {
    return (min.array() <= b.min.array()).all() && (max.array() >= b.max.array()).all();
  }
};

}  // namespace vats
