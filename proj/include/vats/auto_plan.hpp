// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/rules.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace vats {

inline constexpr std::array<double, 4> kRollAnglesDeg = {0.0, 90.0, 180.0, 270.0};

struct EntryCandidate {
  std::uint32_t triangle;
  Vec3 point;  // triangle centroid
};

struct CandidateSet {
  std::vector<EntryCandidate> tool;
  std::vector<EntryCandidate> camera;
};

/// Centroids of the region triangles, keeping every `stride`-th one in
/// ascending triangle order.
CandidateSet make_candidates(const AnatomicalScene& scene, int stride = 1);

struct AutoPlan {
  TrocarTrajectory left;
  TrocarTrajectory right;
  CameraPose camera;
  PlanReport report;
  std::size_t left_index = 0;
  std::size_t right_index = 0;
  std::size_t camera_index = 0;
  std::size_t roll_index = 0;
  std::size_t evaluated = 0;  // combinations examined
  std::size_t feasible = 0;
};

/// Rule id -> number of combinations it rejected. "invalid_input" counts
/// combinations that could not be evaluated; "manipulation_angle" counts
/// out-of-band pairs.
using FailureHistogram = std::map<std::string, std::size_t>;

class NoFeasiblePlan : public Error {
 public:
  NoFeasiblePlan(FailureHistogram histogram, std::size_t evaluated);
  const FailureHistogram& histogram() const { return histogram_; }
  std::size_t evaluated() const { return evaluated_; }

 private:
  FailureHistogram histogram_;
  std::size_t evaluated_;
};

/// The camera pose the planner tries for one camera entry and roll.
CameraPose planner_camera(const AnatomicalScene& scene, const Vec3& entry, double roll_deg);

/// Exhaustive search over (left, right, camera entry, roll) with distinct
/// left/right entries. Feasible: every hard rule passes and the instrument
/// angle is inside the band. Maximizes operable volume; ties go to the
/// lexicographically smallest (left, right, camera, roll) index tuple.
/// `threads` = 0 uses the hardware concurrency.
AutoPlan auto_plan(const AnatomicalScene& scene, const CandidateSet& candidates,
                   double spacing_mm, unsigned threads = 0);

}  // namespace vats
