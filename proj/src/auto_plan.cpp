// SPDX-License-Identifier: Apache-2.0
#include "vats/auto_plan.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <mutex>
#include <thread>

namespace vats {

namespace {

struct ToolEval {
  std::optional<TrocarTrajectory> traj;
  std::vector<RuleResult> rules;
  bool pass = false;
};

ToolEval eval_tool(const AnatomicalScene& scene, const Vec3& entry, Hand hand) {
  ToolEval e;
  try {
    e.traj = make_trajectory(entry, scene.convergent_point(), hand);
    e.rules = check_trajectory(*e.traj, scene);
    e.pass = std::all_of(e.rules.begin(), e.rules.end(), [](const RuleResult& r) { return r.pass; });
  } catch (const Error&) {
    e.traj.reset();
  }
  return e;
}

struct PairResult {
  FailureHistogram histogram;
  std::size_t evaluated = 0;
  std::size_t feasible = 0;
  std::optional<double> best_volume;
  std::size_t best_camera = 0;
  std::size_t best_roll = 0;
};

void add_failures(FailureHistogram& h, const ToolEval& t, std::size_t times) {
  if (!t.traj) {
    h["invalid_input"] += times;
    return;
  }
  for (const RuleResult& r : t.rules) {
    if (!r.pass) h[r.id] += times;
  }
}

}  // namespace

NoFeasiblePlan::NoFeasiblePlan(FailureHistogram histogram, std::size_t evaluated)
    : Error([&] {
        std::string msg = "no feasible plan among " + std::to_string(evaluated) + " combinations";
        for (const auto& [id, n] : histogram) msg += "; " + id + ": " + std::to_string(n);
        return msg;
      }()),
      histogram_(std::move(histogram)),
      evaluated_(evaluated) {}

CandidateSet make_candidates(const AnatomicalScene& scene, int stride) {
  if (stride < 1) throw InvalidArgument("candidate stride must be >= 1");
  const MeshModel& skin = scene.skin().mesh();
  const auto pick = [&](const std::vector<std::uint32_t>& region) {
    std::vector<EntryCandidate> out;
    for (std::size_t i = 0; i < region.size(); i += static_cast<std::size_t>(stride)) {
      const auto c = skin.corners(region[i]);
      out.push_back(EntryCandidate{region[i], (c[0] + c[1] + c[2]) / 3.0});
    }
    return out;
  };
  return CandidateSet{pick(scene.tool_entry_region()), pick(scene.camera_entry_region())};
}

CameraPose planner_camera(const AnatomicalScene& scene, const Vec3& entry, double roll_deg) {
  const PlanningDefaults& d = scene.defaults();
  return camera_aimed_at(entry, scene.convergent_point(), d.camera_depth_mm, roll_deg, d.tilt_deg,
                         d.fov_deg, d.tube_length_mm);
}

AutoPlan auto_plan(const AnatomicalScene& scene, const CandidateSet& candidates,
                   double spacing_mm, unsigned threads) {
  const PlanningDefaults& d = scene.defaults();
  const std::size_t nt = candidates.tool.size();
  const std::size_t nc = candidates.camera.size();
  const std::size_t per_pair = nc * kRollAnglesDeg.size();

  std::vector<ToolEval> left(nt), right(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    left[i] = eval_tool(scene, candidates.tool[i].point, Hand::Left);
    right[i] = eval_tool(scene, candidates.tool[i].point, Hand::Right);
  }
  // Pose-only camera rules are shared by every instrument pair.
  std::vector<std::optional<CameraPose>> poses(per_pair);
  std::vector<std::vector<RuleResult>> pose_rules(per_pair);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t r = 0; r < kRollAnglesDeg.size(); ++r) {
      const std::size_t k = c * kRollAnglesDeg.size() + r;
      try {
        const CameraPose pose = planner_camera(scene, candidates.camera[c].point, kRollAnglesDeg[r]);
        pose_rules[k] = check_camera_pose(pose, scene);
        poses[k] = pose;
      } catch (const Error&) {
      }
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t l = 0; l < nt; ++l) {
    for (std::size_t r = 0; r < nt; ++r) {
      if (l != r) pairs.emplace_back(l, r);
    }
  }
  std::vector<PairResult> results(pairs.size());

  const auto run_pair = [&](std::size_t p) {
    const auto [li, ri] = pairs[p];
    PairResult& out = results[p];
    out.evaluated = per_pair;
    if (per_pair == 0) return;
    const ToolEval& lt = left[li];
    const ToolEval& rt = right[ri];
    if (!lt.pass || !rt.pass) {
      add_failures(out.histogram, lt, per_pair);
      add_failures(out.histogram, rt, per_pair);
      return;
    }
    const RuleResult angle = manipulation_angle(*lt.traj, *rt.traj, d);
    if (!angle.pass) {
      out.histogram[angle.id] += per_pair;
      return;
    }
    const std::array<Cone, 2> cones = {dof_cone_of(*lt.traj, d.half_angle_deg, d.reach_mm),
                                       dof_cone_of(*rt.traj, d.half_angle_deg, d.reach_mm)};
    const SceneMesh* clip = d.clip_to_thorax ? &scene.skin() : nullptr;
    for (std::size_t k = 0; k < per_pair; ++k) {
      if (!poses[k]) {
        ++out.histogram["invalid_input"];
        continue;
      }
      bool ok = true;
      for (const RuleResult& r : pose_rules[k]) {
        if (!r.pass) {
          ++out.histogram[r.id];
          ok = false;
        }
      }
      const RuleResult crowding = check_crowding(*poses[k], cones, d);
      if (!crowding.pass) {
        ++out.histogram[crowding.id];
        ok = false;
      }
      if (!ok) continue;
      ++out.feasible;
      const std::vector<Cone> all = {cones[0], cones[1], fov_cone_of(*poses[k], d.fov_length_mm)};
      const double v = cone_overlap(all, plan_frame(*lt.traj, *rt.traj, *poses[k]), spacing_mm,
                                    d.cone_segments, clip, false)
                           .volume_l;
      if (!out.best_volume || v > *out.best_volume) {
        out.best_volume = v;
        out.best_camera = k / kRollAnglesDeg.size();
        out.best_roll = k % kRollAnglesDeg.size();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, pairs.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::size_t p = next++; p < pairs.size(); p = next++) run_pair(p);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  FailureHistogram histogram;
  std::size_t evaluated = 0, feasible = 0;
  std::optional<std::size_t> best;
  for (std::size_t p = 0; p < results.size(); ++p) {
    const PairResult& r = results[p];
    evaluated += r.evaluated;
    feasible += r.feasible;
    for (const auto& [id, n] : r.histogram) histogram[id] += n;
    if (r.best_volume && (!best || *r.best_volume > *results[*best].best_volume)) best = p;
  }
  if (!best) throw NoFeasiblePlan(std::move(histogram), evaluated);

  const PairResult& win = results[*best];
  AutoPlan plan{*left[pairs[*best].first].traj,
                *right[pairs[*best].second].traj,
                *poses[win.best_camera * kRollAnglesDeg.size() + win.best_roll],
                {},
                pairs[*best].first,
                pairs[*best].second,
                win.best_camera,
                win.best_roll,
                evaluated,
                feasible};
  plan.report = evaluate_plan(plan.left, plan.right, plan.camera, scene, spacing_mm);
  return plan;
}

}  // namespace vats
