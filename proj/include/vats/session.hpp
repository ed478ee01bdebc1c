// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/rules.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vats {

/// Workflow states in order. Task 1 (instrument trocars) spans ToolEndpoints
/// through ToolConfirm, task 2 (camera) spans CameraPlace and CameraConfirm.
enum class SessionState {
  Setup,
  ToolEndpoints,
  ToolEntries,
  ToolConfirm,
  CameraPlace,
  CameraConfirm,
  Summary,
};

std::string_view to_string(SessionState s);
std::optional<SessionState> parse_state(std::string_view name);

struct Start {
  bool operator==(const Start&) const = default;
};
/// Instrument tips placed at (near) the convergent point.
struct EndpointPair {
  Vec3 left;
  Vec3 right;
  bool operator==(const EndpointPair&) const = default;
};
/// Skin entry points for the two instruments.
struct EntryPair {
  Vec3 left;
  Vec3 right;
  bool operator==(const EntryPair&) const = default;
};
/// Endoscope pose; tilt, field of view and tube length come from the scene
/// defaults.
struct CameraSubmission {
  Vec3 tip;
  Vec3 tube_axis;
  double roll_deg = 0.0;
  bool operator==(const CameraSubmission&) const = default;
};
struct Confirm {
  bool operator==(const Confirm&) const = default;
};
struct Repeat {
  bool operator==(const Repeat&) const = default;
};

using Submission = std::variant<Start, EndpointPair, EntryPair, CameraSubmission, Confirm, Repeat>;

std::string_view kind_of(const Submission& s);

/// Camera pose for a submission, using the scene's tilt, field of view and
/// tube length.
CameraPose submitted_pose(const AnatomicalScene& scene, const CameraSubmission& cam);

struct SessionEvent {
  double timestamp_s = 0.0;
  SessionState from = SessionState::Setup;
  SessionState to = SessionState::Setup;
  Submission submission;
  bool accepted = false;
  std::string note;
};

/// Result of one submission. `invalid_input` marks geometry that could not be
/// evaluated at all (entry off the skin, zero-length path, ...), as opposed
/// to a placement that was evaluated and failed a rule.
struct Outcome {
  bool accepted = false;
  bool invalid_input = false;
  SessionState state = SessionState::Setup;
  std::vector<RuleResult> rules;
  std::optional<RuleResult> advisory;
  std::optional<PlanReport> report;  // set when the camera placement is confirmed
  std::string message;
};

class WrongStateError : public Error {
 public:
  WrongStateError(std::string_view kind, SessionState state);
};

/// Seconds on an arbitrary monotone scale.
using Clock = std::function<double()>;
Clock wall_clock();

struct SessionMetrics {
  double tool_minutes = 0.0;
  double camera_minutes = 0.0;
  int tool_adjustments = 0;
  int camera_adjustments = 0;
  std::optional<double> left_distance_cm;
  std::optional<double> right_distance_cm;
  std::optional<double> manipulation_angle_deg;
  std::optional<double> operable_volume_l;
};

/// One planning session. Single writer: callers serialize `advance`.
class Session {
 public:
  Session(std::string id, std::shared_ptr<const AnatomicalScene> scene, Clock clock = wall_clock());

  const std::string& id() const { return id_; }
  const AnatomicalScene& scene() const { return *scene_; }
  SessionState state() const { return state_; }
  const std::vector<SessionEvent>& events() const { return events_; }
  int tool_adjustments() const { return tool_adjustments_; }
  int camera_adjustments() const { return camera_adjustments_; }

  const std::optional<EndpointPair>& endpoints() const { return endpoints_; }
  const std::optional<TrocarTrajectory>& left() const { return left_; }
  const std::optional<TrocarTrajectory>& right() const { return right_; }
  const std::optional<CameraPose>& camera() const { return camera_; }
  const std::optional<PlanReport>& report() const { return report_; }

  /// Validates and applies a submission. Wrong-state submissions throw
  /// WrongStateError; validation failures return accepted = false and leave
  /// the state untouched. Every call appends an event.
  Outcome advance(const Submission& submission);

  /// What `advance` would report, without changing anything.
  Outcome preview(const Submission& submission) const;

 private:
  Outcome evaluate(const Submission& submission) const;
  void record(double t, SessionState from, const Submission& s, bool accepted, std::string note);

  std::string id_;
  std::shared_ptr<const AnatomicalScene> scene_;
  Clock clock_;
  SessionState state_ = SessionState::Setup;
  std::vector<SessionEvent> events_;
  int tool_adjustments_ = 0;
  int camera_adjustments_ = 0;

  std::optional<EndpointPair> endpoints_;
  std::optional<TrocarTrajectory> left_;
  std::optional<TrocarTrajectory> right_;
  std::optional<RuleResult> angle_;
  std::optional<CameraPose> camera_;
  std::optional<PlanReport> report_;

  struct Accepted {
    Submission submission;
    SessionState state_after;
    Outcome outcome;
  };
  std::optional<Accepted> last_accepted_;
};

/// Per-task times and adjustment counts from the event log; placement
/// figures from the session's current placements.
SessionMetrics metrics(const Session& session);

/// Rebuilds a session by re-submitting every logged event at its logged time.
Session replay(std::string id, std::shared_ptr<const AnatomicalScene> scene,
               const std::vector<SessionEvent>& events);

/// JSON-lines event log: one object per event with `t`, `from`, `to`,
/// `kind`, `accepted`, `digest` (SHA-256 of the payload) and `payload`.
void write_event_log(const Session& session, std::ostream& out);
std::vector<SessionEvent> read_event_log(std::istream& in);

}  // namespace vats
