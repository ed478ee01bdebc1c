// SPDX-License-Identifier: Apache-2.0
#include "vats/session.hpp"

#include "vats/json_io.hpp"

#include <array>
#include <chrono>
#include <istream>
#include <ostream>

namespace vats {

namespace {

constexpr std::array<std::pair<SessionState, std::string_view>, 7> kStateNames = {{
    {SessionState::Setup, "Setup"},
    {SessionState::ToolEndpoints, "ToolEndpoints"},
    {SessionState::ToolEntries, "ToolEntries"},
    {SessionState::ToolConfirm, "ToolConfirm"},
    {SessionState::CameraPlace, "CameraPlace"},
    {SessionState::CameraConfirm, "CameraConfirm"},
    {SessionState::Summary, "Summary"},
}};

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

bool allowed(const Submission& s, SessionState state) {
  return std::visit(
      Overloaded{
          [&](const Start&) { return state == SessionState::Setup; },
          [&](const EndpointPair&) { return state == SessionState::ToolEndpoints; },
          [&](const EntryPair&) { return state == SessionState::ToolEntries; },
          [&](const CameraSubmission&) { return state == SessionState::CameraPlace; },
          [&](const Confirm&) {
            return state == SessionState::ToolConfirm || state == SessionState::CameraConfirm;
          },
          [&](const Repeat&) {
            return state == SessionState::ToolConfirm || state == SessionState::CameraConfirm;
          },
      },
      s);
}

bool is_placement(const Submission& s) {
  return std::holds_alternative<EndpointPair>(s) || std::holds_alternative<EntryPair>(s) ||
         std::holds_alternative<CameraSubmission>(s);
}

bool all_pass(const std::vector<RuleResult>& rules) {
  for (const RuleResult& r : rules) {
    if (!r.pass) return false;
  }
  return true;
}

bool is_tool_task(SessionState s) {
  return s == SessionState::ToolEndpoints || s == SessionState::ToolEntries ||
         s == SessionState::ToolConfirm;
}

bool is_camera_task(SessionState s) {
  return s == SessionState::CameraPlace || s == SessionState::CameraConfirm;
}

}  // namespace

std::string_view to_string(SessionState s) {
  for (const auto& [state, name] : kStateNames) {
    if (state == s) return name;
  }
  return "?";
}

std::optional<SessionState> parse_state(std::string_view name) {
  for (const auto& [state, n] : kStateNames) {
    if (n == name) return state;
  }
  return std::nullopt;
}

std::string_view kind_of(const Submission& s) {
  return std::visit(Overloaded{
                        [](const Start&) { return std::string_view("start"); },
                        [](const EndpointPair&) { return std::string_view("endpoints"); },
                        [](const EntryPair&) { return std::string_view("entries"); },
                        [](const CameraSubmission&) { return std::string_view("camera"); },
                        [](const Confirm&) { return std::string_view("confirm"); },
                        [](const Repeat&) { return std::string_view("repeat"); },
                    },
                    s);
}

WrongStateError::WrongStateError(std::string_view kind, SessionState state)
    : Error("submission '" + std::string(kind) + "' is not accepted in state " +
            std::string(to_string(state))) {}

Clock wall_clock() {
  return [] {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
  };
}

Session::Session(std::string id, std::shared_ptr<const AnatomicalScene> scene, Clock clock)
    : id_(std::move(id)), scene_(std::move(scene)), clock_(std::move(clock)) {
  if (!scene_) throw InvalidArgument("session needs a scene");
}

CameraPose submitted_pose(const AnatomicalScene& scene, const CameraSubmission& cam) {
  const PlanningDefaults& d = scene.defaults();
  return make_camera_pose(cam.tip, cam.tube_axis, cam.roll_deg, d.tilt_deg, d.fov_deg,
                          d.tube_length_mm);
}

Outcome Session::evaluate(const Submission& submission) const {
  Outcome out;
  out.state = state_;
  const AnatomicalScene& scene = *scene_;
  const PlanningDefaults& d = scene.defaults();
  try {
    std::visit(
        Overloaded{
            [&](const Start&) { out.accepted = true; },
            [&](const EndpointPair& e) {
              auto l = check_endpoint(e.left, scene);
              auto r = check_endpoint(e.right, scene);
              l.id = "left.endpoint";
              r.id = "right.endpoint";
              out.rules = {l, r};
              out.accepted = all_pass(out.rules);
            },
            [&](const EntryPair& e) {
              const auto left = make_trajectory(e.left, endpoints_->left, Hand::Left);
              const auto right = make_trajectory(e.right, endpoints_->right, Hand::Right);
              out.rules = check_trajectory(left, scene);
              const auto r = check_trajectory(right, scene);
              out.rules.insert(out.rules.end(), r.begin(), r.end());
              out.advisory = manipulation_angle(left, right, d);
              out.accepted = all_pass(out.rules);
            },
            [&](const CameraSubmission& c) {
              const std::array<Cone, 2> cones = {dof_cone_of(*left_, d.half_angle_deg, d.reach_mm),
                                                 dof_cone_of(*right_, d.half_angle_deg, d.reach_mm)};
              out.rules = check_camera(submitted_pose(scene, c), scene, cones);
              out.accepted = all_pass(out.rules);
            },
            [&](const Confirm&) {
              if (state_ == SessionState::CameraConfirm) {
                out.report = evaluate_plan(*left_, *right_, *camera_, scene);
                out.rules = out.report->rules;
                out.advisory = out.report->manipulation;
                out.accepted = out.report->overall_valid;
              } else {
                out.advisory = angle_;
                out.accepted = true;
              }
            },
            [&](const Repeat&) { out.accepted = true; },
        },
        submission);
  } catch (const Error& e) {
    out.accepted = false;
    out.invalid_input = true;
    out.message = e.what();
  }
  if (!out.accepted && out.message.empty()) out.message = "placement rules not satisfied";
  return out;
}

Outcome Session::preview(const Submission& submission) const {
  if (!allowed(submission, state_)) throw WrongStateError(kind_of(submission), state_);
  return evaluate(submission);
}

void Session::record(double t, SessionState from, const Submission& s, bool accepted,
                     std::string note) {
  events_.push_back(SessionEvent{t, from, state_, s, accepted, std::move(note)});
}

Outcome Session::advance(const Submission& submission) {
  const double t = clock_();
  const SessionState from = state_;

  if (last_accepted_ && is_placement(submission) && state_ == last_accepted_->state_after &&
      submission == last_accepted_->submission) {
    record(t, from, submission, true, "duplicate");
    return last_accepted_->outcome;
  }
  if (!allowed(submission, state_)) {
    record(t, from, submission, false, "wrong state");
    throw WrongStateError(kind_of(submission), state_);
  }

  Outcome out = evaluate(submission);
  if (!out.accepted) {
    record(t, from, submission, false, out.message);
    return out;
  }

  const PlanningDefaults& d = scene_->defaults();
  std::visit(Overloaded{
                 [&](const Start&) { state_ = SessionState::ToolEndpoints; },
                 [&](const EndpointPair& e) {
                   endpoints_ = e;
                   state_ = SessionState::ToolEntries;
                 },
                 [&](const EntryPair& e) {
                   left_ = make_trajectory(e.left, endpoints_->left, Hand::Left);
                   right_ = make_trajectory(e.right, endpoints_->right, Hand::Right);
                   angle_ = manipulation_angle(*left_, *right_, d);
                   state_ = SessionState::ToolConfirm;
                 },
                 [&](const CameraSubmission& c) {
                   camera_ = submitted_pose(*scene_, c);
                   state_ = SessionState::CameraConfirm;
                 },
                 [&](const Confirm&) {
                   if (state_ == SessionState::CameraConfirm) {
                     report_ = out.report;
                     state_ = SessionState::Summary;
                   } else {
                     state_ = SessionState::CameraPlace;
                   }
                 },
                 [&](const Repeat&) {
                   if (state_ == SessionState::ToolConfirm) {
                     ++tool_adjustments_;
                     endpoints_.reset();
                     left_.reset();
                     right_.reset();
                     angle_.reset();
                     state_ = SessionState::ToolEndpoints;
                   } else {
                     ++camera_adjustments_;
                     camera_.reset();
                     state_ = SessionState::CameraPlace;
                   }
                 },
             },
             submission);
  out.state = state_;
  record(t, from, submission, true, "");
  if (is_placement(submission)) last_accepted_ = Accepted{submission, state_, out};
  return out;
}

SessionMetrics metrics(const Session& session) {
  SessionMetrics m;
  const auto& ev = session.events();
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    const double dt = std::max(0.0, ev[i + 1].timestamp_s - ev[i].timestamp_s) / 60.0;
    if (is_tool_task(ev[i].to)) m.tool_minutes += dt;
    if (is_camera_task(ev[i].to)) m.camera_minutes += dt;
  }
  for (const SessionEvent& e : ev) {
    if (!e.accepted || !std::holds_alternative<Repeat>(e.submission)) continue;
    if (e.from == SessionState::ToolConfirm) ++m.tool_adjustments;
    if (e.from == SessionState::CameraConfirm) ++m.camera_adjustments;
  }
  if (session.left()) m.left_distance_cm = session.left()->length / 10.0;
  if (session.right()) m.right_distance_cm = session.right()->length / 10.0;
  if (session.left() && session.right()) {
    m.manipulation_angle_deg =
        manipulation_angle(*session.left(), *session.right(), session.scene().defaults()).value;
  }
  if (session.report()) m.operable_volume_l = session.report()->operable_volume_l;
  return m;
}

Session replay(std::string id, std::shared_ptr<const AnatomicalScene> scene,
               const std::vector<SessionEvent>& events) {
  auto cursor = std::make_shared<std::size_t>(0);
  std::vector<double> times;
  times.reserve(events.size());
  for (const SessionEvent& e : events) times.push_back(e.timestamp_s);
  Session session(std::move(id), std::move(scene), [cursor, times] {
    return *cursor < times.size() ? times[(*cursor)++] : (times.empty() ? 0.0 : times.back());
  });
  for (const SessionEvent& e : events) {
    try {
      session.advance(e.submission);
    } catch (const WrongStateError&) {
      // logged as rejected, exactly as in the original run
    }
  }
  return session;
}

void write_event_log(const Session& session, std::ostream& out) {
  for (const SessionEvent& e : session.events()) {
    const Json payload = submission_payload(e.submission);
    Json line = {
        {"t", e.timestamp_s},
        {"from", to_string(e.from)},
        {"to", to_string(e.to)},
        {"kind", kind_of(e.submission)},
        {"accepted", e.accepted},
        {"note", e.note},
        {"digest", sha256_hex(payload.dump())},
        {"payload", payload},
    };
    out << line.dump() << '\n';
  }
}

std::vector<SessionEvent> read_event_log(std::istream& in) {
  std::vector<SessionEvent> events;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      SessionEvent e;
      e.timestamp_s = j.at("t").get<double>();
      const auto from = parse_state(j.at("from").get<std::string>());
      const auto to = parse_state(j.at("to").get<std::string>());
      if (!from || !to) throw FormatError("unknown state");
      e.from = *from;
      e.to = *to;
      e.submission = submission_from_json(j.at("kind").get<std::string>(), j.at("payload"));
      if (j.contains("digest") && j.at("digest") != sha256_hex(j.at("payload").dump())) {
        throw FormatError("payload digest mismatch");
      }
      e.accepted = j.at("accepted").get<bool>();
      e.note = j.value("note", "");
      events.push_back(std::move(e));
    } catch (const Json::exception& ex) {
      throw FormatError("event log line " + std::to_string(n) + ": " + ex.what());
    } catch (const FormatError& ex) {
      throw FormatError("event log line " + std::to_string(n) + ": " + ex.what());
    }
  }
  return events;
}

}  // namespace vats
