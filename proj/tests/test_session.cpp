#include "support/scenes.hpp"

#include "vats/json_io.hpp"
#include "vats/session.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace vats;
using namespace vats::testing;

namespace {

/// Clock that advances by the next step on every read.
Clock stepping_clock(std::vector<double> steps) {
  auto state = std::make_shared<std::pair<double, std::size_t>>(1000.0, 0);
  return [state, steps] {
    const double t = state->first;
    state->first += steps.empty() ? 60.0 : steps[state->second++ % steps.size()];
    return t;
  };
}

const EndpointPair kEndpoints{Vec3(1, 0, 0), Vec3(0, 2, 0)};

EntryPair entries_at(double angle_deg) {
  const double x = kBoxHalf * std::tan(deg_to_rad(angle_deg / 2));
  return {Vec3(-x, 0, kBoxHalf), Vec3(x, 0, kBoxHalf)};
}

CameraSubmission side_camera() {
  const CameraPose p = camera_aimed_at(Vec3(kBoxHalf, 0, -120), Vec3::Zero(), 80.0, 0.0);
  return {p.tip, p.tube_axis, 0.0};
}

/// Drives a fresh session to Summary.
void complete(Session& s) {
  s.advance(Start{});
  s.advance(kEndpoints);
  s.advance(entries_at(50));
  s.advance(Confirm{});
  s.advance(side_camera());
  s.advance(Confirm{});
}

void same_metrics(const SessionMetrics& a, const SessionMetrics& b) {
  CHECK(a.tool_minutes == b.tool_minutes);
  CHECK(a.camera_minutes == b.camera_minutes);
  CHECK(a.tool_adjustments == b.tool_adjustments);
  CHECK(a.camera_adjustments == b.camera_adjustments);
  CHECK(a.left_distance_cm == b.left_distance_cm);
  CHECK(a.right_distance_cm == b.right_distance_cm);
  CHECK(a.manipulation_angle_deg == b.manipulation_angle_deg);
  CHECK(a.operable_volume_l == b.operable_volume_l);
}

}  // namespace

TEST_CASE("state names round trip") {
  for (auto s : {SessionState::Setup, SessionState::ToolEndpoints, SessionState::ToolEntries,
                 SessionState::ToolConfirm, SessionState::CameraPlace, SessionState::CameraConfirm,
                 SessionState::Summary}) {
    CHECK(parse_state(to_string(s)) == s);
  }
  CHECK_FALSE(parse_state("Nope").has_value());
}

TEST_CASE("a valid walkthrough visits every state in order") {
  Session s("a", shared_box_scene(), stepping_clock({}));
  CHECK(s.state() == SessionState::Setup);
  CHECK(s.advance(Start{}).state == SessionState::ToolEndpoints);
  const Outcome ep = s.advance(kEndpoints);
  CHECK(ep.accepted);
  CHECK(ep.state == SessionState::ToolEntries);
  CHECK(ep.rules.size() == 2);
  const Outcome en = s.advance(entries_at(50));
  CHECK(en.accepted);
  CHECK(en.state == SessionState::ToolConfirm);
  REQUIRE(en.advisory.has_value());
  CHECK(en.advisory->pass);
  // trajectories end at the submitted endpoints
  CHECK(s.left()->target == kEndpoints.left);
  CHECK(s.right()->target == kEndpoints.right);
  CHECK(s.advance(Confirm{}).state == SessionState::CameraPlace);
  const Outcome cam = s.advance(side_camera());
  CHECK(cam.accepted);
  CHECK(cam.rules.size() == 4);
  CHECK(cam.state == SessionState::CameraConfirm);
  const Outcome done = s.advance(Confirm{});
  CHECK(done.accepted);
  CHECK(done.state == SessionState::Summary);
  REQUIRE(done.report.has_value());
  CHECK(done.report->overall_valid);
  CHECK(s.report()->operable_volume_l == done.report->operable_volume_l);
  CHECK(s.events().size() == 6);
}

TEST_CASE("repeat returns to the start of the task and counts an adjustment") {
  Session s("a", shared_box_scene(), stepping_clock({}));
  s.advance(Start{});
  s.advance(kEndpoints);
  s.advance(entries_at(50));
  const Outcome r = s.advance(Repeat{});
  CHECK(r.state == SessionState::ToolEndpoints);
  CHECK(s.tool_adjustments() == 1);
  CHECK_FALSE(s.left().has_value());
  CHECK_FALSE(s.endpoints().has_value());

  s.advance(kEndpoints);
  s.advance(entries_at(50));
  s.advance(Confirm{});
  s.advance(side_camera());
  CHECK(s.advance(Repeat{}).state == SessionState::CameraPlace);
  CHECK(s.camera_adjustments() == 1);
  CHECK_FALSE(s.camera().has_value());
  CHECK(s.left().has_value());
}

TEST_CASE("wrong-state submissions throw and are logged") {
  Session s("a", shared_box_scene(), stepping_clock({}));
  s.advance(Start{});
  s.advance(kEndpoints);
  CHECK_THROWS_AS(s.advance(side_camera()), WrongStateError);
  CHECK(s.state() == SessionState::ToolEntries);
  CHECK_FALSE(s.events().back().accepted);
  CHECK(s.events().back().note == "wrong state");
  CHECK_THROWS_AS(s.advance(Confirm{}), WrongStateError);
  CHECK_THROWS_AS(s.advance(Start{}), WrongStateError);
  CHECK_THROWS_AS(s.preview(Repeat{}), WrongStateError);
}

TEST_CASE("rejected placements leave the state unchanged") {
  Session s("a", shared_box_scene(), stepping_clock({}));
  s.advance(Start{});
  const Outcome far = s.advance(EndpointPair{Vec3(50, 0, 0), Vec3::Zero()});
  CHECK_FALSE(far.accepted);
  CHECK_FALSE(far.invalid_input);
  CHECK(far.state == SessionState::ToolEndpoints);
  CHECK_FALSE(far.rules[0].pass);
  CHECK(far.rules[1].pass);
  s.advance(kEndpoints);
  const Outcome off_skin = s.advance(EntryPair{Vec3(0, 0, 20), Vec3(10, 0, kBoxHalf)});
  CHECK_FALSE(off_skin.accepted);
  CHECK(off_skin.invalid_input);
  CHECK_FALSE(off_skin.message.empty());
  CHECK(s.state() == SessionState::ToolEntries);
  CHECK(s.events().size() == 4);
}

TEST_CASE("resubmitting an accepted placement is idempotent") {
  Session s("a", shared_box_scene(), stepping_clock({}));
  s.advance(Start{});
  const Outcome first = s.advance(kEndpoints);
  const Outcome again = s.advance(kEndpoints);
  CHECK(again.accepted);
  CHECK(again.state == first.state);
  CHECK(s.state() == SessionState::ToolEntries);
  CHECK(s.events().back().note == "duplicate");
  // a different pair is a wrong-state submission
  CHECK_THROWS_AS(s.advance(EndpointPair{Vec3::Zero(), Vec3::Zero()}), WrongStateError);
}

TEST_CASE("preview reports without changing anything") {
  Session s("a", shared_box_scene(), stepping_clock({}));
  s.advance(Start{});
  const Outcome p = s.preview(EndpointPair{Vec3(50, 0, 0), Vec3::Zero()});
  CHECK_FALSE(p.accepted);
  CHECK(s.events().size() == 1);
  CHECK(s.state() == SessionState::ToolEndpoints);
}

TEST_CASE("metrics of an untouched session are zero") {
  Session s("a", shared_box_scene(), stepping_clock({}));
  const SessionMetrics m = metrics(s);
  CHECK(m.tool_minutes == 0.0);
  CHECK(m.camera_minutes == 0.0);
  CHECK(m.tool_adjustments == 0);
  CHECK(m.camera_adjustments == 0);
  CHECK_FALSE(m.left_distance_cm.has_value());
  CHECK_FALSE(m.operable_volume_l.has_value());
  s.advance(Start{});
  CHECK(metrics(s).tool_minutes == 0.0);
}

TEST_CASE("two repeats in the tool task count two adjustments") {
  Session s("a", shared_box_scene(), stepping_clock({}));
  s.advance(Start{});
  for (int i = 0; i < 2; ++i) {
    s.advance(kEndpoints);
    s.advance(entries_at(50));
    s.advance(Repeat{});
  }
  CHECK(metrics(s).tool_adjustments == 2);
  CHECK(metrics(s).camera_adjustments == 0);
}

TEST_CASE("metrics equal values computed by hand from the log") {
  // events at t = 1000, 1030, 1120, 1300, 1330, 1450, 1510, 1570
  Session s("a", shared_box_scene(), stepping_clock({30, 90, 180, 30, 120, 60, 60}));
  s.advance(Start{});         // 1000 Setup -> ToolEndpoints
  s.advance(kEndpoints);      // 1030 -> ToolEntries
  s.advance(entries_at(50));  // 1120 -> ToolConfirm
  s.advance(Confirm{});       // 1300 -> CameraPlace
  s.advance(side_camera());   // 1330 -> CameraConfirm
  s.advance(Repeat{});        // 1450 -> CameraPlace
  s.advance(side_camera());   // 1510 -> CameraConfirm
  s.advance(Confirm{});       // 1570 -> Summary
  const SessionMetrics m = metrics(s);
  CHECK(m.tool_minutes == doctest::Approx((1300.0 - 1000.0) / 60.0));
  CHECK(m.camera_minutes == doctest::Approx((1570.0 - 1300.0) / 60.0));
  CHECK(m.tool_adjustments == 0);
  CHECK(m.camera_adjustments == 1);
  const Vec3 left = entries_at(50).left;
  CHECK(*m.left_distance_cm == doctest::Approx((left - kEndpoints.left).norm() / 10.0));
  CHECK(*m.manipulation_angle_deg ==
        doctest::Approx(angle_between(left - kEndpoints.left, entries_at(50).right - kEndpoints.right)));
  CHECK(*m.operable_volume_l == s.report()->operable_volume_l);
}

TEST_CASE("random submission sequences never skip a state") {
  const std::set<std::pair<SessionState, SessionState>> edges = {
      {SessionState::Setup, SessionState::ToolEndpoints},
      {SessionState::ToolEndpoints, SessionState::ToolEntries},
      {SessionState::ToolEntries, SessionState::ToolConfirm},
      {SessionState::ToolConfirm, SessionState::CameraPlace},
      {SessionState::ToolConfirm, SessionState::ToolEndpoints},
      {SessionState::CameraPlace, SessionState::CameraConfirm},
      {SessionState::CameraConfirm, SessionState::Summary},
      {SessionState::CameraConfirm, SessionState::CameraPlace},
  };
  const std::vector<Submission> pool = {
      Start{},   kEndpoints, EndpointPair{Vec3(40, 0, 0), Vec3::Zero()}, entries_at(50),
      entries_at(30), side_camera(), Confirm{}, Repeat{}};
  std::mt19937_64 rng(41);
  const auto scene = shared_box_scene();
  for (int run = 0; run < 30; ++run) {
    Session s("r", scene, stepping_clock({7, 11, 13}));
    int tool = 0;
    int cam = 0;
    for (int i = 0; i < 40; ++i) {
      try {
        s.advance(pool[rng() % pool.size()]);
      } catch (const WrongStateError&) {
      }
      const SessionEvent& e = s.events().back();
      if (e.accepted && e.from != e.to) CHECK(edges.count({e.from, e.to}) == 1);
      if (!e.accepted) CHECK(e.from == e.to);
      CHECK(s.tool_adjustments() >= tool);
      CHECK(s.camera_adjustments() >= cam);
      tool = s.tool_adjustments();
      cam = s.camera_adjustments();
    }
    // replaying the log reproduces the session
    const Session r = replay("r2", scene, s.events());
    CHECK(r.state() == s.state());
    REQUIRE(r.events().size() == s.events().size());
    for (std::size_t k = 0; k < r.events().size(); ++k) {
      CHECK(r.events()[k].timestamp_s == s.events()[k].timestamp_s);
      CHECK(r.events()[k].to == s.events()[k].to);
      CHECK(r.events()[k].accepted == s.events()[k].accepted);
    }
    same_metrics(metrics(r), metrics(s));
  }
}

TEST_CASE("event log round trips and detects tampering") {
  const auto scene = shared_box_scene();
  Session s("a", scene, stepping_clock({12.5, 40, 3}));
  s.advance(Start{});
  s.advance(kEndpoints);
  CHECK_THROWS(s.advance(Confirm{}));
  s.advance(entries_at(60));
  s.advance(Repeat{});
  s.advance(kEndpoints);
  s.advance(entries_at(50));
  s.advance(Confirm{});
  s.advance(side_camera());
  s.advance(Confirm{});
  std::stringstream log;
  write_event_log(s, log);

  const auto events = read_event_log(log);
  REQUIRE(events.size() == s.events().size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    CHECK(events[k].timestamp_s == s.events()[k].timestamp_s);
    CHECK(events[k].from == s.events()[k].from);
    CHECK(events[k].to == s.events()[k].to);
    CHECK(events[k].accepted == s.events()[k].accepted);
    CHECK(events[k].note == s.events()[k].note);
    CHECK(events[k].submission == s.events()[k].submission);
  }
  const Session r = replay("b", scene, events);
  CHECK(r.state() == SessionState::Summary);
  same_metrics(metrics(r), metrics(s));

  // change one coordinate on line 2 without updating its digest
  std::string text = log.str();
  std::istringstream lines(text);
  std::string l1, l2, rest;
  std::getline(lines, l1);
  std::getline(lines, l2);
  Json j = Json::parse(l2);
  j["payload"]["left"][0] = 2.0;
  std::istringstream tampered(l1 + "\n" + j.dump() + "\n");
  try {
    read_event_log(tampered);
    FAIL("tampering not detected");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream garbage("{not json}\n");
  CHECK_THROWS_AS(read_event_log(garbage), FormatError);
}
