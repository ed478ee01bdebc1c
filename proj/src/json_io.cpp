// SPDX-License-Identifier: Apache-2.0
#include "vats/json_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vats {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw FormatError(std::string(what) + ": expected [x, y, z]");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw FormatError(std::string(what) + ": coordinates must be numbers");
    v[i] = j[i].get<double>();
    if (!std::isfinite(v[i])) throw FormatError(std::string(what) + ": non-finite coordinate");
  }
  return v;
}

Json to_json(const RuleResult& r) {
  return {{"id", r.id},
          {"pass", r.pass},
          {"value", number(r.value)},
          {"unit", r.unit},
          {"threshold", r.threshold}};
}

Json to_json(const PlanReport& report) {
  Json rules = Json::array();
  for (const RuleResult& r : report.rules) rules.push_back(to_json(r));
  return {{"rules", rules},
          {"manipulation_angle_deg", number(report.manipulation.value)},
          {"in_band", report.in_band()},
          {"operable_volume_l", number(report.operable_volume_l)},
          {"overall_valid", report.overall_valid}};
}

Json report_with_cells(const PlanReport& report) {
  Json j = to_json(report);
  Json cells = Json::array();
  for (const Vec3& c : report.overlap_cells) cells.push_back(to_json(c));
  j["spacing_mm"] = report.spacing_mm;
  j["cells"] = std::move(cells);
  return j;
}

std::string dump_report(const PlanReport& report) { return to_json(report).dump(2); }

Json to_json(const CameraPose& pose) {
  return {{"tip", to_json(pose.tip)},
          {"tube_axis", to_json(pose.tube_axis)},
          {"tube_length_mm", pose.tube_length},
          {"tilt_deg", pose.tilt_deg},
          {"roll_deg", pose.roll_deg},
          {"fov_half_angle_deg", pose.fov_half_angle_deg},
          {"optical_axis", to_json(pose.optical_axis)}};
}

Json to_json(const Outcome& outcome) {
  Json rules = Json::array();
  for (const RuleResult& r : outcome.rules) rules.push_back(to_json(r));
  Json j = {{"accepted", outcome.accepted},
            {"invalid_input", outcome.invalid_input},
            {"state", to_string(outcome.state)},
            {"rules", rules},
            {"message", outcome.message}};
  j["advisory"] = outcome.advisory ? to_json(*outcome.advisory) : Json(nullptr);
  if (outcome.report) j["report"] = to_json(*outcome.report);
  return j;
}

Json to_json(const SessionMetrics& m) {
  return {{"tool_minutes", m.tool_minutes},
          {"camera_minutes", m.camera_minutes},
          {"tool_adjustments", m.tool_adjustments},
          {"camera_adjustments", m.camera_adjustments},
          {"left_distance_cm", optional_number(m.left_distance_cm)},
          {"right_distance_cm", optional_number(m.right_distance_cm)},
          {"manipulation_angle_deg", optional_number(m.manipulation_angle_deg)},
          {"operable_volume_l", optional_number(m.operable_volume_l)}};
}

Json submission_payload(const Submission& s) {
  if (const auto* e = std::get_if<EndpointPair>(&s)) {
    return {{"left", to_json(e->left)}, {"right", to_json(e->right)}};
  }
  if (const auto* e = std::get_if<EntryPair>(&s)) {
    return {{"left", to_json(e->left)}, {"right", to_json(e->right)}};
  }
  if (const auto* c = std::get_if<CameraSubmission>(&s)) {
    return {{"tip", to_json(c->tip)}, {"tube_axis", to_json(c->tube_axis)}, {"roll_deg", c->roll_deg}};
  }
  return Json::object();
}

Submission submission_from_json(std::string_view kind, const Json& payload) {
  if (kind == "start") return Start{};
  if (kind == "confirm") return Confirm{};
  if (kind == "repeat") return Repeat{};
  if (!payload.is_object()) throw FormatError(std::string(kind) + ": payload must be an object");
  const auto field = [&](const char* name) -> const Json& {
    if (!payload.contains(name)) {
      throw FormatError(std::string(kind) + ": missing field '" + name + "'");
    }
    return payload.at(name);
  };
  if (kind == "endpoints") {
    return EndpointPair{vec3_from_json(field("left"), "left"), vec3_from_json(field("right"), "right")};
  }
  if (kind == "entries") {
    return EntryPair{vec3_from_json(field("left"), "left"), vec3_from_json(field("right"), "right")};
  }
  if (kind == "camera") {
    CameraSubmission c{vec3_from_json(field("tip"), "tip"),
                       vec3_from_json(field("tube_axis"), "tube_axis"), 0.0};
    if (payload.contains("roll_deg")) {
      if (!payload["roll_deg"].is_number()) throw FormatError("roll_deg must be a number");
      c.roll_deg = payload["roll_deg"].get<double>();
    }
    return c;
  }
  throw FormatError("unknown submission kind '" + std::string(kind) + "'");
}

std::string sha256_hex(std::string_view text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::filesystem::path resolve_input_path(const std::filesystem::path& path) {
  if (std::filesystem::exists(path) || path.is_absolute()) return path;
  if (const char* root = std::getenv("VATS_FIXTURE_ROOT")) {
    const auto alt = std::filesystem::path(root) / path;
    if (std::filesystem::exists(alt)) return alt;
  }
  return path;
}

}  // namespace vats
