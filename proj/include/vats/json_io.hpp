// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/session.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace vats {

using Json = nlohmann::json;

/// Malformed JSON input: wrong shape, missing field, bad value.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Version stamped into plan files.
inline constexpr const char* kEngineVersion = "0.1.0";

Json to_json(const Vec3& v);
Vec3 vec3_from_json(const Json& j, const char* what);

Json to_json(const RuleResult& r);

/// {rules:[{id,pass,value,unit,threshold}], manipulation_angle_deg, in_band,
///  operable_volume_l, overall_valid}. Non-finite values serialize as null.
Json to_json(const PlanReport& report);

/// Report plus the overlap cell centers and spacing, for rendering.
Json report_with_cells(const PlanReport& report);

/// Canonical text of a report; the CLI and the HTTP API both print this.
std::string dump_report(const PlanReport& report);

Json to_json(const CameraPose& pose);
Json to_json(const Outcome& outcome);
Json to_json(const SessionMetrics& m);

Json submission_payload(const Submission& s);
/// `kind` as produced by kind_of; throws FormatError on malformed payloads.
Submission submission_from_json(std::string_view kind, const Json& payload);

/// Hex SHA-256 of `text`.
std::string sha256_hex(std::string_view text);

Json read_json_file(const std::filesystem::path& path);

/// Resolves `path` as given, then against $VATS_FIXTURE_ROOT when relative
/// and missing.
std::filesystem::path resolve_input_path(const std::filesystem::path& path);

}  // namespace vats
