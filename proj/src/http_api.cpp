// SPDX-License-Identifier: Apache-2.0
#include "vats/http_api.hpp"

#include "vats/service.hpp"

#include <httplib.h>

#include <sstream>

namespace vats {

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send(res, status, Json{{"error", message}});
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed JSON body: ") + e.what());
  }
}

Json session_json(const Session& s) {
  Json j = {{"id", s.id()},
            {"state", to_string(s.state())},
            {"tool_adjustments", s.tool_adjustments()},
            {"camera_adjustments", s.camera_adjustments()}};
  if (s.endpoints()) {
    j["endpoints"] = {{"left", to_json(s.endpoints()->left)}, {"right", to_json(s.endpoints()->right)}};
  }
  if (s.left()) j["left_entry"] = to_json(s.left()->entry);
  if (s.right()) j["right_entry"] = to_json(s.right()->entry);
  if (s.camera()) j["camera"] = to_json(*s.camera());
  return j;
}

}  // namespace

ApiService::ApiService(std::shared_ptr<const AnatomicalScene> scene, Clock clock)
    : scene_(std::move(scene)), clock_(std::move(clock)) {
  if (!scene_) throw InvalidArgument("API needs a scene");
  scene_body_ = scene_json(*scene_).dump();
}

std::size_t ApiService::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::shared_ptr<ApiService::Entry> ApiService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::string ApiService::create() {
  const std::string id = "s" + std::to_string(next_id_++);
  auto entry = std::make_shared<Entry>();
  entry->session = std::make_unique<Session>(id, scene_, clock_);
  entry->session->advance(Start{});
  std::lock_guard lock(mutex_);
  sessions_.emplace(id, std::move(entry));
  return id;
}

void ApiService::mount(httplib::Server& server) {
  server.Post("/api/sessions", [this](const httplib::Request&, httplib::Response& res) {
    const std::string id = create();
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    send(res, 201, session_json(*e->session));
  });

  server.Get("/api/scene", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(scene_body_, kJson);
  });

  server.Post("/api/evaluate", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const PlanFile plan = plan_from_json(parse_body(req));
      const PlanReport report =
          evaluate_plan_file(plan, *scene_, scene_->defaults().spacing_mm, {.export_cells = false});
      res.set_content(dump_report(report), kJson);
    } catch (const Error& e) {
      send_error(res, 422, e.what());
    }
  });

  // Runs `fn` on a locked session, mapping errors to status codes.
  const auto with_session = [this](const httplib::Request& req, httplib::Response& res,
                                   const auto& fn) {
    const auto entry = find(req.path_params.at("id"));
    if (!entry) {
      send_error(res, 404, "unknown session '" + req.path_params.at("id") + "'");
      return;
    }
    std::lock_guard lock(entry->mutex);
    try {
      fn(*entry->session);
    } catch (const WrongStateError& e) {
      send_error(res, 409, e.what());
    } catch (const Error& e) {
      send_error(res, 422, e.what());
    }
  };

  server.Get("/api/sessions/:id", [with_session](const httplib::Request& req, httplib::Response& res) {
    with_session(req, res, [&](Session& s) { send(res, 200, session_json(s)); });
  });

  for (const std::string kind : {"endpoints", "entries", "camera", "confirm", "repeat"}) {
    server.Post("/api/sessions/:id/" + kind,
                [with_session, kind](const httplib::Request& req, httplib::Response& res) {
                  with_session(req, res, [&](Session& s) {
                    const Submission sub = submission_from_json(kind, parse_body(req));
                    const Outcome out = s.advance(sub);
                    send(res, out.invalid_input ? 422 : 200, to_json(out));
                  });
                });
  }
  for (const std::string kind : {"endpoints", "entries", "camera"}) {
    server.Post("/api/sessions/:id/check/" + kind,
                [with_session, kind](const httplib::Request& req, httplib::Response& res) {
                  with_session(req, res, [&](Session& s) {
                    const Outcome out = s.preview(submission_from_json(kind, parse_body(req)));
                    send(res, out.invalid_input ? 422 : 200, to_json(out));
                  });
                });
  }

  server.Get("/api/sessions/:id/report", [with_session](const httplib::Request& req,
                                                        httplib::Response& res) {
    with_session(req, res, [&](Session& s) {
      if (!s.report()) {
        send_error(res, 409, "no evaluated plan yet (state " + std::string(to_string(s.state())) + ")");
        return;
      }
      send(res, 200, report_with_cells(*s.report()));
    });
  });
  server.Get("/api/sessions/:id/metrics", [with_session](const httplib::Request& req,
                                                         httplib::Response& res) {
    with_session(req, res, [&](Session& s) { send(res, 200, to_json(metrics(s))); });
  });
  server.Get("/api/sessions/:id/events", [with_session](const httplib::Request& req,
                                                        httplib::Response& res) {
    with_session(req, res, [&](Session& s) {
      std::ostringstream os;
      write_event_log(s, os);
      res.set_content(os.str(), "application/x-ndjson");
    });
  });
}

}  // namespace vats
