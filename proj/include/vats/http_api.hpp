// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vats/session.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace httplib {
class Server;
}

namespace vats {

/// HTTP JSON API over one scene. Sessions live in memory only.
///
///   POST /api/sessions                      201 {id, state}
///   GET  /api/scene                         scene geometry
///   POST /api/evaluate                      report for a plan-file body
///   GET  /api/sessions/:id                  state and placements
///   POST /api/sessions/:id/{endpoints,entries,camera,confirm,repeat}
///   POST /api/sessions/:id/check/{endpoints,entries,camera}
///   GET  /api/sessions/:id/{report,metrics,events}
///
/// 404 unknown session, 409 wrong state, 422 malformed or unevaluable input.
class ApiService {
 public:
  explicit ApiService(std::shared_ptr<const AnatomicalScene> scene, Clock clock = wall_clock());

  void mount(httplib::Server& server);

  std::size_t session_count() const;

 private:
  struct Entry {
    std::mutex mutex;
    std::unique_ptr<Session> session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string create();

  std::shared_ptr<const AnatomicalScene> scene_;
  Clock clock_;
  std::string scene_body_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::atomic<std::uint64_t> next_id_{1};
};

}  // namespace vats
