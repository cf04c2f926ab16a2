#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "semiq/session.hpp"

namespace httplib {
class Server;
}

namespace semiq {

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

// Handlers for GET /api/schema, POST /api/query and GET /api/health. Until a
// session is installed every endpoint answers 503.
class QueryService {
 public:
  explicit QueryService(EngineOptions options = {}, std::size_t default_row_limit = 0);

  void install(std::shared_ptr<const Session> session);
  std::shared_ptr<const Session> session() const;

  HttpReply health() const;
  HttpReply schema() const;
  // Body: {"query": "...", "limit": n}. "limit" is optional; 0 means unlimited.
  HttpReply query(std::string_view body) const;

  // Registers the routes and CORS handling on `server`.
  void mount(httplib::Server& server) const;

 private:
  EngineOptions options_;
  std::size_t default_row_limit_;
  mutable std::mutex mutex_;
  std::shared_ptr<const Session> session_;
};

}  // namespace semiq
