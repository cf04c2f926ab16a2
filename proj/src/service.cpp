#include "semiq/service.hpp"

#include "httplib.h"
#include "semiq/wire.hpp"

namespace semiq {

using nlohmann::json;

namespace {

HttpReply reply(int status, const json& body) { return {status, body.dump()}; }

HttpReply loading() { return reply(503, {{"status", "loading"}}); }

HttpReply bad_request(const std::string& message) {
  return reply(400, {{"status", "bad_request"}, {"error", {{"message", message}}}});
}

}  // namespace

QueryService::QueryService(EngineOptions options, std::size_t default_row_limit)
    : options_(options), default_row_limit_(default_row_limit) {}

void QueryService::install(std::shared_ptr<const Session> session) {
  std::lock_guard lock(mutex_);
  session_ = std::move(session);
}

std::shared_ptr<const Session> QueryService::session() const {
  std::lock_guard lock(mutex_);
  return session_;
}

HttpReply QueryService::health() const {
  auto s = session();
  if (!s) return loading();
  const Schema& schema = s->schema();
  json counts = json::object();
  std::size_t instances = 0;
  for (std::size_t i = 0; i < schema.classes().size(); ++i) {
    std::size_t n = s->store().size(static_cast<ClassId>(i));
    counts[schema.classes()[i].name] = n;
    instances += n;
  }
  std::size_t rows = 0;
  for (std::size_t i = 0; i < schema.classifiers().size(); ++i) {
    std::size_t n = s->store().classifier_size(static_cast<ClassifierId>(i));
    counts[schema.classifiers()[i].name] = n;
    rows += n;
  }
  return reply(200, {{"status", "ok"},
                     {"load_ms", s->load_ms()},
                     {"instances", instances},
                     {"classifier_rows", rows},
                     {"counts", counts},
                     {"load_warnings", s->report().total_warnings()}});
}

HttpReply QueryService::schema() const {
  auto s = session();
  if (!s) return loading();
  return reply(200, schema_json(s->store()));
}

HttpReply QueryService::query(std::string_view body) const {
  auto s = session();
  if (!s) return loading();
  json request = json::parse(body, nullptr, false);
  if (request.is_discarded()) return bad_request("request body is not valid JSON");
  if (!request.is_object()) return bad_request("request body must be a JSON object");
  auto q = request.find("query");
  if (q == request.end() || !q->is_string()) return bad_request("\"query\" must be a string");
  std::size_t limit = default_row_limit_;
  if (auto l = request.find("limit"); l != request.end() && !l->is_null()) {
    if (!l->is_number_unsigned()) return bad_request("\"limit\" must be a non-negative integer");
    limit = l->get<std::size_t>();
  }
  try {
    QueryOutcome o = s->run(q->get<std::string>(), options_);
    int status = o.status == QueryOutcome::Ok               ? 200
                 : o.status == QueryOutcome::InternalFailed ? 500
                                                            : 422;
    return reply(status, outcome_json(o, s->store(), limit));
  } catch (const std::exception& e) {
    return reply(500, {{"status", "internal_error"}, {"error", {{"message", e.what()}}}});
  }
}

void QueryService::mount(httplib::Server& server) const {
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json; charset=utf-8");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.Get("/api/health", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, health());
  });
  server.Get("/api/schema", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, schema());
  });
  server.Post("/api/query", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, query(req.body));
  });
}

}  // namespace semiq
