#include <future>
#include <thread>

#include "doctest.h"
#include "fixture.hpp"
#include "httplib.h"
#include "semiq/service.hpp"
#include "semiq/wire.hpp"

using namespace semiq;
using nlohmann::json;

namespace {

std::shared_ptr<const Session> shared_fixture() {
  static auto s = std::make_shared<const Session>(Session::open(fixture::fixture_a_config()));
  return s;
}

std::unique_ptr<QueryService> ready(std::size_t row_limit = 0) {
  auto svc = std::make_unique<QueryService>(EngineOptions{1}, row_limit);
  svc->install(shared_fixture());
  return svc;
}

json body_of(const HttpReply& r) { return json::parse(r.body); }

json query_body(const std::string& q) { return json{{"query", q}}; }

json without_elapsed(json j) {
  j.erase("elapsed_ms");
  return j;
}

const char* kDeceased =
    "SELECT HospitalEpisodes x, WHERE dischargeReason=deceased, DEFINE TABLE x.surname (COLUMN Surname), "
    "x.dischargeTime.date() (COLUMN Dying_date), (COUNT x.Manipulation, WHERE manipul.code=02078) (COLUMN "
    "Count_02078), (SUM manipul.cost FROM x.Manipulation, WHERE manipul.code=02078) (COLUMN cost_02078)";

}  // namespace

TEST_CASE("requests before the store is installed") {
  QueryService svc;
  CHECK(svc.health().status == 503);
  CHECK(body_of(svc.health())["status"] == "loading");
  CHECK(svc.schema().status == 503);
  CHECK(svc.query(query_body("COUNT Patient").dump()).status == 503);
}

TEST_CASE("health and schema") {
  auto ready_holder = ready();
  QueryService& svc = *ready_holder;
  HttpReply h = svc.health();
  CHECK(h.status == 200);
  json hj = body_of(h);
  CHECK(hj["status"] == "ok");
  CHECK(hj["counts"]["Patient"] == 2);
  CHECK(hj["counts"]["Manipulation"] == 5);
  CHECK(hj["load_warnings"] == 0);
  HttpReply s = svc.schema();
  CHECK(s.status == 200);
  CHECK(body_of(s)["classes"].size() == 7);
}

TEST_CASE("queries") {
  auto ready_holder = ready();
  QueryService& svc = *ready_holder;
  HttpReply ok = svc.query(query_body("COUNT Patient p, WHERE EXISTS HospitalEpisode e, WHERE EXISTS "
                                      "Manipulation m, WHERE manipul.code=02078").dump());
  CHECK(ok.status == 200);
  json j = body_of(ok);
  CHECK(j["status"] == "ok");
  CHECK(j["result"]["kind"] == "scalar");
  CHECK(j["result"]["value"] == 2);
  CHECK(j["parse_back"].get<std::string>().rfind("COUNT Patient p, WHERE EXISTS p.HospitalEpisode e", 0) == 0);
  CHECK_FALSE(j.contains("error"));

  HttpReply unknown = svc.query(query_body("COUNT Nonexistent").dump());
  CHECK(unknown.status == 422);
  json u = body_of(unknown);
  CHECK(u["status"] == "resolve_error");
  CHECK(u["error"]["message"].get<std::string>().find("unknown class") != std::string::npos);
  CHECK(u["error"]["position"]["offset"] == 6);
  CHECK_FALSE(u.contains("result"));

  HttpReply parse = svc.query(query_body("COUNT WHERE").dump());
  CHECK(parse.status == 422);
  CHECK(body_of(parse)["error"]["position"] == json::parse(R"({"offset":6,"length":5})"));
}

TEST_CASE("row limits") {
  auto ready_holder = ready();
  QueryService& svc = *ready_holder;
  json all = body_of(svc.query(query_body("SHOW ALL HospitalEpisodes").dump()));
  CHECK(all["result"]["nodes"].size() == 3);
  CHECK(all["result"]["truncated"] == false);
  json one = body_of(svc.query(json{{"query", "SHOW ALL HospitalEpisodes"}, {"limit", 1}}.dump()));
  CHECK(one["result"]["nodes"].size() == 1);
  CHECK(one["result"]["matched"] == 3);
  CHECK(one["result"]["truncated"] == true);

  auto capped_holder = ready(2);
  QueryService& capped = *capped_holder;
  json c = body_of(capped.query(query_body("SELECT HospitalEpisode e, DEFINE TABLE e.totalCost").dump()));
  CHECK(c["result"]["rows"].size() == 2);
  CHECK(c["result"]["row_count"] == 3);
  CHECK(c["result"]["truncated"] == true);
  json t = body_of(capped.query(query_body(kDeceased).dump()));
  CHECK(t["result"]["rows"] == json::parse(R"([["Liepa","2015.02.20",1,10.0]])"));
  CHECK(t["result"]["columns"] == json::parse(R"(["Surname","Dying_date","Count_02078","cost_02078"])"));
}

TEST_CASE("malformed requests") {
  auto ready_holder = ready();
  QueryService& svc = *ready_holder;
  for (const char* body : {"not json", "[1,2]", "{}", R"({"query":3})", R"({"query":"COUNT Patient","limit":-1})",
                           R"({"query":"COUNT Patient","limit":"x"})"}) {
    CAPTURE(body);
    HttpReply r = svc.query(body);
    CHECK(r.status == 400);
    json j = body_of(r);
    CHECK(j["status"] == "bad_request");
    CHECK(j["error"]["message"].is_string());
  }
}

TEST_CASE("http endpoints") {
  auto ready_holder = ready();
  QueryService& svc = *ready_holder;
  httplib::Server server;
  svc.mount(server);
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/api/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(health->get_header_value("Content-Type").rfind("application/json", 0) == 0);

  auto schema = client.Get("/api/schema");
  REQUIRE(schema);
  CHECK(json::parse(schema->body)["root"] == "Patient");

  auto post = client.Post("/api/query", query_body("COUNT Patient").dump(), "application/json");
  REQUIRE(post);
  CHECK(post->status == 200);
  CHECK(json::parse(post->body)["result"]["value"] == 2);

  auto bad = client.Post("/api/query", "nope", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  auto unresolved = client.Post("/api/query", query_body("COUNT Nonexistent").dump(), "application/json");
  REQUIRE(unresolved);
  CHECK(unresolved->status == 422);

  auto options = client.Options("/api/query");
  REQUIRE(options);
  CHECK(options->status == 204);
  CHECK(options->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  std::vector<std::future<std::string>> replies;
  for (int i = 0; i < 8; ++i) {
    replies.push_back(std::async(std::launch::async, [port] {
      httplib::Client c("127.0.0.1", port);
      auto r = c.Post("/api/query", query_body(kDeceased).dump(), "application/json");
      return r ? without_elapsed(json::parse(r->body)).dump() : std::string();
    }));
  }
  std::string first = replies[0].get();
  CHECK_FALSE(first.empty());
  for (std::size_t i = 1; i < replies.size(); ++i) CHECK(replies[i].get() == first);

  server.stop();
  loop.join();
}
