#include <chrono>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "temp_dir.hpp"
#include "mash/common/error.hpp"
#include "mash/workbench/http_api.hpp"

using namespace mash;
using namespace mash::testing;
using nlohmann::json;

namespace {

// A live server on a free loopback port, stopped on scope exit.
struct LiveServer {
  TempDir dir{"mash-api"};
  std::unique_ptr<Workbench> wb;
  std::unique_ptr<ApiServer> api;
  std::thread thread;
  int port = 0;

  LiveServer() {
    seed_data_dir(dir.path());
    wb = std::make_unique<Workbench>(dir.path());
    api = std::make_unique<ApiServer>(*wb);
    port = api->bind("127.0.0.1", 0);
    thread = std::thread([this] { api->serve(); });
    for (int i = 0; i < 200 && !api->running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~LiveServer() {
    api->stop();
    thread.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(60);
    return c;
  }
};

struct Reply {
  int status = 0;
  json body;
};

Reply call(const LiveServer& s, const std::string& method, const std::string& path, const json& body = nullptr,
           const httplib::Headers& headers = {}) {
  auto c = s.client();
  httplib::Result r = method == "GET"     ? c.Get(path, headers)
                      : method == "PATCH" ? c.Patch(path, headers, body.dump(), "application/json")
                                          : c.Post(path, headers, body.is_null() ? "" : body.dump(), "application/json");
  REQUIRE(r);
  return {r->status, r->body.empty() ? json() : json::parse(r->body)};
}

Reply get(const LiveServer& s, const std::string& path) { return call(s, "GET", path); }
Reply post(const LiveServer& s, const std::string& path, const json& body = json::object()) {
  return call(s, "POST", path, body);
}

}  // namespace

TEST_CASE("api: bundles and analyses") {
  LiveServer s;
  Reply bundles = get(s, "/bundles");
  CHECK(bundles.status == 200);
  REQUIRE(bundles.body["bundles"].size() == 3);
  CHECK(bundles.body["bundles"][0]["counts"]["concepts"] == 26);

  Reply missing = get(s, "/bundles/atlantis");
  CHECK(missing.status == 404);
  CHECK(missing.body["error"] == "NotFound");

  Reply created = post(s, "/analysis", {{"bundle", "bogustan"}, {"demonstration", true}, {"id", "demo"}});
  CHECK(created.status == 201);
  CHECK(created.body["evaluation"]["answer"] == "H1");
  CHECK(post(s, "/analysis", {{"bundle", "bogustan"}, {"id", "demo"}}).status == 409);
  CHECK(post(s, "/analysis", {{"bundle", "bogustan"}, {"id", "bad id!"}}).status == 400);

  Reply tree = get(s, "/analysis/demo/tree");
  CHECK(tree.status == 200);
  CHECK(get(s, "/analysis").body["analyses"].size() == 1);
  CHECK(get(s, "/analysis/none").status == 404);
  CHECK(get(s, "/no/such/endpoint").status == 404);
}

TEST_CASE("api: assessment edits, versions and errors") {
  LiveServer s;
  Reply created = post(s, "/analysis", {{"bundle", "bogustan"}, {"demonstration", true}, {"id", "demo"}});
  const auto v = created.body["version"].get<std::uint64_t>();
  std::string attachment;
  const json doc = get(s, "/analysis/demo").body["analysis"];
  for (const auto& n : doc["nodes"])
    if (n["kind"] == "attachment") attachment = n["id"];
  REQUIRE_FALSE(attachment.empty());

  Reply ok = call(s, "PATCH", "/analysis/demo/assessment", {{"node", attachment}, {"relevance", "BL"}});
  CHECK(ok.status == 200);
  CHECK(ok.body["version"] == v + 1);
  CHECK(ok.body["evaluation"].contains("answer"));

  Reply stale =
      call(s, "PATCH", "/analysis/demo/assessment", {{"node", attachment}, {"relevance", "C"}, {"expectedVersion", v}});
  CHECK(stale.status == 409);
  CHECK(stale.body["error"] == "VersionConflict");

  Reply bad_level = call(s, "PATCH", "/analysis/demo/assessment", {{"node", attachment}, {"relevance", "maybe"}});
  CHECK(bad_level.status == 400);
  Reply not_json = post(s, "/analysis/demo/hypothesis", nullptr);
  CHECK(not_json.status == 400);
  auto c = s.client();
  auto raw = c.Post("/analysis/demo/hypothesis", "{ nope", "application/json");
  REQUIRE(raw);
  CHECK(raw->status == 400);
  CHECK(json::parse(raw->body)["error"] == "ParseError");

  Reply assumed = call(s, "PATCH", "/analysis/demo/assumption", {{"hypothesis", "H2"}, {"level", "C"}});
  CHECK(assumed.status == 200);
  CHECK(get(s, "/analysis/demo").body["version"] == v + 2);
}

TEST_CASE("api: bundle validation failures carry diagnostics") {
  LiveServer s;
  TempDir broken;
  std::filesystem::copy(bundle_dir("wokistan"), broken / "w", std::filesystem::copy_options::recursive);
  std::filesystem::remove(broken / "w" / "catalog.json");
  Reply r = post(s, "/bundles/load", {{"path", (broken / "w").string()}});
  CHECK(r.status == 422);
  CHECK(r.body["error"] == "ValidationFailed");
  REQUIRE(r.body["diagnostics"].is_array());
  CHECK(r.body["diagnostics"][0].get<std::string>().find("catalog.json") != std::string::npos);
}

TEST_CASE("api: learning, refinement and an asynchronous solve") {
  LiveServer s;
  post(s, "/analysis", {{"bundle", "bogustan"}, {"demonstration", true}, {"id", "demo"}});

  Reply empty_solve = post(s, "/solve", {{"kb", "main"}, {"bundle", "wokistan"}});
  CHECK(empty_solve.status == 404);

  Reply learned = call(s, "POST", "/kb/main/learn-all", {{"analysis", "demo"}}, {{"X-Actor", "dana"}});
  CHECK(learned.status == 200);
  CHECK(learned.body["learned"] == 12);
  CHECK(get(s, "/kb/main/rules").body["rules"].size() == 12);
  CHECK(post(s, "/kb/main/learn-all", {{"analysis", "demo"}}).body["learned"] == 0);

  Reply cands = get(s, "/kb/main/refinement-candidates");
  CHECK(cands.body["candidates"].size() == 4);
  Reply ex8 = get(s, "/kb/main/rules/R8/explanations?maxLength=2");
  REQUIRE(ex8.body["explanations"].size() == 2);
  CHECK(get(s, "/kb/main/rules/R8/explanations?maxLength=x").status == 400);

  const std::string rejected = ex8.body["explanations"][1]["id"];
  Reply rej = post(s, "/kb/main/rules/R8/explanations/" + rejected + ":reject");
  CHECK(rej.status == 200);
  const std::string accepted = ex8.body["explanations"][0]["id"];
  Reply acc = post(s, "/kb/main/rules/R8/explanations/" + accepted + ":accept");
  CHECK(acc.status == 200);
  CHECK(acc.body["rule"]["conditions"].size() == 1);
  Reply again = post(s, "/kb/main/rules/R8/explanations/" + accepted + ":accept");
  CHECK(again.status == 409);
  CHECK(again.body["error"] == "StaleCandidate");

  Reply started = post(s, "/solve", {{"kb", "main"}, {"bundle", "wokistan"}});
  CHECK(started.status == 202);
  const std::string job = started.body["job"];
  json status;
  for (int i = 0; i < 600; ++i) {
    status = get(s, "/jobs/" + job).body;
    if (status["status"] != "running") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  CHECK(status["status"] == "done");
  CHECK(status["result"].contains("answer"));
  CHECK(get(s, "/analysis/wokistan-solution").status == 200);
  CHECK(get(s, "/jobs/J404").status == 404);

  Reply bad_question = post(s, "/solve", {{"kb", "main"}, {"bundle", "wokistan"}, {"question", "Why?"}});
  CHECK(bad_question.status == 400);
  CHECK(bad_question.body["error"] == "NoPatternMatch");

  auto events = get(s, "/kb/main/audit").body["events"];
  REQUIRE(events.size() >= 4);
  CHECK(events[0]["actor"] == "dana");
  CHECK(events.back()["action"] == "solve");
}

TEST_CASE("api: solving against an empty knowledge base is a conflict") {
  LiveServer s;
  post(s, "/analysis", {{"bundle", "shamland"}, {"id", "blank"}});
  post(s, "/kb/empty/learn-all", {{"analysis", "blank"}});
  Reply r = post(s, "/solve", {{"kb", "empty"}, {"bundle", "shamland"}});
  CHECK(r.status == 409);
  CHECK(r.body["error"] == "EmptyKB");
}

TEST_CASE("api: cross-origin preflight") {
  LiveServer s;
  auto c = s.client();
  auto r = c.Options("/bundles");
  REQUIRE(r);
  CHECK(r->status == 204);
  CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
}

TEST_CASE("api: a taken port is reported") {
  LiveServer s;
  ApiServer second(*s.wb);
  try {
    second.bind("127.0.0.1", s.port);
    FAIL("bind should fail");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PortInUse);
    CHECK(http_status(e.code()) == 500);
  }
}

TEST_CASE("error codes map onto statuses") {
  CHECK(http_status(ErrorCode::NotFound) == 404);
  CHECK(http_status(ErrorCode::VersionConflict) == 409);
  CHECK(http_status(ErrorCode::EmptyKB) == 409);
  CHECK(http_status(ErrorCode::ValidationFailed) == 422);
  CHECK(http_status(ErrorCode::DataDirInvalid) == 500);
  CHECK(http_status(ErrorCode::InvalidArgument) == 400);
  json body = error_json(Error(ErrorCode::NotFound, "gone"));
  CHECK(body["error"] == "NotFound");
  CHECK(body["message"] == "gone");
}
