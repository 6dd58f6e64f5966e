#include "mash/workbench/http_api.hpp"

#include "httplib.h"

namespace mash {

using nlohmann::json;

namespace {

using Handler = std::function<json(const httplib::Request&)>;

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json body_of(const httplib::Request& req) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  json j = json::parse(req.body);
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
  if (!j.contains("actor") && req.has_header("X-Actor")) j["actor"] = req.get_header_value("X-Actor");
  return j;
}

httplib::Server::Handler wrap(Handler fn, int ok_status = 200) {
  return [fn = std::move(fn), ok_status](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, ok_status, fn(req));
    } catch (const Error& e) {
      send(res, http_status(e.code()), error_json(e));
    } catch (const json::exception& e) {
      send(res, 400, {{"error", "ParseError"}, {"message", e.what()}});
    } catch (const std::exception& e) {
      send(res, 500, {{"error", "InternalError"}, {"message", e.what()}});
    }
  };
}

std::string m(const httplib::Request& req, std::size_t i) { return req.matches[static_cast<int>(i)].str(); }

}  // namespace

ApiServer::ApiServer(Workbench& workbench) : wb_(workbench), server_(std::make_unique<httplib::Server>()) { routes(); }

ApiServer::~ApiServer() { stop(); }

void ApiServer::routes() {
  auto& s = *server_;
  // httplib's default SO_REUSEPORT would let a second server share the port
  s.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Content-Type, X-Actor"},
                         {"Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS"}});
  s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty())
      send(res, res.status, {{"error", res.status == 404 ? "NotFound" : "HttpError"}, {"message", "no such endpoint"}});
  });

  // bundles
  s.Get("/bundles", wrap([this](const auto&) { return wb_.list_bundles(); }));
  s.Get(R"(/bundles/([^/]+))", wrap([this](const auto& r) { return wb_.bundle_summary(m(r, 1)); }));
  s.Post("/bundles/load", wrap([this](const auto& r) {
    json b = body_of(r);
    auto it = b.find("path");
    if (it == b.end() || !it->is_string()) throw Error(ErrorCode::InvalidArgument, "missing \"path\"");
    return wb_.load_bundle(it->template get<std::string>());
  }));

  // analyses
  s.Get("/analysis", wrap([this](const auto&) { return wb_.list_analyses(); }));
  s.Post("/analysis", wrap([this](const auto& r) { return wb_.create_analysis(body_of(r)); }, 201));
  s.Get(R"(/analysis/([^/]+))", wrap([this](const auto& r) { return wb_.analysis(m(r, 1)); }));
  s.Get(R"(/analysis/([^/]+)/tree)", wrap([this](const auto& r) { return wb_.tree(m(r, 1)); }));
  s.Post(R"(/analysis/([^/]+)/hypothesis)",
         wrap([this](const auto& r) { return wb_.add_hypothesis(m(r, 1), body_of(r)); }));
  s.Post(R"(/analysis/([^/]+)/argument)", wrap([this](const auto& r) { return wb_.add_argument(m(r, 1), body_of(r)); }));
  s.Post(R"(/analysis/([^/]+)/evidence-attach)",
         wrap([this](const auto& r) { return wb_.attach_evidence(m(r, 1), body_of(r)); }));
  s.Post(R"(/analysis/([^/]+)/collection-task)",
         wrap([this](const auto& r) { return wb_.add_collection_task(m(r, 1), body_of(r)); }));
  s.Post(R"(/analysis/([^/]+)/collect)", wrap([this](const auto& r) { return wb_.collect(m(r, 1), body_of(r)); }));
  s.Patch(R"(/analysis/([^/]+)/assessment)",
          wrap([this](const auto& r) { return wb_.set_assessment(m(r, 1), body_of(r)); }));
  s.Patch(R"(/analysis/([^/]+)/assumption)",
          wrap([this](const auto& r) { return wb_.set_assumption(m(r, 1), body_of(r)); }));

  // knowledge bases
  s.Post(R"(/kb/([^/]+)/learn-all)", wrap([this](const auto& r) { return wb_.learn_all(m(r, 1), body_of(r)); }));
  s.Get(R"(/kb/([^/]+)/rules)", wrap([this](const auto& r) { return wb_.rules(m(r, 1)); }));
  s.Get(R"(/kb/([^/]+)/refinement-candidates)",
        wrap([this](const auto& r) { return wb_.refinement_candidates(m(r, 1)); }));
  s.Get(R"(/kb/([^/]+)/audit)", wrap([this](const auto& r) { return wb_.audit(m(r, 1)); }));
  s.Get(R"(/kb/([^/]+)/rules/([^/]+)/explanations)", wrap([this](const auto& r) {
    int max_len = 2;
    if (r.has_param("maxLength")) {
      try {
        max_len = std::stoi(r.get_param_value("maxLength"));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "maxLength must be a number");
      }
    }
    return wb_.explanations(m(r, 1), m(r, 2), max_len);
  }));
  s.Post(R"(/kb/([^/]+)/rules/([^/]+)/explanations/([A-Za-z0-9._-]+):(accept|reject))", wrap([this](const auto& r) {
    return m(r, 4) == "accept" ? wb_.accept(m(r, 1), m(r, 2), m(r, 3), body_of(r))
                               : wb_.reject(m(r, 1), m(r, 2), m(r, 3), body_of(r));
  }));

  // solving
  s.Post("/solve", wrap([this](const auto& r) { return wb_.start_solve(body_of(r)); }, 202));
  s.Get(R"(/jobs/([^/]+))", wrap([this](const auto& r) { return wb_.job(m(r, 1)); }));
}

int ApiServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::PortInUse, "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void ApiServer::serve() { server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_->is_running()) server_->stop();
}

bool ApiServer::running() const { return server_->is_running(); }

}  // namespace mash
