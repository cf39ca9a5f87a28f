#include "bb/service.h"

#include <httplib.h>

#include "bb/serialize.h"

namespace bb {

int http_status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::argument: return 400;
    case ErrorKind::gateway:
    case ErrorKind::anchor_format: return 502;
    case ErrorKind::deadline: return 504;
    case ErrorKind::io:
    case ErrorKind::ingest: return 500;
    case ErrorKind::key:
    case ErrorKind::format:
    case ErrorKind::range:
    case ErrorKind::coverage:
    case ErrorKind::capacity:
    case ErrorKind::dimension:
    case ErrorKind::state:
    case ErrorKind::template_:
    case ErrorKind::degenerate:
    case ErrorKind::shape: return 422;
  }
  return 500;
}

namespace {

HttpResult error_result(int status, const std::string& kind, const std::string& message) {
  return {status, json{{"error", {{"kind", kind}, {"message", message}}}}.dump()};
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("request body is not valid JSON: ") + e.what());
  }
}

}  // namespace

HttpResult Service::handle(const std::string& method, const std::string& path, const std::string& body) const {
  try {
    const Engine& engine = *engine_;
    if (path == "/healthz") {
      if (method != "GET") return error_result(405, "MethodNotAllowed", "use GET");
      return {200, json{{"status", "ok"}, {"items", engine.corpus().size()}}.dump()};
    }
    if (path == "/v1/benchmarks") {
      if (method != "GET") return error_result(405, "MethodNotAllowed", "use GET");
      json list = json::array();
      for (const auto& b : engine.corpus().benchmarks()) list.push_back(to_json(b));
      return {200, json{{"benchmarks", list}}.dump()};
    }
    if (path == "/v1/query") {
      if (method != "POST") return error_result(405, "MethodNotAllowed", "use POST");
      const auto req = query_request_from_json(parse_body(body), engine);
      return {200, to_json(engine.query(req)).dump()};
    }
    if (path == "/v1/audit/facets") {
      if (method != "POST") return error_result(405, "MethodNotAllowed", "use POST");
      const json j = parse_body(body);
      if (!j.is_object() || !j.contains("family")) throw ArgumentError("missing field 'family'");
      const auto family = skill_family_from_json(j.at("family"), engine);
      std::size_t k = engine.config().default_k;
      if (j.contains("k")) {
        if (!j.at("k").is_number_integer() || j.at("k").get<std::int64_t>() < 1)
          throw ArgumentError("k must be an integer >= 1");
        k = j.at("k").get<std::size_t>();
      }
      AnchorStrategy strategy = AnchorStrategy::original;
      if (j.contains("strategy")) {
        auto s = parse_strategy(j.at("strategy").is_string() ? j.at("strategy").get<std::string>() : "");
        if (!s) throw ArgumentError("unknown strategy");
        strategy = *s;
      }
      return {200, to_json(engine.audit_facets(family, k, strategy)).dump()};
    }
    if (path == "/v1/audit/convergence") {
      if (method != "POST") return error_result(405, "MethodNotAllowed", "use POST");
      const auto req = convergence_request_from_json(parse_body(body));
      return {200, to_json(engine.audit_convergence(req)).dump()};
    }
    return error_result(404, "NotFound", "no route for " + path);
  } catch (const Error& e) {
    return error_result(http_status_for(e.kind()), error_kind_name(e.kind()), e.what());
  } catch (const json::exception& e) {
    return error_result(400, error_kind_name(ErrorKind::argument), e.what());
  } catch (const std::exception& e) {
    return error_result(500, "InternalError", e.what());
  }
}

void Service::serve(const std::string& host, int port, std::size_t threads, const std::function<void(int)>& on_ready) {
  httplib::Server server;
  const std::size_t pool = std::max<std::size_t>(1, threads);
  server.new_task_queue = [pool] { return new httplib::ThreadPool(pool); };
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResult r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  for (const char* p : {"/healthz", "/v1/benchmarks", "/v1/query", "/v1/audit/facets", "/v1/audit/convergence"}) {
    server.Get(p, route);
    server.Post(p, route);
  }
  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  server_.store(&server);
  if (on_ready) on_ready(bound);
  server.listen_after_bind();
  server_.store(nullptr);
}

void Service::stop() {
  if (void* s = server_.load()) static_cast<httplib::Server*>(s)->stop();
}

}  // namespace bb
