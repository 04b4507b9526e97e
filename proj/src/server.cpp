#include "pursuit/server.hpp"

#include <chrono>

#include "httplib.h"
#include "pursuit/errors.hpp"

namespace pursuit {

namespace {

void send_json(httplib::Response& res, const Json& body) {
  int status = 200;
  if (body.value("type", std::string()) == "error") status = body.value("code", 400);
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

LiveServer::LiveServer(ServerOptions options)
    : options_(std::move(options)), manager_(options_.live), http_(std::make_unique<httplib::Server>()) {
  auto& http = *http_;

  http.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"ok":true,"v":1})", "application/json");
  });

  http.Post("/api/message", [this](const httplib::Request& req, httplib::Response& res) {
    Json message;
    try {
      message = Json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
      send_json(res, {{"v", kProtocolVersion}, {"type", "error"}, {"code", 400},
                      {"message", std::string("body is not JSON: ") + e.what()}});
      return;
    }
    send_json(res, manager_.handle(message));
  });

  http.Get(R"(/api/sessions/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, manager_.handle({{"v", kProtocolVersion}, {"type", "state"}, {"session", req.matches[1].str()}}));
  });

  http.Get(R"(/api/sessions/([A-Za-z0-9]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
    auto session = manager_.find(req.matches[1].str());
    if (!session) {
      send_json(res, {{"v", kProtocolVersion}, {"type", "error"}, {"code", 404},
                      {"message", "unknown session '" + req.matches[1].str() + "'"}});
      return;
    }
    auto sent = std::make_shared<std::size_t>(0);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [this, session, sent](std::size_t, httplib::DataSink& sink) {
          std::vector<Json> batch;
          bool done = false;
          {
            std::unique_lock lock(session->mutex);
            session->changed.wait_for(lock, std::chrono::milliseconds(500),
                                      [&] { return session->event_count() > *sent || !running_; });
            batch = session->events_from(*sent);
            *sent += batch.size();
            done = session->finished() && *sent == session->event_count();
          }
          for (const auto& e : batch) {
            const std::string chunk = "event: tick\ndata: " + e.dump() + "\n\n";
            if (!sink.write(chunk.data(), chunk.size())) return false;
          }
          if (batch.empty()) {
            static constexpr char kKeepAlive[] = ": keepalive\n\n";
            if (!sink.write(kKeepAlive, sizeof(kKeepAlive) - 1)) return false;
          }
          if (done || !running_) sink.done();
          return true;
        });
  });

  if (!options_.static_dir.empty() && !http.set_mount_point("/", options_.static_dir))
    throw InvalidParameter("static asset directory '" + options_.static_dir + "' does not exist");
}

LiveServer::~LiveServer() { stop(); }

int LiveServer::bind() {
  int port = options_.port;
  if (port == 0) {
    port = http_->bind_to_any_port(options_.host);
  } else if (!http_->bind_to_port(options_.host, port)) {
    port = -1;
  }
  if (port < 0) throw Error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  running_ = true;
  reaper_ = std::thread([this] {
    while (running_) {
      manager_.expire_deadlines();
      std::this_thread::sleep_for(std::chrono::milliseconds(250));
    }
  });
  return port;
}

void LiveServer::run() { http_->listen_after_bind(); }

void LiveServer::stop() {
  if (running_.exchange(false)) http_->stop();
  if (reaper_.joinable()) reaper_.join();
}

}  // namespace pursuit
