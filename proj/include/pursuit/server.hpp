#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "pursuit/live.hpp"

namespace httplib {
class Server;
}

namespace pursuit {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;          // 0 picks a free port
  std::string static_dir;   // served at "/" when non-empty
  LiveOptions live;
};

/// HTTP front end for SessionManager.
///
///   POST /api/message               one protocol message in, one reply out
///   GET  /api/sessions/<id>         current snapshot
///   GET  /api/sessions/<id>/events  server-sent events, one "tick" per tick
///   GET  /api/health
class LiveServer {
 public:
  explicit LiveServer(ServerOptions options);
  ~LiveServer();

  /// Binds the socket; returns the bound port.
  int bind();
  /// Serves until stop(); call bind() first.
  void run();
  void stop();

  SessionManager& sessions() { return manager_; }

 private:
  ServerOptions options_;
  SessionManager manager_;
  std::unique_ptr<httplib::Server> http_;
  std::atomic<bool> running_{false};
  std::thread reaper_;
};

}  // namespace pursuit
