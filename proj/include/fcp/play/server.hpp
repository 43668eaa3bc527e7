#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

#include "fcp/play/session.hpp"

namespace fcp::play {

struct ServerConfig {
  std::string address = "127.0.0.1";
  unsigned short port = 0;  // 0 picks a free port
  std::chrono::milliseconds tick_period{200};
  std::shared_ptr<const StudyConfig> study;
  std::filesystem::path store_root = "fcp-store";
};

// HTTP + WebSocket front end for study sessions.
//
//   POST /v1/sessions              {"seed"?}   -> {"session", "token", "phase"}
//   POST /v1/sessions/<id>/resume  {"token"}   -> {"session", "phase", "episode"}
//   POST /v1/export                            -> {"logs", "preferences", ...}
//   GET  /v1/play?session=<id>&token=<t>       WebSocket upgrade
//
// All sessions live on one event loop thread; each connected session owns
// a steady timer that fires on absolute deadlines, so tick jitter does not
// accumulate over an episode.
class PlayServer {
 public:
  explicit PlayServer(ServerConfig config);
  ~PlayServer();
  PlayServer(const PlayServer&) = delete;
  PlayServer& operator=(const PlayServer&) = delete;

  // Binds and serves on a background thread.
  void start();
  // Binds and serves on the calling thread until stop() is called.
  void run();
  void stop();
  unsigned short port() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace fcp::play
