#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcp/agents/scripted.hpp"

namespace fcp::play {

// Blocking JSON-over-HTTP POST; throws Error on transport failures or
// non-2xx statuses.
nlohmann::json http_post(const std::string& host, unsigned short port, const std::string& target,
                         const nlohmann::json& body = nlohmann::json::object());

// A participant stand-in that plays a whole session over the wire with the
// scripted planner, driven purely by the frames the server sends.
class HeadlessClient {
 public:
  struct Options {
    agents::ScriptStyle style = agents::ScriptStyle::efficient();
    std::uint64_t seed = 0;
    // Rating for a preference prompt; receives the prompt payload.
    std::function<int(const nlohmann::json&)> rate = [](const nlohmann::json&) { return 0; };
    // Drop the connection after this many frames of study play.
    std::optional<int> disconnect_after_frames;
  };

  struct Summary {
    std::string final_phase;
    std::vector<int> deliveries;           // per finished study episode
    std::vector<double> episode_seconds;   // first frame to episode_end
    std::vector<int> frames_per_episode;
    int preferences_sent = 0;
    int errors = 0;
    bool disconnected = false;
  };

  HeadlessClient(std::string host, unsigned short port, std::string session, std::string token,
                 Options options);

  Summary run();

 private:
  std::string host_;
  unsigned short port_;
  std::string session_;
  std::string token_;
  Options options_;
};

}  // namespace fcp::play
