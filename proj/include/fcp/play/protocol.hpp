#pragma once

#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "fcp/env/world.hpp"

namespace fcp::play {

// Every message on the wire carries "v": kProtocolVersion.
inline constexpr int kProtocolVersion = 1;

enum class Phase { Tutorial, Practice, Playing, Preference, Debrief, Done };

std::string_view to_string(Phase p);
Phase phase_from_string(std::string_view s);

struct InputMsg {
  env::Action action;
};
struct PreferenceMsg {
  int rating;
};
struct AdvanceMsg {};

using ClientMessage = std::variant<InputMsg, PreferenceMsg, AdvanceMsg>;

// Throws ValidationError on malformed JSON, unknown type, wrong version or bad
// field values.
ClientMessage parse_client_message(const std::string& text);
nlohmann::json to_json(const ClientMessage& msg);

nlohmann::json frame_message(const env::WorldState& state, int score, int human_seat);
nlohmann::json phase_message(Phase phase, nlohmann::json payload);
nlohmann::json episode_end_message(int episode, int deliveries, int score);
nlohmann::json error_message(const std::string& message);

// Rebuilds the authoritative state from a frame message, so a client can
// run the same planners the server uses. The layout comes from the frame's
// "layout" name.
env::WorldState state_from_frame(const nlohmann::json& frame);

}  // namespace fcp::play
