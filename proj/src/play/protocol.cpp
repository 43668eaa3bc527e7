#include "fcp/play/protocol.hpp"

#include <cmath>

#include "fcp/common/error.hpp"
#include "fcp/env/render.hpp"

namespace fcp::play {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kPhaseNames = {"tutorial", "practice", "playing",
                                                         "preference", "debrief", "done"};

json versioned(std::string_view type) { return {{"v", kProtocolVersion}, {"type", type}}; }

}  // namespace

std::string_view to_string(Phase p) { return kPhaseNames[static_cast<int>(p)]; }

Phase phase_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == s) return static_cast<Phase>(i);
  }
  throw ValidationError("unknown phase '" + std::string(s) + "'");
}

ClientMessage parse_client_message(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ValidationError("message is not a JSON object");
  if (!j.contains("v") || j["v"] != kProtocolVersion) {
    throw ValidationError("unsupported protocol version");
  }
  const auto type = j.value("type", std::string());
  if (type == "input") {
    if (!j.contains("action") || !j["action"].is_string()) throw ValidationError("input without action");
    const auto a = env::action_from_string(j["action"].get<std::string>());
    if (!a) throw ValidationError("unknown action '" + j["action"].get<std::string>() + "'");
    return InputMsg{*a};
  }
  if (type == "preference") {
    if (!j.contains("rating") || !j["rating"].is_number_integer()) {
      throw ValidationError("preference rating must be an integer");
    }
    return PreferenceMsg{j["rating"].get<int>()};
  }
  if (type == "advance") return AdvanceMsg{};
  throw ValidationError("unknown message type '" + type + "'");
}

json to_json(const ClientMessage& msg) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, InputMsg>) {
          auto j = versioned("input");
          j["action"] = env::to_string(m.action);
          return j;
        } else if constexpr (std::is_same_v<T, PreferenceMsg>) {
          auto j = versioned("preference");
          j["rating"] = m.rating;
          return j;
        } else {
          return versioned("advance");
        }
      },
      msg);
}

json frame_message(const env::WorldState& state, int score, int human_seat) {
  json j = versioned("frame");
  j.update(env::to_json(env::render_topdown(state)));
  j["score"] = score;
  j["layout"] = state.layout->name();
  j["human_seat"] = human_seat;
  j["horizon"] = state.horizon;
  return j;
}

json phase_message(Phase phase, json payload) {
  json j = versioned("phase");
  j["phase"] = to_string(phase);
  j["payload"] = std::move(payload);
  return j;
}

json episode_end_message(int episode, int deliveries, int score) {
  json j = versioned("episode_end");
  j["episode"] = episode;
  j["deliveries"] = deliveries;
  j["score"] = score;
  return j;
}

json error_message(const std::string& message) {
  json j = versioned("error");
  j["message"] = message;
  return j;
}

env::WorldState state_from_frame(const json& frame) {
  if (frame.value("type", std::string()) != "frame") throw ValidationError("not a frame message");
  auto layout = env::builtin_layout(frame.at("layout").get<std::string>());
  env::WorldState s = env::reset(layout, 0, frame.at("horizon").get<int>());
  s.step = frame.at("tick").get<int>();
  const auto& players = frame.at("players");
  if (players.size() != 2) throw ValidationError("frame must carry two players");
  for (int i = 0; i < 2; ++i) {
    const auto& p = players[i];
    auto& out = s.players[i];
    out.position = {p.at("x").get<int>(), p.at("y").get<int>()};
    const auto o = env::orientation_from_string(p.at("orientation").get<std::string>());
    if (!o) throw ValidationError("bad orientation in frame");
    out.orientation = *o;
    out.held.reset();
    if (!p.at("held").is_null()) out.held = env::item_from_string(p["held"].get<std::string>());
  }
  for (const auto& p : frame.at("pots")) {
    const auto slot = layout->pot_index({p.at("x").get<int>(), p.at("y").get<int>()});
    if (!slot) throw ValidationError("frame pot is not on a pot cell");
    s.pots[*slot].tomato_count = p.at("tomatoes").get<int>();
    s.pots[*slot].cook_progress =
        static_cast<int>(std::lround(p.at("progress").get<double>() * env::kCookSteps));
  }
  for (const auto& c : frame.at("counter_items")) {
    s.counter_items[layout->index({c.at("x").get<int>(), c.at("y").get<int>()})] =
        env::item_from_string(c.at("item").get<std::string>());
  }
  return s;
}

}  // namespace fcp::play
