#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcp/env/world.hpp"

namespace fcp::env {

// Symbolic top-down frame for the play client. A pure function of state.
struct RenderFrame {
  struct Player {
    Pos position;
    Orientation orientation;
    std::optional<Item> held;
    friend bool operator==(const Player&, const Player&) = default;
  };
  struct Pot {
    Pos position;
    int tomatoes;
    // cook_progress / kCookSteps, in [0, 1].
    double progress;
    PotPhase phase;
    friend bool operator==(const Pot&, const Pot&) = default;
  };
  struct CounterItem {
    Pos position;
    Item item;
    friend bool operator==(const CounterItem&, const CounterItem&) = default;
  };

  int tick = 0;
  int width = 0;
  int height = 0;
  // One string per row using the layout legend (spawns shown as floor).
  std::vector<std::string> grid;
  std::vector<Player> players;
  std::vector<Pot> pots;
  std::vector<CounterItem> counter_items;

  friend bool operator==(const RenderFrame&, const RenderFrame&) = default;
};

RenderFrame render_topdown(const WorldState& state);

nlohmann::json to_json(const RenderFrame& frame);

}  // namespace fcp::env
