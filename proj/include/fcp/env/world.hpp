#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fcp/env/layout.hpp"

namespace fcp::env {

enum class Item : std::uint8_t { Tomato, Dish, Soup };

enum class Orientation : std::uint8_t { Up, Down, Left, Right };

// Action indices are part of the log format; do not reorder.
enum class Action : std::uint8_t { Noop, MoveUp, MoveDown, MoveLeft, MoveRight, Interact };
inline constexpr int kNumActions = 6;

using JointAction = std::array<Action, 2>;

inline constexpr int kTomatoesPerSoup = 3;
inline constexpr int kCookSteps = 20;
inline constexpr int kDeliveryReward = 20;
inline constexpr int kDepositReward = 1;
inline constexpr int kDefaultHorizon = 540;

enum class PotPhase : std::uint8_t { Filling, Cooking, Ready };

struct PotState {
  int tomato_count = 0;
  int cook_progress = 0;

  PotPhase phase() const {
    if (tomato_count < kTomatoesPerSoup) return PotPhase::Filling;
    return cook_progress >= kCookSteps ? PotPhase::Ready : PotPhase::Cooking;
  }
  friend bool operator==(const PotState&, const PotState&) = default;
};

struct PlayerState {
  Pos position;
  Orientation orientation = Orientation::Up;
  std::optional<Item> held;
  friend bool operator==(const PlayerState&, const PlayerState&) = default;
};

struct WorldState {
  LayoutPtr layout;
  std::array<PlayerState, 2> players;
  // Indexed like layout->pots().
  std::vector<PotState> pots;
  // One slot per grid cell; only Counter cells may hold an item.
  std::vector<std::optional<Item>> counter_items;
  int step = 0;
  int horizon = kDefaultHorizon;
  std::uint64_t seed = 0;

  bool done() const { return step >= horizon; }
  std::optional<Item> counter_item(Pos p) const { return counter_items[layout->index(p)]; }

  // Equality over all dynamic fields; layouts compare by name and geometry.
  bool operator==(const WorldState& other) const;
};

enum class EventKind : std::uint8_t {
  TomatoDeposited,
  SoupCollected,
  Delivered,
  CounterPlace,
  CounterPickup,
  StationPickup,
};

struct Event {
  EventKind kind;
  int player = 0;
  // Pot slot for pot events, otherwise -1.
  int pot = -1;
  // Item involved for counter/station events.
  std::optional<Item> item;
  Pos cell;
  friend bool operator==(const Event&, const Event&) = default;
};

struct StepOutcome {
  std::array<int, 2> rewards{0, 0};
  std::vector<Event> events;
  // Whether each player's position changed during movement resolution.
  std::array<bool, 2> moved{false, false};
  bool done = false;
};

WorldState reset(LayoutPtr layout, std::uint64_t seed, int horizon = kDefaultHorizon);

// Advances the episode by one step: movement, then Interacts (player 0
// first), then cooking. Throws ContractViolation if the episode is done.
StepOutcome step(WorldState& state, const JointAction& actions);

// Facing direction as a unit offset.
Pos direction(Orientation o);
Pos faced_cell(const PlayerState& p);
bool is_move(Action a);
Orientation move_orientation(Action a);

// Stable 64-bit fingerprint of the dynamic state (layout name included).
std::uint64_t state_hash(const WorldState& state);

std::string_view to_string(Action a);
std::string_view to_string(Item i);
std::string_view to_string(Orientation o);
std::string_view to_string(EventKind k);
std::string_view to_string(PotPhase p);
std::optional<Action> action_from_string(std::string_view s);
std::optional<Item> item_from_string(std::string_view s);
std::optional<Orientation> orientation_from_string(std::string_view s);
std::optional<EventKind> event_kind_from_string(std::string_view s);

}  // namespace fcp::env
