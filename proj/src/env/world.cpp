#include "fcp/env/world.hpp"

#include "fcp/common/error.hpp"
#include "fcp/common/hash.hpp"

namespace fcp::env {

Pos direction(Orientation o) {
  switch (o) {
    case Orientation::Up: return {0, -1};
    case Orientation::Down: return {0, 1};
    case Orientation::Left: return {-1, 0};
    case Orientation::Right: return {1, 0};
  }
  return {0, 0};
}

Pos faced_cell(const PlayerState& p) { return p.position + direction(p.orientation); }

bool is_move(Action a) {
  return a == Action::MoveUp || a == Action::MoveDown || a == Action::MoveLeft ||
         a == Action::MoveRight;
}

Orientation move_orientation(Action a) {
  switch (a) {
    case Action::MoveUp: return Orientation::Up;
    case Action::MoveDown: return Orientation::Down;
    case Action::MoveLeft: return Orientation::Left;
    case Action::MoveRight: return Orientation::Right;
    default: throw ContractViolation("not a move action");
  }
}

bool WorldState::operator==(const WorldState& other) const {
  const bool same_layout =
      layout == other.layout ||
      (layout && other.layout && layout->name() == other.layout->name() &&
       layout->to_text() == other.layout->to_text());
  return same_layout && players == other.players && pots == other.pots &&
         counter_items == other.counter_items && step == other.step &&
         horizon == other.horizon && seed == other.seed;
}

WorldState reset(LayoutPtr layout, std::uint64_t seed, int horizon) {
  if (!layout) throw ContractViolation("reset: null layout");
  if (horizon < 1) throw ContractViolation("reset: horizon must be positive");
  WorldState s;
  s.pots.assign(layout->pots().size(), PotState{});
  s.counter_items.assign(layout->cell_count(), std::nullopt);
  for (int i = 0; i < 2; ++i) {
    s.players[i].position = layout->spawns()[i];
    s.players[i].orientation = Orientation::Up;
    s.players[i].held.reset();
  }
  s.step = 0;
  s.horizon = horizon;
  s.seed = seed;
  s.layout = std::move(layout);
  return s;
}

namespace {

void resolve_movement(WorldState& s, const JointAction& actions, StepOutcome& out) {
  const Layout& layout = *s.layout;
  std::array<Pos, 2> target;
  for (int i = 0; i < 2; ++i) {
    PlayerState& p = s.players[i];
    target[i] = p.position;
    if (!is_move(actions[i])) continue;
    p.orientation = move_orientation(actions[i]);
    const Pos next = p.position + direction(p.orientation);
    if (layout.in_bounds(next) && layout.at(next) == CellKind::Floor) target[i] = next;
  }
  const Pos old0 = s.players[0].position;
  const Pos old1 = s.players[1].position;
  const bool same_cell = target[0] == target[1];
  const bool swap = target[0] == old1 && target[1] == old0;
  if (same_cell || swap) return;
  for (int i = 0; i < 2; ++i) {
    out.moved[i] = target[i] != s.players[i].position;
    s.players[i].position = target[i];
  }
}

void resolve_interact(WorldState& s, int who, StepOutcome& out) {
  const Layout& layout = *s.layout;
  PlayerState& p = s.players[who];
  const Pos cell = faced_cell(p);
  if (!layout.in_bounds(cell)) return;
  const auto add_event = [&](EventKind kind, int pot, std::optional<Item> item) {
    out.events.push_back(Event{kind, who, pot, item, cell});
  };

  switch (layout.at(cell)) {
    case CellKind::TomatoStation:
      if (!p.held) {
        p.held = Item::Tomato;
        add_event(EventKind::StationPickup, -1, Item::Tomato);
      }
      break;
    case CellKind::DishStation:
      if (!p.held) {
        p.held = Item::Dish;
        add_event(EventKind::StationPickup, -1, Item::Dish);
      }
      break;
    case CellKind::Pot: {
      const int slot = *layout.pot_index(cell);
      PotState& pot = s.pots[slot];
      if (p.held == Item::Tomato && pot.phase() == PotPhase::Filling) {
        ++pot.tomato_count;
        p.held.reset();
        out.rewards[0] += kDepositReward;
        out.rewards[1] += kDepositReward;
        add_event(EventKind::TomatoDeposited, slot, Item::Tomato);
      } else if (p.held == Item::Dish && pot.phase() == PotPhase::Ready) {
        pot = PotState{};
        p.held = Item::Soup;
        add_event(EventKind::SoupCollected, slot, Item::Soup);
      }
      break;
    }
    case CellKind::Delivery:
      if (p.held == Item::Soup) {
        p.held.reset();
        out.rewards[0] += kDeliveryReward;
        out.rewards[1] += kDeliveryReward;
        add_event(EventKind::Delivered, -1, Item::Soup);
      }
      break;
    case CellKind::Counter: {
      auto& slot = s.counter_items[layout.index(cell)];
      if (p.held && !slot) {
        slot = p.held;
        p.held.reset();
        add_event(EventKind::CounterPlace, -1, slot);
      } else if (!p.held && slot) {
        p.held = slot;
        slot.reset();
        add_event(EventKind::CounterPickup, -1, p.held);
      }
      break;
    }
    case CellKind::Floor:
      break;
  }
}

}  // namespace

StepOutcome step(WorldState& s, const JointAction& actions) {
  if (s.done()) {
    throw ContractViolation("step called on a finished episode (step " + std::to_string(s.step) +
                            " of " + std::to_string(s.horizon) + ")");
  }
  StepOutcome out;
  resolve_movement(s, actions, out);

  // Only pots already cooking when the step began advance, so the pot
  // becomes Ready exactly kCookSteps steps after the third deposit.
  std::vector<char> was_cooking(s.pots.size());
  for (std::size_t i = 0; i < s.pots.size(); ++i) {
    was_cooking[i] = s.pots[i].phase() == PotPhase::Cooking;
  }
  for (int who = 0; who < 2; ++who) {
    if (actions[who] == Action::Interact) resolve_interact(s, who, out);
  }
  for (std::size_t i = 0; i < s.pots.size(); ++i) {
    if (was_cooking[i] && s.pots[i].phase() == PotPhase::Cooking) ++s.pots[i].cook_progress;
  }

  ++s.step;
  out.done = s.done();
  return out;
}

std::uint64_t state_hash(const WorldState& s) {
  Fnv1a h;
  h.add(s.layout->name());
  h.add_value(static_cast<std::int32_t>(s.step));
  h.add_value(static_cast<std::int32_t>(s.horizon));
  h.add_value(s.seed);
  for (const auto& p : s.players) {
    h.add_value(static_cast<std::int32_t>(p.position.x));
    h.add_value(static_cast<std::int32_t>(p.position.y));
    h.add_value(static_cast<std::uint8_t>(p.orientation));
    h.add_value(static_cast<std::uint8_t>(p.held ? static_cast<int>(*p.held) + 1 : 0));
  }
  for (const auto& pot : s.pots) {
    h.add_value(static_cast<std::int32_t>(pot.tomato_count));
    h.add_value(static_cast<std::int32_t>(pot.cook_progress));
  }
  for (const auto& item : s.counter_items) {
    h.add_value(static_cast<std::uint8_t>(item ? static_cast<int>(*item) + 1 : 0));
  }
  return h.digest();
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Noop: return "noop";
    case Action::MoveUp: return "up";
    case Action::MoveDown: return "down";
    case Action::MoveLeft: return "left";
    case Action::MoveRight: return "right";
    case Action::Interact: return "interact";
  }
  return "?";
}

std::string_view to_string(Item i) {
  switch (i) {
    case Item::Tomato: return "tomato";
    case Item::Dish: return "dish";
    case Item::Soup: return "soup";
  }
  return "?";
}

std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::Up: return "up";
    case Orientation::Down: return "down";
    case Orientation::Left: return "left";
    case Orientation::Right: return "right";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::TomatoDeposited: return "tomato_deposited";
    case EventKind::SoupCollected: return "soup_collected";
    case EventKind::Delivered: return "delivered";
    case EventKind::CounterPlace: return "counter_place";
    case EventKind::CounterPickup: return "counter_pickup";
    case EventKind::StationPickup: return "station_pickup";
  }
  return "?";
}

std::string_view to_string(PotPhase p) {
  switch (p) {
    case PotPhase::Filling: return "filling";
    case PotPhase::Cooking: return "cooking";
    case PotPhase::Ready: return "ready";
  }
  return "?";
}

std::optional<Action> action_from_string(std::string_view s) {
  for (int i = 0; i < kNumActions; ++i) {
    if (to_string(static_cast<Action>(i)) == s) return static_cast<Action>(i);
  }
  return std::nullopt;
}

std::optional<Item> item_from_string(std::string_view s) {
  for (Item i : {Item::Tomato, Item::Dish, Item::Soup}) {
    if (to_string(i) == s) return i;
  }
  return std::nullopt;
}

std::optional<Orientation> orientation_from_string(std::string_view s) {
  for (Orientation o : {Orientation::Up, Orientation::Down, Orientation::Left, Orientation::Right}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
  for (int k = 0; k <= static_cast<int>(EventKind::StationPickup); ++k) {
    if (to_string(static_cast<EventKind>(k)) == s) return static_cast<EventKind>(k);
  }
  return std::nullopt;
}

}  // namespace fcp::env
