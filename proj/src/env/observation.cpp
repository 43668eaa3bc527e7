#include "fcp/env/observation.hpp"

#include <limits>

namespace fcp::env {

namespace {

bool cell_empty(const WorldState& s, Pos cell, int partner) {
  const Layout& layout = *s.layout;
  return layout.in_bounds(cell) && layout.at(cell) == CellKind::Floor &&
         s.players[partner].position != cell;
}

// Nearest cell (Manhattan, row-major tie-break) satisfying pred.
template <typename Pred>
std::optional<Pos> nearest(const WorldState& s, Pos from, Pred pred) {
  const Layout& layout = *s.layout;
  std::optional<Pos> best;
  int best_d = std::numeric_limits<int>::max();
  for (int i = 0; i < layout.cell_count(); ++i) {
    const Pos p = layout.pos_of(i);
    if (!pred(p)) continue;
    const int d = manhattan(from, p);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

}  // namespace

FeatureVector feature_observation(const WorldState& s, int player) {
  using namespace feature;
  const Layout& layout = *s.layout;
  const PlayerState& self = s.players[player];
  const int partner = 1 - player;
  FeatureVector f{};

  f[kPosition] = static_cast<float>(self.position.x);
  f[kPosition + 1] = static_cast<float>(self.position.y);
  f[kOrientation + static_cast<int>(self.orientation)] = 1.0f;
  f[kHeld + (self.held ? static_cast<int>(*self.held) + 1 : 0)] = 1.0f;
  const Pos rel = s.players[partner].position - self.position;
  f[kPartner] = static_cast<float>(rel.x);
  f[kPartner + 1] = static_cast<float>(rel.y);

  for (std::size_t i = 0; i < s.pots.size() && i < kMaxPots; ++i) {
    const PotState& pot = s.pots[i];
    const int bucket = pot.phase() == PotPhase::Ready ? 4 : pot.tomato_count;
    f[kPots + i * kPotWidth + bucket] = 1.0f;
  }

  f[kFacedEmpty] = cell_empty(s, faced_cell(self), partner) ? 1.0f : 0.0f;
  for (int d = 0; d < 4; ++d) {
    const Pos cell = self.position + direction(static_cast<Orientation>(d));
    f[kAdjacentEmpty + d] = cell_empty(s, cell, partner) ? 1.0f : 0.0f;
  }

  const auto item_on = [&](Pos p, Item item) {
    return layout.at(p) == CellKind::Counter && s.counter_item(p) == item;
  };
  const auto ready_pot = [&](Pos p) {
    const auto slot = layout.pot_index(p);
    return slot && s.pots[*slot].phase() == PotPhase::Ready;
  };
  std::array<std::optional<Pos>, 4> targets;
  targets[0] = nearest(s, self.position, [&](Pos p) {
    return layout.at(p) == CellKind::TomatoStation || item_on(p, Item::Tomato);
  });
  targets[1] = nearest(s, self.position, [&](Pos p) {
    return layout.at(p) == CellKind::DishStation || item_on(p, Item::Dish);
  });
  targets[2] = nearest(s, self.position,
                       [&](Pos p) { return ready_pot(p) || item_on(p, Item::Soup); });
  if (!targets[2]) {
    targets[2] = nearest(s, self.position, [&](Pos p) { return layout.at(p) == CellKind::Pot; });
  }
  targets[3] = nearest(s, self.position, [&](Pos p) { return layout.at(p) == CellKind::Delivery; });
  for (int t = 0; t < 4; ++t) {
    if (!targets[t]) continue;
    const Pos d = *targets[t] - self.position;
    f[kTargets + 2 * t] = static_cast<float>(d.x);
    f[kTargets + 2 * t + 1] = static_cast<float>(d.y);
  }

  if (const auto fam = layout.family()) f[kLayout + *fam] = 1.0f;
  return f;
}

SymbolicWindow egocentric_observation(const WorldState& s, int player) {
  using namespace ego;
  const Layout& layout = *s.layout;
  const PlayerState& self = s.players[player];
  const Pos forward = direction(self.orientation);
  const Pos right{-forward.y, forward.x};
  SymbolicWindow w;

  for (int row = 0; row < kSide; ++row) {
    for (int col = 0; col < kSide; ++col) {
      const int ahead = kRadius - row;
      const int lateral = col - kRadius;
      const Pos cell{self.position.x + ahead * forward.x + lateral * right.x,
                     self.position.y + ahead * forward.y + lateral * right.y};
      if (!layout.in_bounds(cell)) {
        w.at(row, col, kOutOfBounds) = 1;
        continue;
      }
      w.at(row, col, kFloor + static_cast<int>(layout.at(cell))) = 1;

      std::optional<Item> item;
      if (layout.at(cell) == CellKind::Counter) item = s.counter_item(cell);
      for (int i = 0; i < 2; ++i) {
        if (s.players[i].position == cell) {
          w.at(row, col, i == player ? kSelf : kPartner) = 1;
          item = s.players[i].held;
        }
      }
      if (item) w.at(row, col, kTomatoItem + static_cast<int>(*item)) = 1;

      if (const auto slot = layout.pot_index(cell)) {
        const PotState& pot = s.pots[*slot];
        switch (pot.phase()) {
          case PotPhase::Filling:
            if (pot.tomato_count == 1) w.at(row, col, kPotOneTomato) = 1;
            if (pot.tomato_count == 2) w.at(row, col, kPotTwoTomatoes) = 1;
            break;
          case PotPhase::Cooking: w.at(row, col, kPotCooking) = 1; break;
          case PotPhase::Ready: w.at(row, col, kPotReady) = 1; break;
        }
      }
    }
  }
  return w;
}

}  // namespace fcp::env
