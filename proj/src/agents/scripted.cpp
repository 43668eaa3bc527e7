#include "fcp/agents/scripted.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <queue>

#include "fcp/common/error.hpp"

namespace fcp::agents {

using env::Action;
using env::CellKind;
using env::Item;
using env::Layout;
using env::Pos;
using env::PotPhase;
using env::WorldState;

std::string ScriptStyle::id() const {
  if (epsilon == 0.0) return "efficient";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), epsilon);
  return "sloppy:" + std::string(buf, end);
}

ScriptStyle ScriptStyle::parse(std::string_view id) {
  if (id == "efficient") return efficient();
  constexpr std::string_view kPrefix = "sloppy:";
  if (id.substr(0, kPrefix.size()) == kPrefix) {
    const std::string num(id.substr(kPrefix.size()));
    std::size_t used = 0;
    double eps = 0.0;
    try {
      eps = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != num.size() || num.empty() || eps < 0.0 || eps > 1.0) {
      throw ValidationError("bad sloppiness in script id '" + std::string(id) + "'");
    }
    return sloppy(eps);
  }
  throw ValidationError("unknown script style '" + std::string(id) + "'");
}

namespace {

constexpr std::array<Action, 4> kMoves = {Action::MoveUp, Action::MoveDown, Action::MoveLeft,
                                          Action::MoveRight};
constexpr std::array<Pos, 4> kSteps = {Pos{0, -1}, Pos{0, 1}, Pos{-1, 0}, Pos{1, 0}};
constexpr int kUnreachable = std::numeric_limits<int>::max();

// Breadth-first distances over Floor from `from`, optionally treating one
// cell as blocked.
struct DistanceMap {
  const Layout* layout;
  std::vector<int> dist;
  std::vector<int> first_move;  // index into kMoves of the first step taken

  int at(Pos p) const { return dist[layout->index(p)]; }
};

DistanceMap bfs(const Layout& layout, Pos from, std::optional<Pos> blocked) {
  DistanceMap m{&layout, std::vector<int>(layout.cell_count(), kUnreachable),
                std::vector<int>(layout.cell_count(), -1)};
  std::queue<Pos> q;
  m.dist[layout.index(from)] = 0;
  q.push(from);
  while (!q.empty()) {
    const Pos p = q.front();
    q.pop();
    for (int d = 0; d < 4; ++d) {
      const Pos n = p + kSteps[d];
      if (!layout.in_bounds(n) || layout.at(n) != CellKind::Floor) continue;
      if (blocked && n == *blocked) continue;
      const int ni = layout.index(n);
      if (m.dist[ni] != kUnreachable) continue;
      m.dist[ni] = m.dist[layout.index(p)] + 1;
      m.first_move[ni] = p == from ? d : m.first_move[layout.index(p)];
      q.push(n);
    }
  }
  return m;
}

std::vector<Pos> access_cells(const Layout& layout, Pos target) {
  std::vector<Pos> out;
  for (const Pos& d : kSteps) {
    const Pos n = target + d;
    if (layout.in_bounds(n) && layout.at(n) == CellKind::Floor) out.push_back(n);
  }
  return out;
}

int direction_index(Pos delta) {
  for (int d = 0; d < 4; ++d) {
    if (kSteps[d] == delta) return d;
  }
  return -1;
}

// What the planner wants to do this step.
enum class Intent { Interact, Wait };

struct Goal {
  Pos target;
  Intent intent;
};

class Planner {
 public:
  Planner(const WorldState& s, int seat)
      : s_(s),
        layout_(*s.layout),
        seat_(seat),
        self_(s.players[seat]),
        partner_(s.players[1 - seat]),
        free_(bfs(layout_, self_.position, std::nullopt)),
        partner_free_(bfs(layout_, partner_.position, std::nullopt)) {}

  // Returns the action, and whether the chosen path was blocked by the partner.
  std::pair<Action, bool> decide() {
    const std::optional<Goal> goal = choose_goal();
    if (!goal) return {park(), false};
    return navigate(*goal);
  }

 private:
  bool reachable(Pos target) const {
    return std::any_of(kSteps.begin(), kSteps.end(), [&](Pos d) {
      const Pos n = target + d;
      return layout_.in_bounds(n) && layout_.at(n) == CellKind::Floor && free_.at(n) != kUnreachable;
    });
  }

  int distance_to(Pos target) const {
    int best = kUnreachable;
    for (const Pos& a : access_cells(layout_, target)) best = std::min(best, free_.at(a));
    return best;
  }

  // Nearest reachable cell satisfying pred (BFS distance, row-major ties).
  template <typename Pred>
  std::optional<Pos> nearest(Pred pred) const {
    std::optional<Pos> best;
    int best_d = kUnreachable;
    for (int i = 0; i < layout_.cell_count(); ++i) {
      const Pos p = layout_.pos_of(i);
      if (!pred(p)) continue;
      const int d = distance_to(p);
      if (d < best_d) {
        best_d = d;
        best = p;
      }
    }
    return best;
  }

  bool any_reachable(CellKind kind) const {
    for (int i = 0; i < layout_.cell_count(); ++i) {
      const Pos p = layout_.pos_of(i);
      if (layout_.at(p) == kind && reachable(p)) return true;
    }
    return false;
  }

  int held_by_players(Item item) const {
    return (self_.held == item) + (partner_.held == item);
  }

  bool is_transfer_counter(Pos p) const {
    if (layout_.at(p) != CellKind::Counter) return false;
    bool mine = false, theirs = false;
    for (const Pos& d : kSteps) {
      const Pos n = p + d;
      if (!layout_.in_bounds(n) || layout_.at(n) != CellKind::Floor) continue;
      mine |= free_.at(n) != kUnreachable;
      theirs |= partner_free_.at(n) != kUnreachable;
    }
    return mine && theirs;
  }

  int items_on_transfer(Item item) const {
    int n = 0;
    for (int i = 0; i < layout_.cell_count(); ++i) {
      const Pos p = layout_.pos_of(i);
      if (s_.counter_item(p) == item && is_transfer_counter(p)) ++n;
    }
    return n;
  }

  int count_free_transfer() const {
    int n = 0;
    for (int i = 0; i < layout_.cell_count(); ++i) {
      const Pos p = layout_.pos_of(i);
      if (is_transfer_counter(p) && !s_.counter_item(p)) ++n;
    }
    return n;
  }

  int missing_tomatoes() const {
    int n = 0;
    for (const auto& pot : s_.pots) {
      if (pot.phase() == PotPhase::Filling) n += env::kTomatoesPerSoup - pot.tomato_count;
    }
    return n - held_by_players(Item::Tomato);
  }

  int future_tomatoes() const {
    int n = 0;
    for (const auto& pot : s_.pots) {
      n += pot.phase() == PotPhase::Filling ? env::kTomatoesPerSoup - pot.tomato_count
                                            : env::kTomatoesPerSoup;
    }
    return n - held_by_players(Item::Tomato);
  }

  // Pots that are cooking, ready, or will be full once the tomatoes in hand
  // are deposited.
  int committed_pots() const {
    int n = 0;
    int in_hand = held_by_players(Item::Tomato);
    for (const auto& pot : s_.pots) {
      if (pot.phase() != PotPhase::Filling) {
        ++n;
      } else if (pot.tomato_count + in_hand >= env::kTomatoesPerSoup) {
        in_hand -= env::kTomatoesPerSoup - pot.tomato_count;
        ++n;
      }
    }
    return n;
  }

  int missing_dishes() const {
    return committed_pots() - (partner_.held == Item::Dish) - (self_.held == Item::Dish);
  }

  bool pot_urgent() const {
    for (const auto& pot : s_.pots) {
      if (pot.phase() == PotPhase::Ready) return true;
      if (pot.phase() == PotPhase::Cooking && env::kCookSteps - pot.cook_progress <= 8) return true;
    }
    return false;
  }

  std::optional<Pos> source_for(Item item) const {
    const CellKind station = item == Item::Tomato ? CellKind::TomatoStation : CellKind::DishStation;
    if (any_reachable(station)) {
      return nearest([&](Pos p) { return layout_.at(p) == station; });
    }
    return nearest([&](Pos p) { return s_.counter_item(p) == item; });
  }

  std::optional<Goal> fetch(Item item) const {
    if (const auto src = source_for(item)) return Goal{*src, Intent::Interact};
    return std::nullopt;
  }

  std::optional<Goal> empty_handed() const {
    const bool supplier = !any_reachable(CellKind::Pot);
    int need_t = missing_tomatoes();
    int need_d = missing_dishes();
    if (supplier) {
      // Keep one counter free so a dish can always be passed.
      const int free_counters = count_free_transfer();
      need_t = std::min(future_tomatoes() - items_on_transfer(Item::Tomato), free_counters - 1);
      need_d -= items_on_transfer(Item::Dish);
    }
    const bool lean_dish = seat_ == 1 || pot_urgent() || need_t <= 0;
    if (need_d > 0 && lean_dish) {
      if (auto g = fetch(Item::Dish)) return g;
    }
    if (need_t > 0) {
      if (auto g = fetch(Item::Tomato)) return g;
    }
    if (need_d > 0) {
      if (auto g = fetch(Item::Dish)) return g;
    }
    if (!supplier && any_reachable(CellKind::TomatoStation) && future_tomatoes() > 0) {
      if (auto g = fetch(Item::Tomato)) return g;
    }
    return std::nullopt;
  }

  std::optional<Goal> hand_over() const {
    const auto counter = nearest([&](Pos p) { return is_transfer_counter(p) && !s_.counter_item(p); });
    if (counter) return Goal{*counter, Intent::Interact};
    return std::nullopt;
  }

  std::optional<Goal> choose_goal() const {
    if (!self_.held) return empty_handed();
    switch (*self_.held) {
      case Item::Soup: {
        const auto dst = nearest([&](Pos p) { return layout_.at(p) == CellKind::Delivery; });
        if (dst) return Goal{*dst, Intent::Interact};
        return hand_over();
      }
      case Item::Dish: {
        if (!any_reachable(CellKind::Pot)) return hand_over();
        const auto ready = nearest([&](Pos p) {
          const auto slot = layout_.pot_index(p);
          return slot && s_.pots[*slot].phase() == PotPhase::Ready;
        });
        if (ready) return Goal{*ready, Intent::Interact};
        // Wait at the pot that finishes first.
        std::optional<Pos> best;
        int best_left = kUnreachable;
        for (std::size_t i = 0; i < s_.pots.size(); ++i) {
          const Pos p = layout_.pots()[i];
          if (s_.pots[i].phase() != PotPhase::Cooking || !reachable(p)) continue;
          const int left = env::kCookSteps - s_.pots[i].cook_progress;
          if (left < best_left) {
            best_left = left;
            best = p;
          }
        }
        if (best) return Goal{*best, Intent::Wait};
        return std::nullopt;
      }
      case Item::Tomato: {
        if (!any_reachable(CellKind::Pot)) return hand_over();
        // Fullest filling pot first, then nearest.
        std::optional<Pos> best;
        std::pair<int, int> best_key{-1, 0};
        for (std::size_t i = 0; i < s_.pots.size(); ++i) {
          const Pos p = layout_.pots()[i];
          if (s_.pots[i].phase() != PotPhase::Filling || !reachable(p)) continue;
          const std::pair<int, int> key{s_.pots[i].tomato_count, -distance_to(p)};
          if (!best || key > best_key) {
            best_key = key;
            best = p;
          }
        }
        if (best) return Goal{*best, Intent::Interact};
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  // Step to the nearest cell that is not in front of any station, or stay.
  Action park() const {
    const auto blocks_station = [&](Pos p) {
      for (const Pos& d : kSteps) {
        const Pos n = p + d;
        if (!layout_.in_bounds(n)) continue;
        const CellKind k = layout_.at(n);
        if (k != CellKind::Floor && k != CellKind::Counter) return true;
      }
      return false;
    };
    if (!blocks_station(self_.position)) return Action::Noop;
    const auto avoid = bfs(layout_, self_.position, partner_.position);
    int best_d = kUnreachable;
    int best_move = -1;
    for (int i = 0; i < layout_.cell_count(); ++i) {
      const Pos p = layout_.pos_of(i);
      if (layout_.at(p) != CellKind::Floor || blocks_station(p)) continue;
      const int d = avoid.dist[i];
      if (d != kUnreachable && d > 0 && d < best_d) {
        best_d = d;
        best_move = avoid.first_move[i];
      }
    }
    return best_move >= 0 ? kMoves[best_move] : Action::Noop;
  }

  std::pair<Action, bool> navigate(const Goal& goal) const {
    const Pos here = self_.position;
    const int dir = direction_index(goal.target - here);
    if (dir >= 0) {
      if (env::faced_cell(self_) == goal.target) {
        if (goal.intent == Intent::Wait) return {Action::Noop, false};
        return {Action::Interact, false};
      }
      // Moving into a non-floor cell only turns the player.
      return {kMoves[dir], false};
    }
    const auto cells = access_cells(layout_, goal.target);
    const auto avoid = bfs(layout_, here, partner_.position);
    int best_d = kUnreachable, best_move = -1;
    for (const Pos& a : cells) {
      const int d = avoid.at(a);
      if (d != kUnreachable && d < best_d) {
        best_d = d;
        best_move = avoid.first_move[layout_.index(a)];
      }
    }
    if (best_move >= 0) return {kMoves[best_move], false};
    // The partner is in the way (or standing on the only access cell).
    return {Action::Noop, true};
  }

  const WorldState& s_;
  const Layout& layout_;
  int seat_;
  const env::PlayerState& self_;
  const env::PlayerState& partner_;
  DistanceMap free_;
  DistanceMap partner_free_;
};

}  // namespace

ScriptedController::ScriptedController(ScriptStyle style, std::uint64_t seed)
    : style_(style), rng_(seed) {
  if (style.epsilon < 0.0 || style.epsilon > 1.0) {
    throw ValidationError("script epsilon must lie in [0, 1]");
  }
}

void ScriptedController::begin_episode(const WorldState& state, int seat) {
  rng_ = Rng(derive_seed(rng_.seed(), state.seed * 2 + static_cast<std::uint64_t>(seat)))
             .fork(0);
  blocked_steps_ = 0;
  last_action_.reset();
}

Action ScriptedController::plan(const WorldState& state, int seat) {
  const auto& self = state.players[seat];
  // A move that should have succeeded but did not means both players went
  // for the same cell.
  bool contended = false;
  if (last_action_ && env::is_move(*last_action_) && last_position_ == self.position) {
    const Pos target = self.position + env::direction(env::move_orientation(*last_action_));
    contended = state.layout->at(target) == CellKind::Floor &&
                state.players[1 - seat].position != target;
  }
  Planner planner(state, seat);
  auto [action, blocked] = planner.decide();
  blocked_steps_ = blocked || contended ? blocked_steps_ + 1 : 0;
  if (blocked_steps_ >= 3) {
    action = kMoves[rng_.below(4)];
  } else if (contended && seat == 1) {
    action = Action::Noop;
  }
  last_action_ = action;
  last_position_ = self.position;
  return action;
}

Action ScriptedController::act(const WorldState& state, int seat, Rng&) {
  if (style_.epsilon >= 1.0) return static_cast<Action>(rng_.below(env::kNumActions));
  const Action planned = plan(state, seat);
  if (style_.epsilon > 0.0 && rng_.uniform() < style_.epsilon) {
    return static_cast<Action>(rng_.below(env::kNumActions));
  }
  return planned;
}

void check_script_solvable(const Layout& layout) {
  WorldState s = env::reset(std::make_shared<Layout>(layout), 0, 1);
  bool pot_side = false, tomato_side = false, dish_side = false, delivery_side = false;
  for (int seat = 0; seat < 2; ++seat) {
    const auto dist = bfs(layout, layout.spawns()[seat], std::nullopt);
    for (int i = 0; i < layout.cell_count(); ++i) {
      const Pos p = layout.pos_of(i);
      const bool adj = std::any_of(kSteps.begin(), kSteps.end(), [&](Pos d) {
        const Pos n = p + d;
        return layout.in_bounds(n) && layout.at(n) == CellKind::Floor &&
               dist.at(n) != kUnreachable;
      });
      if (!adj) continue;
      switch (layout.at(p)) {
        case CellKind::Pot: pot_side = true; break;
        case CellKind::TomatoStation: tomato_side = true; break;
        case CellKind::DishStation: dish_side = true; break;
        case CellKind::Delivery: delivery_side = true; break;
        default: break;
      }
    }
  }
  if (!pot_side || !tomato_side || !dish_side || !delivery_side) {
    throw ValidationError("layout '" + layout.name() + "': a station is unreachable for the script");
  }
}

}  // namespace fcp::agents
