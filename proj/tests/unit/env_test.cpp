#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "fcp/common/error.hpp"
#include "fcp/common/rng.hpp"
#include "fcp/env/episode_log.hpp"
#include "fcp/env/layout.hpp"
#include "fcp/env/observation.hpp"
#include "fcp/env/render.hpp"
#include "fcp/env/world.hpp"

namespace fcp::env {
namespace {

constexpr const char* kMiniKitchen =
    "#TPD#\n"
    "#1..#\n"
    "#..2#\n"
    "#...#\n"
    "##X##\n";

LayoutPtr mini() { return load_layout(kMiniKitchen, "mini"); }

JointAction both(Action a0, Action a1) { return {a0, a1}; }

TEST(LayoutTest, ParsesLegendIntoCellKinds) {
  const auto layout = mini();
  EXPECT_EQ(layout->width(), 5);
  EXPECT_EQ(layout->height(), 5);
  EXPECT_EQ(layout->at({1, 0}), CellKind::TomatoStation);
  EXPECT_EQ(layout->at({2, 0}), CellKind::Pot);
  EXPECT_EQ(layout->at({3, 0}), CellKind::DishStation);
  EXPECT_EQ(layout->at({2, 4}), CellKind::Delivery);
  EXPECT_EQ(layout->at({0, 2}), CellKind::Counter);
  EXPECT_EQ(layout->at({1, 1}), CellKind::Floor);
  EXPECT_EQ(layout->spawns()[0], (Pos{1, 1}));
  EXPECT_EQ(layout->spawns()[1], (Pos{3, 2}));
  EXPECT_EQ(layout->pots().size(), 1u);
  EXPECT_EQ(layout->to_text(), kMiniKitchen);
}

TEST(LayoutTest, ShippedCrampedHasOnePot) {
  const auto layout = builtin_layout("cramped");
  EXPECT_EQ(layout->name(), "cramped");
  EXPECT_EQ(layout->pots().size(), 1u);
  EXPECT_EQ(layout->family(), 0);
}

TEST(LayoutTest, ShippedLayoutsMatchTheirDescriptions) {
  EXPECT_EQ(builtin_layout("asymmetric")->pots().size(), 2u);
  EXPECT_EQ(builtin_layout("ring")->pots().size(), 2u);
  EXPECT_EQ(builtin_layout("circuit")->pots().size(), 2u);
  EXPECT_EQ(builtin_layout("forced")->pots().size(), 2u);
  EXPECT_EQ(builtin_layout("tutorial")->pots().size(), 1u);
  EXPECT_FALSE(builtin_layout("tutorial")->family().has_value());

  // forced: the left room holds the sources, the right room the pots and
  // delivery, joined only by counters.
  const auto forced = builtin_layout("forced");
  for (const Pos& pot : forced->pots()) EXPECT_GT(pot.x, 3);
  EXPECT_LT(forced->spawns()[0].x, 3);
  EXPECT_GT(forced->spawns()[1].x, 3);
}

TEST(LayoutTest, MissingDeliveryIsAValidationError) {
  const std::string text =
      "#TPD#\n"
      "#1..#\n"
      "#..2#\n"
      "#####\n";
  try {
    load_layout(text, "bad");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("Delivery"), std::string::npos);
  }
}

TEST(LayoutTest, UnknownCharacterReportsLineAndColumn) {
  const std::string text =
      "#TPD#\n"
      "#1.?#\n";
  try {
    load_layout(text, "bad");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 4);
  }
}

TEST(LayoutTest, RejectsOpenBorderAndUnreachableStations) {
  EXPECT_THROW(load_layout("#TPD#\n.1.2#\n##X##\n", "open"), ValidationError);
  EXPECT_THROW(load_layout("#TPD#\n#1.2#\n#####\n###X#\n", "sealed"), ValidationError);
  EXPECT_THROW(load_layout("#TPD#\n#1..#\n##X##\n", "one_spawn"), ValidationError);
  EXPECT_THROW(load_layout("#TPD#\n#1.2#\n#PPX#\n", "three_pots"), ValidationError);
  EXPECT_THROW(load_layout("#TPD#\n#1.2#\n##X\n", "ragged"), ParseError);
}

TEST(ResetTest, IsDeterministicAndEmpty) {
  const auto cramped = builtin_layout("cramped");
  const WorldState a = reset(cramped, 7);
  const WorldState b = reset(cramped, 7);
  EXPECT_EQ(a, b);
  EXPECT_EQ(state_hash(a), state_hash(b));
  for (const auto& pot : a.pots) {
    EXPECT_EQ(pot.phase(), PotPhase::Filling);
    EXPECT_EQ(pot.tomato_count, 0);
  }
  EXPECT_FALSE(a.players[0].held);
  EXPECT_EQ(a.step, 0);

  const auto ring = builtin_layout("ring");
  EXPECT_EQ(reset(ring, 3).players[0].position, ring->spawns()[0]);
}

TEST(StepTest, ThirdTomatoStartsCooking) {
  auto s = reset(mini(), 1);
  s.pots[0].tomato_count = 2;
  s.players[0].position = {2, 1};
  s.players[0].orientation = Orientation::Up;
  s.players[0].held = Item::Tomato;
  const auto out = step(s, both(Action::Interact, Action::Noop));
  EXPECT_EQ(s.pots[0].tomato_count, 3);
  EXPECT_EQ(s.pots[0].cook_progress, 0);
  EXPECT_EQ(s.pots[0].phase(), PotPhase::Cooking);
  EXPECT_EQ(out.rewards, (std::array<int, 2>{1, 1}));
  ASSERT_EQ(out.events.size(), 1u);
  EXPECT_EQ(out.events[0].kind, EventKind::TomatoDeposited);
  EXPECT_FALSE(s.players[0].held);
}

TEST(StepTest, DeliveringSoupRewardsBothPlayers) {
  auto s = reset(mini(), 1);
  s.players[1].position = {2, 3};
  s.players[1].orientation = Orientation::Down;
  s.players[1].held = Item::Soup;
  const auto out = step(s, both(Action::Noop, Action::Interact));
  EXPECT_EQ(out.rewards, (std::array<int, 2>{20, 20}));
  EXPECT_FALSE(s.players[1].held);
  ASSERT_EQ(out.events.size(), 1u);
  EXPECT_EQ(out.events[0].kind, EventKind::Delivered);
  EXPECT_EQ(out.events[0].player, 1);
}

TEST(StepTest, ConvergingMovesBlockBothButTurn) {
  auto s = reset(mini(), 1);
  s.players[0].position = {1, 2};
  s.players[1].position = {3, 2};
  step(s, both(Action::MoveRight, Action::MoveLeft));
  EXPECT_EQ(s.players[0].position, (Pos{1, 2}));
  EXPECT_EQ(s.players[1].position, (Pos{3, 2}));
  EXPECT_EQ(s.players[0].orientation, Orientation::Right);
  EXPECT_EQ(s.players[1].orientation, Orientation::Left);
}

TEST(StepTest, BothMoveUpIntoTheSameCellBlocksBoth) {
  // Player 0 is pinned under a counter, so both MoveUp actions target its cell.
  auto s = reset(mini(), 1);
  s.players[0].position = {1, 1};
  s.players[0].orientation = Orientation::Down;
  s.players[1].position = {1, 2};
  s.players[1].orientation = Orientation::Right;
  const auto out = step(s, both(Action::MoveUp, Action::MoveUp));
  EXPECT_EQ(s.players[0].position, (Pos{1, 1}));
  EXPECT_EQ(s.players[1].position, (Pos{1, 2}));
  EXPECT_EQ(s.players[0].orientation, Orientation::Up);
  EXPECT_EQ(s.players[1].orientation, Orientation::Up);
  EXPECT_FALSE(out.moved[0]);
  EXPECT_FALSE(out.moved[1]);
}

// Collision oracle written straight from the rule text: a move targets the
// neighbouring cell if it is Floor; if both players end in one cell, or they
// would swap, nobody moves; otherwise every mover moves. Orientation always
// follows the move direction.
struct OracleResult {
  std::array<Pos, 2> pos;
  std::array<Orientation, 2> orient;
};

OracleResult collision_oracle(const Layout& layout, std::array<Pos, 2> pos,
                              std::array<Orientation, 2> orient, JointAction a) {
  std::array<Pos, 2> want = pos;
  for (int i = 0; i < 2; ++i) {
    Pos delta{0, 0};
    switch (a[i]) {
      case Action::MoveUp: delta = {0, -1}; orient[i] = Orientation::Up; break;
      case Action::MoveDown: delta = {0, 1}; orient[i] = Orientation::Down; break;
      case Action::MoveLeft: delta = {-1, 0}; orient[i] = Orientation::Left; break;
      case Action::MoveRight: delta = {1, 0}; orient[i] = Orientation::Right; break;
      default: break;
    }
    const Pos n{pos[i].x + delta.x, pos[i].y + delta.y};
    if (layout.at(n) == CellKind::Floor) want[i] = n;
  }
  if (want[0] == want[1]) return {pos, orient};
  if (want[0] == pos[1] && want[1] == pos[0]) return {pos, orient};
  return {want, orient};
}

TEST(StepTest, MovementMatchesExhaustiveMicroGridOracle) {
  const auto layout = mini();
  std::vector<Pos> floor;
  for (int i = 0; i < layout->cell_count(); ++i) {
    if (layout->at(layout->pos_of(i)) == CellKind::Floor) floor.push_back(layout->pos_of(i));
  }
  int cases = 0;
  for (const Pos& p0 : floor) {
    for (const Pos& p1 : floor) {
      if (p0 == p1) continue;
      for (int a0 = 0; a0 < 5; ++a0) {
        for (int a1 = 0; a1 < 5; ++a1) {
          auto s = reset(layout, 0);
          s.players[0].position = p0;
          s.players[1].position = p1;
          s.players[0].orientation = Orientation::Left;
          s.players[1].orientation = Orientation::Right;
          const JointAction a{static_cast<Action>(a0), static_cast<Action>(a1)};
          const auto expect = collision_oracle(*layout, {p0, p1},
                                               {Orientation::Left, Orientation::Right}, a);
          const auto out = step(s, a);
          ASSERT_EQ(s.players[0].position, expect.pos[0]);
          ASSERT_EQ(s.players[1].position, expect.pos[1]);
          ASSERT_EQ(s.players[0].orientation, expect.orient[0]);
          ASSERT_EQ(s.players[1].orientation, expect.orient[1]);
          ASSERT_EQ(out.moved[0], expect.pos[0] != p0);
          ASSERT_EQ(out.moved[1], expect.pos[1] != p1);
          ++cases;
        }
      }
    }
  }
  EXPECT_EQ(cases, 9 * 8 * 25);
}

TEST(StepTest, FollowingIntoAVacatedCellIsAllowed) {
  auto s = reset(mini(), 1);
  s.players[0].position = {1, 2};
  s.players[1].position = {2, 2};
  step(s, both(Action::MoveRight, Action::MoveRight));
  EXPECT_EQ(s.players[0].position, (Pos{2, 2}));
  EXPECT_EQ(s.players[1].position, (Pos{3, 2}));
}

TEST(StepTest, SwapsAreBlocked) {
  auto s = reset(mini(), 1);
  s.players[0].position = {1, 2};
  s.players[1].position = {2, 2};
  step(s, both(Action::MoveRight, Action::MoveLeft));
  EXPECT_EQ(s.players[0].position, (Pos{1, 2}));
  EXPECT_EQ(s.players[1].position, (Pos{2, 2}));
}

TEST(StepTest, SteppingAFinishedEpisodeThrows) {
  auto s = reset(mini(), 1, 2);
  EXPECT_FALSE(step(s, both(Action::Noop, Action::Noop)).done);
  EXPECT_TRUE(step(s, both(Action::Noop, Action::Noop)).done);
  EXPECT_THROW(step(s, both(Action::Noop, Action::Noop)), ContractViolation);
}

TEST(InteractTest, EmptyHandTakesTomatoFromStation) {
  auto s = reset(mini(), 1);
  s.players[0].position = {1, 1};
  s.players[0].orientation = Orientation::Up;
  step(s, both(Action::Interact, Action::Noop));
  EXPECT_EQ(s.players[0].held, Item::Tomato);
}

TEST(InteractTest, DishOnReadyPotCollectsSoupAndResetsPot) {
  auto s = reset(mini(), 1);
  s.pots[0] = {3, kCookSteps};
  s.players[0].position = {2, 1};
  s.players[0].orientation = Orientation::Up;
  s.players[0].held = Item::Dish;
  const auto out = step(s, both(Action::Interact, Action::Noop));
  EXPECT_EQ(s.players[0].held, Item::Soup);
  EXPECT_EQ(s.pots[0], PotState{});
  EXPECT_EQ(out.events.at(0).kind, EventKind::SoupCollected);
  EXPECT_EQ(out.rewards, (std::array<int, 2>{0, 0}));
}

TEST(InteractTest, ItemOntoOccupiedCounterIsNoop) {
  auto s = reset(mini(), 1);
  const Pos counter{0, 2};
  s.counter_items[s.layout->index(counter)] = Item::Dish;
  s.players[0].position = {1, 2};
  s.players[0].orientation = Orientation::Left;
  s.players[0].held = Item::Tomato;
  const auto before = s;
  const auto out = step(s, both(Action::Interact, Action::Noop));
  EXPECT_TRUE(out.events.empty());
  EXPECT_EQ(s.players[0].held, Item::Tomato);
  EXPECT_EQ(s.counter_item(counter), Item::Dish);
  EXPECT_EQ(s.players, before.players);
}

TEST(InteractTest, CounterPlaceAndPickup) {
  auto s = reset(mini(), 1);
  const Pos counter{0, 2};
  s.players[0].position = {1, 2};
  s.players[0].orientation = Orientation::Left;
  s.players[0].held = Item::Tomato;
  step(s, both(Action::Interact, Action::Noop));
  EXPECT_EQ(s.counter_item(counter), Item::Tomato);
  EXPECT_FALSE(s.players[0].held);
  step(s, both(Action::Interact, Action::Noop));
  EXPECT_EQ(s.players[0].held, Item::Tomato);
  EXPECT_FALSE(s.counter_item(counter));
}

TEST(InteractTest, TomatoIntoCookingPotIsNoop) {
  auto s = reset(mini(), 1);
  s.pots[0] = {3, 5};
  s.players[0].position = {2, 1};
  s.players[0].held = Item::Tomato;
  const auto out = step(s, both(Action::Interact, Action::Noop));
  EXPECT_EQ(out.rewards[0], 0);
  EXPECT_EQ(s.players[0].held, Item::Tomato);
  EXPECT_EQ(s.pots[0].cook_progress, 6);
}

TEST(InteractTest, PlayerZeroResolvesFirst) {
  // Both face the same counter: player 0 places, then player 1 picks it up.
  auto s = reset(load_layout("#T#P#\n#1#2#\n#...#\n#DX##\n", "shared"), 1);
  s.players[0].orientation = Orientation::Right;
  s.players[0].held = Item::Dish;
  s.players[1].orientation = Orientation::Left;
  const auto out = step(s, both(Action::Interact, Action::Interact));
  ASSERT_EQ(out.events.size(), 2u);
  EXPECT_EQ(out.events[0].kind, EventKind::CounterPlace);
  EXPECT_EQ(out.events[1].kind, EventKind::CounterPickup);
  EXPECT_EQ(s.players[1].held, Item::Dish);
}

// Property: under random joint actions, a pot turns Ready exactly
// kCookSteps steps after its third deposit, on every shipped layout.
TEST(PotTimerProperty, ReadyExactlyTwentyStepsAfterThirdDeposit) {
  Rng rng(42);
  int observed = 0;
  for (const auto& name : kLayoutFamilies) {
    const auto layout = builtin_layout(name);
    for (int ep = 0; ep < 40; ++ep) {
      auto s = reset(layout, ep, 400);
      // Bias towards Interact so pots actually fill.
      std::vector<std::optional<int>> third_deposit_step(s.pots.size());
      while (!s.done()) {
        JointAction a;
        for (auto& x : a) {
          x = rng.uniform() < 0.4 ? Action::Interact : static_cast<Action>(rng.below(5));
        }
        const int t = s.step;
        const auto before = s.pots;
        const auto out = step(s, a);
        for (const auto& e : out.events) {
          if (e.kind == EventKind::TomatoDeposited && s.pots[e.pot].tomato_count == 3) {
            third_deposit_step[e.pot] = t;
          }
        }
        for (std::size_t p = 0; p < s.pots.size(); ++p) {
          if (before[p].phase() != PotPhase::Ready && s.pots[p].phase() == PotPhase::Ready) {
            ASSERT_TRUE(third_deposit_step[p].has_value());
            ASSERT_EQ(t - *third_deposit_step[p], kCookSteps);
            ++observed;
          }
        }
      }
    }
  }
  EXPECT_GT(observed, 0);
}

TEST(FeatureObservationTest, FreshStateEncodesEmptyPotsAndHands) {
  const auto s = reset(builtin_layout("ring"), 0);
  const auto f = feature_observation(s, 0);
  EXPECT_EQ(f.size(), 2u + 4 + 4 + 2 + 10 + 1 + 4 + 8 + 5);
  EXPECT_EQ(f[feature::kHeld], 1.0f);
  for (std::size_t p = 0; p < 2; ++p) {
    EXPECT_EQ(f[feature::kPots + p * feature::kPotWidth], 1.0f);
  }
  EXPECT_EQ(f[feature::kLayout + 2], 1.0f);
}

TEST(FeatureObservationTest, CookingPotEncodesThreeTomatoes) {
  auto s = reset(builtin_layout("cramped"), 0);
  s.pots[0] = {3, 0};
  const auto f = feature_observation(s, 1);
  for (std::size_t b = 0; b < 5; ++b) {
    EXPECT_EQ(f[feature::kPots + b], b == 3 ? 1.0f : 0.0f);
  }
  // Single-pot layout pads the second slot with zeros.
  for (std::size_t b = 0; b < 5; ++b) EXPECT_EQ(f[feature::kPots + 5 + b], 0.0f);
}

TEST(FeatureObservationTest, PositionsFlagsAndTargets) {
  auto s = reset(mini(), 0);
  s.players[0].orientation = Orientation::Right;
  const auto f = feature_observation(s, 0);
  EXPECT_EQ(f[feature::kPosition], 1.0f);
  EXPECT_EQ(f[feature::kPosition + 1], 1.0f);
  EXPECT_EQ(f[feature::kOrientation + 3], 1.0f);
  EXPECT_EQ(f[feature::kPartner], 2.0f);
  EXPECT_EQ(f[feature::kPartner + 1], 1.0f);
  EXPECT_EQ(f[feature::kFacedEmpty], 1.0f);
  EXPECT_EQ(f[feature::kAdjacentEmpty + 0], 0.0f);  // tomato station above
  EXPECT_EQ(f[feature::kAdjacentEmpty + 1], 1.0f);
  EXPECT_EQ(f[feature::kAdjacentEmpty + 2], 0.0f);
  EXPECT_EQ(f[feature::kAdjacentEmpty + 3], 1.0f);
  // tomato (1,0), dish (3,0), pot fallback (2,0), delivery (2,4)
  EXPECT_EQ(f[feature::kTargets + 0], 0.0f);
  EXPECT_EQ(f[feature::kTargets + 1], -1.0f);
  EXPECT_EQ(f[feature::kTargets + 2], 2.0f);
  EXPECT_EQ(f[feature::kTargets + 4], 1.0f);
  EXPECT_EQ(f[feature::kTargets + 6], 1.0f);
  EXPECT_EQ(f[feature::kTargets + 7], 3.0f);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(f[feature::kLayout + i], 0.0f);
}

TEST(EgocentricObservationTest, CenterIsSelf) {
  const auto s = reset(builtin_layout("circuit"), 0);
  for (int p = 0; p < 2; ++p) {
    const auto w = egocentric_observation(s, p);
    EXPECT_EQ(w.at(ego::kRadius, ego::kRadius, ego::kSelf), 1);
    EXPECT_EQ(w.at(ego::kRadius, ego::kRadius, ego::kFloor), 1);
  }
}

TEST(EgocentricObservationTest, CornerWindowsSeeOutOfBounds) {
  const auto s = reset(builtin_layout("cramped"), 0);
  const auto w = egocentric_observation(s, 0);
  int oob = 0;
  for (int r = 0; r < ego::kSide; ++r) {
    for (int c = 0; c < ego::kSide; ++c) oob += w.at(r, c, ego::kOutOfBounds);
  }
  EXPECT_GT(oob, 0);
}

// Rotating the observer right by 90 degrees in a static world rotates the
// window a quarter turn counter-clockwise. Checked on random static grids.
TEST(EgocentricObservationTest, TurningRotatesTheWindow) {
  Rng rng(9);
  const char glyphs[] = {'.', '.', '#'};
  int accepted = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 9, h = 8;
    std::vector<std::string> grid(h, std::string(w, '#'));
    for (int y = 1; y < h - 1; ++y) {
      for (int x = 1; x < w - 1; ++x) grid[y][x] = glyphs[rng.below(3)];
    }
    grid[0][1] = 'T';
    grid[0][2] = 'P';
    grid[0][3] = 'D';
    grid[h - 1][4] = 'X';
    for (int x = 1; x <= 3; ++x) grid[1][x] = '.';
    grid[h - 2][4] = '.';
    grid[4][4] = '1';
    grid[1][2] = '2';
    std::string text;
    for (const auto& row : grid) text += row + "\n";
    LayoutPtr layout;
    try {
      layout = load_layout(text, "random");
    } catch (const ValidationError&) {
      continue;
    }
    ++accepted;
    auto s = reset(layout, 0);
    for (int i = 0; i < layout->cell_count(); ++i) {
      if (layout->at(layout->pos_of(i)) == CellKind::Counter && rng.below(3) == 0) {
        s.counter_items[i] = static_cast<Item>(rng.below(3));
      }
    }
    s.players[0].held = Item::Dish;
    for (int o = 0; o < 4; ++o) {
      static constexpr Orientation kClockwise[] = {Orientation::Up, Orientation::Right,
                                                   Orientation::Down, Orientation::Left};
      s.players[0].orientation = kClockwise[o];
      const auto before = egocentric_observation(s, 0);
      s.players[0].orientation = kClockwise[(o + 1) % 4];
      const auto after = egocentric_observation(s, 0);
      for (int r = 0; r < ego::kSide; ++r) {
        for (int c = 0; c < ego::kSide; ++c) {
          for (int ch = 0; ch < ego::kNumChannels; ++ch) {
            ASSERT_EQ(after.at(r, c, ch), before.at(c, ego::kSide - 1 - r, ch));
          }
        }
      }
    }
  }
  EXPECT_GT(accepted, 0);
}

TEST(RenderTest, PureAndShapedLikeTheLayout) {
  auto s = reset(builtin_layout("asymmetric"), 0);
  s.pots[1] = {3, 10};
  const auto a = render_topdown(s);
  const auto b = render_topdown(s);
  EXPECT_EQ(a, b);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(a.width, s.layout->width());
  EXPECT_EQ(a.height, s.layout->height());
  ASSERT_EQ(a.grid.size(), static_cast<std::size_t>(s.layout->height()));
  EXPECT_DOUBLE_EQ(a.pots[1].progress, 10.0 / 20.0);
  EXPECT_DOUBLE_EQ(a.pots[0].progress, 0.0);
}

EpisodeLog random_episode(const LayoutPtr& layout, std::uint64_t seed, int horizon) {
  Rng rng(seed);
  auto s = reset(layout, seed, horizon);
  EpisodeRecorder rec(s, {"random:a", "random:b"});
  while (!s.done()) {
    JointAction a{static_cast<Action>(rng.below(kNumActions)),
                  static_cast<Action>(rng.below(kNumActions))};
    const auto out = step(s, a);
    rec.record(a, out, s);
  }
  return std::move(rec).take();
}

TEST(EpisodeLogTest, JsonlRoundTripAndReplay) {
  const auto layout = builtin_layout("forced");
  const auto log = random_episode(layout, 5, 120);
  const auto text = to_jsonl(log);
  const auto parsed = from_jsonl(text);
  EXPECT_EQ(to_jsonl(parsed), text);
  EXPECT_TRUE(verify_replay(parsed, layout).pass);
}

TEST(EpisodeLogTest, TamperedRewardFailsAtThatStep) {
  const auto layout = builtin_layout("cramped");
  auto log = random_episode(layout, 11, 100);
  log.steps[37].rewards = {5, 5};
  const auto v = verify_replay(log, layout);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.first_divergent_step, 37);
}

TEST(EpisodeLogTest, RejectsMalformedLines) {
  EXPECT_THROW(from_jsonl("{\"type\":\"step\"}\n"), ParseError);
  EXPECT_THROW(from_jsonl("not json\n"), ParseError);
}

}  // namespace
}  // namespace fcp::env
