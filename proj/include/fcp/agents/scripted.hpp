#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fcp/agents/controller.hpp"
#include "fcp/env/layout.hpp"

namespace fcp::agents {

struct ScriptStyle {
  // Probability of replacing the planned action by a uniformly random one.
  // 0 is the efficient demonstrator, 1 is uniform random play.
  double epsilon = 0.0;

  static ScriptStyle efficient() { return {0.0}; }
  static ScriptStyle sloppy(double eps) { return {eps}; }

  // "efficient" or "sloppy:<eps>".
  std::string id() const;
  static ScriptStyle parse(std::string_view id);
};

// Planner that runs the soup cycle (tomatoes into a pot, dish, collect,
// deliver) with breadth-first navigation. When it cannot reach a pot it acts
// as a supplier and passes tomatoes and dishes over shared counters; when it
// cannot reach a station it takes that item from counters instead.
//
// Task choice for an empty hand: fetch a dish when a pot is (or is about to
// be) cooking and nobody holds a dish for it, otherwise fetch the tomatoes
// still missing from filling pots. Seat 1 leans towards dishes and seat 0
// towards tomatoes so a pair of scripts splits the work.
class ScriptedController final : public Controller {
 public:
  ScriptedController(ScriptStyle style, std::uint64_t seed);

  void begin_episode(const env::WorldState& state, int seat) override;
  env::Action act(const env::WorldState& state, int seat, Rng& rng) override;

  // The planner's choice before noise; exposed for tests and BC oracles.
  env::Action plan(const env::WorldState& state, int seat);

 private:
  ScriptStyle style_;
  Rng rng_;
  int blocked_steps_ = 0;
  std::optional<env::Action> last_action_;
  env::Pos last_position_;
};

// Throws ValidationError when the layout cannot be completed by this planner
// (some station unreachable for both players and no counter passing route).
void check_script_solvable(const env::Layout& layout);

}  // namespace fcp::agents
