#pragma once

#include <memory>

#include "fcp/common/rng.hpp"
#include "fcp/env/world.hpp"

namespace fcp::agents {

// A per-episode actor. Controllers may keep episode memory (frame stacks,
// planner bookkeeping), so one instance drives one seat of one episode at a
// time; begin_episode resets that memory.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void begin_episode(const env::WorldState& state, int seat) = 0;
  virtual env::Action act(const env::WorldState& state, int seat, Rng& rng) = 0;
};

using ControllerPtr = std::unique_ptr<Controller>;

// Always returns Noop. Used for the idle partner of single-player episodes.
class IdleController final : public Controller {
 public:
  void begin_episode(const env::WorldState&, int) override {}
  env::Action act(const env::WorldState&, int, Rng&) override { return env::Action::Noop; }
};

}  // namespace fcp::agents
