#pragma once

// Synchronous advantage actor-critic with n-step returns, shared by every
// training procedure. Not part of the public interface.

#include <functional>
#include <memory>
#include <vector>

#include "fcp/agents/controller.hpp"
#include "fcp/agents/neural.hpp"
#include "fcp/agents/policy.hpp"
#include "fcp/env/world.hpp"
#include "fcp/training/config.hpp"

namespace fcp::training::detail {

class Adam {
 public:
  Adam(std::size_t size, double lr) : lr_(lr), m_(size, 0.0), v_(size, 0.0) {}
  void step(std::vector<float>& weights, const std::vector<float>& grad);
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_;
  std::vector<double> m_, v_;
  std::int64_t t_ = 0;
};

struct Learner {
  agents::PolicyParams params;
  Adam adam;
  agents::Mlp net;

  explicit Learner(agents::PolicyParams p, double lr)
      : params(std::move(p)), adam(params.weights.size(), lr), net(params.arch) {}
};

// Who sits in each seat of a fresh episode: a learner index, or a frozen
// controller owned by the seating.
struct Seating {
  std::array<int, 2> learner{-1, -1};
  std::array<agents::ControllerPtr, 2> partner;
};

using SeatingFn = std::function<Seating(Rng&)>;

class A2C {
 public:
  A2C(const TrainConfig& config, std::vector<Learner*> learners, SeatingFn seating,
      std::uint64_t seed);

  // Collects one rollout from every environment and applies one update per
  // learner that acted. Returns the number of environment steps taken.
  std::int64_t iterate();

  // Mean shared return of episodes finished since the last call (0 if none).
  double take_mean_return();
  std::int64_t episodes() const { return episodes_; }

 private:
  struct Slot {
    env::WorldState state;
    Seating seating;
    std::array<agents::FrameStack, 2> stacks{agents::FrameStack(1), agents::FrameStack(1)};
    std::array<std::vector<float>, 2> obs;
    std::array<bool, 2> fresh{false, false};
    Rng rng;
    int episode_return = 0;
  };
  struct Transition {
    int slot = 0;
    int seat = 0;
    int learner = 0;
    agents::Mlp::Activations acts;
    int action = 0;
    float reward = 0.0f;
    bool done = false;
    float ret = 0.0f;
  };

  void begin_episode(Slot& slot);
  const std::vector<float>& observe(Slot& slot, int seat);
  void update(int learner, std::size_t count);

  TrainConfig config_;
  std::vector<Learner*> learners_;
  SeatingFn seating_;
  Rng rng_;
  std::vector<env::LayoutPtr> layouts_;
  std::vector<Slot> slots_;
  std::vector<Transition> buffer_;
  std::size_t used_ = 0;
  std::vector<float> grad_;
  std::int64_t episodes_ = 0;
  std::int64_t return_sum_ = 0;
  std::int64_t return_count_ = 0;
};

}  // namespace fcp::training::detail
