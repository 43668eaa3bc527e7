#include "fcp/agents/rollout.hpp"

namespace fcp::agents {

namespace {

constexpr std::uint64_t kActionStream = 0xac7;

}

env::EpisodeLog play_episode(const env::LayoutPtr& layout, std::uint64_t seed, int horizon,
                             const std::array<Controller*, 2>& controllers,
                             const std::array<std::string, 2>& agent_ids) {
  auto state = env::reset(layout, seed, horizon);
  env::EpisodeRecorder recorder(state, agent_ids);
  Rng rng(derive_seed(seed, kActionStream));
  controllers[0]->begin_episode(state, 0);
  controllers[1]->begin_episode(state, 1);
  while (!state.done()) {
    const env::JointAction joint{controllers[0]->act(state, 0, rng),
                                 controllers[1]->act(state, 1, rng)};
    const auto outcome = env::step(state, joint);
    recorder.record(joint, outcome, state);
  }
  return std::move(recorder).take();
}

int play_for_deliveries(const env::LayoutPtr& layout, std::uint64_t seed, int horizon,
                        const std::array<Controller*, 2>& controllers) {
  auto state = env::reset(layout, seed, horizon);
  Rng rng(derive_seed(seed, kActionStream));
  controllers[0]->begin_episode(state, 0);
  controllers[1]->begin_episode(state, 1);
  int deliveries = 0;
  while (!state.done()) {
    const env::JointAction joint{controllers[0]->act(state, 0, rng),
                                 controllers[1]->act(state, 1, rng)};
    for (const auto& e : env::step(state, joint).events) {
      if (e.kind == env::EventKind::Delivered) ++deliveries;
    }
  }
  return deliveries;
}

}  // namespace fcp::agents
