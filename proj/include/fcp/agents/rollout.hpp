#pragma once

#include <array>
#include <string>

#include "fcp/agents/controller.hpp"
#include "fcp/env/episode_log.hpp"

namespace fcp::agents {

// Plays one full episode. The action-sampling stream is derived from the
// episode seed, so (layout, seed, controllers) fully determine the log.
env::EpisodeLog play_episode(const env::LayoutPtr& layout, std::uint64_t seed, int horizon,
                             const std::array<Controller*, 2>& controllers,
                             const std::array<std::string, 2>& agent_ids);

// Same episode without recording; returns the number of deliveries.
int play_for_deliveries(const env::LayoutPtr& layout, std::uint64_t seed, int horizon,
                        const std::array<Controller*, 2>& controllers);

}  // namespace fcp::agents
