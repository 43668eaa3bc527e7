#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcp/agents/agent_spec.hpp"
#include "fcp/training/train.hpp"

namespace fcp::training {

struct SweepSpec {
  std::vector<int> sizes{2, 4, 8};
  int seeds = 3;
  std::uint64_t seed = 0;
  int eval_episodes = 10;
  int eval_horizon = env::kDefaultHorizon;
  // Fixed evaluation partner; defaults to the sloppy scripted proxy.
  std::optional<agents::AgentSpec> proxy;
  // Source of stage-1 partners for (config with the largest size, seed).
  // Smaller sizes use a prefix of these runs. Defaults to train_partners.
  std::function<std::vector<RunRecord>(const TrainConfig&, std::uint64_t)> partners;
};

struct SweepRow {
  int size = 0;
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> per_seed;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  bool nondecreasing() const;
};

agents::AgentSpec default_proxy();

// Full FCP per size and seed, scored as mean deliveries with the proxy.
// Throws ValidationError if sizes are not strictly ascending.
SweepTable population_size_sweep(const SweepSpec& spec, const TrainConfig& config);

nlohmann::json to_json(const SweepTable& table);
std::string format(const SweepTable& table);

}  // namespace fcp::training
