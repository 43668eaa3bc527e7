#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcp/agents/policy.hpp"

namespace fcp::training {

struct TrainConfig {
  std::int64_t total_steps = 2'000'000;
  std::int64_t checkpoint_every = 100'000;  // n_c
  int population_size = 8;                  // N
  double discount = 0.99;
  double learning_rate = 1e-4;
  // Linear decay of the learning rate to zero over total_steps.
  bool lr_decay = false;
  double entropy_bonus = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  // Rewards are multiplied by this before computing returns.
  double reward_scale = 1.0;
  int rollout_length = 25;
  int num_envs = 16;
  int eval_episodes = 20;  // K
  int horizon = 300;
  std::vector<std::string> layouts = {"cramped"};
  agents::ArchVariant arch;

  // Throws ValidationError naming the violated constraint.
  void validate() const;
  std::int64_t steps_per_iteration() const {
    return static_cast<std::int64_t>(num_envs) * rollout_length;
  }
  int checkpoint_count() const {
    return static_cast<int>(total_steps / checkpoint_every) + 1;
  }
};

nlohmann::json to_json(const TrainConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace fcp::training
