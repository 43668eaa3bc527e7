#include "fcp/training/config.hpp"

#include <cmath>
#include <set>

#include "fcp/common/error.hpp"

namespace fcp::training {

using nlohmann::json;

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("train config: " + what); };
  if (total_steps <= 0) fail("total_steps must be positive");
  if (checkpoint_every <= 0) fail("checkpoint_every must be positive");
  if (total_steps % checkpoint_every != 0) fail("checkpoint_every must divide total_steps");
  if (population_size < 1) fail("population_size must be at least 1");
  if (!(discount > 0.0 && discount <= 1.0)) fail("discount must lie in (0, 1]");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (entropy_bonus < 0.0) fail("entropy_bonus must be non-negative");
  if (!(reward_scale > 0.0)) fail("reward_scale must be positive");
  if (rollout_length < 1 || num_envs < 1) fail("rollout_length and num_envs must be positive");
  if (checkpoint_every % steps_per_iteration() != 0) {
    fail("num_envs * rollout_length must divide checkpoint_every");
  }
  if (eval_episodes < 1) fail("eval_episodes must be positive");
  if (horizon < 1) fail("horizon must be positive");
  if (layouts.empty()) fail("at least one layout is required");
  if (arch.hidden_width < 1) fail("hidden width must be positive");
}

json to_json(const TrainConfig& c) {
  return json{{"total_steps", c.total_steps},
              {"checkpoint_every", c.checkpoint_every},
              {"population_size", c.population_size},
              {"discount", c.discount},
              {"learning_rate", c.learning_rate},
              {"lr_decay", c.lr_decay},
              {"entropy_bonus", c.entropy_bonus},
              {"value_coef", c.value_coef},
              {"max_grad_norm", c.max_grad_norm},
              {"reward_scale", c.reward_scale},
              {"rollout_length", c.rollout_length},
              {"num_envs", c.num_envs},
              {"eval_episodes", c.eval_episodes},
              {"horizon", c.horizon},
              {"layouts", c.layouts},
              {"arch", c.arch.id()}};
}

TrainConfig train_config_from_json(const json& j) {
  static const std::set<std::string> kKeys = {
      "total_steps",   "checkpoint_every", "population_size", "discount",   "learning_rate", "lr_decay",
      "entropy_bonus", "value_coef",       "max_grad_norm",   "reward_scale", "rollout_length", "num_envs",
      "eval_episodes", "horizon",          "layouts",         "arch"};
  if (!j.is_object()) throw ValidationError("train config must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) throw ValidationError("train config: unknown key '" + key + "'");
  }
  TrainConfig c;
  try {
    c.total_steps = j.value("total_steps", c.total_steps);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.population_size = j.value("population_size", c.population_size);
    c.discount = j.value("discount", c.discount);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.lr_decay = j.value("lr_decay", c.lr_decay);
    c.entropy_bonus = j.value("entropy_bonus", c.entropy_bonus);
    c.value_coef = j.value("value_coef", c.value_coef);
    c.max_grad_norm = j.value("max_grad_norm", c.max_grad_norm);
    c.reward_scale = j.value("reward_scale", c.reward_scale);
    c.rollout_length = j.value("rollout_length", c.rollout_length);
    c.num_envs = j.value("num_envs", c.num_envs);
    c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
    c.horizon = j.value("horizon", c.horizon);
    c.layouts = j.value("layouts", c.layouts);
    if (j.contains("arch")) c.arch = agents::ArchVariant::parse(j["arch"].get<std::string>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace fcp::training
