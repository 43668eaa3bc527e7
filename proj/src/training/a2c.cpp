#include "a2c.hpp"

#include <cmath>

#include "fcp/env/observation.hpp"
#include "fcp/training/train.hpp"

namespace fcp::training::detail {

void Adam::step(std::vector<float>& weights, const std::vector<float>& grad) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double g = grad[i];
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g;
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g * g;
    weights[i] -= static_cast<float>(lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps));
  }
}

A2C::A2C(const TrainConfig& config, std::vector<Learner*> learners, SeatingFn seating,
         std::uint64_t seed)
    : config_(config), learners_(std::move(learners)), seating_(std::move(seating)), rng_(seed) {
  for (const auto& name : config_.layouts) layouts_.push_back(env::builtin_layout(name));
  slots_.resize(config_.num_envs);
  for (int i = 0; i < config_.num_envs; ++i) {
    slots_[i].rng = rng_.fork(static_cast<std::uint64_t>(i) + 1);
    begin_episode(slots_[i]);
  }
  buffer_.resize(static_cast<std::size_t>(config_.steps_per_iteration()) * 2);
}

void A2C::begin_episode(Slot& slot) {
  const auto& layout = layouts_[slot.rng.below(static_cast<int>(layouts_.size()))];
  slot.seating = seating_(slot.rng);
  slot.state = env::reset(layout, slot.rng.next_u64(), config_.horizon);
  for (int seat = 0; seat < 2; ++seat) {
    const int l = slot.seating.learner[seat];
    slot.stacks[seat] = agents::FrameStack(l >= 0 ? learners_[l]->params.arch.frames() : 1);
    slot.fresh[seat] = false;
    if (l < 0) slot.seating.partner[seat]->begin_episode(slot.state, seat);
  }
  slot.episode_return = 0;
}

const std::vector<float>& A2C::observe(Slot& slot, int seat) {
  if (!slot.fresh[seat]) {
    slot.stacks[seat].push(env::feature_observation(slot.state, seat));
    slot.obs[seat].clear();
    slot.stacks[seat].write(slot.obs[seat]);
    slot.fresh[seat] = true;
  }
  return slot.obs[seat];
}

std::int64_t A2C::iterate() {
  used_ = 0;
  for (int t = 0; t < config_.rollout_length; ++t) {
    for (int si = 0; si < static_cast<int>(slots_.size()); ++si) {
      Slot& slot = slots_[si];
      env::JointAction joint{};
      const std::size_t first = used_;
      for (int seat = 0; seat < 2; ++seat) {
        const int l = slot.seating.learner[seat];
        if (l < 0) {
          joint[seat] = slot.seating.partner[seat]->act(slot.state, seat, slot.rng);
          continue;
        }
        Transition& tr = buffer_[used_++];
        tr.slot = si;
        tr.seat = seat;
        tr.learner = l;
        const Learner& learner = *learners_[l];
        learner.net.forward(learner.params.weights, observe(slot, seat), tr.acts);
        const auto probs = agents::Mlp::softmax(tr.acts.logits);
        tr.action = slot.rng.categorical(probs);
        joint[seat] = static_cast<env::Action>(tr.action);
      }
      const auto outcome = env::step(slot.state, joint);
      slot.fresh = {false, false};
      slot.episode_return += outcome.rewards[0];
      for (std::size_t i = first; i < used_; ++i) {
        buffer_[i].reward =
            static_cast<float>(outcome.rewards[buffer_[i].seat] * config_.reward_scale);
        buffer_[i].done = outcome.done;
      }
      if (outcome.done) {
        ++episodes_;
        return_sum_ += slot.episode_return;
        ++return_count_;
        begin_episode(slot);
      }
    }
  }

  // n-step returns, bootstrapped from the value of the state after the rollout.
  std::vector<std::array<float, 2>> running(slots_.size(), {0.0f, 0.0f});
  for (std::size_t si = 0; si < slots_.size(); ++si) {
    for (int seat = 0; seat < 2; ++seat) {
      const int l = slots_[si].seating.learner[seat];
      if (l < 0) continue;
      agents::Mlp::Activations acts;
      learners_[l]->net.forward(learners_[l]->params.weights, observe(slots_[si], seat), acts);
      running[si][seat] = acts.value;
    }
  }
  const float gamma = static_cast<float>(config_.discount);
  for (std::size_t i = used_; i-- > 0;) {
    Transition& tr = buffer_[i];
    float& r = running[tr.slot][tr.seat];
    r = tr.reward + (tr.done ? 0.0f : gamma * r);
    tr.ret = r;
  }

  std::vector<std::size_t> counts(learners_.size(), 0);
  for (std::size_t i = 0; i < used_; ++i) ++counts[buffer_[i].learner];
  for (std::size_t l = 0; l < learners_.size(); ++l) {
    if (counts[l] > 0) update(static_cast<int>(l), counts[l]);
  }
  return config_.steps_per_iteration();
}

void A2C::update(int l, std::size_t count) {
  Learner& learner = *learners_[l];
  grad_.assign(learner.params.weights.size(), 0.0f);
  const float inv = 1.0f / static_cast<float>(count);
  const float beta = static_cast<float>(config_.entropy_bonus);
  const float cv = static_cast<float>(config_.value_coef);
  double loss = 0.0;
  for (std::size_t i = 0; i < used_; ++i) {
    const Transition& tr = buffer_[i];
    if (tr.learner != l) continue;
    const auto probs = agents::Mlp::softmax(tr.acts.logits);
    const float adv = tr.ret - tr.acts.value;
    double entropy = 0.0;
    std::array<double, env::kNumActions> logp{};
    for (int a = 0; a < env::kNumActions; ++a) {
      logp[a] = std::log(std::max(probs[a], 1e-12));
      entropy -= probs[a] * logp[a];
    }
    std::array<float, env::kNumActions> dlogits{};
    for (int a = 0; a < env::kNumActions; ++a) {
      const double onehot = a == tr.action ? 1.0 : 0.0;
      dlogits[a] = static_cast<float>(
          (adv * (probs[a] - onehot) + beta * probs[a] * (logp[a] + entropy)) * inv);
    }
    const float dvalue = cv * (tr.acts.value - tr.ret) * inv;
    loss += -adv * logp[tr.action] - beta * entropy + 0.5 * cv * adv * adv;
    learner.net.backward(learner.params.weights, tr.acts, dlogits, dvalue, grad_);
  }
  double norm2 = 0.0;
  for (float g : grad_) norm2 += static_cast<double>(g) * g;
  if (!std::isfinite(loss) || !std::isfinite(norm2)) {
    throw TrainingDiverged("non-finite loss or gradient during training");
  }
  const double norm = std::sqrt(norm2);
  if (config_.max_grad_norm > 0.0 && norm > config_.max_grad_norm) {
    const float scale = static_cast<float>(config_.max_grad_norm / norm);
    for (float& g : grad_) g *= scale;
  }
  learner.adam.step(learner.params.weights, grad_);
}

double A2C::take_mean_return() {
  const double mean = return_count_ ? static_cast<double>(return_sum_) / return_count_ : 0.0;
  return_sum_ = 0;
  return_count_ = 0;
  return mean;
}

}  // namespace fcp::training::detail
