#include "fcp/agents/neural.hpp"

namespace fcp::agents {

void FrameStack::push(const env::FeatureVector& f) {
  history_.push_front(f);
  while (static_cast<int>(history_.size()) > frames_) history_.pop_back();
}

void FrameStack::write(std::vector<float>& out) const {
  for (int k = 0; k < frames_; ++k) {
    if (k < static_cast<int>(history_.size())) {
      out.insert(out.end(), history_[k].begin(), history_[k].end());
    } else {
      out.insert(out.end(), env::feature::kSize, 0.0f);
    }
  }
}

NeuralController::NeuralController(std::shared_ptr<const PolicyParams> params, bool stochastic)
    : params_(std::move(params)), stochastic_(stochastic), stack_(params_->arch.frames()) {}

void NeuralController::begin_episode(const env::WorldState&, int) { stack_.clear(); }

env::Action NeuralController::act(const env::WorldState& state, int seat, Rng& rng) {
  stack_.push(env::feature_observation(state, seat));
  obs_.clear();
  stack_.write(obs_);
  return agents::act(*params_, obs_, stochastic_, rng).action;
}

}  // namespace fcp::agents
