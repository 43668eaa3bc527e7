#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "fcp/agents/controller.hpp"
#include "fcp/agents/policy.hpp"

namespace fcp::agents {

// Concatenates the last k feature vectors, newest first. Before k frames
// have been seen the missing ones are zeros.
class FrameStack {
 public:
  explicit FrameStack(int frames) : frames_(frames) {}

  void clear() { history_.clear(); }
  void push(const env::FeatureVector& f);
  // Appends the stacked observation to out.
  void write(std::vector<float>& out) const;
  int frames() const { return frames_; }

 private:
  int frames_;
  std::deque<env::FeatureVector> history_;
};

class NeuralController final : public Controller {
 public:
  NeuralController(std::shared_ptr<const PolicyParams> params, bool stochastic);

  void begin_episode(const env::WorldState& state, int seat) override;
  env::Action act(const env::WorldState& state, int seat, Rng& rng) override;

  const PolicyParams& params() const { return *params_; }

 private:
  std::shared_ptr<const PolicyParams> params_;
  bool stochastic_;
  FrameStack stack_;
  std::vector<float> obs_;
};

}  // namespace fcp::agents
