#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcp/common/rng.hpp"
#include "fcp/env/observation.hpp"
#include "fcp/env/world.hpp"

namespace fcp::agents {

enum class Memory : std::uint8_t { Reactive, FrameStack };

struct ArchVariant {
  int hidden_width = 64;
  Memory memory = Memory::Reactive;

  static constexpr int kStackedFrames = 4;

  int frames() const { return memory == Memory::FrameStack ? kStackedFrames : 1; }
  int input_size() const { return frames() * static_cast<int>(env::feature::kSize); }

  // "w16", "w64", "w16-fs4", "w64-fs4".
  std::string id() const;
  static ArchVariant parse(std::string_view id);
  static std::array<ArchVariant, 4> all();

  friend bool operator==(const ArchVariant&, const ArchVariant&) = default;
};

// Number of parameters of the two-hidden-layer tanh MLP with input d and
// width h: h*d + h (layer 1), h*h + h (layer 2), 6*h + 6 (policy head),
// h + 1 (value head).
std::size_t weight_count(const ArchVariant& arch);

struct PolicyParams {
  ArchVariant arch;
  std::uint64_t seed = 0;
  std::vector<float> weights;
  std::int64_t step_trained = 0;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

// LeCun-normal weights, zero biases, policy head scaled down so a fresh
// policy is close to uniform.
PolicyParams init_policy(const ArchVariant& arch, std::uint64_t seed);

struct PolicyOutput {
  env::Action action = env::Action::Noop;
  std::array<double, env::kNumActions> probs{};
  double value = 0.0;
};

// Throws ValidationError if observation.size() != arch.input_size().
// Deterministic mode returns the argmax, lowest index on ties, and never
// touches rng.
PolicyOutput act(const PolicyParams& params, std::span<const float> observation, bool stochastic,
                 Rng& rng);

// Forward/backward passes shared by the learners.
class Mlp {
 public:
  explicit Mlp(const ArchVariant& arch);

  struct Activations {
    std::vector<float> input;  // after input scaling
    std::vector<float> h1;
    std::vector<float> h2;
    std::array<float, env::kNumActions> logits{};
    float value = 0.0f;
  };

  void forward(std::span<const float> weights, std::span<const float> observation,
               Activations& out) const;
  // Accumulates d(loss)/d(weights) into grad given the loss gradients with
  // respect to the logits and the value output.
  void backward(std::span<const float> weights, const Activations& acts,
                const std::array<float, env::kNumActions>& dlogits, float dvalue,
                std::span<float> grad) const;

  static std::array<double, env::kNumActions> softmax(
      const std::array<float, env::kNumActions>& logits);

  int input_size() const { return d_; }
  int hidden() const { return h_; }

 private:
  int d_;
  int h_;
  std::size_t w1_, b1_, w2_, b2_, wpi_, bpi_, wv_, bv_;
};

}  // namespace fcp::agents
