#include "fcp/agents/policy.hpp"

#include <algorithm>
#include <cmath>

#include "fcp/common/error.hpp"

namespace fcp::agents {

namespace feature = env::feature;

std::string ArchVariant::id() const {
  std::string s = "w" + std::to_string(hidden_width);
  if (memory == Memory::FrameStack) s += "-fs4";
  return s;
}

ArchVariant ArchVariant::parse(std::string_view id) {
  for (const auto& a : all()) {
    if (a.id() == id) return a;
  }
  throw ValidationError("unknown architecture '" + std::string(id) + "'");
}

std::array<ArchVariant, 4> ArchVariant::all() {
  return {ArchVariant{16, Memory::Reactive}, ArchVariant{64, Memory::Reactive},
          ArchVariant{16, Memory::FrameStack}, ArchVariant{64, Memory::FrameStack}};
}

std::size_t weight_count(const ArchVariant& arch) {
  const std::size_t d = arch.input_size();
  const std::size_t h = arch.hidden_width;
  return h * d + h + h * h + h + env::kNumActions * h + env::kNumActions + h + 1;
}

Mlp::Mlp(const ArchVariant& arch) : d_(arch.input_size()), h_(arch.hidden_width) {
  const std::size_t d = d_, h = h_;
  w1_ = 0;
  b1_ = w1_ + h * d;
  w2_ = b1_ + h;
  b2_ = w2_ + h * h;
  wpi_ = b2_ + h;
  bpi_ = wpi_ + env::kNumActions * h;
  wv_ = bpi_ + env::kNumActions;
  bv_ = wv_ + h;
}

namespace {

// Coordinates and offsets are in cells; bring them to roughly unit range.
float input_scale(int i) {
  const std::size_t f = static_cast<std::size_t>(i) % feature::kSize;
  const bool spatial = f < feature::kOrientation ||
                       (f >= feature::kPartner && f < feature::kPots) ||
                       (f >= feature::kTargets && f < feature::kLayout);
  return spatial ? 0.125f : 1.0f;
}

}  // namespace

void Mlp::forward(std::span<const float> w, std::span<const float> obs, Activations& out) const {
  out.input.resize(d_);
  out.h1.resize(h_);
  out.h2.resize(h_);
  for (int i = 0; i < d_; ++i) out.input[i] = obs[i] * input_scale(i);
  for (int j = 0; j < h_; ++j) {
    const float* row = &w[w1_ + static_cast<std::size_t>(j) * d_];
    float acc = w[b1_ + j];
    for (int i = 0; i < d_; ++i) acc += row[i] * out.input[i];
    out.h1[j] = std::tanh(acc);
  }
  for (int j = 0; j < h_; ++j) {
    const float* row = &w[w2_ + static_cast<std::size_t>(j) * h_];
    float acc = w[b2_ + j];
    for (int i = 0; i < h_; ++i) acc += row[i] * out.h1[i];
    out.h2[j] = std::tanh(acc);
  }
  for (int a = 0; a < env::kNumActions; ++a) {
    const float* row = &w[wpi_ + static_cast<std::size_t>(a) * h_];
    float acc = w[bpi_ + a];
    for (int i = 0; i < h_; ++i) acc += row[i] * out.h2[i];
    out.logits[a] = acc;
  }
  float v = w[bv_];
  for (int i = 0; i < h_; ++i) v += w[wv_ + i] * out.h2[i];
  out.value = v;
}

void Mlp::backward(std::span<const float> w, const Activations& acts,
                   const std::array<float, env::kNumActions>& dlogits, float dvalue,
                   std::span<float> grad) const {
  std::vector<float> dh2(h_, 0.0f), dh1(h_, 0.0f);
  for (int a = 0; a < env::kNumActions; ++a) {
    const float g = dlogits[a];
    if (g == 0.0f) continue;
    float* grow = &grad[wpi_ + static_cast<std::size_t>(a) * h_];
    const float* row = &w[wpi_ + static_cast<std::size_t>(a) * h_];
    for (int i = 0; i < h_; ++i) {
      grow[i] += g * acts.h2[i];
      dh2[i] += g * row[i];
    }
    grad[bpi_ + a] += g;
  }
  for (int i = 0; i < h_; ++i) {
    grad[wv_ + i] += dvalue * acts.h2[i];
    dh2[i] += dvalue * w[wv_ + i];
  }
  grad[bv_] += dvalue;

  for (int j = 0; j < h_; ++j) {
    const float dz = dh2[j] * (1.0f - acts.h2[j] * acts.h2[j]);
    float* grow = &grad[w2_ + static_cast<std::size_t>(j) * h_];
    const float* row = &w[w2_ + static_cast<std::size_t>(j) * h_];
    for (int i = 0; i < h_; ++i) {
      grow[i] += dz * acts.h1[i];
      dh1[i] += dz * row[i];
    }
    grad[b2_ + j] += dz;
  }
  for (int j = 0; j < h_; ++j) {
    const float dz = dh1[j] * (1.0f - acts.h1[j] * acts.h1[j]);
    float* grow = &grad[w1_ + static_cast<std::size_t>(j) * d_];
    for (int i = 0; i < d_; ++i) grow[i] += dz * acts.input[i];
    grad[b1_ + j] += dz;
  }
}

std::array<double, env::kNumActions> Mlp::softmax(
    const std::array<float, env::kNumActions>& logits) {
  std::array<double, env::kNumActions> p{};
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (int a = 0; a < env::kNumActions; ++a) {
    p[a] = std::exp(static_cast<double>(logits[a]) - m);
    sum += p[a];
  }
  for (auto& x : p) x /= sum;
  return p;
}

PolicyParams init_policy(const ArchVariant& arch, std::uint64_t seed) {
  if (arch.hidden_width <= 0) throw ValidationError("hidden width must be positive");
  PolicyParams params{arch, seed, std::vector<float>(weight_count(arch), 0.0f), 0};
  Rng rng(derive_seed(seed, 0x1417));
  const std::size_t d = arch.input_size(), h = arch.hidden_width;
  auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in, double gain) {
    const double sd = gain / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i) {
      params.weights[offset + i] = static_cast<float>(rng.normal() * sd);
    }
  };
  std::size_t off = 0;
  fill(off, h * d, d, 1.0);
  off += h * d + h;
  fill(off, h * h, h, 1.0);
  off += h * h + h;
  fill(off, env::kNumActions * h, h, 0.01);
  off += env::kNumActions * h + env::kNumActions;
  fill(off, h, h, 1.0);
  return params;
}

PolicyOutput act(const PolicyParams& params, std::span<const float> observation, bool stochastic,
                 Rng& rng) {
  if (static_cast<int>(observation.size()) != params.arch.input_size()) {
    throw ValidationError("observation has " + std::to_string(observation.size()) +
                          " features, policy " + params.arch.id() + " expects " +
                          std::to_string(params.arch.input_size()));
  }
  if (params.weights.size() != weight_count(params.arch)) {
    throw ValidationError("policy weight vector has the wrong length");
  }
  const Mlp net(params.arch);
  Mlp::Activations acts;
  net.forward(params.weights, observation, acts);
  PolicyOutput out;
  out.probs = Mlp::softmax(acts.logits);
  out.value = acts.value;
  int choice = 0;
  if (stochastic) {
    choice = rng.categorical(out.probs);
  } else {
    for (int a = 1; a < env::kNumActions; ++a) {
      if (out.probs[a] > out.probs[choice]) choice = a;
    }
  }
  out.action = static_cast<env::Action>(choice);
  return out;
}

}  // namespace fcp::agents
