#include "fcp/agents/bc.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "fcp/agents/neural.hpp"
#include "fcp/agents/rollout.hpp"
#include "fcp/common/error.hpp"
#include "fcp/env/observation.hpp"

namespace fcp::agents {

std::string_view to_string(Split s) { return s == Split::Partner ? "partner" : "proxy"; }

std::vector<std::size_t> split_indices(const std::vector<env::EpisodeLog>& logs, Split split) {
  std::map<std::string, int> seen;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const int k = seen[logs[i].header.layout]++;
    if ((k % 2 == 0) == (split == Split::Partner)) out.push_back(i);
  }
  return out;
}

std::vector<BcSample> extract_samples(const env::EpisodeLog& log, const ArchVariant& arch) {
  const auto layout = env::builtin_layout(log.header.layout);
  const auto states = env::replay_states(log, layout);
  std::vector<int> seats{0, 1};
  if (const auto human = log.tag("human_seat")) seats = {std::stoi(*human)};
  std::vector<BcSample> out;
  for (int seat : seats) {
    FrameStack stack(arch.frames());
    for (std::size_t t = 0; t < log.steps.size(); ++t) {
      stack.push(env::feature_observation(states[t], seat));
      BcSample s;
      stack.write(s.observation);
      s.action = static_cast<int>(log.steps[t].actions[seat]);
      out.push_back(std::move(s));
    }
  }
  return out;
}

namespace {

double selfplay_deliveries(const PolicyParams& params, const std::vector<std::string>& layouts,
                           const BcHyper& hyper) {
  auto shared = std::make_shared<const PolicyParams>(params);
  NeuralController a(shared, true), b(shared, true);
  double total = 0.0;
  for (int k = 0; k < hyper.eval_episodes; ++k) {
    const auto layout = env::builtin_layout(layouts[k % layouts.size()]);
    total += play_for_deliveries(layout, derive_seed(hyper.seed, 0xbc00 + k), hyper.eval_horizon,
                                 {&a, &b});
  }
  return total / std::max(1, hyper.eval_episodes);
}

}  // namespace

PolicyParams bc_fit_samples(const std::vector<BcSample>& samples,
                            const std::vector<std::string>& layouts, const BcHyper& hyper) {
  if (samples.empty()) throw ValidationError("bc_fit: no training samples");
  for (const auto& s : samples) {
    if (static_cast<int>(s.observation.size()) != hyper.arch.input_size()) {
      throw ValidationError("bc_fit: sample has " + std::to_string(s.observation.size()) +
                            " features, architecture " + hyper.arch.id() + " expects " +
                            std::to_string(hyper.arch.input_size()));
    }
  }
  PolicyParams params = init_policy(hyper.arch, hyper.seed);
  const Mlp net(hyper.arch);
  std::vector<double> m(params.weights.size(), 0.0), v(params.weights.size(), 0.0);
  std::vector<float> grad(params.weights.size());
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(hyper.seed, 0xbc));
  Mlp::Activations acts;
  std::int64_t t = 0;

  PolicyParams best = params;
  double best_score = -1.0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0f);
      const float inv = 1.0f / static_cast<float>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = samples[order[k]];
        net.forward(params.weights, s.observation, acts);
        const auto p = Mlp::softmax(acts.logits);
        std::array<float, env::kNumActions> dlogits{};
        for (int a = 0; a < env::kNumActions; ++a) {
          dlogits[a] = static_cast<float>(p[a] - (a == s.action ? 1.0 : 0.0)) * inv;
        }
        net.backward(params.weights, acts, dlogits, 0.0f, grad);
      }
      ++t;
      constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
      for (std::size_t i = 0; i < grad.size(); ++i) {
        m[i] = b1 * m[i] + (1 - b1) * grad[i];
        v[i] = b2 * v[i] + (1 - b2) * static_cast<double>(grad[i]) * grad[i];
        params.weights[i] -=
            static_cast<float>(hyper.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps));
      }
    }
    params.step_trained = static_cast<std::int64_t>(epoch + 1) * samples.size();
    const double score = selfplay_deliveries(params, layouts, hyper);
    if (score >= best_score) {
      best_score = score;
      best = params;
    }
  }
  return best;
}

AgentSpec bc_fit(const std::vector<env::EpisodeLog>& logs, Split split, const BcHyper& hyper,
                 DataAccessAudit* audit) {
  const auto indices = split_indices(logs, split);
  if (indices.empty()) {
    throw ValidationError("bc_fit: the " + std::string(to_string(split)) + " split is empty");
  }
  std::vector<BcSample> samples;
  std::vector<std::string> layouts;
  for (std::size_t i : indices) {
    if (audit) audit->read.insert(i);
    auto s = extract_samples(logs[i], hyper.arch);
    samples.insert(samples.end(), std::make_move_iterator(s.begin()),
                   std::make_move_iterator(s.end()));
    if (std::find(layouts.begin(), layouts.end(), logs[i].header.layout) == layouts.end()) {
      layouts.push_back(logs[i].header.layout);
    }
  }
  auto params = bc_fit_samples(samples, layouts, hyper);
  const std::string id = "BC-" + std::string(to_string(split)) + "-s" + std::to_string(hyper.seed);
  return neural_agent(id, Method::BC, std::move(params), {id, -1});
}

double action_agreement(const PolicyParams& params, const std::vector<BcSample>& samples) {
  if (samples.empty()) return 0.0;
  Rng unused(0);
  std::size_t hits = 0;
  for (const auto& s : samples) {
    if (static_cast<int>(act(params, s.observation, false, unused).action) == s.action) ++hits;
  }
  return static_cast<double>(hits) / samples.size();
}

}  // namespace fcp::agents
