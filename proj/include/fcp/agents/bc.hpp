#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "fcp/agents/agent_spec.hpp"
#include "fcp/env/episode_log.hpp"

namespace fcp::agents {

enum class Split : std::uint8_t { Partner, Proxy };
std::string_view to_string(Split s);

// Trajectories are grouped by layout in input order; within each layout the
// even positions (0, 2, ...) form the partner split and the odd ones the
// proxy split. Returns indices into logs.
std::vector<std::size_t> split_indices(const std::vector<env::EpisodeLog>& logs, Split split);

struct BcSample {
  std::vector<float> observation;
  int action = 0;
};

// One sample per demonstrator seat and step. A log tagged "human_seat"
// contributes only that seat; otherwise both seats are demonstrations.
std::vector<BcSample> extract_samples(const env::EpisodeLog& log, const ArchVariant& arch);

struct BcHyper {
  ArchVariant arch{64, Memory::Reactive};
  int batch_size = 256;
  double learning_rate = 3e-4;
  int epochs = 150;
  // Self-play episodes per epoch for snapshot selection.
  int eval_episodes = 6;
  int eval_horizon = 300;
  std::uint64_t seed = 0;
};

// Records which trajectories bc_fit reads.
struct DataAccessAudit {
  std::set<std::size_t> read;
};

// Cross-entropy training on the chosen split. After every epoch the
// snapshot is scored by self-play deliveries on the split's layouts; the
// best-scoring snapshot is returned (later epochs win ties).
// Throws ValidationError on an empty split.
AgentSpec bc_fit(const std::vector<env::EpisodeLog>& logs, Split split, const BcHyper& hyper,
                 DataAccessAudit* audit = nullptr);

// Trains on explicit samples. Throws ValidationError when a sample's length
// differs from the architecture's input size or when samples is empty.
PolicyParams bc_fit_samples(const std::vector<BcSample>& samples,
                            const std::vector<std::string>& layouts, const BcHyper& hyper);

// Fraction of samples whose label equals the deterministic policy action.
double action_agreement(const PolicyParams& params, const std::vector<BcSample>& samples);

}  // namespace fcp::agents
