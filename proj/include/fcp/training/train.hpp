#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcp/agents/agent_spec.hpp"
#include "fcp/common/error.hpp"
#include "fcp/training/config.hpp"

namespace fcp::training {

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

struct CheckpointRecord {
  int index = 0;
  std::int64_t step = 0;
  // Mean deliveries over the config's K evaluation episodes at save time.
  double reward = 0.0;
  std::shared_ptr<const agents::PolicyParams> params;
};

struct CurvePoint {
  std::int64_t step = 0;
  double reward = 0.0;        // same measurement as the checkpoint
  double train_return = 0.0;  // mean shared return of training episodes since the last sample
};

struct RunRecord {
  std::string run_id;
  agents::Method method = agents::Method::SP;
  TrainConfig config;
  std::uint64_t seed = 0;
  std::vector<CheckpointRecord> checkpoints;
  std::vector<CurvePoint> curve;
  // How often each learner (population play) or pool entry (best response)
  // was drawn, one count per seat assignment.
  std::vector<std::int64_t> draw_counts;
  std::int64_t episodes = 0;

  const CheckpointRecord& final_checkpoint() const { return checkpoints.back(); }
};

RunRecord train_self_play(const TrainConfig& config, const agents::ArchVariant& arch,
                          std::uint64_t seed);

// N co-trained policies; each episode seats two members drawn uniformly with
// replacement and both learn from it. A population of one is self-play.
std::vector<RunRecord> train_population_play(const TrainConfig& config, std::uint64_t seed);

// The pairing rule used by population play: an ordered pair of members.
std::pair<int, int> draw_pair(int population, Rng& rng);

enum class Stage : std::uint8_t { Init, Mid, Final };
std::string_view to_string(Stage s);

struct FilteredCheckpoints {
  CheckpointRecord init;
  CheckpointRecord mid;
  CheckpointRecord final;
};

// init = first, final = last, mid = reward closest to half the final reward
// with the earliest index winning ties. Order of run.checkpoints is
// irrelevant. Throws ValidationError with fewer than 3 checkpoints.
FilteredCheckpoints filter_checkpoints(const RunRecord& run);

struct PoolEntry {
  agents::AgentSpec agent;
  double reward = 0.0;
  Stage stage = Stage::Final;
};

struct CheckpointPool {
  std::vector<PoolEntry> entries;
  std::vector<std::string> source_runs;
};

// Architecture of stage-1 partner i out of N: config.arch for plain
// variants, N/4 consecutive partners per variant for the +A ones.
agents::ArchVariant partner_arch(const TrainConfig& config, agents::Method variant, int i);

// Trains the N stage-1 self-play partners (run i uses seed derive_seed(seed, i)).
std::vector<RunRecord> train_partners(const TrainConfig& config, agents::Method variant,
                                      std::uint64_t seed);

// FCP / FCP+A keep {init, mid, final} per partner; FCP-T / FCP-T+A keep
// only {final}. Throws ValidationError for other methods, for a run count
// different from N, and for +A when N is not a multiple of 4.
CheckpointPool build_fcp_pool(const TrainConfig& config, agents::Method variant,
                              const std::vector<RunRecord>& partners);

struct BestResponse {
  agents::AgentSpec agent;
  RunRecord run;
};

// One learner against partners drawn uniformly from the frozen pool each
// episode; the learner's seat is random per episode. Checkpoint rewards are
// mean deliveries with pool partners.
BestResponse train_best_response(const CheckpointPool& pool, const TrainConfig& config,
                                 std::uint64_t seed, agents::Method label = agents::Method::FCP);

// Best response to a single frozen BC model trained on the partner split.
BestResponse train_bcp(const agents::AgentSpec& bc_partner, const TrainConfig& config,
                       std::uint64_t seed);

// Full FCP pipeline (partners, pool, best response).
BestResponse train_fcp(const TrainConfig& config, agents::Method variant, std::uint64_t seed);

nlohmann::json manifest(const RunRecord& run);

}  // namespace fcp::training
