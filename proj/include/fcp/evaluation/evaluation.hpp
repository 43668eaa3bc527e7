#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcp/agents/agent_spec.hpp"
#include "fcp/env/episode_log.hpp"
#include "fcp/training/train.hpp"

namespace fcp::evaluation {

enum class PopulationKind : std::uint8_t { HumanProxy, DiverseSP, RandomInit };
std::string_view to_string(PopulationKind k);
PopulationKind population_kind_from_string(std::string_view s);

struct HeldOutPopulation {
  PopulationKind kind = PopulationKind::DiverseSP;
  std::vector<agents::AgentSpec> members;
};

// Self-play runs for held-out populations: seeds x 4 architecture variants,
// run (s, a) seeded with derive_seed(base_seed, s * 4 + a).
std::vector<training::RunRecord> train_heldout_runs(const training::TrainConfig& config, int seeds,
                                                    std::uint64_t base_seed);

struct HeldOutSources {
  std::vector<training::RunRecord> sp_runs;  // for DiverseSP / RandomInit
  std::optional<agents::AgentSpec> proxy;    // BC on the proxy split
};

// DiverseSP: {init, mid, final} of every run. RandomInit: the init
// checkpoint of the first run of each seed (runs ordered as produced by
// train_heldout_runs, 4 per seed). HumanProxy: the proxy model.
// Throws ValidationError if any member's seed or run id appears in
// `excluded` (the evaluated agents' own seeds and training partners).
HeldOutPopulation build_heldout(PopulationKind kind, const HeldOutSources& sources,
                                const std::set<std::string>& excluded);

// Identifiers an evaluated agent must not share with a held-out member:
// its own run and seed and those of every pool entry it trained with.
std::set<std::string> provenance_keys(const agents::AgentSpec& agent);
std::set<std::string> provenance_keys(const training::CheckpointPool& pool);

struct EpisodeScore {
  int deliveries = 0;
  int deposits = 0;
  int total_return = 0;
  int agent_seat = 0;
};

struct CrossPlayCell {
  std::string agent;
  agents::Method method = agents::Method::SP;
  std::string member;
  std::string layout;
  std::vector<EpisodeScore> episodes;
  double mean_deliveries() const;
};

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;  // sample sd over agents (0 for a single agent)
  int agents = 0;
};

struct EvalReport {
  int horizon = 0;
  int episodes_per_cell = 0;
  std::uint64_t seed = 0;
  std::vector<CrossPlayCell> cells;

  // Per agent: mean deliveries over its cells on `layout` (all layouts
  // when empty); then mean +- sd across the method's agents.
  Aggregate aggregate(agents::Method method, const std::string& layout = "") const;
  std::vector<std::string> layouts() const;
  std::vector<agents::Method> methods() const;
};

struct CrossPlayOptions {
  int horizon = env::kDefaultHorizon;
  int episodes = 10;
  std::uint64_t seed = 0;
  bool stochastic = true;
  int threads = 1;
};

// Every (agent, member, layout) cell is played `episodes` times; the agent
// sits in seat e % 2 for episode e. Episode seeds depend only on the seed
// and the cell coordinates, so the report does not depend on threading.
EvalReport cross_play(const std::vector<agents::AgentSpec>& agents,
                      const HeldOutPopulation& population, const std::vector<std::string>& layouts,
                      const CrossPlayOptions& options);

struct BehaviorStats {
  std::array<double, 2> movement_fraction{0.0, 0.0};
  // Defined on 2-pot layouts for players with at least one pot use.
  std::array<std::optional<double>, 2> pot_preference_diff;
  bool pot_metric_applicable = false;
  int deliveries = 0;
};

BehaviorStats behavior_stats(const env::EpisodeLog& log);

// Rows HumanProxy, DiverseSP, RandomInit; columns FCP, FCP-T, FCP+A,
// FCP-T+A. Throws ValidationError if a variant or population is missing.
struct AblationTable {
  std::vector<PopulationKind> rows;
  std::vector<agents::Method> columns;
  std::vector<std::vector<Aggregate>> values;
  std::string format() const;
};
AblationTable ablation_table(const std::map<agents::Method, std::map<PopulationKind, EvalReport>>& reports);

struct PreferenceRecord {
  std::string session;
  std::array<int, 2> episodes{0, 0};
  std::string agent_a;
  std::string agent_b;
  std::string method_a;
  std::string method_b;
  int rating = 0;  // -2..+2, positive favours A
  std::int64_t timestamp_ms = 0;
};

nlohmann::json to_json(const PreferenceRecord& r);
PreferenceRecord preference_from_json(const nlohmann::json& j);

struct PreferenceMatrix {
  std::vector<std::string> methods;
  // [row][col]: mean signed preference for row over col.
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> ci95;  // half-width, normal approximation
  std::vector<std::vector<int>> count;
  double at(const std::string& row, const std::string& col) const;
};

// A record (A, B, s) counts as (A, B, s) and (B, A, -s). Records comparing
// a method with itself are ignored.
PreferenceMatrix preference_aggregate(const std::vector<PreferenceRecord>& records);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);
std::string to_csv(const EvalReport& report);

}  // namespace fcp::evaluation
