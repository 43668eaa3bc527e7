#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcp/agents/agent_spec.hpp"
#include "fcp/env/episode_log.hpp"
#include "fcp/evaluation/evaluation.hpp"
#include "fcp/harness/store.hpp"
#include "fcp/training/train.hpp"

namespace fcp::harness {

// Artifact encodings. Checkpoints are stored once and referenced by id.
std::string put_run(ArtifactStore& store, const training::RunRecord& run);
training::RunRecord get_run(const ArtifactStore& store, const std::string& id);
std::string put_agent(ArtifactStore& store, const agents::AgentSpec& agent);
agents::AgentSpec get_agent(const ArtifactStore& store, const std::string& id);
std::string put_log(ArtifactStore& store, const env::EpisodeLog& log);
env::EpisodeLog get_log(const ArtifactStore& store, const std::string& id);

// Stage outputs are JSON documents with a "type" field: runs, agents, logs,
// population, report, figures or sweep.
std::vector<training::RunRecord> load_runs(const ArtifactStore& store, const nlohmann::json& out);
std::vector<agents::AgentSpec> load_agents(const ArtifactStore& store, const nlohmann::json& out);
std::vector<env::EpisodeLog> load_logs(const ArtifactStore& store, const nlohmann::json& out);

struct StageResult {
  std::string name;
  std::string artifact;
  bool executed = false;
};

struct PipelineResult {
  std::vector<StageResult> stages;  // in execution order
  std::string artifact(const std::string& stage) const;
  int executed_count() const;
};

using ProgressFn = std::function<void(const std::string& line)>;

// Runs the stages of a pipeline document in dependency order:
//
//   {"seed": 1,
//    "defaults": {<train config keys>},
//    "stages": [{"name": "...", "kind": "...", <kind parameters>}, ...]}
//
// Stage keys hash the kind, parameters, effective train config and the
// artifact ids of the dependencies; a stage whose key is bound to an
// existing artifact is skipped. Throws ValidationError on a dependency
// cycle, a reference to an unknown stage, or an unknown kind.
PipelineResult run_pipeline(const nlohmann::json& pipeline, ArtifactStore& store,
                            const ProgressFn& progress = {});
PipelineResult run_pipeline_file(const std::filesystem::path& path, ArtifactStore& store,
                                 const ProgressFn& progress = {});

// Dependency order of the stage names (validation only, nothing runs).
std::vector<std::string> stage_order(const nlohmann::json& pipeline);

env::ReplayVerdict replay(const ArtifactStore& store, const std::string& log_id);

// Writes charts and CSV for the given stage outputs into out_dir and
// returns the written file names. Reports become cross-play bar charts,
// run sets training curves, preference sets a heatmap, behavior sets the
// movement/pot charts. Nothing is written for an empty request.
std::vector<std::string> export_figures(const ArtifactStore& store,
                                        const std::vector<std::string>& output_ids,
                                        const std::filesystem::path& out_dir);

}  // namespace fcp::harness
